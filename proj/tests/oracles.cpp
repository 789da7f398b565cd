#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>

namespace oracle {

Eigen::MatrixXd dense_cooccurrence(const septopic::NormalizedRows& x,
                                   const septopic::NormalizedRows& xp, std::size_t m) {
  const auto w = static_cast<Eigen::Index>(x.num_words);
  const auto d = static_cast<Eigen::Index>(x.num_docs);
  Eigen::MatrixXd xd = Eigen::MatrixXd::Zero(w, d);
  Eigen::MatrixXd xpd = Eigen::MatrixXd::Zero(w, d);
  for (std::size_t i = 0; i < x.num_words; ++i) {
    for (const auto& [doc, value] : x.rows[i]) {
      xd(static_cast<Eigen::Index>(i), doc) = value;
    }
    for (const auto& [doc, value] : xp.rows[i]) {
      xpd(static_cast<Eigen::Index>(i), doc) = value;
    }
  }
  return static_cast<double>(m) * xd * xpd.transpose();
}

Eigen::MatrixXd expected_cooccurrence(const Eigen::MatrixXd& beta,
                                      const Eigen::MatrixXd& r, const Eigen::VectorXd& a) {
  const Eigen::VectorXd scale = beta * a;  // per-word expected frequency
  const Eigen::Index w = beta.rows();
  Eigen::MatrixXd e(w, w);
  for (Eigen::Index i = 0; i < w; ++i) {
    for (Eigen::Index j = 0; j < w; ++j) {
      const double numerator = (beta.row(i) * r * beta.row(j).transpose()).value();
      e(i, j) = numerator / (scale(i) * scale(j));
    }
  }
  return e;
}

double matrix_distance(const Eigen::MatrixXd& c, std::size_t i, std::size_t j) {
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  return c(ii, ii) - 2.0 * c(ii, jj) + c(jj, jj);
}

Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, int max_iter) {
  const Eigen::Index n = a.cols();
  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(static_cast<std::size_t>(n), false);
  Eigen::VectorXd residual = b;
  const double tol = 1e-12 * (1.0 + b.norm());

  for (int iter = 0; iter < max_iter; ++iter) {
    Eigen::VectorXd gradient = a.transpose() * residual;
    Eigen::Index best = -1;
    double best_value = tol;
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!passive[static_cast<std::size_t>(j)] && gradient(j) > best_value) {
        best_value = gradient(j);
        best = j;
      }
    }
    if (best < 0) break;  // KKT satisfied
    passive[static_cast<std::size_t>(best)] = true;

    // Inner loop: least squares on the passive set, stepping back whenever the
    // unconstrained solution leaves the nonnegative orthant.
    while (true) {
      std::vector<Eigen::Index> idx;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
      }
      Eigen::MatrixXd ap(a.rows(), static_cast<Eigen::Index>(idx.size()));
      for (std::size_t k = 0; k < idx.size(); ++k) ap.col(static_cast<Eigen::Index>(k)) = a.col(idx[k]);
      Eigen::VectorXd z = ap.colPivHouseholderQr().solve(b);

      double alpha = 1.0;
      for (std::size_t k = 0; k < idx.size(); ++k) {
        if (z(static_cast<Eigen::Index>(k)) <= 0.0) {
          const double xk = x(idx[k]);
          const double step = xk / (xk - z(static_cast<Eigen::Index>(k)));
          alpha = std::min(alpha, step);
        }
      }
      if (alpha >= 1.0) {
        x.setZero();
        for (std::size_t k = 0; k < idx.size(); ++k) x(idx[k]) = z(static_cast<Eigen::Index>(k));
        break;
      }
      for (std::size_t k = 0; k < idx.size(); ++k) {
        const Eigen::Index j = idx[k];
        x(j) += alpha * (z(static_cast<Eigen::Index>(k)) - x(j));
        if (x(j) <= 1e-14) {
          x(j) = 0.0;
          passive[static_cast<std::size_t>(j)] = false;
        }
      }
    }
    residual = b - a * x;
  }
  return x;
}

bool in_convex_hull(const Eigen::MatrixXd& points, const Eigen::RowVectorXd& query,
                    double tol) {
  if (points.rows() == 0) return false;
  const double penalty = 100.0;
  Eigen::MatrixXd a(points.cols() + 1, points.rows());
  a.topRows(points.cols()) = points.transpose();
  a.bottomRows(1).setConstant(penalty);
  Eigen::VectorXd b(points.cols() + 1);
  b.head(points.cols()) = query.transpose();
  b(points.cols()) = penalty;

  const Eigen::VectorXd weights = nnls(a, b);
  const double fit = (points.transpose() * weights - query.transpose())
                         .lpNorm<Eigen::Infinity>();
  const double mass = std::abs(weights.sum() - 1.0);
  return fit <= tol && mass <= tol;
}

std::vector<char> extreme_rows(const Eigen::MatrixXd& rows, double tol) {
  const Eigen::Index n = rows.rows();
  // Group byte-near-identical rows so duplicates share one verdict.
  std::vector<Eigen::Index> group(static_cast<std::size_t>(n));
  std::vector<Eigen::Index> leaders;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::Index found = -1;
    for (const Eigen::Index lead : leaders) {
      if ((rows.row(i) - rows.row(lead)).lpNorm<Eigen::Infinity>() <= 1e-12) {
        found = lead;
        break;
      }
    }
    if (found < 0) {
      leaders.push_back(i);
      found = i;
    }
    group[static_cast<std::size_t>(i)] = found;
  }

  std::vector<char> extreme(static_cast<std::size_t>(n), 0);
  for (const Eigen::Index lead : leaders) {
    std::vector<Eigen::Index> others;
    for (const Eigen::Index other : leaders) {
      if (other != lead) others.push_back(other);
    }
    Eigen::MatrixXd pts(static_cast<Eigen::Index>(others.size()), rows.cols());
    for (std::size_t k = 0; k < others.size(); ++k) pts.row(static_cast<Eigen::Index>(k)) = rows.row(others[k]);
    const bool is_extreme =
        others.empty() || !in_convex_hull(pts, rows.row(lead), tol);
    if (is_extreme) {
      for (Eigen::Index i = 0; i < n; ++i) {
        if (group[static_cast<std::size_t>(i)] == lead) extreme[static_cast<std::size_t>(i)] = 1;
      }
    }
  }
  return extreme;
}

double brute_force_assignment_cost(const Eigen::MatrixXd& cost) {
  const Eigen::Index k = cost.rows();
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(k));
  std::iota(perm.begin(), perm.end(), 0);
  double best = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < k; ++i) total += cost(i, perm[static_cast<std::size_t>(i)]);
    best = std::min(best, total);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

double grid_qp_minimum(const Eigen::MatrixXd& quad, const Eigen::VectorXd& lin) {
  if (quad.rows() != 3) throw std::invalid_argument("grid oracle is 3-dimensional");
  const auto objective = [&](double b0, double b1) {
    Eigen::Vector3d b(b0, b1, 1.0 - b0 - b1);
    return b.dot(quad * b) - 2.0 * lin.dot(b);
  };

  double best0 = 0.0, best1 = 0.0;
  double best = std::numeric_limits<double>::infinity();
  const auto scan = [&](double lo0, double hi0, double lo1, double hi1, double step) {
    for (double b0 = std::max(0.0, lo0); b0 <= std::min(1.0, hi0) + step / 2; b0 += step) {
      const double cap = std::min(1.0 - b0, hi1);
      for (double b1 = std::max(0.0, lo1); b1 <= cap + step / 2; b1 += step) {
        if (b0 + b1 > 1.0 + step / 2) break;
        const double c0 = std::min(b0, 1.0);
        const double c1 = std::min(b1, 1.0 - c0);
        const double value = objective(c0, c1);
        if (value < best) {
          best = value;
          best0 = c0;
          best1 = c1;
        }
      }
    }
  };

  scan(0.0, 1.0, 0.0, 1.0, 1e-3);
  scan(best0 - 2e-3, best0 + 2e-3, best1 - 2e-3, best1 + 2e-3, 1e-5);
  scan(best0 - 2e-5, best0 + 2e-5, best1 - 2e-5, best1 + 2e-5, 1e-7);
  return best;
}

std::vector<int> best_normalized_cut(const Eigen::MatrixXd& affinity) {
  const auto n = static_cast<std::size_t>(affinity.rows());
  if (n < 2 || n > 20) throw std::invalid_argument("cut oracle expects 2..20 points");
  const Eigen::VectorXd degree = affinity.rowwise().sum();

  double best = std::numeric_limits<double>::infinity();
  std::uint32_t best_mask = 1;
  for (std::uint32_t mask = 1; mask < (1u << (n - 1)); ++mask) {
    // Point n-1 stays on side B, halving the symmetric search space.
    double cut = 0.0, vol_a = 0.0, vol_b = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const bool in_a = i + 1 < n && ((mask >> i) & 1u);
      (in_a ? vol_a : vol_b) += degree(static_cast<Eigen::Index>(i));
      for (std::size_t j = 0; j < n; ++j) {
        const bool j_in_a = j + 1 < n && ((mask >> j) & 1u);
        if (in_a && !j_in_a) cut += affinity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      }
    }
    if (vol_a <= 0.0 || vol_b <= 0.0) continue;
    const double ncut = cut / vol_a + cut / vol_b;
    if (ncut < best) {
      best = ncut;
      best_mask = mask;
    }
  }

  std::vector<int> labels(n, 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if ((best_mask >> i) & 1u) labels[i] = 0;
  }
  return labels;
}

Eigen::MatrixXd dense_uci_counts(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::size_t num_docs = 0, num_words = 0, nnz = 0;
  in >> num_docs >> num_words >> nnz;
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(num_words),
                                                 static_cast<Eigen::Index>(num_docs));
  for (std::size_t k = 0; k < nnz; ++k) {
    std::size_t doc = 0, word = 0;
    double value = 0.0;
    in >> doc >> word >> value;
    counts(static_cast<Eigen::Index>(word - 1), static_cast<Eigen::Index>(doc - 1)) += value;
  }
  if (!in) throw std::runtime_error("truncated docword file " + path.string());
  return counts;
}

}  // namespace oracle
