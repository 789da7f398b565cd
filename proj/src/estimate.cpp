#include "septopic/estimate.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "septopic/matrix_io.hpp"
#include "septopic/parallel.hpp"

namespace septopic {

namespace {

/// Upper bound on the spectral norm of a symmetric matrix via power
/// iteration.  The start vector carries an index ramp so it cannot be
/// orthogonal to the leading eigenvector of sign-alternating matrices.
double spectral_norm_bound(const Eigen::MatrixXd& mat) {
  const Eigen::Index k = mat.rows();
  Eigen::VectorXd v(k);
  for (Eigen::Index i = 0; i < k; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i);
  v /= v.norm();
  double norm = 0.0;
  for (int it = 0; it < 50; ++it) {
    Eigen::VectorXd u = mat * v;
    norm = u.norm();
    if (norm <= 0.0) break;  // v is in the kernel; bound below handles it
    v = u / norm;
  }
  return norm * 1.01;
}

double qp_objective(const SimplexQP& qp, const Eigen::VectorXd& b) {
  return b.dot(qp.quad * b) - 2.0 * qp.lin.dot(b);
}

}  // namespace

Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index k = v.size();
  if (k == 0) throw ConfigError("cannot project an empty vector");
  std::vector<double> u(v.data(), v.data() + k);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumsum = 0.0;
  double tau = 0.0;
  std::size_t rho = 0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    cumsum += u[j];
    const double candidate = (1.0 - cumsum) / static_cast<double>(j + 1);
    if (u[j] + candidate > 0.0) {
      rho = j + 1;
      tau = candidate;
    }
  }
  (void)rho;
  Eigen::VectorXd out(k);
  for (Eigen::Index i = 0; i < k; ++i) out[i] = std::max(v[i] + tau, 0.0);
  return out;
}

SimplexQP build_qp(std::size_t word, const MatrixRM& y, const MatrixRM& yp,
                   const NormalizedRows& norm_x, const NormalizedRows& norm_xp,
                   std::size_t m) {
  if (y.rows() != yp.rows() || y.cols() != yp.cols()) {
    throw ConfigError("representative row blocks disagree on shape");
  }
  if (static_cast<std::size_t>(y.cols()) != norm_x.num_docs ||
      norm_x.num_docs != norm_xp.num_docs) {
    throw ConfigError("representative rows and corpus disagree on document count");
  }
  if (word >= norm_x.num_words || word >= norm_xp.num_words) {
    throw ConfigError("word index " + std::to_string(word) + " out of range");
  }
  const double half_m = static_cast<double>(m) / 2.0;
  SimplexQP qp;
  qp.quad = half_m * (y * yp.transpose() + yp * y.transpose());
  qp.lin = Eigen::VectorXd::Zero(y.rows());
  for (const auto& [doc, value] : norm_xp.rows[word]) {
    qp.lin += half_m * value * y.col(static_cast<Eigen::Index>(doc));
  }
  for (const auto& [doc, value] : norm_x.rows[word]) {
    qp.lin += half_m * value * yp.col(static_cast<Eigen::Index>(doc));
  }
  return qp;
}

Eigen::VectorXd solve_simplex_qp(const SimplexQP& qp) {
  if (!qp.quad.allFinite() || !qp.lin.allFinite()) {
    throw Error("simplex QP has non-finite entries");
  }
  if (qp.quad.rows() != qp.quad.cols() || qp.quad.rows() != qp.lin.size()) {
    throw ConfigError("simplex QP dimensions disagree");
  }
  const Eigen::Index k = qp.lin.size();
  if (k == 1) return Eigen::VectorXd::Ones(1);

  double step_norm = spectral_norm_bound(qp.quad);
  if (step_norm <= 0.0) step_norm = 1.0;  // linear objective; any step works
  const double step = 1.0 / step_norm;

  Eigen::VectorXd b = Eigen::VectorXd::Constant(k, 1.0 / static_cast<double>(k));
#ifndef NDEBUG
  double prev_obj = qp_objective(qp, b);
#endif
  for (int it = 0; it < qp.iterations; ++it) {
    const Eigen::VectorXd grad = 2.0 * (qp.quad * b - qp.lin);
    Eigen::VectorXd next = project_to_simplex(b - step * grad);
#ifndef NDEBUG
    const double obj = qp_objective(qp, next);
    assert(obj <= prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)));
    prev_obj = obj;
#endif
    const double move = (next - b).lpNorm<Eigen::Infinity>();
    b = std::move(next);
    if (move < qp.tolerance) break;
  }
  return b;
}

namespace {

TopicModel estimate_topics_impl(const RepresentativeRows& reps,
                                const std::vector<double>& combined_totals,
                                const NormalizedRows& norm_x,
                                const NormalizedRows& norm_xp, std::size_t m,
                                const EstimateOptions& options) {
  const std::size_t w = norm_x.num_words;
  const std::size_t k = static_cast<std::size_t>(reps.y.rows());
  if (m == 0) throw ConfigError("document count must be positive");
  if (k == 0) throw ConfigError("need at least one representative row");
  if (norm_xp.num_words != w || norm_x.num_docs != norm_xp.num_docs) {
    throw ConfigError("the two normalized halves disagree on shape");
  }
  if (static_cast<std::size_t>(reps.y.cols()) != norm_x.num_docs ||
      reps.yp.rows() != reps.y.rows() || reps.yp.cols() != reps.y.cols()) {
    throw ConfigError("representative rows and corpus disagree on shape");
  }

  // The quadratic term is shared by all W regressions.
  const double half_m = static_cast<double>(m) / 2.0;
  const Eigen::MatrixXd quad =
      half_m * (reps.y * reps.yp.transpose() + reps.yp * reps.y.transpose());

  TopicModel model;
  model.beta = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(w),
                                     static_cast<Eigen::Index>(k));
  model.provenance = nlohmann::json::object();

  parallel_blocks(w, options.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      if (combined_totals[i] <= 0.0) continue;  // all-zero word keeps a zero row
      SimplexQP qp;
      qp.quad = quad;
      qp.lin = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(k));
      for (const auto& [doc, value] : norm_xp.rows[i]) {
        qp.lin += half_m * value * reps.y.col(static_cast<Eigen::Index>(doc));
      }
      for (const auto& [doc, value] : norm_x.rows[i]) {
        qp.lin += half_m * value * reps.yp.col(static_cast<Eigen::Index>(doc));
      }
      qp.iterations = options.iterations;
      qp.tolerance = options.tolerance;
      const Eigen::VectorXd b = solve_simplex_qp(qp);
      model.beta.row(static_cast<Eigen::Index>(i)) =
          (combined_totals[i] / static_cast<double>(m)) * b.transpose();
    }
  });

  model.column_sums_pre_norm = model.beta.colwise().sum();
  for (Eigen::Index c = 0; c < model.beta.cols(); ++c) {
    const double sum = model.column_sums_pre_norm[c];
    if (sum <= 0.0) {
      throw Error("estimated topic " + std::to_string(c) +
                  " collapsed to zero mass before normalization");
    }
    model.beta.col(c) /= sum;
  }
  return model;
}

}  // namespace

TopicModel estimate_topics(const RepresentativeRows& reps, const SplitPair& split,
                           const NormalizedRows& norm_x, const NormalizedRows& norm_xp,
                           std::size_t m, const EstimateOptions& options) {
  if (split.first.num_words != norm_x.num_words ||
      split.second.num_words != norm_xp.num_words) {
    throw ConfigError("split halves and normalized views disagree on vocabulary");
  }
  const std::vector<std::uint64_t> tx = split.first.word_totals();
  const std::vector<std::uint64_t> txp = split.second.word_totals();
  std::vector<double> totals(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i) {
    totals[i] = static_cast<double>(tx[i]) + static_cast<double>(txp[i]);
  }
  return estimate_topics_impl(reps, totals, norm_x, norm_xp, m, options);
}

TopicModel estimate_topics(const RepresentativeRows& reps, const NormalizedRows& norm_x,
                           const NormalizedRows& norm_xp, std::size_t m,
                           const EstimateOptions& options) {
  if (norm_x.num_words != norm_xp.num_words) {
    throw ConfigError("the two normalized halves disagree on vocabulary");
  }
  std::vector<double> totals(norm_x.num_words);
  for (std::size_t i = 0; i < totals.size(); ++i) {
    totals[i] = norm_x.row_totals[i] + norm_xp.row_totals[i];
  }
  return estimate_topics_impl(reps, totals, norm_x, norm_xp, m, options);
}

void save_topic_model(const TopicModel& model, const std::filesystem::path& tsv_path,
                      const std::filesystem::path& json_path) {
  write_matrix_tsv(model.beta, tsv_path);
  nlohmann::json j{
      {"provenance", model.provenance},
      {"column_sums_pre_norm",
       std::vector<double>(model.column_sums_pre_norm.data(),
                           model.column_sums_pre_norm.data() +
                               model.column_sums_pre_norm.size())},
  };
  std::ofstream out(json_path);
  if (!out) throw Error("cannot write topic model sidecar: " + json_path.string());
  out << j.dump(2) << '\n';
  if (!out) throw Error("failed writing topic model sidecar: " + json_path.string());
}

TopicModel load_topic_model(const std::filesystem::path& tsv_path,
                            const std::filesystem::path& json_path) {
  TopicModel model;
  model.beta = read_matrix_tsv(tsv_path);
  std::ifstream in(json_path);
  if (!in) throw Error("cannot open topic model sidecar: " + json_path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("topic model sidecar: " + std::string(e.what()));
  }
  model.provenance = j.value("provenance", nlohmann::json::object());
  const auto sums = j.value("column_sums_pre_norm", std::vector<double>{});
  model.column_sums_pre_norm =
      Eigen::Map<const Eigen::VectorXd>(sums.data(), static_cast<Eigen::Index>(sums.size()));
  if (model.column_sums_pre_norm.size() != model.beta.cols() &&
      model.column_sums_pre_norm.size() != 0) {
    throw ParseError("topic model sidecar column count disagrees with the TSV");
  }
  return model;
}

}  // namespace septopic
