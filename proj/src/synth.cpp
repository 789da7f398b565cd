#include "septopic/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include <json.hpp>

#include "septopic/matrix_io.hpp"
#include "septopic/parallel.hpp"
#include "septopic/rng.hpp"

namespace septopic {

std::size_t GeneratorConfig::novel_count() const {
  return static_cast<std::size_t>(std::llround(rho * static_cast<double>(w)));
}

void GeneratorConfig::validate() const {
  if (k == 0) throw ConfigError("topic count must be positive");
  if (w < k) throw ConfigError("vocabulary must have at least K words");
  if (alpha.size() != k) {
    throw ConfigError("alpha must have exactly K entries, got " +
                      std::to_string(alpha.size()));
  }
  for (double a : alpha) {
    if (!(a > 0.0)) throw ConfigError("alpha entries must be positive");
  }
  if (!(rho > 0.0) || rho > 1.0) throw ConfigError("rho must lie in (0, 1]");
  const std::size_t w1 = novel_count();
  if (w1 < k) throw ConfigError("rho * W must allow at least one novel word per topic");
  if (w1 > w) throw ConfigError("rho * W exceeds the vocabulary");
  if (w1 % k != 0) {
    throw ConfigError("novel word count W1 = " + std::to_string(w1) +
                      " is not divisible by K = " + std::to_string(k));
  }
  if (mode == GenMode::sampled) {
    if (m == 0) throw ConfigError("document count must be positive");
    if (n == 0) throw ConfigError("tokens per document must be positive");
  }
}

std::vector<std::uint32_t> GroundTruth::all_novel() const {
  std::vector<std::uint32_t> out;
  for (const auto& s : novel_sets) out.insert(out.end(), s.begin(), s.end());
  std::sort(out.begin(), out.end());
  return out;
}

PriorStats dirichlet_prior_stats(const std::vector<double>& alpha) {
  const std::size_t k = alpha.size();
  if (k == 0) throw ConfigError("alpha must be non-empty");
  double a0 = 0.0;
  for (double a : alpha) {
    if (!(a > 0.0)) throw ConfigError("alpha entries must be positive");
    a0 += a;
  }
  PriorStats stats;
  stats.r.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k));
  stats.a.resize(static_cast<Eigen::Index>(k));
  const double denom = a0 * (a0 + 1.0);
  for (std::size_t i = 0; i < k; ++i) {
    stats.a(static_cast<Eigen::Index>(i)) = alpha[i] / a0;
    for (std::size_t j = 0; j < k; ++j) {
      double v = alpha[i] * alpha[j];
      if (i == j) v += alpha[i];
      stats.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v / denom;
    }
  }
  return stats;
}

GroundTruth generate_beta(const GeneratorConfig& cfg) {
  cfg.validate();
  const std::size_t w = cfg.w, k = cfg.k;
  const std::size_t w1 = cfg.novel_count();
  const std::size_t per_topic = w1 / k;

  GroundTruth gt;
  gt.config = cfg;
  gt.beta.setZero(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(k));
  gt.novel_sets.assign(k, {});

  Rng rng(derive_seed(cfg.seed, "beta"));
  // Novel words first, grouped by topic: topic t owns rows
  // [t*per_topic, (t+1)*per_topic), each with a single Uniform[0,1] entry.
  for (std::size_t t = 0; t < k; ++t) {
    for (std::size_t i = 0; i < per_topic; ++i) {
      const std::size_t row = t * per_topic + i;
      gt.beta(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(t)) =
          rng.next_open_double();
      gt.novel_sets[t].push_back(static_cast<std::uint32_t>(row));
    }
  }
  // Non-novel rows uniform on the simplex via normalized Exponential(1).
  for (std::size_t row = w1; row < w; ++row) {
    double sum = 0.0;
    std::vector<double> e(k);
    for (std::size_t t = 0; t < k; ++t) {
      e[t] = -std::log(rng.next_open_double());
      sum += e[t];
    }
    for (std::size_t t = 0; t < k; ++t) {
      gt.beta(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(t)) = e[t] / sum;
    }
  }
  // Column-normalize the assembled matrix.
  for (std::size_t t = 0; t < k; ++t) {
    const double s = gt.beta.col(static_cast<Eigen::Index>(t)).sum();
    gt.beta.col(static_cast<Eigen::Index>(t)) /= s;
  }
  gt.prior_stats = dirichlet_prior_stats(cfg.alpha);
  return gt;
}

SparseCorpus generate_theta_and_docs(GroundTruth& gt, const GeneratorConfig& cfg) {
  cfg.validate();
  if (gt.beta.rows() == 0) throw Error("generate_beta must run first");
  const std::size_t m = cfg.m, k = cfg.k, w = cfg.w;

  gt.theta.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  const std::uint64_t theta_seed = derive_seed(cfg.seed, "theta");
  for (std::size_t d = 0; d < m; ++d) {
    Rng rng(derive_seed(theta_seed, static_cast<std::uint64_t>(d)));
    const std::vector<double> col = sample_dirichlet(cfg.alpha, rng);
    for (std::size_t t = 0; t < k; ++t) {
      gt.theta(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d)) = col[t];
    }
  }

  SparseCorpus corpus;
  corpus.num_docs = m;
  corpus.num_words = w;
  corpus.docs.resize(m);
  if (cfg.mode != GenMode::sampled) return corpus;

  const std::uint64_t doc_seed = derive_seed(cfg.seed, "docs");
  parallel_blocks(m, cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> cdf(w);
    std::vector<std::uint32_t> drawn;
    for (std::size_t d = begin; d < end; ++d) {
      Rng rng(derive_seed(doc_seed, static_cast<std::uint64_t>(d)));
      // Cumulative word distribution of this document: beta * theta_d.
      double acc = 0.0;
      for (std::size_t i = 0; i < w; ++i) {
        double p = 0.0;
        for (std::size_t t = 0; t < k; ++t) {
          p += gt.beta(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) *
               gt.theta(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d));
        }
        acc += p;
        cdf[i] = acc;
      }
      const double total = cdf[w - 1];
      drawn.clear();
      drawn.reserve(cfg.n);
      for (std::size_t tok = 0; tok < cfg.n; ++tok) {
        const double u = rng.next_double() * total;
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        std::size_t word = std::min<std::size_t>(
            static_cast<std::size_t>(it - cdf.begin()), w - 1);
        drawn.push_back(static_cast<std::uint32_t>(word));
      }
      std::sort(drawn.begin(), drawn.end());
      auto& doc = corpus.docs[d];
      for (std::size_t idx = 0; idx < drawn.size();) {
        std::size_t run = idx;
        while (run < drawn.size() && drawn[run] == drawn[idx]) ++run;
        doc.emplace_back(drawn[idx], static_cast<std::uint32_t>(run - idx));
        idx = run;
      }
    }
  });
  return corpus;
}

std::pair<NormalizedRows, NormalizedRows> exact_a_instance(const GroundTruth& gt) {
  if (gt.theta.cols() == 0) throw Error("theta must be generated first");
  const std::size_t w = static_cast<std::size_t>(gt.beta.rows());
  const std::size_t m = static_cast<std::size_t>(gt.theta.cols());

  const Eigen::MatrixXd a = gt.beta * gt.theta;  // W x M, strictly positive
  NormalizedRows norm;
  norm.num_words = w;
  norm.num_docs = m;
  norm.rows.resize(w);
  norm.row_totals.resize(w);
  norm.empty_words.assign(w, 0);
  for (std::size_t i = 0; i < w; ++i) {
    const double total = a.row(static_cast<Eigen::Index>(i)).sum();
    norm.row_totals[i] = total;
    if (!(total > 0.0)) {
      norm.empty_words[i] = 1;
      continue;
    }
    norm.rows[i].reserve(m);
    for (std::size_t d = 0; d < m; ++d) {
      norm.rows[i].emplace_back(
          static_cast<std::uint32_t>(d),
          a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) / total);
    }
  }
  return {norm, norm};
}

GroundTruth degenerate_square_instance(std::size_t m, std::uint64_t seed) {
  if (m < 4 || m % 4 != 0) {
    throw ConfigError("square instance needs a document count that is a positive multiple of 4");
  }
  constexpr std::size_t k = 4;
  constexpr std::size_t w = 13;
  // Topic t sits at square corner (su[t], sv[t]) in the 2-D plane.
  constexpr int su[k] = {+1, +1, -1, -1};
  constexpr int sv[k] = {+1, -1, +1, -1};
  // Documents cycle through 4 groups; the group sign patterns span the plane.
  constexpr int xi_u[4] = {+1, +1, -1, -1};
  constexpr int xi_v[4] = {+1, -1, +1, -1};

  GroundTruth gt;
  gt.config.w = w;
  gt.config.k = k;
  gt.config.m = m;
  gt.config.n = 0;
  gt.config.rho = static_cast<double>(k) / static_cast<double>(w);
  gt.config.alpha.assign(k, 1.0);  // placeholder; the prior here is empirical
  gt.config.seed = seed;
  gt.config.mode = GenMode::degenerate_square;

  // theta_{t,d} = (1 + 0.3 su[t] xi_u[g] + 0.3 sv[t] xi_v[g]) / 4 for doc
  // group g = d mod 4: columns sum to 1 (sign patterns cancel over t), rows
  // sum to M/4 each, and row normalization lands exactly on the square
  // corners (+-0.3, +-0.3) around the centroid row 1/M.
  gt.theta.resize(k, static_cast<Eigen::Index>(m));
  for (std::size_t d = 0; d < m; ++d) {
    const std::size_t g = d % 4;
    for (std::size_t t = 0; t < k; ++t) {
      gt.theta(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(d)) =
          (1.0 + 0.3 * su[t] * xi_u[g] + 0.3 * sv[t] * xi_v[g]) / 4.0;
    }
  }

  // Rows: 4 corner (novel) words, 4 edge midpoints, the center, and a cyclic
  // block of fixed interior rows whose per-column sums are equal — so column
  // normalization rescales every column identically and the exact-A geometry
  // is preserved.
  gt.beta.setZero(w, k);
  gt.novel_sets.assign(k, {});
  for (std::size_t t = 0; t < k; ++t) {
    gt.beta(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) = 1.0;
    gt.novel_sets[t].push_back(static_cast<std::uint32_t>(t));
  }
  const std::pair<std::size_t, std::size_t> edges[4] = {{0, 1}, {0, 2}, {1, 3}, {2, 3}};
  for (std::size_t e = 0; e < 4; ++e) {
    gt.beta(static_cast<Eigen::Index>(4 + e), static_cast<Eigen::Index>(edges[e].first)) = 0.5;
    gt.beta(static_cast<Eigen::Index>(4 + e), static_cast<Eigen::Index>(edges[e].second)) = 0.5;
  }
  for (std::size_t t = 0; t < k; ++t) gt.beta(8, static_cast<Eigen::Index>(t)) = 0.25;
  const double cyc[4] = {0.4, 0.3, 0.2, 0.1};
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t t = 0; t < k; ++t) {
      gt.beta(static_cast<Eigen::Index>(9 + r), static_cast<Eigen::Index>((t + r) % 4)) = cyc[t];
    }
  }
  for (std::size_t t = 0; t < k; ++t) {
    gt.beta.col(static_cast<Eigen::Index>(t)) /=
        gt.beta.col(static_cast<Eigen::Index>(t)).sum();
  }

  // Empirical prior moments of the constructed theta; R has rank 3 here
  // (planar geometry), intentionally violating the P1 positive-definiteness
  // the Dirichlet modes guarantee.
  gt.prior_stats.r = gt.theta * gt.theta.transpose() / static_cast<double>(m);
  gt.prior_stats.a = gt.theta.rowwise().mean();
  return gt;
}

TheoremParams theorem_parameters(const GroundTruth& gt) {
  TheoremParams p;
  const Eigen::MatrixXd& r = gt.prior_stats.r;
  const Eigen::VectorXd& a = gt.prior_stats.a;
  const std::size_t k = static_cast<std::size_t>(r.rows());

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(r);
  if (eig.info() != Eigen::Success) throw Error("eigen decomposition of R failed");
  p.lambda_min = eig.eigenvalues().minCoeff();

  p.beta_min = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < gt.beta.rows(); ++i) {
    for (Eigen::Index j = 0; j < gt.beta.cols(); ++j) {
      const double v = gt.beta(i, j);
      if (v > 0.0) p.beta_min = std::min(p.beta_min, v);
    }
  }
  p.a_min = a.minCoeff();

  p.zeta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i == j) continue;
      const double margin =
          r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) /
              (a(static_cast<Eigen::Index>(i)) * a(static_cast<Eigen::Index>(i))) -
          r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) /
              (a(static_cast<Eigen::Index>(i)) * a(static_cast<Eigen::Index>(j)));
      p.zeta = std::min(p.zeta, margin);
    }
  }

  const Eigen::VectorXd freq = gt.beta * a;
  p.eta = freq.minCoeff();
  p.d = p.lambda_min * p.beta_min * p.beta_min;
  p.gamma = p.zeta * p.a_min * p.beta_min;
  return p;
}

namespace {

const char* mode_name(GenMode mode) {
  switch (mode) {
    case GenMode::sampled: return "sampled";
    case GenMode::exact_a: return "exact_a";
    case GenMode::degenerate_square: return "degenerate_square";
  }
  return "sampled";
}

GenMode mode_from_name(const std::string& name) {
  if (name == "sampled") return GenMode::sampled;
  if (name == "exact_a") return GenMode::exact_a;
  if (name == "degenerate_square") return GenMode::degenerate_square;
  throw ConfigError("unknown generator mode: " + name);
}

}  // namespace

void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_matrix_tsv(gt.beta, dir / "truth_beta.tsv");
  if (gt.theta.size() > 0) write_matrix_tsv(gt.theta, dir / "truth_theta.tsv");

  nlohmann::json j;
  j["config"] = {
      {"w", gt.config.w},       {"k", gt.config.k},   {"m", gt.config.m},
      {"n", gt.config.n},       {"rho", gt.config.rho},
      {"alpha", gt.config.alpha}, {"seed", gt.config.seed},
      {"mode", mode_name(gt.config.mode)},
  };
  j["novel_sets"] = gt.novel_sets;
  std::vector<std::vector<double>> r(static_cast<std::size_t>(gt.prior_stats.r.rows()));
  for (Eigen::Index i = 0; i < gt.prior_stats.r.rows(); ++i) {
    for (Eigen::Index c = 0; c < gt.prior_stats.r.cols(); ++c) {
      r[static_cast<std::size_t>(i)].push_back(gt.prior_stats.r(i, c));
    }
  }
  std::vector<double> a(gt.prior_stats.a.data(),
                        gt.prior_stats.a.data() + gt.prior_stats.a.size());
  j["prior"] = {{"r", r}, {"a", a}};
  j["files"] = {{"beta", "truth_beta.tsv"},
                {"theta", gt.theta.size() > 0 ? "truth_theta.tsv" : ""}};

  std::ofstream out(dir / "truth.json");
  if (!out) throw Error("cannot write truth.json in " + dir.string());
  out << j.dump(2) << '\n';
}

GroundTruth load_ground_truth(const std::filesystem::path& dir) {
  std::ifstream in(dir / "truth.json");
  if (!in) throw Error("cannot open truth.json in " + dir.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid truth.json: " + std::string(e.what()));
  }

  GroundTruth gt;
  try {
    const auto& c = j.at("config");
    gt.config.w = c.at("w").get<std::size_t>();
    gt.config.k = c.at("k").get<std::size_t>();
    gt.config.m = c.at("m").get<std::size_t>();
    gt.config.n = c.at("n").get<std::size_t>();
    gt.config.rho = c.at("rho").get<double>();
    gt.config.alpha = c.at("alpha").get<std::vector<double>>();
    gt.config.seed = c.at("seed").get<std::uint64_t>();
    gt.config.mode = mode_from_name(c.at("mode").get<std::string>());
    gt.novel_sets = j.at("novel_sets").get<std::vector<std::vector<std::uint32_t>>>();

    const auto r = j.at("prior").at("r").get<std::vector<std::vector<double>>>();
    const auto a = j.at("prior").at("a").get<std::vector<double>>();
    gt.prior_stats.r.resize(static_cast<Eigen::Index>(r.size()),
                            static_cast<Eigen::Index>(r.empty() ? 0 : r.front().size()));
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t c2 = 0; c2 < r[i].size(); ++c2) {
        gt.prior_stats.r(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c2)) = r[i][c2];
      }
    }
    gt.prior_stats.a =
        Eigen::Map<const Eigen::VectorXd>(a.data(), static_cast<Eigen::Index>(a.size()));

    gt.beta = read_matrix_tsv(dir / j.at("files").at("beta").get<std::string>());
    const std::string theta_file = j.at("files").at("theta").get<std::string>();
    if (!theta_file.empty()) gt.theta = read_matrix_tsv(dir / theta_file);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("invalid truth.json: " + std::string(e.what()));
  }
  return gt;
}

}  // namespace septopic
