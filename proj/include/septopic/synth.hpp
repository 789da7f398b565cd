#pragma once

// Synthetic ground-truth generation: separable topic matrices, Dirichlet
// weight columns, sampled corpora, exact-A (infinite words per document)
// instances, and the degenerate square-on-simplex geometry.

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "septopic/common.hpp"
#include "septopic/corpus.hpp"

namespace septopic {

enum class GenMode { sampled, exact_a, degenerate_square };

struct GeneratorConfig {
  std::size_t w = 0;      ///< vocabulary size W
  std::size_t k = 0;      ///< topic count K
  std::size_t m = 0;      ///< documents M
  std::size_t n = 0;      ///< tokens per document N (sampled mode)
  double rho = 0.0;       ///< novel-word fraction, W1 = round(rho * W)
  std::vector<double> alpha;  ///< K Dirichlet parameters
  std::uint64_t seed = 0;
  GenMode mode = GenMode::sampled;
  int threads = 0;        ///< document-sampling workers, 0 = all cores

  std::size_t novel_count() const;  ///< W1
  /// Throws ConfigError on invalid combinations (e.g. W1 not divisible by K).
  void validate() const;
};

/// First and second moments of the topic-weight prior: R = (1/M) E[theta
/// theta^T] and a = E[theta column].  Closed form for Dirichlet; empirical
/// for the degenerate square construction.
struct PriorStats {
  Eigen::MatrixXd r;
  Eigen::VectorXd a;
};

/// Quantities the detection theorems are parameterized by.
struct TheoremParams {
  double lambda_min = 0.0;  ///< smallest eigenvalue of R
  double beta_min = 0.0;    ///< smallest nonzero entry of beta
  double a_min = 0.0;       ///< smallest entry of a
  double zeta = 0.0;        ///< P2 margin: min over i != j of normalized-R gap
  double eta = 0.0;         ///< min over words of beta_i . a
  double d = 0.0;           ///< distance threshold lambda_min * beta_min^2
  double gamma = 0.0;       ///< margin threshold zeta * a_min * beta_min
};

struct GroundTruth {
  Eigen::MatrixXd beta;    ///< W x K, column-stochastic, separable
  Eigen::MatrixXd theta;   ///< K x M, column-stochastic (empty until generated)
  std::vector<std::vector<std::uint32_t>> novel_sets;  ///< K per-topic lists
  PriorStats prior_stats;
  GeneratorConfig config;

  /// Flattened, sorted union of novel_sets.
  std::vector<std::uint32_t> all_novel() const;
};

/// Closed-form Dirichlet moments: R = (alpha alpha^T + diag(alpha)) /
/// (alpha0 (alpha0 + 1)), a = alpha / alpha0.
PriorStats dirichlet_prior_stats(const std::vector<double>& alpha);

/// Builds the separable beta: one Uniform[0,1] entry per novel word (W1/K
/// words per topic, placed first, grouped by topic), non-novel rows uniform
/// on the simplex, then columns normalized.  Fills novel_sets and
/// prior_stats; theta stays empty.
GroundTruth generate_beta(const GeneratorConfig& cfg);

/// Samples M Dirichlet(alpha) weight columns into gt.theta and, in sampled
/// mode, N multinomial tokens per document from beta * theta_d.  Documents
/// use per-index derived RNG streams, so the result is bit-identical for any
/// thread count.  In exact modes the returned corpus is empty.
SparseCorpus generate_theta_and_docs(GroundTruth& gt, const GeneratorConfig& cfg);

/// Row-normalized exact matrix A-tilde, A = beta * theta, returned as both
/// halves of a split (the infinite-sampling surrogate).  Row totals carry the
/// exact row masses of A so downstream estimation scales are consistent.
std::pair<NormalizedRows, NormalizedRows> exact_a_instance(const GroundTruth& gt);

/// K = 4 instance whose four novel rows form an exact square with corners at
/// (+-0.3, +-0.3) in a 2-D plane around the document-simplex centroid:
/// linearly dependent extreme points.  Also places edge midpoints, the
/// center, and four fixed interior rows.  prior_stats holds the *empirical*
/// moments of the constructed theta (its R is rank 3 — singular by design).
GroundTruth degenerate_square_instance(std::size_t m, std::uint64_t seed);

/// Theorem parameters computed from prior_stats and beta.
TheoremParams theorem_parameters(const GroundTruth& gt);

/// Ground truth on disk: beta/theta TSVs plus a JSON envelope
/// (config, novel sets, prior stats, file names).
void save_ground_truth(const GroundTruth& gt, const std::filesystem::path& dir);
GroundTruth load_ground_truth(const std::filesystem::path& dir);

}  // namespace septopic
