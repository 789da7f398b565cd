#pragma once

// Topic-matrix recovery: one simplex-constrained least-squares problem per
// word against the K representative rows, scaled by word frequency and
// column-normalized.

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "septopic/cluster.hpp"
#include "septopic/common.hpp"
#include "septopic/corpus.hpp"

namespace septopic {

/// Quadratic program  min_b  b' quad b - 2 lin' b  over the simplex.
struct SimplexQP {
  Eigen::MatrixXd quad;  ///< K x K, symmetric
  Eigen::VectorXd lin;   ///< K
  int iterations = 10000;
  double tolerance = 1e-10;
};

struct TopicModel {
  Eigen::MatrixXd beta;                  ///< W x K, column-stochastic
  Eigen::VectorXd column_sums_pre_norm;  ///< per-topic mass before normalizing
  nlohmann::json provenance;             ///< config, seed, novel-word indices

  std::size_t num_words() const { return static_cast<std::size_t>(beta.rows()); }
  std::size_t num_topics() const { return static_cast<std::size_t>(beta.cols()); }
};

/// Euclidean projection onto the probability simplex (sort-then-threshold).
Eigen::VectorXd project_to_simplex(const Eigen::VectorXd& v);

/// Expands M (x_i - b Y)(x'_i - b Y')^T into simplex-QP form; the additive
/// constant M x_i x_i'^T is dropped.
SimplexQP build_qp(std::size_t word, const MatrixRM& y, const MatrixRM& yp,
                   const NormalizedRows& norm_x, const NormalizedRows& norm_xp,
                   std::size_t m);

/// Projected gradient descent with step 1/L (L from 50 power-iteration
/// steps); stops when the iterate moves less than qp.tolerance in l-infinity
/// norm or at qp.iterations.  Throws Error on non-finite inputs.
Eigen::VectorXd solve_simplex_qp(const SimplexQP& qp);

struct EstimateOptions {
  int threads = 0;
  int iterations = 10000;
  double tolerance = 1e-10;
};

/// Runs the W regressions and assembles beta: row i is the QP solution
/// scaled by the word's mean frequency (combined counts over M); all-zero
/// words get zero rows; columns are then normalized to sum 1.
/// Throws Error when a column has zero mass before normalization.
TopicModel estimate_topics(const RepresentativeRows& reps, const SplitPair& split,
                           const NormalizedRows& norm_x, const NormalizedRows& norm_xp,
                           std::size_t m, const EstimateOptions& options = {});

/// Same, with word scales taken from the row totals of the normalized views
/// (their sum equals the combined counts; exact-A pipelines enter here).
TopicModel estimate_topics(const RepresentativeRows& reps, const NormalizedRows& norm_x,
                           const NormalizedRows& norm_xp, std::size_t m,
                           const EstimateOptions& options = {});

/// TSV (W rows, K columns, 17 significant digits) plus a JSON sidecar with
/// provenance and the pre-normalization column sums.
void save_topic_model(const TopicModel& model, const std::filesystem::path& tsv_path,
                      const std::filesystem::path& json_path);
TopicModel load_topic_model(const std::filesystem::path& tsv_path,
                            const std::filesystem::path& json_path);

}  // namespace septopic
