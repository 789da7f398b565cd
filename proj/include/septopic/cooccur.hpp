#pragma once

// Scaled word co-occurrence statistics C = M * Xt * Xt'^T between the two
// l1-normalized token-split halves, and the squared-form distance
// D(i,j) = C_ii - 2 C_ij + C_jj built on top of it.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "septopic/common.hpp"
#include "septopic/corpus.hpp"

namespace septopic {

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct CooccurOptions {
  /// Materialize the dense W x W matrix when W <= dense_cap; above the cap
  /// only the diagonal is precomputed and entries are evaluated on demand.
  std::size_t dense_cap = 20000;
  /// Worker cap for the accumulation; 0 means all cores.
  int threads = 0;
};

/// Immutable co-occurrence statistics.  In dense mode `C` holds the full
/// matrix; in on-demand mode the normalized halves are kept instead and
/// entries are computed from sparse dot products per call (slower, but the
/// object stays read-only and safe to share across threads in both modes).
class CooccurrenceStats {
 public:
  std::size_t num_words() const { return num_words_; }
  std::size_t num_docs() const { return num_docs_; }
  bool dense() const { return dense_; }

  /// C_ij.  On-demand mode computes a sparse dot product per call.
  double at(std::size_t i, std::size_t j) const;
  /// C_ii, precomputed in both modes.
  double diag(std::size_t i) const { return diag_[i]; }
  /// Full row i of C (copied in dense mode, built on demand otherwise).
  std::vector<double> row(std::size_t i) const;
  /// Per-word mean frequency (1/M) X_i 1 of the unsplit counts.
  const std::vector<double>& mean_freq() const { return mean_freq_; }
  /// True when the word had zero count in either half (row undefined).
  bool empty_word(std::size_t i) const { return empty_words_[i] != 0; }
  const std::vector<std::uint8_t>& empty_words() const { return empty_words_; }

  /// Dense matrix access; valid only in dense mode.
  const MatrixRM& matrix() const;

 private:
  friend CooccurrenceStats compute_cooccurrence(const NormalizedRows&,
                                                const NormalizedRows&,
                                                std::size_t, const CooccurOptions&);
  friend CooccurrenceStats load_cooccurrence(const std::filesystem::path&);

  std::size_t num_words_ = 0;
  std::size_t num_docs_ = 0;
  bool dense_ = true;
  MatrixRM c_;
  std::vector<double> diag_;
  std::vector<double> mean_freq_;
  std::vector<std::uint8_t> empty_words_;
  // On-demand mode keeps its own copies of the halves.
  NormalizedRows x_;
  NormalizedRows xp_;
  DocColumns xp_cols_;
};

/// Accumulates C = M * Xt * Xt'^T per document via outer products of the two
/// halves' nonzero lists.  Deterministic for any thread count: each worker
/// owns a contiguous block of output rows.
CooccurrenceStats compute_cooccurrence(const NormalizedRows& norm_x,
                                       const NormalizedRows& norm_xp,
                                       std::size_t m,
                                       const CooccurOptions& options = {});

/// Squared-form distance D(i,j) = C_ii - 2 C_ij + C_jj.
/// Throws Error when either word was empty in a half (row undefined).
double distance(const CooccurrenceStats& stats, std::size_t i, std::size_t j);

/// Binary cache of a dense C: 16-byte header (uint64 word count, uint64
/// format version), then W*W row-major little-endian float64 values.
void save_cooccurrence(const CooccurrenceStats& stats, const std::filesystem::path& path);
CooccurrenceStats load_cooccurrence(const std::filesystem::path& path);

}  // namespace septopic
