#pragma once

// Grouping detected novel words into K topics: connected components of the
// D <= d/2 threshold graph by default, normalized spectral clustering on the
// exp(-D) affinity as the fallback, plus representative-row extraction for
// the regression stage.

#include <cstdint>
#include <map>
#include <vector>

#include <json.hpp>

#include "septopic/cooccur.hpp"
#include "septopic/corpus.hpp"
#include "septopic/detect.hpp"

namespace septopic {

enum class ClusterMethod { threshold_components, spectral };

const char* cluster_method_name(ClusterMethod method);
ClusterMethod cluster_method_from_name(const std::string& name);

/// Partition of the novel words into K nonempty clusters.  Cluster ids are
/// canonical: cluster k contains the k-th smallest of the clusters' minimum
/// word indices.  representatives[k] is a member of cluster k.
struct ClusterResult {
  std::map<std::uint32_t, std::uint32_t> labels;  ///< word index -> cluster id
  std::vector<std::uint32_t> representatives;     ///< one word per cluster
  ClusterMethod method = ClusterMethod::threshold_components;

  std::size_t num_clusters() const { return representatives.size(); }
  std::vector<std::vector<std::uint32_t>> members() const;

  nlohmann::json to_json() const;
  static ClusterResult from_json(const nlohmann::json& j);
};

/// Threshold clustering: edge (i,j) iff D(i,j) <= d/2, clusters = connected
/// components, representative = lowest-index member.  Throws
/// ComponentCountError when the component count differs from k.
ClusterResult cluster_novel(const NovelWordSet& novel, const CooccurrenceStats& stats,
                            double d, std::size_t k);

/// Spectral clustering on affinity exp(-max(D, 0)): symmetric-normalized
/// Laplacian, k smallest eigenvectors, row normalization, k-means seeded
/// from novel.config.seed with 20 restarts.  Representative = the member
/// whose affinity row is closest to its cluster's mean affinity row.
ClusterResult cluster_spectral(const NovelWordSet& novel, const CooccurrenceStats& stats,
                               std::size_t k);

/// The K regression target rows per half.  Row k of y (and yp) is the
/// normalized row of representatives[k], or, with `average` set, the mean of
/// cluster k's rows re-normalized to sum 1.
struct RepresentativeRows {
  MatrixRM y;   ///< K x M rows from the first half
  MatrixRM yp;  ///< K x M rows from the second half
};

RepresentativeRows representative_rows(const ClusterResult& result,
                                       const NormalizedRows& norm_x,
                                       const NormalizedRows& norm_xp, bool average);

}  // namespace septopic
