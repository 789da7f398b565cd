#pragma once

// End-to-end fit: token split -> co-occurrence -> novel-word detection ->
// clustering -> topic estimation, with per-stage wall-clock timings.

#include <cstdint>
#include <map>
#include <string>

#include "septopic/cluster.hpp"
#include "septopic/cooccur.hpp"
#include "septopic/corpus.hpp"
#include "septopic/detect.hpp"
#include "septopic/estimate.hpp"

namespace septopic {

struct PipelineConfig {
  std::size_t k = 0;  ///< topic count (required)
  /// Detector knobs; method-required fields (d, gamma, ...) must be set by
  /// the caller.  seed/threads/k are filled in by the pipeline.
  DetectorConfig detector;
  ClusterMethod cluster_method = ClusterMethod::threshold_components;
  double cluster_d = 0.0;  ///< threshold-clustering distance; 0 = detector.d
  bool average_reps = true;
  std::size_t dense_cap = 20000;  ///< dense co-occurrence cap (DDP modes)
  int threads = 0;
  int qp_iterations = 10000;
  double qp_tolerance = 1e-10;
};

struct PipelineResult {
  NovelWordSet novel;
  ClusterResult clusters;
  TopicModel model;
  std::map<std::string, double> timings;  ///< stage -> seconds
};

/// Errors from any stage are rethrown with the stage name prefixed.
PipelineResult fit_pipeline(const SparseCorpus& corpus, std::uint64_t seed,
                            const PipelineConfig& config);

}  // namespace septopic
