#include "septopic/pipeline.hpp"

#include <chrono>
#include <stdexcept>
#include <utility>

#include "septopic/rng.hpp"

namespace septopic {

namespace {

class StageTimer {
 public:
  explicit StageTimer(std::map<std::string, double>& sink) : sink_(sink) {}

  template <typename Fn>
  auto run(const std::string& stage, Fn&& fn) -> decltype(fn()) {
    const auto start = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record(stage, start);
      } else {
        auto result = fn();
        record(stage, start);
        return result;
      }
    } catch (const std::exception& e) {
      record(stage, start);
      throw Error("stage '" + stage + "': " + e.what());
    }
  }

 private:
  void record(const std::string& stage, std::chrono::steady_clock::time_point start) {
    sink_[stage] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }

  std::map<std::string, double>& sink_;
};

}  // namespace

PipelineResult fit_pipeline(const SparseCorpus& corpus, std::uint64_t seed,
                            const PipelineConfig& config) {
  if (config.k == 0) throw ConfigError("pipeline needs the topic count k");
  if (corpus.num_docs == 0 || corpus.num_words == 0) {
    throw ConfigError("pipeline needs a nonempty corpus");
  }

  DetectorConfig det = config.detector;
  if (det.k == 0) det.k = config.k;
  det.threads = config.threads;
  det.seed = derive_seed(seed, "detect");
  det.validate(corpus.num_words);

  PipelineResult result;
  StageTimer timer(result.timings);

  SplitPair split;
  NormalizedRows norm_x;
  NormalizedRows norm_xp;
  timer.run("split", [&] {
    split = split_tokens(corpus, derive_seed(seed, "split"));
    norm_x = normalize_rows(split.first);
    norm_xp = normalize_rows(split.second);
  });

  // DDP modes scan all of C; RP and binning touch only novel-word entries,
  // so they get the on-demand representation.
  const bool needs_dense = det.method == DetectMethod::ddp_threshold ||
                           det.method == DetectMethod::ddp_agnostic;
  const CooccurrenceStats stats = timer.run("cooccur", [&] {
    CooccurOptions opts;
    opts.dense_cap = needs_dense ? config.dense_cap : 0;
    opts.threads = config.threads;
    return compute_cooccurrence(norm_x, norm_xp, corpus.num_docs, opts);
  });

  result.novel = timer.run("detect", [&] {
    switch (det.method) {
      case DetectMethod::ddp_threshold: return ddp_detect(stats, det);
      case DetectMethod::ddp_agnostic: return ddp_detect_agnostic(stats, det);
      case DetectMethod::rp: {
        // Candidacy excludes words empty in either half; the projection
        // detector only sees the first half, so merge the flags in.
        NormalizedRows masked = norm_x;
        for (std::size_t i = 0; i < masked.num_words; ++i) {
          if (norm_xp.is_empty(i) && !masked.is_empty(i)) {
            masked.empty_words[i] = 1;
            masked.rows[i].clear();
          }
        }
        return rp_detect(masked, det);
      }
      case DetectMethod::binning: return binning_detect(split, det);
    }
    throw ConfigError("unknown detection method");
  });

  RepresentativeRows reps;
  timer.run("cluster", [&] {
    if (config.cluster_method == ClusterMethod::threshold_components) {
      const double d = config.cluster_d > 0.0 ? config.cluster_d : det.d;
      result.clusters = cluster_novel(result.novel, stats, d, config.k);
    } else {
      result.clusters = cluster_spectral(result.novel, stats, config.k);
    }
    reps = representative_rows(result.clusters, norm_x, norm_xp, config.average_reps);
  });

  result.model = timer.run("estimate", [&] {
    EstimateOptions opts;
    opts.threads = config.threads;
    opts.iterations = config.qp_iterations;
    opts.tolerance = config.qp_tolerance;
    return estimate_topics(reps, split, norm_x, norm_xp, corpus.num_docs, opts);
  });

  result.model.provenance = nlohmann::json{
      {"seed", seed},
      {"k", config.k},
      {"method", detect_method_name(det.method)},
      {"cluster_method", cluster_method_name(config.cluster_method)},
      {"average_reps", config.average_reps},
      {"novel_indices", result.novel.indices},
  };
  return result;
}

}  // namespace septopic
