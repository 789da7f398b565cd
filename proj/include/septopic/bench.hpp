#pragma once

// Synthetic benchmark grid: per (M, N, trial) cell generate one corpus shared
// by all methods, fit, score against the ground truth, and collect long-form
// rows plus per-cell summaries.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "septopic/detect.hpp"
#include "septopic/synth.hpp"

namespace septopic {

struct BenchConfig {
  /// Model shape shared by all cells (w, k, rho, alpha, seed); m and n are
  /// overridden per cell.
  GeneratorConfig base;
  std::vector<std::size_t> m_values;
  std::vector<std::size_t> n_values;  ///< empty = {base.n}
  std::size_t trials = 0;
  std::vector<DetectMethod> methods;
  bool average_reps = true;
  std::size_t dense_cap = 20000;
  int threads = 0;

  void validate() const;
};

struct BenchRow {
  std::string method;
  std::size_t m = 0;
  std::size_t n = 0;
  std::size_t trial = 0;
  double matched_l1 = 0.0;  ///< NaN when the cell failed
  double seconds = 0.0;     ///< fit wall-clock (split through estimate)
  std::string error;        ///< empty on success
};

struct BenchResult {
  std::vector<BenchRow> rows;
};

/// Applies a grid spec like "m=500,1000;n=50,100" onto the config.
/// Throws ConfigError on malformed specs or unknown keys.
void apply_grid_spec(BenchConfig& config, const std::string& spec);

/// Runs every (method, m, n, trial) cell.  Threshold-based methods
/// (ddp_threshold, binning) take d and gamma from the instance's theorem
/// parameters and cluster by threshold components; the agnostic and RP
/// methods use their size defaults and cluster spectrally.  Failures are
/// recorded in the row and the run continues.
BenchResult run_benchmark(const BenchConfig& config,
                          const std::function<void(const BenchRow&)>& on_row = {});

/// Long-form CSV: method,m,n,trial,matched_l1,seconds,error.
std::string bench_rows_csv(const BenchResult& result);

/// Per-cell means over successful trials:
/// method,m,n,trials,failures,mean_matched_l1,mean_seconds.
std::string bench_summary_csv(const BenchResult& result);

}  // namespace septopic
