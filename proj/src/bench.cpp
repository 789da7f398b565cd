#include "septopic/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "septopic/evaluate.hpp"
#include "septopic/pipeline.hpp"
#include "septopic/rng.hpp"

namespace septopic {

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

PipelineConfig cell_pipeline_config(const BenchConfig& config, DetectMethod method,
                                    const TheoremParams& params) {
  PipelineConfig pc;
  pc.k = config.base.k;
  pc.threads = config.threads;
  pc.dense_cap = config.dense_cap;
  pc.average_reps = config.average_reps;
  pc.detector.method = method;
  switch (method) {
    case DetectMethod::ddp_threshold:
      pc.detector.d = params.d;
      pc.detector.gamma = params.gamma;
      pc.cluster_method = ClusterMethod::threshold_components;
      break;
    case DetectMethod::binning:
      pc.detector.d = params.d;
      pc.cluster_method = ClusterMethod::threshold_components;
      break;
    case DetectMethod::ddp_agnostic:
    case DetectMethod::rp:
      // Size defaults r = W/2, s = 10K, p = 50K resolve inside the detector.
      pc.cluster_method = ClusterMethod::spectral;
      break;
  }
  return pc;
}

}  // namespace

void BenchConfig::validate() const {
  GeneratorConfig probe = base;
  probe.mode = GenMode::sampled;
  probe.m = m_values.empty() ? 1 : m_values.front();
  probe.n = n_values.empty() ? base.n : n_values.front();
  probe.validate();
  if (trials == 0) throw ConfigError("benchmark needs at least one trial");
  if (m_values.empty()) throw ConfigError("benchmark needs at least one value of m");
  if (methods.empty()) throw ConfigError("benchmark needs at least one method");
  if (n_values.empty() && base.n == 0) {
    throw ConfigError("benchmark needs n (per-document word count)");
  }
  for (std::size_t m : m_values) {
    if (m == 0) throw ConfigError("benchmark m values must be positive");
  }
  for (std::size_t n : n_values) {
    if (n == 0) throw ConfigError("benchmark n values must be positive");
  }
}

void apply_grid_spec(BenchConfig& config, const std::string& spec) {
  std::stringstream groups(spec);
  std::string group;
  while (std::getline(groups, group, ';')) {
    if (group.empty()) continue;
    const std::size_t eq = group.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("grid spec entry '" + group + "' is not key=v1,v2,...");
    }
    const std::string key = group.substr(0, eq);
    std::vector<std::size_t> values;
    std::stringstream items(group.substr(eq + 1));
    std::string item;
    while (std::getline(items, item, ',')) {
      try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(item, &pos);
        if (pos != item.size()) throw std::invalid_argument(item);
        values.push_back(static_cast<std::size_t>(v));
      } catch (const std::exception&) {
        throw ConfigError("grid spec value '" + item + "' is not a positive integer");
      }
    }
    if (values.empty()) {
      throw ConfigError("grid spec key '" + key + "' has no values");
    }
    if (key == "m") {
      config.m_values = values;
    } else if (key == "n") {
      config.n_values = values;
    } else {
      throw ConfigError("grid spec key '" + key + "' is not supported (use m, n)");
    }
  }
}

BenchResult run_benchmark(const BenchConfig& config,
                          const std::function<void(const BenchRow&)>& on_row) {
  config.validate();
  const std::vector<std::size_t> n_values =
      config.n_values.empty() ? std::vector<std::size_t>{config.base.n} : config.n_values;

  BenchResult result;
  for (std::size_t m : config.m_values) {
    for (std::size_t n : n_values) {
      const std::uint64_t cell_seed = derive_seed(
          config.base.seed, "cell-m" + std::to_string(m) + "-n" + std::to_string(n));
      for (std::size_t trial = 0; trial < config.trials; ++trial) {
        // One instance per (m, n, trial), shared across methods so the
        // comparison sees identical corpora.
        GeneratorConfig gen = config.base;
        gen.mode = GenMode::sampled;
        gen.m = m;
        gen.n = n;
        gen.seed = derive_seed(cell_seed, trial);
        gen.threads = config.threads;

        GroundTruth gt = generate_beta(gen);
        const SparseCorpus corpus = generate_theta_and_docs(gt, gen);
        const TheoremParams params = theorem_parameters(gt);

        for (DetectMethod method : config.methods) {
          BenchRow row;
          row.method = detect_method_name(method);
          row.m = m;
          row.n = n;
          row.trial = trial;
          row.matched_l1 = std::numeric_limits<double>::quiet_NaN();

          const PipelineConfig pc = cell_pipeline_config(config, method, params);
          const std::uint64_t fit_seed = derive_seed(gen.seed, row.method);
          const auto start = std::chrono::steady_clock::now();
          try {
            const PipelineResult fit = fit_pipeline(corpus, fit_seed, pc);
            row.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            row.matched_l1 = matched_l1_error(fit.model, gt).matched_l1;
          } catch (const std::exception& e) {
            row.seconds =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                    .count();
            row.error = e.what();
          }
          if (on_row) on_row(row);
          result.rows.push_back(std::move(row));
        }
      }
    }
  }
  return result;
}

std::string bench_rows_csv(const BenchResult& result) {
  std::ostringstream out;
  out << "method,m,n,trial,matched_l1,seconds,error\n";
  for (const BenchRow& row : result.rows) {
    out << row.method << ',' << row.m << ',' << row.n << ',' << row.trial << ','
        << format_double(row.matched_l1) << ',' << format_double(row.seconds) << ','
        << csv_escape(row.error) << '\n';
  }
  return out.str();
}

std::string bench_summary_csv(const BenchResult& result) {
  struct Cell {
    std::size_t ok = 0;
    std::size_t failures = 0;
    double sum_l1 = 0.0;
    double sum_seconds = 0.0;
  };
  std::map<std::tuple<std::string, std::size_t, std::size_t>, Cell> cells;
  for (const BenchRow& row : result.rows) {
    Cell& cell = cells[{row.method, row.m, row.n}];
    if (row.error.empty() && !std::isnan(row.matched_l1)) {
      ++cell.ok;
      cell.sum_l1 += row.matched_l1;
      cell.sum_seconds += row.seconds;
    } else {
      ++cell.failures;
    }
  }
  std::ostringstream out;
  out << "method,m,n,trials,failures,mean_matched_l1,mean_seconds\n";
  for (const auto& [key, cell] : cells) {
    const auto& [method, m, n] = key;
    const double denom = cell.ok > 0 ? static_cast<double>(cell.ok) : 1.0;
    out << method << ',' << m << ',' << n << ',' << (cell.ok + cell.failures) << ','
        << cell.failures << ','
        << (cell.ok > 0 ? format_double(cell.sum_l1 / denom) : std::string{}) << ','
        << (cell.ok > 0 ? format_double(cell.sum_seconds / denom) : std::string{}) << '\n';
  }
  return out.str();
}

}  // namespace septopic
