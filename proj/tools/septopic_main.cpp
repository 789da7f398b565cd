// Command-line front end: fit | synth | eval | bench.
//
// Exit codes: 0 success, 1 runtime failure (message names the failing
// stage), 2 usage or configuration errors.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "septopic/bench.hpp"
#include "septopic/evaluate.hpp"
#include "septopic/matrix_io.hpp"
#include "septopic/pipeline.hpp"
#include "septopic/synth.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct GlobalOpts {
  std::uint64_t seed = 0;
  int threads = 0;
  std::string out_dir = ".";
  std::string format = "json";
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw septopic::Error("cannot write " + path.string());
  out << text;
  if (!out) throw septopic::Error("failed writing " + path.string());
}

void write_json_file(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

/// Every run records the resolved configuration next to its artifacts.
void write_manifest(const GlobalOpts& g, const std::string& command,
                    const std::vector<std::string>& argv, const json& config) {
  json manifest{
      {"version", septopic::kVersion},
      {"command", command},
      {"argv", argv},
      {"seed", g.seed},
      {"threads", g.threads},
      {"out_dir", g.out_dir},
      {"format", g.format},
      {"config", config},
  };
  write_json_file(fs::path(g.out_dir) / "manifest.json", manifest);
}

septopic::DetectMethod method_from_cli(const std::string& name) {
  if (name == "ddp") return septopic::DetectMethod::ddp_threshold;
  if (name == "ddp-agnostic") return septopic::DetectMethod::ddp_agnostic;
  if (name == "rp") return septopic::DetectMethod::rp;
  if (name == "binning") return septopic::DetectMethod::binning;
  throw septopic::ConfigError("unknown method: " + name);
}

std::vector<double> broadcast_alpha(const std::vector<double>& alpha, std::size_t k) {
  if (alpha.size() == 1) return std::vector<double>(k, alpha.front());
  return alpha;
}

std::string report_table(const septopic::EvalReport& report, char sep) {
  std::ostringstream out;
  out << "metric" << sep << "value\n";
  out << "matched_l1" << sep << report.matched_l1 << '\n';
  out << "mean_element_l1" << sep << report.mean_element_l1 << '\n';
  if (report.novel_precision >= 0.0) {
    out << "novel_precision" << sep << report.novel_precision << '\n';
    out << "novel_recall" << sep << report.novel_recall << '\n';
  }
  for (std::size_t k = 0; k < report.per_topic_l1.size(); ++k) {
    out << "per_topic_l1_" << k << sep << report.per_topic_l1[k] << '\n';
  }
  for (std::size_t k = 0; k < report.matching.size(); ++k) {
    out << "matching_" << k << sep << report.matching[k] << '\n';
  }
  return out.str();
}

// ---------------------------------------------------------------- fit -----

struct FitOpts {
  std::string corpus_path;
  std::string vocab_path;
  std::size_t k = 0;
  std::string method = "ddp";
  double d = 0.0;
  double gamma = 0.0;
  std::size_t r = 0;
  std::size_t s = 0;
  std::size_t p = 0;
  std::string cluster;  // "", "threshold", "spectral"
  bool average_reps = true;
  std::size_t dense_cap = 20000;
};

int cmd_fit(const GlobalOpts& g, const FitOpts& o, const std::vector<std::string>& argv) {
  const septopic::DetectMethod method = method_from_cli(o.method);

  septopic::PipelineConfig pc;
  pc.k = o.k;
  pc.threads = g.threads;
  pc.dense_cap = o.dense_cap;
  pc.average_reps = o.average_reps;
  pc.detector.method = method;
  pc.detector.d = o.d;
  pc.detector.gamma = o.gamma;
  pc.detector.r = o.r;
  pc.detector.s = o.s;
  pc.detector.p = o.p;
  pc.detector.k = o.k;
  if (o.cluster.empty()) {
    // DDP-threshold and binning carry a calibrated d, so the threshold graph
    // applies; the agnostic and RP detectors default to spectral grouping.
    pc.cluster_method = (method == septopic::DetectMethod::ddp_threshold ||
                         method == septopic::DetectMethod::binning)
                            ? septopic::ClusterMethod::threshold_components
                            : septopic::ClusterMethod::spectral;
  } else if (o.cluster == "threshold") {
    pc.cluster_method = septopic::ClusterMethod::threshold_components;
  } else {
    pc.cluster_method = septopic::ClusterMethod::spectral;
  }
  if (pc.cluster_method == septopic::ClusterMethod::threshold_components && o.d <= 0.0) {
    throw septopic::ConfigError("threshold clustering needs --d > 0");
  }

  const fs::path out_dir(g.out_dir);
  fs::create_directories(out_dir);
  write_manifest(g, "fit", argv,
                 json{{"corpus", o.corpus_path},
                      {"vocab", o.vocab_path},
                      {"k", o.k},
                      {"method", o.method},
                      {"d", o.d},
                      {"gamma", o.gamma},
                      {"r", o.r},
                      {"s", o.s},
                      {"p", o.p},
                      {"cluster", o.cluster.empty() ? std::string("auto") : o.cluster},
                      {"average_reps", o.average_reps},
                      {"dense_cap", o.dense_cap}});

  const septopic::SparseCorpus corpus = septopic::load_uci_bow(
      o.corpus_path, o.vocab_path.empty()
                         ? std::optional<fs::path>{}
                         : std::optional<fs::path>{o.vocab_path});
  pc.detector.validate(corpus.num_words);

  const septopic::PipelineResult result = septopic::fit_pipeline(corpus, g.seed, pc);

  septopic::save_topic_model(result.model, out_dir / "topic_model.tsv",
                             out_dir / "topic_model.json");
  json novel_envelope = result.novel.to_json();
  novel_envelope["cluster"] = result.clusters.to_json();
  write_json_file(out_dir / "novel_words.json", novel_envelope);
  write_json_file(out_dir / "timing.json", json(result.timings));

  std::cout << "detected " << result.novel.indices.size() << " novel words, "
            << result.model.num_topics() << " topics over "
            << result.model.num_words() << " words\n";
  std::cout << "wrote " << (out_dir / "topic_model.tsv").string() << ", "
            << (out_dir / "novel_words.json").string() << ", "
            << (out_dir / "timing.json").string() << '\n';
  return 0;
}

// -------------------------------------------------------------- synth -----

struct SynthOpts {
  std::size_t w = 500;
  std::size_t k = 5;
  double rho = 0.2;
  std::size_t m = 0;
  std::size_t n = 100;
  std::vector<double> alpha{0.1};
};

int cmd_synth(const GlobalOpts& g, const SynthOpts& o,
              const std::vector<std::string>& argv) {
  septopic::GeneratorConfig gen;
  gen.w = o.w;
  gen.k = o.k;
  gen.rho = o.rho;
  gen.m = o.m;
  gen.n = o.n;
  gen.alpha = broadcast_alpha(o.alpha, o.k);
  gen.seed = g.seed;
  gen.mode = septopic::GenMode::sampled;
  gen.threads = g.threads;
  gen.validate();

  const fs::path out_dir(g.out_dir);
  fs::create_directories(out_dir);
  write_manifest(g, "synth", argv,
                 json{{"w", o.w},
                      {"k", o.k},
                      {"rho", o.rho},
                      {"m", o.m},
                      {"n", o.n},
                      {"alpha", gen.alpha}});

  septopic::GroundTruth gt = septopic::generate_beta(gen);
  const septopic::SparseCorpus corpus = septopic::generate_theta_and_docs(gt, gen);
  septopic::save_uci_bow(corpus, out_dir / "docword.txt");
  septopic::save_ground_truth(gt, out_dir);

  std::cout << "wrote " << (out_dir / "docword.txt").string() << " ("
            << corpus.num_docs << " docs, " << corpus.num_words
            << " words) and ground truth in " << out_dir.string() << '\n';
  return 0;
}

// --------------------------------------------------------------- eval -----

struct EvalOpts {
  std::string model_path;
  std::string truth_dir;
  std::string novel_path;
};

int cmd_eval(const GlobalOpts& g, const EvalOpts& o,
             const std::vector<std::string>& argv) {
  const fs::path out_dir(g.out_dir);
  fs::create_directories(out_dir);
  write_manifest(g, "eval", argv,
                 json{{"model", o.model_path},
                      {"truth", o.truth_dir},
                      {"novel", o.novel_path}});

  septopic::TopicModel model;
  model.beta = septopic::read_matrix_tsv(o.model_path);
  const septopic::GroundTruth truth = septopic::load_ground_truth(o.truth_dir);
  septopic::EvalReport report = septopic::matched_l1_error(model, truth);

  if (!o.novel_path.empty()) {
    std::ifstream in(o.novel_path);
    if (!in) throw septopic::Error("cannot open " + o.novel_path);
    json envelope;
    in >> envelope;
    const septopic::NovelWordSet novel = septopic::NovelWordSet::from_json(envelope);
    const auto [precision, recall] = septopic::novel_detection_score(novel, truth);
    report.novel_precision = precision;
    report.novel_recall = recall;
  }

  if (g.format == "json") {
    const json j = report.to_json();
    write_json_file(out_dir / "eval.json", j);
    std::cout << j.dump(2) << '\n';
  } else {
    const char sep = g.format == "csv" ? ',' : '\t';
    const std::string table = report_table(report, sep);
    write_text(out_dir / (g.format == "csv" ? "eval.csv" : "eval.tsv"), table);
    std::cout << table;
  }
  return 0;
}

// -------------------------------------------------------------- bench -----

struct BenchOpts {
  std::size_t w = 500;
  std::size_t k = 5;
  double rho = 0.2;
  std::size_t n = 100;
  std::vector<double> alpha{0.1};
  std::string grid;
  std::size_t trials = 0;
  std::string methods = "ddp-agnostic,rp";
  bool average_reps = true;
  std::size_t dense_cap = 20000;
};

int cmd_bench(const GlobalOpts& g, const BenchOpts& o,
              const std::vector<std::string>& argv) {
  septopic::BenchConfig bc;
  bc.base.w = o.w;
  bc.base.k = o.k;
  bc.base.rho = o.rho;
  bc.base.n = o.n;
  bc.base.alpha = broadcast_alpha(o.alpha, o.k);
  bc.base.seed = g.seed;
  bc.trials = o.trials;
  bc.average_reps = o.average_reps;
  bc.dense_cap = o.dense_cap;
  bc.threads = g.threads;
  septopic::apply_grid_spec(bc, o.grid);
  std::stringstream names(o.methods);
  std::string name;
  while (std::getline(names, name, ',')) {
    if (!name.empty()) bc.methods.push_back(method_from_cli(name));
  }
  bc.validate();

  const fs::path out_dir(g.out_dir);
  fs::create_directories(out_dir);
  write_manifest(g, "bench", argv,
                 json{{"w", o.w},
                      {"k", o.k},
                      {"rho", o.rho},
                      {"n", o.n},
                      {"alpha", bc.base.alpha},
                      {"grid", o.grid},
                      {"trials", o.trials},
                      {"methods", o.methods},
                      {"average_reps", o.average_reps},
                      {"dense_cap", o.dense_cap}});

  const septopic::BenchResult result =
      septopic::run_benchmark(bc, [](const septopic::BenchRow& row) {
        std::cerr << row.method << " m=" << row.m << " n=" << row.n << " trial "
                  << row.trial << ": ";
        if (row.error.empty()) {
          std::cerr << "matched_l1=" << row.matched_l1 << " (" << row.seconds << "s)\n";
        } else {
          std::cerr << "FAILED: " << row.error << '\n';
        }
      });

  write_text(out_dir / "bench_rows.csv", septopic::bench_rows_csv(result));
  write_text(out_dir / "bench_summary.csv", septopic::bench_summary_csv(result));
  std::cout << septopic::bench_summary_csv(result);
  std::cout << "wrote " << (out_dir / "bench_rows.csv").string() << " and "
            << (out_dir / "bench_summary.csv").string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"separable topic model recovery from sparse word counts"};
  app.require_subcommand(1);

  GlobalOpts g;
  app.add_option("--seed", g.seed, "master random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker cap, 0 = all cores")
      ->envname("SEPTOPIC_THREADS")
      ->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for output artifacts")
      ->capture_default_str();
  app.add_option("--format", g.format, "report format")
      ->check(CLI::IsMember({"json", "tsv", "csv"}))
      ->capture_default_str();

  FitOpts fit;
  CLI::App* fit_cmd = app.add_subcommand("fit", "recover a topic matrix from a corpus");
  fit_cmd->add_option("corpus", fit.corpus_path, "UCI docword file")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--vocab", fit.vocab_path, "vocabulary file (one token per line)")
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--k", fit.k, "number of topics")
      ->required()
      ->check(CLI::Range(std::size_t{2}, std::numeric_limits<std::size_t>::max()));
  fit_cmd->add_option("--method", fit.method, "novel-word detector")
      ->check(CLI::IsMember({"ddp", "ddp-agnostic", "rp", "binning"}))
      ->capture_default_str();
  fit_cmd->add_option("--d", fit.d, "distance threshold (ddp, binning, threshold clustering)");
  fit_cmd->add_option("--gamma", fit.gamma, "margin threshold (ddp)");
  fit_cmd->add_option("--r", fit.r, "agnostic neighborhood size (default W/2)");
  fit_cmd->add_option("--s", fit.s, "agnostic keep count (default 10k)");
  fit_cmd->add_option("--p", fit.p, "random projection count (default 50k)");
  fit_cmd->add_option("--cluster", fit.cluster,
                      "clustering mode (default: threshold for ddp/binning, spectral otherwise)")
      ->check(CLI::IsMember({"threshold", "spectral"}));
  fit_cmd->add_flag("--average-reps,!--no-average-reps", fit.average_reps,
                    "average cluster rows into representatives")
      ->capture_default_str();
  fit_cmd->add_option("--dense-cap", fit.dense_cap,
                      "max W for the dense co-occurrence matrix")
      ->capture_default_str();

  SynthOpts synth;
  CLI::App* synth_cmd =
      app.add_subcommand("synth", "generate a synthetic corpus with ground truth");
  synth_cmd->add_option("--w", synth.w, "vocabulary size")->capture_default_str();
  synth_cmd->add_option("--k", synth.k, "number of topics")->capture_default_str();
  synth_cmd->add_option("--rho", synth.rho, "novel-word fraction")->capture_default_str();
  synth_cmd->add_option("--m", synth.m, "number of documents")->required();
  synth_cmd->add_option("--n", synth.n, "tokens per document")->capture_default_str();
  synth_cmd
      ->add_option("--alpha", synth.alpha,
                   "Dirichlet parameters (single value broadcasts to K)")
      ->capture_default_str();

  EvalOpts eval;
  CLI::App* eval_cmd =
      app.add_subcommand("eval", "score a topic model against ground truth");
  eval_cmd->add_option("model", eval.model_path, "topic model TSV")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("truth", eval.truth_dir, "ground-truth directory")
      ->required()
      ->check(CLI::ExistingDirectory);
  eval_cmd->add_option("--novel", eval.novel_path,
                       "novel-word JSON for precision/recall")
      ->check(CLI::ExistingFile);

  BenchOpts bench;
  CLI::App* bench_cmd =
      app.add_subcommand("bench", "error-vs-corpus-size benchmark grid");
  bench_cmd->add_option("--w", bench.w, "vocabulary size")->capture_default_str();
  bench_cmd->add_option("--k", bench.k, "number of topics")->capture_default_str();
  bench_cmd->add_option("--rho", bench.rho, "novel-word fraction")->capture_default_str();
  bench_cmd->add_option("--n", bench.n, "tokens per document")->capture_default_str();
  bench_cmd
      ->add_option("--alpha", bench.alpha,
                   "Dirichlet parameters (single value broadcasts to K)")
      ->capture_default_str();
  bench_cmd->add_option("--grid", bench.grid, "grid spec, e.g. m=500,1000;n=100")
      ->required();
  bench_cmd->add_option("--trials", bench.trials, "trials per cell")
      ->required()
      ->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()));
  bench_cmd->add_option("--methods", bench.methods, "comma-separated detector list")
      ->capture_default_str();
  bench_cmd->add_flag("--average-reps,!--no-average-reps", bench.average_reps,
                      "average cluster rows into representatives")
      ->capture_default_str();
  bench_cmd->add_option("--dense-cap", bench.dense_cap,
                        "max W for the dense co-occurrence matrix")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;  // help/version exit 0; usage errors exit 2
  }

  const std::vector<std::string> args(argv, argv + argc);
  try {
    if (fit_cmd->parsed()) return cmd_fit(g, fit, args);
    if (synth_cmd->parsed()) return cmd_synth(g, synth, args);
    if (eval_cmd->parsed()) return cmd_eval(g, eval, args);
    if (bench_cmd->parsed()) return cmd_bench(g, bench, args);
  } catch (const septopic::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}
