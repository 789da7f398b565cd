#include "septopic/detect.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "septopic/parallel.hpp"
#include "septopic/rng.hpp"

namespace septopic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::uint32_t> non_empty_words(const CooccurrenceStats& stats) {
  std::vector<std::uint32_t> out;
  out.reserve(stats.num_words());
  for (std::size_t i = 0; i < stats.num_words(); ++i) {
    if (!stats.empty_word(i)) out.push_back(static_cast<std::uint32_t>(i));
  }
  return out;
}

/// Keeps the highest-scoring words: descending score, ties by ascending index.
NovelWordSet top_by_score(const std::vector<std::uint32_t>& words,
                          const std::vector<double>& score, std::size_t keep,
                          const DetectorConfig& cfg) {
  std::vector<std::uint32_t> order = words;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (score[a] != score[b]) return score[a] > score[b];
    return a < b;
  });
  if (order.size() > keep) order.resize(keep);
  NovelWordSet out;
  out.config = cfg;
  out.indices = std::move(order);
  out.scores.reserve(out.indices.size());
  for (std::uint32_t i : out.indices) out.scores.push_back(score[i]);
  return out;
}

}  // namespace

const char* detect_method_name(DetectMethod method) {
  switch (method) {
    case DetectMethod::ddp_threshold: return "ddp_threshold";
    case DetectMethod::ddp_agnostic: return "ddp_agnostic";
    case DetectMethod::rp: return "rp";
    case DetectMethod::binning: return "binning";
  }
  throw ConfigError("unknown detection method");
}

DetectMethod detect_method_from_name(const std::string& name) {
  if (name == "ddp_threshold") return DetectMethod::ddp_threshold;
  if (name == "ddp_agnostic") return DetectMethod::ddp_agnostic;
  if (name == "rp") return DetectMethod::rp;
  if (name == "binning") return DetectMethod::binning;
  throw ConfigError("unknown detection method: " + name);
}

std::size_t DetectorConfig::resolve_r(std::size_t num_words) const {
  return r != 0 ? r : num_words / 2;
}

std::size_t DetectorConfig::resolve_s() const { return s != 0 ? s : 10 * k; }

std::size_t DetectorConfig::resolve_p() const { return p != 0 ? p : 50 * k; }

void DetectorConfig::validate(std::size_t num_words) const {
  switch (method) {
    case DetectMethod::ddp_threshold:
      if (d <= 0.0) throw ConfigError("threshold detection needs d > 0");
      if (gamma <= 0.0) throw ConfigError("threshold detection needs gamma > 0");
      break;
    case DetectMethod::ddp_agnostic: {
      const std::size_t rr = resolve_r(num_words);
      if (rr < 1 || rr >= num_words) {
        throw ConfigError("agnostic neighborhood size r = " + std::to_string(rr) +
                          " must lie in [1, W)");
      }
      if (s == 0 && k == 0) {
        throw ConfigError("agnostic detection needs s or k to size the keep count");
      }
      const std::size_t ss = resolve_s();
      if (ss < 1) throw ConfigError("agnostic keep count s must be positive");
      if (k > 0 && ss < k) {
        throw ConfigError("agnostic keep count s = " + std::to_string(ss) +
                          " is below the topic count k = " + std::to_string(k));
      }
      break;
    }
    case DetectMethod::rp:
      if (p == 0 && k == 0) {
        throw ConfigError("random projections need p or k to size the direction count");
      }
      if (resolve_p() < 1) throw ConfigError("direction count p must be positive");
      break;
    case DetectMethod::binning:
      if (k < 1) throw ConfigError("binning needs the topic count k");
      if (d <= 0.0) throw ConfigError("binning needs d > 0");
      break;
  }
}

nlohmann::json NovelWordSet::to_json() const {
  nlohmann::json scores_json = nlohmann::json::array();
  for (double v : scores) {
    // JSON has no infinity; an absent-neighborhood margin round-trips as null.
    if (std::isfinite(v)) {
      scores_json.push_back(v);
    } else {
      scores_json.push_back(nullptr);
    }
  }
  return nlohmann::json{
      {"method", detect_method_name(config.method)},
      {"params",
       {{"d", config.d},
        {"gamma", config.gamma},
        {"r", config.r},
        {"s", config.s},
        {"p", config.p},
        {"k", config.k}}},
      {"indices", indices},
      {"scores", scores_json},
      {"seed", config.seed},
  };
}

NovelWordSet NovelWordSet::from_json(const nlohmann::json& j) {
  NovelWordSet out;
  out.config.method = detect_method_from_name(j.at("method").get<std::string>());
  const nlohmann::json& params = j.at("params");
  out.config.d = params.value("d", 0.0);
  out.config.gamma = params.value("gamma", 0.0);
  out.config.r = params.value("r", std::size_t{0});
  out.config.s = params.value("s", std::size_t{0});
  out.config.p = params.value("p", std::size_t{0});
  out.config.k = params.value("k", std::size_t{0});
  out.config.seed = j.value("seed", std::uint64_t{0});
  out.indices = j.at("indices").get<std::vector<std::uint32_t>>();
  for (const nlohmann::json& v : j.at("scores")) {
    out.scores.push_back(v.is_null() ? kInf : v.get<double>());
  }
  if (out.scores.size() != out.indices.size()) {
    throw ConfigError("novel word set: scores and indices lengths differ");
  }
  return out;
}

NovelWordSet ddp_detect(const CooccurrenceStats& stats, const DetectorConfig& cfg) {
  if (cfg.method != DetectMethod::ddp_threshold) {
    throw ConfigError("ddp_detect requires method = ddp_threshold");
  }
  cfg.validate(stats.num_words());
  const std::vector<std::uint32_t> cand = non_empty_words(stats);
  const double d_cut = cfg.d / 2.0;
  const double margin_cut = cfg.gamma / 2.0;

  std::vector<double> score(stats.num_words(), 0.0);
  std::vector<std::uint8_t> novel(stats.num_words(), 0);
  parallel_blocks(cand.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t pos = begin; pos < end; ++pos) {
      const std::uint32_t i = cand[pos];
      const std::vector<double> row = stats.row(i);
      const double cii = stats.diag(i);
      double worst = kInf;
      for (std::uint32_t j : cand) {
        if (j == i) continue;
        const double dij = cii - 2.0 * row[j] + stats.diag(j);
        if (dij >= d_cut) worst = std::min(worst, cii - row[j]);
      }
      score[i] = worst;  // +inf when no word clears the distance cut
      novel[i] = worst >= margin_cut ? 1 : 0;
    }
  });

  NovelWordSet out;
  out.config = cfg;
  for (std::uint32_t i : cand) {
    if (novel[i]) {
      out.indices.push_back(i);
      out.scores.push_back(score[i]);
    }
  }
  return out;
}

NovelWordSet ddp_detect_agnostic(const CooccurrenceStats& stats,
                                 const DetectorConfig& cfg) {
  if (cfg.method != DetectMethod::ddp_agnostic) {
    throw ConfigError("ddp_detect_agnostic requires method = ddp_agnostic");
  }
  cfg.validate(stats.num_words());
  const std::vector<std::uint32_t> cand = non_empty_words(stats);
  const std::size_t rr = cfg.resolve_r(stats.num_words());
  const std::size_t ss = cfg.resolve_s();
  if (ss > cand.size()) {
    throw Error("agnostic keep count s = " + std::to_string(ss) + " exceeds the " +
                std::to_string(cand.size()) + " non-empty words");
  }

  std::vector<double> score(stats.num_words(), 0.0);
  parallel_blocks(cand.size(), cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<std::pair<double, std::uint32_t>> dist;
    for (std::size_t pos = begin; pos < end; ++pos) {
      const std::uint32_t i = cand[pos];
      const std::vector<double> row = stats.row(i);
      const double cii = stats.diag(i);
      dist.clear();
      for (std::uint32_t j : cand) {
        if (j == i) continue;
        dist.emplace_back(cii - 2.0 * row[j] + stats.diag(j), j);
      }
      const std::size_t take = std::min(rr, dist.size());
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(take),
                        dist.end(), [](const auto& a, const auto& b) {
                          if (a.first != b.first) return a.first > b.first;
                          return a.second < b.second;
                        });
      double worst = kInf;
      for (std::size_t t = 0; t < take; ++t) {
        worst = std::min(worst, cii - row[dist[t].second]);
      }
      score[i] = worst;
    }
  });

  return top_by_score(cand, score, ss, cfg);
}

NovelWordSet rp_detect(const NormalizedRows& norm_x, const DetectorConfig& cfg) {
  if (cfg.method != DetectMethod::rp) {
    throw ConfigError("rp_detect requires method = rp");
  }
  cfg.validate(norm_x.num_words);
  const std::size_t w = norm_x.num_words;
  const std::size_t m = norm_x.num_docs;
  const std::size_t pp = cfg.resolve_p();

  std::vector<std::uint32_t> cand;
  for (std::size_t i = 0; i < w; ++i) {
    if (!norm_x.is_empty(i)) cand.push_back(static_cast<std::uint32_t>(i));
  }
  if (cand.empty()) throw Error("random projections: every word row is empty");

  const DocColumns cols = doc_columns(norm_x);
  const std::uint64_t base_seed = derive_seed(cfg.seed, "rp");

  // Per-direction extremes; filled independently, tallied in direction order
  // so the result is identical for any worker count.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> extremes(pp);
  parallel_blocks(pp, cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> proj(w);
    for (std::size_t t = begin; t < end; ++t) {
      Rng rng(derive_seed(base_seed, static_cast<std::uint64_t>(t)));
      const std::vector<double> dir = sample_unit_sphere(m, rng);
      std::fill(proj.begin(), proj.end(), 0.0);
      for (std::size_t doc = 0; doc < m; ++doc) {
        const double dv = dir[doc];
        for (const auto& [word, value] : cols.cols[doc]) proj[word] += value * dv;
      }
      std::uint32_t arg_max = cand.front();
      std::uint32_t arg_min = cand.front();
      for (std::uint32_t i : cand) {
        if (proj[i] > proj[arg_max]) arg_max = i;
        if (proj[i] < proj[arg_min]) arg_min = i;
      }
      extremes[t] = {arg_max, arg_min};
    }
  });

  std::vector<double> wins(w, 0.0);
  for (const auto& [arg_max, arg_min] : extremes) {
    wins[arg_max] += 1.0;
    wins[arg_min] += 1.0;
  }
  std::vector<std::uint32_t> winners;
  for (std::uint32_t i : cand) {
    if (wins[i] > 0.0) winners.push_back(i);
  }
  return top_by_score(winners, wins, winners.size(), cfg);
}

NovelWordSet binning_detect(const DocColumns& raw_cols, const NormalizedRows& norm_x,
                            const NormalizedRows& norm_xp, const DetectorConfig& cfg) {
  if (cfg.method != DetectMethod::binning) {
    throw ConfigError("binning_detect requires method = binning");
  }
  const std::size_t w = raw_cols.num_words;
  const std::size_t m = raw_cols.num_docs;
  cfg.validate(w);
  if (m == 0) throw ConfigError("binning needs at least one document");
  if (norm_x.num_words != w || norm_xp.num_words != w) {
    throw ConfigError("binning inputs disagree on vocabulary size");
  }

  // Admission only touches the diagonal and O(k * W) entries of C, so the
  // on-demand representation (dense_cap = 0) keeps this method cheap.
  CooccurOptions copts;
  copts.dense_cap = 0;
  copts.threads = cfg.threads;
  const CooccurrenceStats stats = compute_cooccurrence(norm_x, norm_xp, m, copts);
  const std::vector<std::uint32_t> cand = non_empty_words(stats);
  if (cand.empty()) throw Error("binning: every word row is empty");

  std::size_t b_count = static_cast<std::size_t>(std::sqrt(static_cast<double>(m)));
  while ((b_count + 1) * (b_count + 1) <= m) ++b_count;
  while (b_count > 1 && b_count * b_count > m) --b_count;

  const std::uint64_t base_seed = derive_seed(cfg.seed, "binning");

  // Bin b owns documents {d : d mod b_count == b}; sizes differ by at most 1.
  // A winner of -1 marks a bin with no candidate mass.
  std::vector<std::int64_t> winners(b_count, -1);
  parallel_blocks(b_count, cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<double> totals(w);
    std::vector<double> proj(w);
    for (std::size_t b = begin; b < end; ++b) {
      const std::size_t bin_size = (m - b + b_count - 1) / b_count;
      Rng rng(derive_seed(base_seed, static_cast<std::uint64_t>(b)));
      const std::vector<double> dir = sample_unit_sphere(bin_size, rng);

      std::fill(totals.begin(), totals.end(), 0.0);
      for (std::size_t d = b; d < m; d += b_count) {
        for (const auto& [word, value] : raw_cols.cols[d]) totals[word] += value;
      }
      std::fill(proj.begin(), proj.end(), 0.0);
      std::size_t pos = 0;
      for (std::size_t d = b; d < m; d += b_count, ++pos) {
        const double dv = dir[pos];
        for (const auto& [word, value] : raw_cols.cols[d]) {
          proj[word] += value / totals[word] * dv;
        }
      }
      std::int64_t best = -1;
      for (std::uint32_t i : cand) {
        if (totals[i] <= 0.0) continue;  // word absent from this bin
        if (best < 0 || proj[i] > proj[static_cast<std::size_t>(best)]) best = i;
      }
      winners[b] = best;
    }
  });

  std::vector<double> p_hat(w, 0.0);
  for (std::int64_t win : winners) {
    if (win >= 0) p_hat[static_cast<std::size_t>(win)] += 1.0;
  }
  for (double& v : p_hat) v /= static_cast<double>(b_count);

  std::vector<std::uint32_t> order = cand;
  std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
    if (p_hat[a] != p_hat[b]) return p_hat[a] > p_hat[b];
    return a < b;
  });

  NovelWordSet out;
  out.config = cfg;
  const double d_cut = cfg.d / 2.0;
  for (std::uint32_t i : order) {
    bool admissible = true;
    for (std::uint32_t j : out.indices) {
      if (distance(stats, i, j) < d_cut) {
        admissible = false;
        break;
      }
    }
    if (!admissible) continue;
    out.indices.push_back(i);
    out.scores.push_back(p_hat[i]);
    if (out.indices.size() == cfg.k) break;
  }
  if (out.indices.size() < cfg.k) {
    throw Error("binning admitted only " + std::to_string(out.indices.size()) +
                " of the " + std::to_string(cfg.k) + " requested novel words");
  }
  return out;
}

NovelWordSet binning_detect(const SplitPair& split, const DetectorConfig& cfg) {
  if (split.first.num_words != split.second.num_words ||
      split.first.num_docs != split.second.num_docs) {
    throw ConfigError("binning: split halves disagree on corpus shape");
  }
  // Bins are taken over the unsplit counts X = first + second; the split
  // halves only feed the admission distances.
  DocColumns raw;
  raw.num_words = split.first.num_words;
  raw.num_docs = split.first.num_docs;
  raw.cols.resize(raw.num_docs);
  for (std::size_t d = 0; d < raw.num_docs; ++d) {
    const auto& a = split.first.docs[d];
    const auto& b = split.second.docs[d];
    SparseRow& col = raw.cols[d];
    col.reserve(a.size() + b.size());
    std::size_t ia = 0;
    std::size_t ib = 0;
    while (ia < a.size() || ib < b.size()) {
      if (ib == b.size() || (ia < a.size() && a[ia].first < b[ib].first)) {
        col.emplace_back(a[ia].first, static_cast<double>(a[ia].second));
        ++ia;
      } else if (ia == a.size() || b[ib].first < a[ia].first) {
        col.emplace_back(b[ib].first, static_cast<double>(b[ib].second));
        ++ib;
      } else {
        col.emplace_back(a[ia].first,
                         static_cast<double>(a[ia].second) + static_cast<double>(b[ib].second));
        ++ia;
        ++ib;
      }
    }
  }
  return binning_detect(raw, normalize_rows(split.first), normalize_rows(split.second), cfg);
}

}  // namespace septopic
