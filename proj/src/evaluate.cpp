#include "septopic/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace septopic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string word_name(const std::vector<std::string>& vocab, std::size_t i) {
  if (!vocab.empty()) return vocab[i];
  return "w" + std::to_string(i);
}

/// Per-topic ranking: t highest-probability words, descending, ties by
/// ascending index.
std::vector<std::vector<std::uint32_t>> rank_words(const TopicModel& model,
                                                   std::size_t t) {
  const std::size_t w = model.num_words();
  const std::size_t keep = std::min(t, w);
  std::vector<std::vector<std::uint32_t>> ranked(model.num_topics());
  std::vector<std::uint32_t> order(w);
  for (std::size_t k = 0; k < model.num_topics(); ++k) {
    for (std::size_t i = 0; i < w; ++i) order[i] = static_cast<std::uint32_t>(i);
    const auto col = model.beta.col(static_cast<Eigen::Index>(k));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep),
                      order.end(), [&](std::uint32_t a, std::uint32_t b) {
                        const double pa = col[a];
                        const double pb = col[b];
                        if (pa != pb) return pa > pb;
                        return a < b;
                      });
    ranked[k].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return ranked;
}

}  // namespace

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j{
      {"matched_l1", matched_l1},
      {"mean_element_l1", mean_element_l1},
      {"per_topic_l1", per_topic_l1},
      {"matching", matching},
      {"runtime_breakdown", runtime_breakdown},
  };
  j["novel_precision"] =
      novel_precision < 0.0 ? nlohmann::json() : nlohmann::json(novel_precision);
  j["novel_recall"] =
      novel_recall < 0.0 ? nlohmann::json() : nlohmann::json(novel_recall);
  return j;
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
  EvalReport r;
  r.matched_l1 = j.at("matched_l1").get<double>();
  r.mean_element_l1 = j.value("mean_element_l1", 0.0);
  r.per_topic_l1 = j.value("per_topic_l1", std::vector<double>{});
  r.matching = j.value("matching", std::vector<std::size_t>{});
  const nlohmann::json prec = j.value("novel_precision", nlohmann::json());
  const nlohmann::json rec = j.value("novel_recall", nlohmann::json());
  r.novel_precision = prec.is_null() ? -1.0 : prec.get<double>();
  r.novel_recall = rec.is_null() ? -1.0 : rec.get<double>();
  r.runtime_breakdown =
      j.value("runtime_breakdown", std::map<std::string, double>{});
  return r;
}

std::vector<std::size_t> hungarian_min_assignment(const Eigen::MatrixXd& cost) {
  if (cost.rows() != cost.cols()) {
    throw ConfigError("assignment cost matrix must be square");
  }
  if (!cost.allFinite()) throw Error("assignment cost matrix has non-finite entries");
  const int n = static_cast<int>(cost.rows());
  if (n == 0) return {};

  // Potentials method over a virtual 0th row/column; p[j] is the row matched
  // to column j.
  std::vector<double> u(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<double> v(static_cast<std::size_t>(n) + 1, 0.0);
  std::vector<int> p(static_cast<std::size_t>(n) + 1, 0);
  std::vector<int> way(static_cast<std::size_t>(n) + 1, 0);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::vector<double> minv(static_cast<std::size_t>(n) + 1, kInf);
    std::vector<char> used(static_cast<std::size_t>(n) + 1, 0);
    do {
      used[static_cast<std::size_t>(j0)] = 1;
      const int i0 = p[static_cast<std::size_t>(j0)];
      int j1 = -1;
      double delta = kInf;
      for (int j = 1; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) continue;
        const double cur =
            cost(i0 - 1, j - 1) - u[static_cast<std::size_t>(i0)] - v[static_cast<std::size_t>(j)];
        if (cur < minv[static_cast<std::size_t>(j)]) {
          minv[static_cast<std::size_t>(j)] = cur;
          way[static_cast<std::size_t>(j)] = j0;
        }
        if (minv[static_cast<std::size_t>(j)] < delta) {
          delta = minv[static_cast<std::size_t>(j)];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[static_cast<std::size_t>(j)]) {
          u[static_cast<std::size_t>(p[static_cast<std::size_t>(j)])] += delta;
          v[static_cast<std::size_t>(j)] -= delta;
        } else {
          minv[static_cast<std::size_t>(j)] -= delta;
        }
      }
      j0 = j1;
    } while (p[static_cast<std::size_t>(j0)] != 0);
    do {
      const int j1 = way[static_cast<std::size_t>(j0)];
      p[static_cast<std::size_t>(j0)] = p[static_cast<std::size_t>(j1)];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<std::size_t> assign(static_cast<std::size_t>(n), 0);
  for (int j = 1; j <= n; ++j) {
    if (p[static_cast<std::size_t>(j)] > 0) {
      assign[static_cast<std::size_t>(p[static_cast<std::size_t>(j)] - 1)] =
          static_cast<std::size_t>(j - 1);
    }
  }
  return assign;
}

EvalReport matched_l1_error(const TopicModel& est, const GroundTruth& truth) {
  if (est.beta.rows() != truth.beta.rows() || est.beta.cols() != truth.beta.cols()) {
    throw ConfigError("estimated and true topic matrices disagree on shape");
  }
  const Eigen::Index k = est.beta.cols();
  Eigen::MatrixXd cost(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) {
      cost(a, b) = (est.beta.col(a) - truth.beta.col(b)).lpNorm<1>();
    }
  }
  EvalReport report;
  report.matching = hungarian_min_assignment(cost);
  report.per_topic_l1.resize(static_cast<std::size_t>(k));
  for (Eigen::Index a = 0; a < k; ++a) {
    const double c = cost(a, static_cast<Eigen::Index>(report.matching[static_cast<std::size_t>(a)]));
    report.per_topic_l1[static_cast<std::size_t>(a)] = c;
    report.matched_l1 += c;
  }
  const double cells = static_cast<double>(est.beta.rows()) * static_cast<double>(k);
  report.mean_element_l1 = cells > 0.0 ? report.matched_l1 / cells : 0.0;
  return report;
}

std::pair<double, double> novel_detection_score(const NovelWordSet& found,
                                                const GroundTruth& truth) {
  std::set<std::uint32_t> expected;
  for (const auto& topic_set : truth.novel_sets) {
    expected.insert(topic_set.begin(), topic_set.end());
  }
  if (expected.empty()) throw ConfigError("ground truth has no novel-word sets");
  std::size_t hits = 0;
  for (std::uint32_t i : found.indices) hits += expected.count(i);
  const double precision =
      found.indices.empty()
          ? 0.0
          : static_cast<double>(hits) / static_cast<double>(found.indices.size());
  const double recall = static_cast<double>(hits) / static_cast<double>(expected.size());
  return {precision, recall};
}

std::string top_words_report(const TopicModel& model,
                             const std::vector<std::string>& vocab, std::size_t t) {
  if (!vocab.empty() && vocab.size() != model.num_words()) {
    throw ConfigError("vocabulary size disagrees with the topic matrix");
  }
  const auto ranked = rank_words(model, t);
  const std::size_t k = model.num_topics();
  const std::size_t depth = ranked.empty() ? 0 : ranked.front().size();

  // Render cells first so each column can be padded to its widest entry.
  std::vector<std::vector<std::string>> cells(k);
  std::vector<std::size_t> width(k);
  char buf[64];
  for (std::size_t c = 0; c < k; ++c) {
    cells[c].push_back("topic " + std::to_string(c));
    for (std::uint32_t word : ranked[c]) {
      std::snprintf(buf, sizeof(buf), " %.4f",
                    model.beta(static_cast<Eigen::Index>(word), static_cast<Eigen::Index>(c)));
      cells[c].push_back(word_name(vocab, word) + buf);
    }
    for (const std::string& cell : cells[c]) width[c] = std::max(width[c], cell.size());
  }

  std::ostringstream out;
  for (std::size_t r = 0; r <= depth; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      if (c > 0) out << "  ";
      out << cells[c][r];
      if (c + 1 < k) out << std::string(width[c] - cells[c][r].size(), ' ');
    }
    out << '\n';
  }
  return out.str();
}

std::string top_words_csv(const TopicModel& model,
                          const std::vector<std::string>& vocab, std::size_t t) {
  if (!vocab.empty() && vocab.size() != model.num_words()) {
    throw ConfigError("vocabulary size disagrees with the topic matrix");
  }
  const auto ranked = rank_words(model, t);
  std::ostringstream out;
  out << "topic,rank,word,probability\n";
  char buf[64];
  for (std::size_t c = 0; c < ranked.size(); ++c) {
    for (std::size_t r = 0; r < ranked[c].size(); ++r) {
      const std::uint32_t word = ranked[c][r];
      std::snprintf(buf, sizeof(buf), "%.17g",
                    model.beta(static_cast<Eigen::Index>(word), static_cast<Eigen::Index>(c)));
      out << c << ',' << r << ',' << word_name(vocab, word) << ',' << buf << '\n';
    }
  }
  return out.str();
}

}  // namespace septopic
