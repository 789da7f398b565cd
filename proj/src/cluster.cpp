#include "septopic/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "septopic/rng.hpp"

namespace septopic {

namespace {

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

/// Vertex groups (by position into `words`) relabeled so that clusters are
/// ordered by their smallest member word index.
std::vector<std::vector<std::size_t>> canonical_groups(
    const std::vector<std::uint32_t>& words, const std::vector<std::size_t>& raw_label,
    std::size_t k) {
  std::vector<std::vector<std::size_t>> groups(k);
  for (std::size_t v = 0; v < raw_label.size(); ++v) groups[raw_label[v]].push_back(v);
  std::vector<std::uint32_t> min_word(k, std::numeric_limits<std::uint32_t>::max());
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t v : groups[c]) min_word[c] = std::min(min_word[c], words[v]);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return min_word[a] < min_word[b]; });
  std::vector<std::vector<std::size_t>> out(k);
  for (std::size_t c = 0; c < k; ++c) {
    out[c] = std::move(groups[order[c]]);
    std::sort(out[c].begin(), out[c].end(),
              [&](std::size_t a, std::size_t b) { return words[a] < words[b]; });
  }
  return out;
}

Eigen::MatrixXd kmeans_pp_init(const Eigen::MatrixXd& pts, std::size_t k, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(pts.rows());
  Eigen::MatrixXd centers(static_cast<Eigen::Index>(k), pts.cols());
  centers.row(0) = pts.row(static_cast<Eigen::Index>(rng.next_below(n)));
  Eigen::VectorXd d2 =
      (pts.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    const double total = d2.sum();
    std::size_t pick;
    if (total <= 0.0) {
      pick = rng.next_below(n);
    } else {
      const double u = rng.next_double() * total;
      double cum = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        cum += d2[static_cast<Eigen::Index>(i)];
        if (u < cum) {
          pick = i;
          break;
        }
      }
    }
    centers.row(static_cast<Eigen::Index>(c)) = pts.row(static_cast<Eigen::Index>(pick));
    d2 = d2.cwiseMin(
        (pts.rowwise() - centers.row(static_cast<Eigen::Index>(c))).rowwise().squaredNorm());
  }
  return centers;
}

struct KmeansRun {
  std::vector<std::size_t> labels;
  double inertia = std::numeric_limits<double>::infinity();
};

KmeansRun kmeans_once(const Eigen::MatrixXd& pts, std::size_t k, Rng& rng) {
  const std::size_t n = static_cast<std::size_t>(pts.rows());
  Eigen::MatrixXd centers = kmeans_pp_init(pts, k, rng);
  std::vector<std::size_t> labels(n, 0);
  std::vector<std::size_t> prev(n, std::numeric_limits<std::size_t>::max());
  std::vector<std::size_t> counts(k, 0);

  for (int iter = 0; iter < 100; ++iter) {
    // Assignment; ties go to the lowest cluster id.
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t arg = 0;
      for (std::size_t c = 0; c < k; ++c) {
        const double d2 = (pts.row(static_cast<Eigen::Index>(i)) -
                           centers.row(static_cast<Eigen::Index>(c)))
                              .squaredNorm();
        if (d2 < best) {
          best = d2;
          arg = c;
        }
      }
      labels[i] = arg;
    }
    // Re-seed empty clusters with the point farthest from its center.
    std::fill(counts.begin(), counts.end(), std::size_t{0});
    for (std::size_t l : labels) ++counts[l];
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      double far = -1.0;
      std::size_t steal = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (counts[labels[i]] <= 1) continue;
        const double d2 = (pts.row(static_cast<Eigen::Index>(i)) -
                           centers.row(static_cast<Eigen::Index>(labels[i])))
                              .squaredNorm();
        if (d2 > far) {
          far = d2;
          steal = i;
        }
      }
      --counts[labels[steal]];
      labels[steal] = c;
      ++counts[c];
    }
    if (labels == prev) break;
    prev = labels;
    // Center update.
    centers.setZero();
    for (std::size_t i = 0; i < n; ++i) {
      centers.row(static_cast<Eigen::Index>(labels[i])) += pts.row(static_cast<Eigen::Index>(i));
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] > 0) centers.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
    }
  }

  KmeansRun run;
  run.labels = std::move(labels);
  run.inertia = 0.0;
  // Inertia against the means of the final assignment.
  Eigen::MatrixXd means = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), pts.cols());
  std::fill(counts.begin(), counts.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    means.row(static_cast<Eigen::Index>(run.labels[i])) += pts.row(static_cast<Eigen::Index>(i));
    ++counts[run.labels[i]];
  }
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] > 0) means.row(static_cast<Eigen::Index>(c)) /= static_cast<double>(counts[c]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    run.inertia += (pts.row(static_cast<Eigen::Index>(i)) -
                    means.row(static_cast<Eigen::Index>(run.labels[i])))
                       .squaredNorm();
  }
  return run;
}

std::vector<std::size_t> kmeans_labels(const Eigen::MatrixXd& pts, std::size_t k,
                                       std::uint64_t seed) {
  KmeansRun best;
  for (std::uint64_t restart = 0; restart < 20; ++restart) {
    Rng rng(derive_seed(seed, restart));
    KmeansRun run = kmeans_once(pts, k, rng);
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return best.labels;
}

void check_cluster_inputs(const NovelWordSet& novel, const CooccurrenceStats& stats,
                          std::size_t k) {
  if (k == 0) throw ConfigError("cluster count k must be positive");
  if (novel.indices.size() < k) {
    throw ConfigError("clustering needs at least k = " + std::to_string(k) +
                      " novel words, got " + std::to_string(novel.indices.size()));
  }
  for (std::uint32_t word : novel.indices) {
    if (word >= stats.num_words()) {
      throw ConfigError("novel word index " + std::to_string(word) +
                        " out of range for the statistics");
    }
  }
}

}  // namespace

const char* cluster_method_name(ClusterMethod method) {
  switch (method) {
    case ClusterMethod::threshold_components: return "threshold_components";
    case ClusterMethod::spectral: return "spectral";
  }
  throw ConfigError("unknown cluster method");
}

ClusterMethod cluster_method_from_name(const std::string& name) {
  if (name == "threshold_components") return ClusterMethod::threshold_components;
  if (name == "spectral") return ClusterMethod::spectral;
  throw ConfigError("unknown cluster method: " + name);
}

std::vector<std::vector<std::uint32_t>> ClusterResult::members() const {
  std::vector<std::vector<std::uint32_t>> out(num_clusters());
  for (const auto& [word, label] : labels) out[label].push_back(word);
  return out;  // map iteration is word-ascending, so members come out sorted
}

nlohmann::json ClusterResult::to_json() const {
  nlohmann::json labels_json = nlohmann::json::array();
  for (const auto& [word, label] : labels) {
    labels_json.push_back(nlohmann::json::array({word, label}));
  }
  return nlohmann::json{{"method", cluster_method_name(method)},
                        {"labels", labels_json},
                        {"representatives", representatives}};
}

ClusterResult ClusterResult::from_json(const nlohmann::json& j) {
  ClusterResult out;
  out.method = cluster_method_from_name(j.at("method").get<std::string>());
  out.representatives = j.at("representatives").get<std::vector<std::uint32_t>>();
  for (const nlohmann::json& entry : j.at("labels")) {
    const auto word = entry.at(0).get<std::uint32_t>();
    const auto label = entry.at(1).get<std::uint32_t>();
    if (label >= out.representatives.size()) {
      throw ConfigError("cluster label " + std::to_string(label) + " out of range");
    }
    out.labels[word] = label;
  }
  for (std::size_t c = 0; c < out.representatives.size(); ++c) {
    const auto it = out.labels.find(out.representatives[c]);
    if (it == out.labels.end() || it->second != c) {
      throw ConfigError("representative of cluster " + std::to_string(c) +
                        " does not carry that label");
    }
  }
  return out;
}

ClusterResult cluster_novel(const NovelWordSet& novel, const CooccurrenceStats& stats,
                            double d, std::size_t k) {
  check_cluster_inputs(novel, stats, k);
  if (d <= 0.0) throw ConfigError("threshold clustering needs d > 0");
  const std::vector<std::uint32_t>& words = novel.indices;
  const std::size_t n = words.size();
  const double cut = d / 2.0;

  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), std::size_t{0});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (distance(stats, words[i], words[j]) <= cut) {
        parent[find_root(parent, i)] = find_root(parent, j);
      }
    }
  }

  std::vector<std::size_t> raw_label(n);
  std::vector<std::size_t> root_id;
  for (std::size_t v = 0; v < n; ++v) {
    const std::size_t root = find_root(parent, v);
    auto it = std::find(root_id.begin(), root_id.end(), root);
    if (it == root_id.end()) {
      raw_label[v] = root_id.size();
      root_id.push_back(root);
    } else {
      raw_label[v] = static_cast<std::size_t>(it - root_id.begin());
    }
  }
  if (root_id.size() != k) throw ComponentCountError(root_id.size(), k);

  const auto groups = canonical_groups(words, raw_label, k);
  ClusterResult result;
  result.method = ClusterMethod::threshold_components;
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t v : groups[c]) result.labels[words[v]] = static_cast<std::uint32_t>(c);
    result.representatives.push_back(words[groups[c].front()]);  // lowest index
  }
  return result;
}

ClusterResult cluster_spectral(const NovelWordSet& novel, const CooccurrenceStats& stats,
                               std::size_t k) {
  check_cluster_inputs(novel, stats, k);
  const std::vector<std::uint32_t>& words = novel.indices;
  const std::size_t n = words.size();

  // Affinity exp(-D); sampling noise can push D slightly negative, which
  // would inflate the weight above 1, so D is clamped at zero first.
  Eigen::MatrixXd affinity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    affinity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dij = distance(stats, words[i], words[j]);
      const double w = std::exp(-std::max(dij, 0.0));
      affinity(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w;
      affinity(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = w;
    }
  }

  // Symmetric normalization; degrees are >= 1 because of the unit diagonal.
  const Eigen::VectorXd inv_sqrt_deg = affinity.rowwise().sum().array().rsqrt();
  const Eigen::MatrixXd sym =
      inv_sqrt_deg.asDiagonal() * affinity * inv_sqrt_deg.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym);
  if (es.info() != Eigen::Success) {
    throw Error("spectral clustering: eigen decomposition failed");
  }
  // k smallest of the normalized Laplacian = k largest of sym.
  Eigen::MatrixXd emb = es.eigenvectors().rightCols(static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < emb.rows(); ++i) {
    const double norm = emb.row(i).norm();
    if (norm > 0.0) emb.row(i) /= norm;
  }

  const std::vector<std::size_t> raw_label =
      kmeans_labels(emb, k, derive_seed(novel.config.seed, "spectral-kmeans"));
  const auto groups = canonical_groups(words, raw_label, k);

  ClusterResult result;
  result.method = ClusterMethod::spectral;
  for (std::size_t c = 0; c < k; ++c) {
    if (groups[c].empty()) throw Error("spectral clustering produced an empty cluster");
    for (std::size_t v : groups[c]) result.labels[words[v]] = static_cast<std::uint32_t>(c);
    // Representative: member whose affinity row is closest to the cluster's
    // mean affinity row; groups[c] ascends by word index, so ties take the
    // lowest word.
    Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t v : groups[c]) mean += affinity.row(static_cast<Eigen::Index>(v));
    mean /= static_cast<double>(groups[c].size());
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t rep = words[groups[c].front()];
    for (std::size_t v : groups[c]) {
      const double d2 = (affinity.row(static_cast<Eigen::Index>(v)) - mean).squaredNorm();
      if (d2 < best) {
        best = d2;
        rep = words[v];
      }
    }
    result.representatives.push_back(rep);
  }
  return result;
}

RepresentativeRows representative_rows(const ClusterResult& result,
                                       const NormalizedRows& norm_x,
                                       const NormalizedRows& norm_xp, bool average) {
  if (norm_x.num_docs != norm_xp.num_docs || norm_x.num_words != norm_xp.num_words) {
    throw ConfigError("representative rows: the two halves disagree on shape");
  }
  const std::size_t k = result.num_clusters();
  const std::size_t m = norm_x.num_docs;
  RepresentativeRows out;
  out.y = MatrixRM::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));
  out.yp = MatrixRM::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(m));

  const auto add_row = [&](MatrixRM& dst, std::size_t row, const NormalizedRows& src,
                           std::uint32_t word, double weight) {
    if (word >= src.num_words) {
      throw ConfigError("representative word " + std::to_string(word) + " out of range");
    }
    for (const auto& [doc, value] : src.rows[word]) {
      dst(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(doc)) += value * weight;
    }
  };

  if (!average) {
    for (std::size_t c = 0; c < k; ++c) {
      add_row(out.y, c, norm_x, result.representatives[c], 1.0);
      add_row(out.yp, c, norm_xp, result.representatives[c], 1.0);
    }
    return out;
  }

  const auto groups = result.members();
  for (std::size_t c = 0; c < k; ++c) {
    if (groups[c].empty()) throw Error("cluster " + std::to_string(c) + " has no members");
    const double weight = 1.0 / static_cast<double>(groups[c].size());
    for (std::uint32_t word : groups[c]) {
      add_row(out.y, c, norm_x, word, weight);
      add_row(out.yp, c, norm_xp, word, weight);
    }
    // Means of simplex rows already sum to 1; renormalizing only removes
    // floating-point drift so the regression sees exact distributions.
    const double sy = out.y.row(static_cast<Eigen::Index>(c)).sum();
    if (sy > 0.0) out.y.row(static_cast<Eigen::Index>(c)) /= sy;
    const double syp = out.yp.row(static_cast<Eigen::Index>(c)).sum();
    if (syp > 0.0) out.yp.row(static_cast<Eigen::Index>(c)) /= syp;
  }
  return out;
}

}  // namespace septopic
