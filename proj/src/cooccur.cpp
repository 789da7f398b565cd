#include "septopic/cooccur.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

#include "septopic/parallel.hpp"

namespace septopic {

namespace {

// Sparse dot product of two index-sorted rows.
double sparse_dot(const SparseRow& a, const SparseRow& b) {
  double sum = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < a.size() && ib < b.size()) {
    if (a[ia].first < b[ib].first) {
      ++ia;
    } else if (a[ia].first > b[ib].first) {
      ++ib;
    } else {
      sum += a[ia].second * b[ib].second;
      ++ia;
      ++ib;
    }
  }
  return sum;
}

void check_aligned(const NormalizedRows& x, const NormalizedRows& xp, std::size_t m) {
  if (x.num_words != xp.num_words) {
    throw Error("co-occurrence halves disagree on vocabulary size");
  }
  if (x.num_docs != xp.num_docs || x.num_docs != m) {
    throw Error("co-occurrence halves disagree on document count");
  }
}

}  // namespace

double CooccurrenceStats::at(std::size_t i, std::size_t j) const {
  if (dense_) return c_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  return static_cast<double>(num_docs_) * sparse_dot(x_.rows[i], xp_.rows[j]);
}

std::vector<double> CooccurrenceStats::row(std::size_t i) const {
  std::vector<double> out(num_words_, 0.0);
  if (dense_) {
    for (std::size_t j = 0; j < num_words_; ++j) {
      out[j] = c_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
    return out;
  }
  for (const auto& [d, v] : x_.rows[i]) {
    for (const auto& [j, vp] : xp_cols_.cols[d]) out[j] += v * vp;
  }
  const double m = static_cast<double>(num_docs_);
  for (double& v : out) v *= m;
  return out;
}

const MatrixRM& CooccurrenceStats::matrix() const {
  if (!dense_) throw Error("dense co-occurrence matrix was not materialized");
  return c_;
}

CooccurrenceStats compute_cooccurrence(const NormalizedRows& norm_x,
                                       const NormalizedRows& norm_xp,
                                       std::size_t m,
                                       const CooccurOptions& options) {
  check_aligned(norm_x, norm_xp, m);
  const std::size_t w = norm_x.num_words;

  CooccurrenceStats stats;
  stats.num_words_ = w;
  stats.num_docs_ = m;
  stats.mean_freq_.resize(w);
  stats.empty_words_.resize(w);
  for (std::size_t i = 0; i < w; ++i) {
    stats.mean_freq_[i] = (norm_x.row_totals[i] + norm_xp.row_totals[i]) /
                          static_cast<double>(m == 0 ? 1 : m);
    stats.empty_words_[i] =
        static_cast<std::uint8_t>(norm_x.is_empty(i) || norm_xp.is_empty(i));
  }

  stats.dense_ = w <= options.dense_cap;
  if (!stats.dense_) {
    stats.diag_.resize(w);
    for (std::size_t i = 0; i < w; ++i) {
      stats.diag_[i] = static_cast<double>(m) * sparse_dot(norm_x.rows[i], norm_xp.rows[i]);
    }
    stats.x_ = norm_x;
    stats.xp_ = norm_xp;
    stats.xp_cols_ = doc_columns(norm_xp);
    return stats;
  }

  const DocColumns x_cols = doc_columns(norm_x);
  const DocColumns xp_cols = doc_columns(norm_xp);
  stats.c_.setZero(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(w));

  // Each worker owns a contiguous block of output rows and scans every
  // document once; additions per entry happen in document order regardless of
  // the thread count, so the result is bit-identical for any `threads`.
  parallel_blocks(w, options.threads, [&](std::size_t row_begin, std::size_t row_end) {
    for (std::size_t d = 0; d < m; ++d) {
      const SparseRow& xc = x_cols.cols[d];
      const SparseRow& xpc = xp_cols.cols[d];
      if (xpc.empty()) continue;
      auto it = std::lower_bound(
          xc.begin(), xc.end(), row_begin,
          [](const auto& entry, std::size_t word) { return entry.first < word; });
      for (; it != xc.end() && it->first < row_end; ++it) {
        double* crow = stats.c_.data() + static_cast<std::size_t>(it->first) * w;
        const double v = it->second;
        for (const auto& [j, vp] : xpc) crow[j] += v * vp;
      }
    }
  });
  stats.c_ *= static_cast<double>(m);

  stats.diag_.resize(w);
  for (std::size_t i = 0; i < w; ++i) {
    stats.diag_[i] = stats.c_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
  }
  return stats;
}

double distance(const CooccurrenceStats& stats, std::size_t i, std::size_t j) {
  if (i >= stats.num_words() || j >= stats.num_words()) {
    throw Error("distance index out of range");
  }
  if (stats.empty_word(i) || stats.empty_word(j)) {
    throw Error("distance undefined for word " +
                std::to_string(stats.empty_word(i) ? i : j) +
                " with an empty half (normalization undefined)");
  }
  return stats.diag(i) - 2.0 * stats.at(i, j) + stats.diag(j);
}

namespace {
constexpr std::uint64_t kCacheVersion = 1;
}

void save_cooccurrence(const CooccurrenceStats& stats, const std::filesystem::path& path) {
  const MatrixRM& c = stats.matrix();  // throws in on-demand mode
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write co-occurrence cache: " + path.string());
  const std::uint64_t w = stats.num_words();
  out.write(reinterpret_cast<const char*>(&w), sizeof(w));
  out.write(reinterpret_cast<const char*>(&kCacheVersion), sizeof(kCacheVersion));
  out.write(reinterpret_cast<const char*>(c.data()),
            static_cast<std::streamsize>(sizeof(double) * w * w));
  if (!out) throw Error("failed writing co-occurrence cache: " + path.string());
}

CooccurrenceStats load_cooccurrence(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open co-occurrence cache: " + path.string());
  std::uint64_t w = 0, version = 0;
  in.read(reinterpret_cast<char*>(&w), sizeof(w));
  in.read(reinterpret_cast<char*>(&version), sizeof(version));
  if (!in || version != kCacheVersion) {
    throw Error("co-occurrence cache has unsupported header: " + path.string());
  }
  CooccurrenceStats stats;
  stats.num_words_ = static_cast<std::size_t>(w);
  stats.dense_ = true;
  stats.c_.resize(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(w));
  in.read(reinterpret_cast<char*>(stats.c_.data()),
          static_cast<std::streamsize>(sizeof(double) * w * w));
  if (!in) throw Error("co-occurrence cache truncated: " + path.string());
  stats.diag_.resize(w);
  stats.mean_freq_.assign(w, 0.0);
  stats.empty_words_.assign(w, 0);
  for (std::size_t i = 0; i < w; ++i) {
    stats.diag_[i] = stats.c_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i));
    // The cache stores no emptiness mask; a word empty in either half has an
    // identically zero row, so a zero diagonal is the best reconstruction.
    if (stats.diag_[i] == 0.0) stats.empty_words_[i] = 1;
  }
  return stats;
}

}  // namespace septopic
