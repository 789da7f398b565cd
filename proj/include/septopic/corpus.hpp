#pragma once

// Sparse bag-of-words corpora: UCI docword I/O, per-token splitting into two
// independent halves, and l1 row normalization of the word-document matrix.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "septopic/common.hpp"

namespace septopic {

/// Word-document count matrix stored document-major.
/// docs[d] holds (word index, count) pairs sorted by word, counts >= 1.
struct SparseCorpus {
  std::size_t num_docs = 0;
  std::size_t num_words = 0;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> docs;
  /// Optional token names; empty, or exactly num_words entries.
  std::vector<std::string> vocab;

  std::uint64_t total_tokens() const;
  /// Per-word total count across all documents.
  std::vector<std::uint64_t> word_totals() const;
};

/// Result of the per-token fair-coin split: X = first + second, entry-wise.
struct SplitPair {
  SparseCorpus first;
  SparseCorpus second;
  std::uint64_t seed = 0;
};

/// Row-normalized word-document matrix X-tilde, stored word-major.
/// rows[i] holds (doc index, frequency) pairs sorted by doc; each non-empty
/// row sums to 1.  row_totals keeps the pre-normalization row sums, which
/// downstream estimation uses as word scales.
struct NormalizedRows {
  std::size_t num_words = 0;
  std::size_t num_docs = 0;
  std::vector<SparseRow> rows;
  std::vector<double> row_totals;
  std::vector<std::uint8_t> empty_words;  // 1 where the row had zero total

  bool is_empty(std::size_t word) const { return empty_words[word] != 0; }
};

/// Document-major view of a real-valued word-document matrix; cols[d] holds
/// (word index, value) pairs sorted by word.  Random-projection and binning
/// detectors consume this shape.
struct DocColumns {
  std::size_t num_words = 0;
  std::size_t num_docs = 0;
  std::vector<SparseRow> cols;
};

/// Reads a UCI bag-of-words docword file (three integer header lines D, W,
/// NNZ, then NNZ lines "docID wordID count", 1-based ids).  Duplicate
/// (doc, word) lines are summed.  Throws ParseError with the offending line
/// number on malformed input.
SparseCorpus load_uci_bow(const std::filesystem::path& docword_path,
                          const std::optional<std::filesystem::path>& vocab_path = {});

/// Writes the corpus in the same UCI format (entries sorted by doc, word).
void save_uci_bow(const SparseCorpus& corpus,
                  const std::filesystem::path& docword_path,
                  const std::optional<std::filesystem::path>& vocab_path = {});

/// Splits every token of X independently with a fair coin into two halves.
/// Deterministic in (corpus, seed); conservation first + second = X holds
/// entry-wise exactly.
SplitPair split_tokens(const SparseCorpus& corpus, std::uint64_t seed);

/// l1-normalizes each word row of the corpus; zero-count words are flagged
/// empty and keep an empty row.
NormalizedRows normalize_rows(const SparseCorpus& corpus);

/// Document-major view of raw counts.
DocColumns doc_columns(const SparseCorpus& corpus);

/// Document-major view of a row-normalized matrix.
DocColumns doc_columns(const NormalizedRows& rows);

}  // namespace septopic
