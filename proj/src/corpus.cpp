#include "septopic/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "septopic/rng.hpp"

namespace septopic {

std::uint64_t SparseCorpus::total_tokens() const {
  std::uint64_t total = 0;
  for (const auto& doc : docs) {
    for (const auto& [w, c] : doc) total += c;
  }
  return total;
}

std::vector<std::uint64_t> SparseCorpus::word_totals() const {
  std::vector<std::uint64_t> totals(num_words, 0);
  for (const auto& doc : docs) {
    for (const auto& [w, c] : doc) totals[w] += c;
  }
  return totals;
}

namespace {

// Parses one whitespace-separated non-negative integer field.
bool parse_u64(const std::string& text, std::size_t& pos, std::uint64_t& out) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r')) ++pos;
  if (pos >= text.size()) return false;
  auto [ptr, ec] = std::from_chars(text.data() + pos, text.data() + text.size(), out);
  if (ec != std::errc{} || ptr == text.data() + pos) return false;
  pos = static_cast<std::size_t>(ptr - text.data());
  return true;
}

bool line_is_blank(const std::string& line) {
  return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::uint64_t read_header_line(std::istream& in, std::size_t& line_no,
                               const char* name) {
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError(std::string("missing header line for ") + name, line_no);
  }
  ++line_no;
  std::size_t pos = 0;
  std::uint64_t value = 0;
  if (!parse_u64(line, pos, value) || !line_is_blank(line.substr(pos))) {
    throw ParseError(std::string("malformed header value for ") + name, line_no);
  }
  return value;
}

}  // namespace

SparseCorpus load_uci_bow(const std::filesystem::path& docword_path,
                          const std::optional<std::filesystem::path>& vocab_path) {
  std::ifstream in(docword_path);
  if (!in) throw Error("cannot open docword file: " + docword_path.string());

  std::size_t line_no = 0;
  const std::uint64_t num_docs = read_header_line(in, line_no, "document count");
  const std::uint64_t num_words = read_header_line(in, line_no, "vocabulary size");
  const std::uint64_t nnz = read_header_line(in, line_no, "entry count");

  // Accumulate into ordered maps so duplicate (doc, word) lines sum and the
  // final per-document lists come out sorted by word.
  std::vector<std::map<std::uint32_t, std::uint64_t>> acc(num_docs);
  std::string line;
  std::uint64_t seen = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_is_blank(line)) continue;
    std::size_t pos = 0;
    std::uint64_t doc_id = 0, word_id = 0, count = 0;
    if (!parse_u64(line, pos, doc_id) || !parse_u64(line, pos, word_id) ||
        !parse_u64(line, pos, count) || !line_is_blank(line.substr(pos))) {
      throw ParseError("malformed entry line, expected 'docID wordID count'", line_no);
    }
    if (doc_id < 1 || doc_id > num_docs) {
      throw ParseError("document id " + std::to_string(doc_id) + " out of range [1, " +
                           std::to_string(num_docs) + "]",
                       line_no);
    }
    if (word_id < 1 || word_id > num_words) {
      throw ParseError("word id " + std::to_string(word_id) + " out of range [1, " +
                           std::to_string(num_words) + "]",
                       line_no);
    }
    if (count == 0) throw ParseError("count must be positive", line_no);
    ++seen;
    if (seen > nnz) {
      throw ParseError("more entry lines than the declared " + std::to_string(nnz), line_no);
    }
    acc[doc_id - 1][static_cast<std::uint32_t>(word_id - 1)] += count;
  }
  if (seen != nnz) {
    throw ParseError("entry count mismatch: header declares " + std::to_string(nnz) +
                         ", file has " + std::to_string(seen),
                     line_no);
  }

  SparseCorpus corpus;
  corpus.num_docs = num_docs;
  corpus.num_words = num_words;
  corpus.docs.resize(num_docs);
  for (std::size_t d = 0; d < num_docs; ++d) {
    corpus.docs[d].reserve(acc[d].size());
    for (const auto& [w, c] : acc[d]) {
      corpus.docs[d].emplace_back(w, static_cast<std::uint32_t>(c));
    }
  }

  if (vocab_path) {
    std::ifstream vin(*vocab_path);
    if (!vin) throw Error("cannot open vocab file: " + vocab_path->string());
    std::string token;
    std::size_t vline = 0;
    while (std::getline(vin, token)) {
      ++vline;
      if (!token.empty() && token.back() == '\r') token.pop_back();
      if (corpus.vocab.size() == num_words) {
        if (line_is_blank(token)) continue;  // tolerate one trailing newline
        throw ParseError("vocab file has more than " + std::to_string(num_words) + " tokens",
                         vline);
      }
      corpus.vocab.push_back(token);
    }
    if (corpus.vocab.size() != num_words) {
      throw ParseError("vocab file has " + std::to_string(corpus.vocab.size()) +
                           " tokens, expected " + std::to_string(num_words),
                       vline);
    }
  }
  return corpus;
}

void save_uci_bow(const SparseCorpus& corpus,
                  const std::filesystem::path& docword_path,
                  const std::optional<std::filesystem::path>& vocab_path) {
  std::ofstream out(docword_path);
  if (!out) throw Error("cannot write docword file: " + docword_path.string());
  std::uint64_t nnz = 0;
  for (const auto& doc : corpus.docs) nnz += doc.size();
  out << corpus.num_docs << '\n' << corpus.num_words << '\n' << nnz << '\n';
  for (std::size_t d = 0; d < corpus.num_docs; ++d) {
    for (const auto& [w, c] : corpus.docs[d]) {
      out << (d + 1) << ' ' << (w + 1) << ' ' << c << '\n';
    }
  }
  if (!out) throw Error("failed writing docword file: " + docword_path.string());

  if (vocab_path) {
    if (!corpus.vocab.empty() && corpus.vocab.size() != corpus.num_words) {
      throw Error("vocab size does not match vocabulary size");
    }
    std::ofstream vout(*vocab_path);
    if (!vout) throw Error("cannot write vocab file: " + vocab_path->string());
    for (std::size_t w = 0; w < corpus.num_words; ++w) {
      if (w < corpus.vocab.size()) {
        vout << corpus.vocab[w] << '\n';
      } else {
        vout << 'w' << w << '\n';
      }
    }
  }
}

SplitPair split_tokens(const SparseCorpus& corpus, std::uint64_t seed) {
  SplitPair split;
  split.seed = seed;
  for (SparseCorpus* half : {&split.first, &split.second}) {
    half->num_docs = corpus.num_docs;
    half->num_words = corpus.num_words;
    half->vocab = corpus.vocab;
    half->docs.resize(corpus.num_docs);
  }
  for (std::size_t d = 0; d < corpus.num_docs; ++d) {
    // One derived stream per document keeps the split independent of any
    // outer iteration scheme.
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(d)));
    for (const auto& [w, c] : corpus.docs[d]) {
      std::uint32_t heads = rng.next_binomial_half(c);
      if (heads > 0) split.first.docs[d].emplace_back(w, heads);
      if (c - heads > 0) split.second.docs[d].emplace_back(w, c - heads);
    }
  }
  return split;
}

NormalizedRows normalize_rows(const SparseCorpus& corpus) {
  NormalizedRows norm;
  norm.num_words = corpus.num_words;
  norm.num_docs = corpus.num_docs;
  norm.rows.resize(corpus.num_words);
  norm.row_totals.assign(corpus.num_words, 0.0);
  norm.empty_words.assign(corpus.num_words, 0);

  const auto totals = corpus.word_totals();
  std::vector<std::size_t> row_sizes(corpus.num_words, 0);
  for (const auto& doc : corpus.docs) {
    for (const auto& [w, c] : doc) ++row_sizes[w];
  }
  for (std::size_t w = 0; w < corpus.num_words; ++w) {
    norm.rows[w].reserve(row_sizes[w]);
    norm.row_totals[w] = static_cast<double>(totals[w]);
    if (totals[w] == 0) norm.empty_words[w] = 1;
  }
  // Documents are visited in index order, so each row ends up sorted by doc.
  for (std::size_t d = 0; d < corpus.num_docs; ++d) {
    for (const auto& [w, c] : corpus.docs[d]) {
      norm.rows[w].emplace_back(static_cast<std::uint32_t>(d),
                                static_cast<double>(c) / norm.row_totals[w]);
    }
  }
  return norm;
}

DocColumns doc_columns(const SparseCorpus& corpus) {
  DocColumns cols;
  cols.num_words = corpus.num_words;
  cols.num_docs = corpus.num_docs;
  cols.cols.resize(corpus.num_docs);
  for (std::size_t d = 0; d < corpus.num_docs; ++d) {
    cols.cols[d].reserve(corpus.docs[d].size());
    for (const auto& [w, c] : corpus.docs[d]) {
      cols.cols[d].emplace_back(w, static_cast<double>(c));
    }
  }
  return cols;
}

DocColumns doc_columns(const NormalizedRows& rows) {
  DocColumns cols;
  cols.num_words = rows.num_words;
  cols.num_docs = rows.num_docs;
  std::vector<std::size_t> sizes(rows.num_docs, 0);
  for (const auto& row : rows.rows) {
    for (const auto& [d, v] : row) ++sizes[d];
  }
  cols.cols.resize(rows.num_docs);
  for (std::size_t d = 0; d < rows.num_docs; ++d) cols.cols[d].reserve(sizes[d]);
  // Word rows are visited in index order, so each column is sorted by word.
  for (std::size_t w = 0; w < rows.num_words; ++w) {
    for (const auto& [d, v] : rows.rows[w]) {
      cols.cols[d].emplace_back(static_cast<std::uint32_t>(w), v);
    }
  }
  return cols;
}

}  // namespace septopic
