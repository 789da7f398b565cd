#pragma once

// Novel-word detection: the threshold and agnostic data-dependent projection
// tests on C, random unit-sphere projections of the normalized rows, and the
// bin-wise win-frequency method.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "septopic/common.hpp"
#include "septopic/cooccur.hpp"
#include "septopic/corpus.hpp"

namespace septopic {

enum class DetectMethod { ddp_threshold, ddp_agnostic, rp, binning };

const char* detect_method_name(DetectMethod method);
DetectMethod detect_method_from_name(const std::string& name);

struct DetectorConfig {
  DetectMethod method = DetectMethod::ddp_threshold;
  double d = 0.0;       ///< distance threshold (threshold + binning modes)
  double gamma = 0.0;   ///< margin threshold (threshold mode)
  std::size_t r = 0;    ///< agnostic neighborhood size; 0 = default W/2
  std::size_t s = 0;    ///< agnostic keep count; 0 = default 10*K
  std::size_t p = 0;    ///< RP direction count; 0 = default 50*K
  std::size_t k = 0;    ///< topic count (required by binning; sets defaults)
  std::uint64_t seed = 0;
  int threads = 0;      ///< worker cap, 0 = all cores

  std::size_t resolve_r(std::size_t num_words) const;
  std::size_t resolve_s() const;
  std::size_t resolve_p() const;
  /// Validates the fields the given method needs; throws ConfigError.
  void validate(std::size_t num_words) const;
};

/// Detected novel words.  `indices` ordering is method-specific but always
/// deterministic: threshold mode ascends by word index, agnostic and RP sort
/// by descending score (ties ascending index), binning lists admission order.
struct NovelWordSet {
  std::vector<std::uint32_t> indices;
  std::vector<double> scores;  ///< aligned with indices
  DetectorConfig config;

  nlohmann::json to_json() const;
  static NovelWordSet from_json(const nlohmann::json& j);
};

/// Threshold test: word i is novel iff every j with D(i,j) >= d/2 also has
/// margin C_ii - C_ij >= gamma/2.  Score = the smallest such margin
/// (+infinity when no j reaches the distance cut).
NovelWordSet ddp_detect(const CooccurrenceStats& stats, const DetectorConfig& cfg);

/// Parameter-free variant: J_i = the r words with largest D(i, .); score(i) =
/// min over J_i of C_ii - C_ij; keeps the s best scores.
/// Throws when s exceeds the number of non-empty words.
NovelWordSet ddp_detect_agnostic(const CooccurrenceStats& stats, const DetectorConfig& cfg);

/// Random projections: p directions uniform on the unit sphere in document
/// space; the extreme rows (argmax and argmin) along each direction win.
/// Scores are win counts.
NovelWordSet rp_detect(const NormalizedRows& norm_x, const DetectorConfig& cfg);

/// Binning: documents go round-robin into floor(sqrt(M)) bins; counts are
/// row-normalized within each bin and projected along one random direction
/// per bin; the argmax word of each bin wins.  Words are then scanned by
/// descending win frequency and admitted while they keep distance >= d/2
/// (full-corpus split statistics) to everything already admitted, until k
/// words are found.  Throws (reporting the count found) when the scan is
/// exhausted early.
NovelWordSet binning_detect(const SplitPair& split, const DetectorConfig& cfg);

/// Binning core over an arbitrary real-valued corpus given document-major
/// raw values plus the two row-normalized halves used for admission
/// distances.  Exact-A oracle tests enter here.
NovelWordSet binning_detect(const DocColumns& raw_cols, const NormalizedRows& norm_x,
                            const NormalizedRows& norm_xp, const DetectorConfig& cfg);

}  // namespace septopic
