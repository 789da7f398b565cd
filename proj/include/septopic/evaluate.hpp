#pragma once

// Scoring against ground truth: l1 error of the estimated topic matrix under
// the optimal column matching, novel-word precision/recall, and top-word
// report tables.

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "septopic/detect.hpp"
#include "septopic/estimate.hpp"
#include "septopic/synth.hpp"

namespace septopic {

struct EvalReport {
  double matched_l1 = 0.0;
  double mean_element_l1 = 0.0;  ///< matched_l1 / (W * K), a size-free error scale
  std::vector<double> per_topic_l1;
  std::vector<std::size_t> matching;  ///< estimated column k matches truth column matching[k]
  /// Negative values mean "not evaluated"; serialized as null.
  double novel_precision = -1.0;
  double novel_recall = -1.0;
  std::map<std::string, double> runtime_breakdown;  ///< stage -> seconds

  nlohmann::json to_json() const;
  static EvalReport from_json(const nlohmann::json& j);
};

/// Minimum-cost perfect assignment on a square cost matrix (potentials
/// method, O(n^3)); returns the column assigned to each row.
std::vector<std::size_t> hungarian_min_assignment(const Eigen::MatrixXd& cost);

/// Fills the l1 part of the report: cost(k,l) = ||est col k - truth col l||_1,
/// optimal matching, per-topic and total costs.  Throws on shape mismatch.
EvalReport matched_l1_error(const TopicModel& est, const GroundTruth& truth);

/// Precision = |found & true| / |found| (0 when found is empty); recall over
/// the union of the true per-topic novel sets.
std::pair<double, double> novel_detection_score(const NovelWordSet& found,
                                                const GroundTruth& truth);

/// Aligned text table of the t highest-probability words per topic,
/// descending, ties by ascending index.  Empty vocab falls back to w<index>
/// names.
std::string top_words_report(const TopicModel& model,
                             const std::vector<std::string>& vocab, std::size_t t);

/// Same ranking as CSV: topic,rank,word,probability.
std::string top_words_csv(const TopicModel& model,
                          const std::vector<std::string>& vocab, std::size_t t);

}  // namespace septopic
