#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "septopic/detect.hpp"
#include "septopic/evaluate.hpp"
#include "septopic/rng.hpp"
#include "septopic/synth.hpp"

using namespace septopic;

namespace {

Eigen::MatrixXd random_stochastic(std::size_t w, std::size_t k, Rng& rng) {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(w), static_cast<Eigen::Index>(k));
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = -std::log(rng.next_open_double());
      total += m(i, j);
    }
    m.col(j) /= total;
  }
  return m;
}

GroundTruth truth_of(const Eigen::MatrixXd& beta) {
  GroundTruth gt;
  gt.beta = beta;
  gt.config.w = static_cast<std::size_t>(beta.rows());
  gt.config.k = static_cast<std::size_t>(beta.cols());
  return gt;
}

TopicModel model_of(const Eigen::MatrixXd& beta) {
  TopicModel model;
  model.beta = beta;
  model.column_sums_pre_norm = Eigen::VectorXd::Ones(beta.cols());
  return model;
}

NovelWordSet found_set(std::vector<std::uint32_t> indices) {
  NovelWordSet out;
  out.indices = std::move(indices);
  out.scores.assign(out.indices.size(), 1.0);
  return out;
}

}  // namespace

TEST_CASE("identical models have zero matched error") {
  Rng rng(1);
  const Eigen::MatrixXd beta = random_stochastic(10, 3, rng);
  const EvalReport report = matched_l1_error(model_of(beta), truth_of(beta));
  CHECK(report.matched_l1 == 0.0);
  CHECK(report.mean_element_l1 == 0.0);
  REQUIRE(report.per_topic_l1.size() == 3);
  for (double v : report.per_topic_l1) CHECK(v == 0.0);
  // The matching is the identity for equal matrices.
  CHECK(report.matching == std::vector<std::size_t>{0, 1, 2});
}

TEST_CASE("column permutations are absorbed by the matching") {
  Rng rng(2);
  const Eigen::MatrixXd beta = random_stochastic(8, 4, rng);
  Eigen::MatrixXd permuted(8, 4);
  const std::vector<std::size_t> perm = {2, 0, 3, 1};
  for (std::size_t k = 0; k < 4; ++k) {
    permuted.col(static_cast<Eigen::Index>(k)) =
        beta.col(static_cast<Eigen::Index>(perm[k]));
  }
  const EvalReport report = matched_l1_error(model_of(permuted), truth_of(beta));
  CHECK(report.matched_l1 < 1e-14);
  CHECK(report.matching == perm);
}

TEST_CASE("three-topic instances match the factorial enumeration") {
  Rng rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    const Eigen::MatrixXd est = random_stochastic(12, 3, rng);
    const Eigen::MatrixXd truth = random_stochastic(12, 3, rng);
    const EvalReport report = matched_l1_error(model_of(est), truth_of(truth));

    Eigen::MatrixXd cost(3, 3);
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) {
        cost(a, b) = (est.col(a) - truth.col(b)).lpNorm<1>();
      }
    }
    CHECK(report.matched_l1 ==
          doctest::Approx(oracle::brute_force_assignment_cost(cost)).epsilon(1e-12));

    // Total decomposes over topics and the element mean is its average.
    double total = 0.0;
    for (double v : report.per_topic_l1) total += v;
    CHECK(report.matched_l1 == doctest::Approx(total).epsilon(1e-12));
    CHECK(report.mean_element_l1 ==
          doctest::Approx(report.matched_l1 / (12.0 * 3.0)).epsilon(1e-12));
    CHECK(report.matched_l1 >= 0.0);
    CHECK(report.matched_l1 <= 2.0 * 3.0);
  }
}

TEST_CASE("matched error is symmetric and permutation invariant") {
  Rng rng(4);
  const Eigen::MatrixXd est = random_stochastic(9, 4, rng);
  const Eigen::MatrixXd truth = random_stochastic(9, 4, rng);
  const double forward = matched_l1_error(model_of(est), truth_of(truth)).matched_l1;
  const double backward = matched_l1_error(model_of(truth), truth_of(est)).matched_l1;
  CHECK(forward == doctest::Approx(backward).epsilon(1e-12));

  // Applying one permutation to both sides changes nothing.
  const std::vector<int> perm = {3, 1, 0, 2};
  Eigen::MatrixXd est_p(9, 4), truth_p(9, 4);
  for (int k = 0; k < 4; ++k) {
    est_p.col(k) = est.col(perm[static_cast<std::size_t>(k)]);
    truth_p.col(k) = truth.col(perm[static_cast<std::size_t>(k)]);
  }
  const double both = matched_l1_error(model_of(est_p), truth_of(truth_p)).matched_l1;
  CHECK(both == doctest::Approx(forward).epsilon(1e-12));
}

TEST_CASE("shape mismatches are rejected") {
  Rng rng(5);
  const Eigen::MatrixXd est = random_stochastic(8, 3, rng);
  CHECK_THROWS_AS(
      matched_l1_error(model_of(est), truth_of(random_stochastic(8, 4, rng))), Error);
  CHECK_THROWS_AS(
      matched_l1_error(model_of(est), truth_of(random_stochastic(9, 3, rng))), Error);
}

TEST_CASE("assignment solver agrees with enumeration across sizes") {
  Rng rng(6);
  for (int trial = 0; trial < 30; ++trial) {
    const int k = 2 + static_cast<int>(rng.next_below(5));  // 2..6
    Eigen::MatrixXd cost(k, k);
    for (int i = 0; i < k; ++i) {
      for (int j = 0; j < k; ++j) cost(i, j) = rng.next_double();
    }
    const auto assignment = hungarian_min_assignment(cost);
    REQUIRE(assignment.size() == static_cast<std::size_t>(k));
    std::vector<bool> used(static_cast<std::size_t>(k), false);
    double total = 0.0;
    for (int i = 0; i < k; ++i) {
      REQUIRE_FALSE(used[assignment[static_cast<std::size_t>(i)]]);
      used[assignment[static_cast<std::size_t>(i)]] = true;
      total += cost(i, static_cast<Eigen::Index>(assignment[static_cast<std::size_t>(i)]));
    }
    CHECK(total ==
          doctest::Approx(oracle::brute_force_assignment_cost(cost)).epsilon(1e-12));
  }
}

TEST_CASE("detection scores count exact hits and outliers") {
  const GroundTruth gt = fixtures::five_word_truth();  // true novels {0,1,2,3}

  SUBCASE("exact recovery") {
    const auto [precision, recall] = novel_detection_score(found_set({0, 1, 2, 3}), gt);
    CHECK(precision == 1.0);
    CHECK(recall == 1.0);
  }
  SUBCASE("one outlier added") {
    // Ten true hits plus one outlier: precision 10/11, recall 1.
    GroundTruth wide = gt;
    wide.novel_sets = {{0, 1, 2, 3, 4}, {5, 6, 7, 8, 9}};
    const auto [precision, recall] = novel_detection_score(
        found_set({0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 42}), wide);
    CHECK(precision == doctest::Approx(10.0 / 11.0).epsilon(1e-15));
    CHECK(recall == 1.0);
  }
  SUBCASE("missed words lower recall only") {
    const auto [precision, recall] = novel_detection_score(found_set({0, 2}), gt);
    CHECK(precision == 1.0);
    CHECK(recall == 0.5);
  }
  SUBCASE("empty found set scores zero precision") {
    const auto [precision, recall] = novel_detection_score(found_set({}), gt);
    CHECK(precision == 0.0);
    CHECK(recall == 0.0);
  }
}

TEST_CASE("threshold detection scores perfectly on the exact instance") {
  const GroundTruth gt = fixtures::five_word_truth();
  const CooccurrenceStats stats = fixtures::exact_stats(gt);
  const TheoremParams params = theorem_parameters(gt);
  DetectorConfig cfg;
  cfg.method = DetectMethod::ddp_threshold;
  cfg.d = params.d;
  cfg.gamma = params.gamma;
  const auto [precision, recall] = novel_detection_score(ddp_detect(stats, cfg), gt);
  CHECK(precision == 1.0);
  CHECK(recall == 1.0);
}

TEST_CASE("top-word tables rank within topics") {
  TopicModel model;
  model.beta = Eigen::MatrixXd::Zero(7, 2);
  model.beta(5, 0) = 1.0;                    // column e_5
  model.beta.col(1).setConstant(1.0 / 7.0);  // uniform column
  const std::vector<std::string> vocab = {"ant", "bee", "cat", "dog",
                                          "elk", "fox", "gnu"};

  SUBCASE("a unit column surfaces its single word") {
    const std::string table = top_words_report(model, vocab, 1);
    CHECK(table.find("fox") != std::string::npos);
    CHECK(table.find("1.0000") != std::string::npos);
  }
  SUBCASE("uniform ties resolve by ascending index") {
    const std::string csv = top_words_csv(model, vocab, 3);
    CHECK(csv.find("1,0,ant,") != std::string::npos);
    CHECK(csv.find("1,1,bee,") != std::string::npos);
    CHECK(csv.find("1,2,cat,") != std::string::npos);
    CHECK(csv.rfind("topic,rank,word,probability", 0) == 0);
  }
  SUBCASE("asking for more words than exist returns all of them") {
    const std::string csv = top_words_csv(model, vocab, 50);
    // 2 topics x 7 words + header.
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 15);
  }
  SUBCASE("missing vocabulary falls back to index names") {
    const std::string table = top_words_report(model, {}, 1);
    CHECK(table.find("w5") != std::string::npos);
  }
}

TEST_CASE("eval reports serialize losslessly") {
  EvalReport report;
  report.matched_l1 = 1.25;
  report.mean_element_l1 = 1.25 / 30.0;
  report.per_topic_l1 = {0.5, 0.75};
  report.matching = {1, 0};
  report.runtime_breakdown = {{"detect", 0.25}, {"estimate", 1.5}};

  SUBCASE("with detection scores") {
    report.novel_precision = 0.9;
    report.novel_recall = 1.0;
    const EvalReport back = EvalReport::from_json(report.to_json());
    CHECK(back.matched_l1 == report.matched_l1);
    CHECK(back.per_topic_l1 == report.per_topic_l1);
    CHECK(back.matching == report.matching);
    CHECK(back.novel_precision == 0.9);
    CHECK(back.novel_recall == 1.0);
    CHECK(back.runtime_breakdown == report.runtime_breakdown);
  }
  SUBCASE("unset detection scores round-trip as null") {
    const nlohmann::json j = report.to_json();
    CHECK(j.at("novel_precision").is_null());
    const EvalReport back = EvalReport::from_json(j);
    CHECK(back.novel_precision == -1.0);
    CHECK(back.novel_recall == -1.0);
  }
}
