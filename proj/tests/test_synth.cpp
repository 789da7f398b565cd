#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numeric>
#include <set>
#include <vector>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "septopic/synth.hpp"

using namespace septopic;

namespace {

GeneratorConfig small_config(std::uint64_t seed = 1) {
  GeneratorConfig cfg;
  cfg.w = 20;
  cfg.k = 4;
  cfg.m = 50;
  cfg.n = 30;
  cfg.rho = 0.4;  // 8 novel words, 2 per topic
  cfg.alpha = std::vector<double>(4, 0.5);
  cfg.seed = seed;
  return cfg;
}

bool is_separable(const GroundTruth& gt) {
  // Every topic needs at least one word supported on that topic alone.
  for (Eigen::Index k = 0; k < gt.beta.cols(); ++k) {
    bool found = false;
    for (Eigen::Index i = 0; i < gt.beta.rows() && !found; ++i) {
      if (gt.beta(i, k) <= 0.0) continue;
      bool pure = true;
      for (Eigen::Index l = 0; l < gt.beta.cols(); ++l) {
        if (l != k && gt.beta(i, l) != 0.0) pure = false;
      }
      found = pure;
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("dirichlet prior stats match the closed forms") {
  SUBCASE("symmetric (1,1)") {
    const PriorStats stats = dirichlet_prior_stats({1.0, 1.0});
    CHECK(stats.r(0, 0) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(stats.r(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(stats.r(1, 1) == doctest::Approx(2.0 / 6.0).epsilon(1e-15));
    CHECK(stats.a(0) == 0.5);
    CHECK(stats.a(1) == 0.5);
  }
  SUBCASE("asymmetric") {
    const std::vector<double> alpha = {0.2, 0.5, 1.3};
    const double alpha0 = 2.0;
    const PriorStats stats = dirichlet_prior_stats(alpha);
    for (int i = 0; i < 3; ++i) {
      CHECK(stats.a(i) == doctest::Approx(alpha[static_cast<std::size_t>(i)] / alpha0));
      for (int j = 0; j < 3; ++j) {
        const double expected = (alpha[static_cast<std::size_t>(i)] *
                                     alpha[static_cast<std::size_t>(j)] +
                                 (i == j ? alpha[static_cast<std::size_t>(i)] : 0.0)) /
                                (alpha0 * (alpha0 + 1.0));
        CHECK(stats.r(i, j) == doctest::Approx(expected).epsilon(1e-15));
      }
    }
  }
}

TEST_CASE("generated beta is separable and column-stochastic") {
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const GroundTruth gt = generate_beta(small_config(seed));
    REQUIRE(gt.beta.rows() == 20);
    REQUIRE(gt.beta.cols() == 4);
    CHECK((gt.beta.array() >= 0.0).all());
    for (Eigen::Index k = 0; k < 4; ++k) {
      CHECK(gt.beta.col(k).sum() == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(is_separable(gt));

    // Novel bookkeeping: 2 words per topic, single-topic support each.
    REQUIRE(gt.novel_sets.size() == 4);
    std::set<std::uint32_t> all;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(gt.novel_sets[k].size() == 2);
      for (const std::uint32_t w : gt.novel_sets[k]) {
        all.insert(w);
        for (std::size_t l = 0; l < 4; ++l) {
          if (l != k) CHECK(gt.beta(w, static_cast<Eigen::Index>(l)) == 0.0);
        }
        CHECK(gt.beta(w, static_cast<Eigen::Index>(k)) > 0.0);
      }
    }
    CHECK(all.size() == 8);
    CHECK(gt.all_novel() == std::vector<std::uint32_t>(all.begin(), all.end()));
  }
}

TEST_CASE("novel count follows the requested fraction") {
  GeneratorConfig cfg = small_config();
  CHECK(cfg.novel_count() == 8);

  SUBCASE("large-corpus split") {
    cfg.w = 500;
    cfg.k = 5;
    cfg.rho = 0.2;
    cfg.alpha = std::vector<double>(5, 0.1);
    CHECK(cfg.novel_count() == 100);
    const GroundTruth gt = generate_beta(cfg);
    for (const auto& set : gt.novel_sets) CHECK(set.size() == 20);
  }
  SUBCASE("minimum fraction gives one novel word per topic") {
    cfg.rho = static_cast<double>(cfg.k) / static_cast<double>(cfg.w);
    const GroundTruth gt = generate_beta(cfg);
    for (const auto& set : gt.novel_sets) CHECK(set.size() == 1);
  }
  SUBCASE("indivisible novel count is rejected") {
    cfg.rho = 0.25;  // 5 novel words across 4 topics
    CHECK_THROWS_AS(generate_beta(cfg), ConfigError);
  }
  SUBCASE("other invalid configs are rejected") {
    GeneratorConfig bad = small_config();
    bad.alpha = {0.5, 0.5};  // wrong length
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_config();
    bad.alpha[2] = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
    bad = small_config();
    bad.rho = 0.0;
    CHECK_THROWS_AS(bad.validate(), ConfigError);
  }
}

TEST_CASE("theta sampling matches the dirichlet prior moments") {
  GeneratorConfig cfg;
  cfg.w = 10;
  cfg.k = 5;
  cfg.m = 10000;
  cfg.n = 1;
  cfg.rho = 0.5;
  cfg.alpha = std::vector<double>(5, 0.1);
  cfg.seed = 31337;
  GroundTruth gt = generate_beta(cfg);
  const SparseCorpus corpus = generate_theta_and_docs(gt, cfg);

  REQUIRE(gt.theta.rows() == 5);
  REQUIRE(gt.theta.cols() == 10000);
  for (Eigen::Index d = 0; d < 200; ++d) {
    CHECK(gt.theta.col(d).sum() == doctest::Approx(1.0).epsilon(1e-12));
  }
  const Eigen::VectorXd mean = gt.theta.rowwise().mean();
  for (Eigen::Index k = 0; k < 5; ++k) {
    CHECK(std::abs(mean(k) - 0.2) < 0.01);
  }

  SUBCASE("single-token documents") {
    CHECK(corpus.num_docs == 10000);
    for (const auto& doc : corpus.docs) {
      std::uint64_t tokens = 0;
      for (const auto& [w, c] : doc) tokens += c;
      CHECK(tokens == 1);
    }
  }
}

TEST_CASE("empirical second moment converges to the closed form") {
  GeneratorConfig cfg;
  cfg.w = 4;
  cfg.k = 2;
  cfg.m = 100000;
  cfg.mode = GenMode::exact_a;  // weights only, no token sampling
  cfg.rho = 0.5;
  cfg.alpha = {0.4, 0.8};
  cfg.seed = 424242;
  GroundTruth gt = generate_beta(cfg);
  generate_theta_and_docs(gt, cfg);

  const Eigen::MatrixXd empirical =
      gt.theta * gt.theta.transpose() / static_cast<double>(cfg.m);
  const PriorStats closed = dirichlet_prior_stats(cfg.alpha);
  CHECK((empirical - closed.r).cwiseAbs().maxCoeff() < 1e-2);
}

TEST_CASE("sampled corpora are reproducible and thread-invariant") {
  GeneratorConfig cfg = small_config(777);
  GroundTruth a = generate_beta(cfg);
  GroundTruth b = generate_beta(cfg);
  CHECK(a.beta == b.beta);

  const SparseCorpus ca = generate_theta_and_docs(a, cfg);
  cfg.threads = 3;
  const SparseCorpus cb = generate_theta_and_docs(b, cfg);
  CHECK(a.theta == b.theta);
  CHECK(ca.docs == cb.docs);

  GeneratorConfig other = small_config(778);
  GroundTruth c = generate_beta(other);
  CHECK(a.beta != c.beta);
}

TEST_CASE("exact instances realize the ideal-frequency geometry") {
  const GroundTruth gt = fixtures::five_word_truth();
  const auto [x, xp] = exact_a_instance(gt);
  const Eigen::MatrixXd rows = fixtures::dense_from_rows(x);
  CHECK(fixtures::dense_from_rows(xp) == rows);

  // Pure words take exactly their topic's normalized weight row.
  const Eigen::VectorXd topic0 = gt.theta.row(0) / gt.theta.row(0).sum();
  const Eigen::VectorXd topic1 = gt.theta.row(1) / gt.theta.row(1).sum();
  CHECK((rows.row(0).transpose() - topic0).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK((rows.row(1).transpose() - topic0).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK((rows.row(2).transpose() - topic1).lpNorm<Eigen::Infinity>() < 1e-15);
  CHECK((rows.row(3).transpose() - topic1).lpNorm<Eigen::Infinity>() < 1e-15);

  // The mixture word is a convex combination of the pure rows with weights
  // given by the row-normalized topic loadings.
  const double mass0 = gt.beta(4, 0) * gt.theta.row(0).sum();
  const double mass1 = gt.beta(4, 1) * gt.theta.row(1).sum();
  const Eigen::VectorXd expected =
      (mass0 * topic0 + mass1 * topic1) / (mass0 + mass1);
  CHECK((rows.row(4).transpose() - expected).lpNorm<Eigen::Infinity>() < 1e-15);

  // Hull oracle: pure rows are extreme, the mixture row is not.
  const auto extreme = oracle::extreme_rows(rows);
  CHECK(extreme[0]);
  CHECK(extreme[1]);
  CHECK(extreme[2]);
  CHECK(extreme[3]);
  CHECK_FALSE(extreme[4]);
}

TEST_CASE("random exact instances keep non-novel rows interior") {
  GeneratorConfig cfg;
  cfg.w = 12;
  cfg.k = 3;
  cfg.m = 8;
  cfg.rho = 0.25;
  cfg.alpha = {0.5, 0.5, 0.5};
  cfg.mode = GenMode::exact_a;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    cfg.seed = seed;
    GroundTruth gt = generate_beta(cfg);
    generate_theta_and_docs(gt, cfg);
    const auto [x, xp] = exact_a_instance(gt);
    const auto extreme = oracle::extreme_rows(fixtures::dense_from_rows(x));

    const auto novel = gt.all_novel();
    for (std::uint32_t w = 0; w < 12; ++w) {
      const bool is_novel = std::find(novel.begin(), novel.end(), w) != novel.end();
      if (is_novel) {
        CHECK(extreme[w]);
      } else {
        CHECK_FALSE(extreme[w]);
      }
    }
  }
}

TEST_CASE("theorem parameters evaluate the textbook instance") {
  const GroundTruth gt = fixtures::three_word_truth();
  const TheoremParams params = theorem_parameters(gt);
  CHECK(params.lambda_min == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(params.beta_min == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(params.a_min == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(params.zeta == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(params.d == doctest::Approx(1.0 / 24.0).epsilon(1e-12));
  CHECK(params.gamma == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  // Smallest expected word frequency: the beta rows dot a = (1/2, 1/2).
  CHECK(params.eta == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("dirichlet priors satisfy the detectability margins") {
  for (const auto& alpha :
       {std::vector<double>{0.1, 0.1, 0.1}, std::vector<double>{0.5, 1.0, 2.0}}) {
    const PriorStats stats = dirichlet_prior_stats(alpha);
    const double alpha0 = std::accumulate(alpha.begin(), alpha.end(), 0.0);
    const double alpha_min = *std::min_element(alpha.begin(), alpha.end());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(stats.r);
    CHECK(eig.eigenvalues().minCoeff() >=
          alpha_min / (alpha0 * (alpha0 + 1.0)) - 1e-12);

    for (std::size_t i = 0; i < alpha.size(); ++i) {
      for (std::size_t j = 0; j < alpha.size(); ++j) {
        if (i == j) continue;
        const auto ii = static_cast<Eigen::Index>(i);
        const auto jj = static_cast<Eigen::Index>(j);
        const double gap = stats.r(ii, ii) / (stats.a(ii) * stats.a(ii)) -
                           stats.r(ii, jj) / (stats.a(ii) * stats.a(jj));
        const double closed = alpha0 / (alpha[i] * (alpha0 + 1.0));
        CHECK(gap == doctest::Approx(closed).epsilon(1e-12));
        CHECK(gap > 0.0);
      }
    }
  }
}

TEST_CASE("degenerate square geometry places four planar extremes") {
  const GroundTruth gt = degenerate_square_instance(400, 12);
  REQUIRE(gt.beta.cols() == 4);
  REQUIRE(gt.theta.cols() == 400);
  REQUIRE(gt.novel_sets.size() == 4);

  const auto [x, xp] = exact_a_instance(gt);
  const Eigen::MatrixXd rows = fixtures::dense_from_rows(x);

  // The four corner rows span only a 2-D affine plane: rank 3 homogeneous.
  Eigen::MatrixXd corners(4, rows.cols() + 1);
  std::vector<std::uint32_t> corner_words;
  for (const auto& set : gt.novel_sets) {
    REQUIRE(set.size() == 1);
    corner_words.push_back(set[0]);
  }
  for (int k = 0; k < 4; ++k) {
    corners.row(k).head(rows.cols()) = rows.row(corner_words[static_cast<std::size_t>(k)]);
    corners(k, rows.cols()) = 1.0;
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(corners.transpose());
  CHECK(qr.rank() == 3);

  // Corners are the only extreme rows; midpoints and interior words are not.
  const auto extreme = oracle::extreme_rows(rows);
  std::size_t extreme_count = 0;
  for (std::size_t w = 0; w < static_cast<std::size_t>(rows.rows()); ++w) {
    if (extreme[w]) ++extreme_count;
  }
  CHECK(extreme_count == 4);
  for (const std::uint32_t w : corner_words) CHECK(extreme[w]);

  // The empirical weight moments are rank deficient by construction.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gt.prior_stats.r);
  CHECK(eig.eigenvalues()(0) < 1e-12);  // smallest eigenvalue ~ 0
  CHECK(eig.eigenvalues()(1) > 1e-6);   // remaining spectrum healthy

  SUBCASE("document count must fill the four phases evenly") {
    CHECK_THROWS_AS(degenerate_square_instance(402, 12), ConfigError);
  }
}

TEST_CASE("ground truth survives a disk round trip") {
  GeneratorConfig cfg = small_config(2025);
  GroundTruth gt = generate_beta(cfg);
  generate_theta_and_docs(gt, cfg);

  const auto dir = std::filesystem::temp_directory_path() / "septopic_synth_tests";
  std::filesystem::create_directories(dir);
  save_ground_truth(gt, dir);
  const GroundTruth loaded = load_ground_truth(dir);

  CHECK((loaded.beta - gt.beta).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((loaded.theta - gt.theta).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(loaded.novel_sets == gt.novel_sets);
  CHECK((loaded.prior_stats.r - gt.prior_stats.r).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(loaded.config.w == cfg.w);
  CHECK(loaded.config.seed == cfg.seed);
}
