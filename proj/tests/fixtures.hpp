#pragma once

// Hand-built instances shared by the test suites.
//
// The K = 2 instances below use four theta columns chosen so the empirical
// weight moments equal the Dirichlet(1,1) closed forms exactly:
// columns (a, 1-a), (a, 1-a), (1-a, a), (1-a, a) with a = (3 + sqrt(3)) / 6
// give mean (1/2, 1/2) and (1/M) sum theta theta^T = [[2,1],[1,2]]/6.  On the
// exact word-frequency matrix the co-occurrence statistics then coincide with
// their population limits to machine precision, so those limits' closed-form
// values can be asserted without sampling tolerances.

#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "septopic/cooccur.hpp"
#include "septopic/corpus.hpp"
#include "septopic/rng.hpp"
#include "septopic/synth.hpp"

namespace fixtures {

inline Eigen::MatrixXd moment_matched_theta_k2() {
  const double a = (3.0 + std::sqrt(3.0)) / 6.0;
  Eigen::MatrixXd theta(2, 4);
  theta << a, a, 1.0 - a, 1.0 - a,
           1.0 - a, 1.0 - a, a, a;
  return theta;
}

/// W = 3: one novel word per topic plus the (1/2, 1/2) mixture word.
inline septopic::GroundTruth three_word_truth() {
  septopic::GroundTruth gt;
  gt.beta.resize(3, 2);
  gt.beta << 1.0, 0.0,
             0.0, 1.0,
             0.5, 0.5;
  gt.theta = moment_matched_theta_k2();
  gt.novel_sets = {{0}, {1}};
  gt.prior_stats = septopic::dirichlet_prior_stats({1.0, 1.0});
  gt.config.w = 3;
  gt.config.k = 2;
  gt.config.m = 4;
  gt.config.alpha = {1.0, 1.0};
  gt.config.mode = septopic::GenMode::exact_a;
  return gt;
}

/// W = 5: two novel words per topic (different weights) plus the mixture word.
inline septopic::GroundTruth five_word_truth() {
  septopic::GroundTruth gt;
  gt.beta.resize(5, 2);
  gt.beta << 1.0, 0.0,
             0.4, 0.0,
             0.0, 1.0,
             0.0, 0.7,
             0.5, 0.5;
  gt.theta = moment_matched_theta_k2();
  gt.novel_sets = {{0, 1}, {2, 3}};
  gt.prior_stats = septopic::dirichlet_prior_stats({1.0, 1.0});
  gt.config.w = 5;
  gt.config.k = 2;
  gt.config.m = 4;
  gt.config.alpha = {1.0, 1.0};
  gt.config.mode = septopic::GenMode::exact_a;
  return gt;
}

/// W = 4, K = 3: three pure words (identity loadings) plus the uniform
/// mixture word, with sampled symmetric-Dirichlet weights.  The exact rows
/// form a triangle with one strictly interior point.
inline septopic::GroundTruth triangle_truth(std::size_t m, std::uint64_t seed) {
  septopic::GroundTruth gt;
  gt.beta.resize(4, 3);
  gt.beta << 1.0, 0.0, 0.0,
             0.0, 1.0, 0.0,
             0.0, 0.0, 1.0,
             1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0;
  gt.theta.resize(3, static_cast<Eigen::Index>(m));
  septopic::Rng rng(seed);
  const std::vector<double> alpha = {1.0, 1.0, 1.0};
  for (std::size_t d = 0; d < m; ++d) {
    const auto col = septopic::sample_dirichlet(alpha, rng);
    for (int k = 0; k < 3; ++k) gt.theta(k, static_cast<Eigen::Index>(d)) = col[static_cast<std::size_t>(k)];
  }
  gt.novel_sets = {{0}, {1}, {2}};
  gt.prior_stats = septopic::dirichlet_prior_stats(alpha);
  gt.config.w = 4;
  gt.config.k = 3;
  gt.config.m = m;
  gt.config.alpha = alpha;
  gt.config.seed = seed;
  gt.config.mode = septopic::GenMode::exact_a;
  return gt;
}

inline septopic::CooccurrenceStats exact_stats(const septopic::GroundTruth& gt,
                                               std::size_t dense_cap = 20000) {
  const auto [x, xp] = septopic::exact_a_instance(gt);
  septopic::CooccurOptions options;
  options.dense_cap = dense_cap;
  return septopic::compute_cooccurrence(x, xp, gt.theta.cols(), options);
}

/// NormalizedRows view of a dense matrix whose rows already sum to 1 (or are
/// all-zero, which marks the word empty).
inline septopic::NormalizedRows rows_from_dense(const Eigen::MatrixXd& rows) {
  septopic::NormalizedRows out;
  out.num_words = static_cast<std::size_t>(rows.rows());
  out.num_docs = static_cast<std::size_t>(rows.cols());
  out.rows.resize(out.num_words);
  out.row_totals.assign(out.num_words, 0.0);
  out.empty_words.assign(out.num_words, 0);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    double total = 0.0;
    for (Eigen::Index d = 0; d < rows.cols(); ++d) {
      if (rows(i, d) != 0.0) {
        out.rows[static_cast<std::size_t>(i)].emplace_back(
            static_cast<std::uint32_t>(d), rows(i, d));
        total += rows(i, d);
      }
    }
    out.row_totals[static_cast<std::size_t>(i)] = total;
    if (total == 0.0) out.empty_words[static_cast<std::size_t>(i)] = 1;
  }
  return out;
}

/// Dense matrix view of normalized rows.
inline Eigen::MatrixXd dense_from_rows(const septopic::NormalizedRows& rows) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.num_words),
                                              static_cast<Eigen::Index>(rows.num_docs));
  for (std::size_t i = 0; i < rows.num_words; ++i) {
    for (const auto& [d, v] : rows.rows[i]) {
      out(static_cast<Eigen::Index>(i), d) = v;
    }
  }
  return out;
}

}  // namespace fixtures
