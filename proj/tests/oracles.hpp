#pragma once

// Independent reference implementations the test suites compare against.
// Everything here is derived separately from the library code paths: dense
// linear algebra instead of sparse accumulation, closed forms instead of
// samplers, enumeration instead of optimization.

#include <cstdint>
#include <filesystem>
#include <vector>

#include <Eigen/Dense>

#include "septopic/corpus.hpp"

namespace oracle {

/// C = m * X * Xp^T from densified normalized rows (dense matmul reference).
Eigen::MatrixXd dense_cooccurrence(const septopic::NormalizedRows& x,
                                   const septopic::NormalizedRows& xp, std::size_t m);

/// Population limit E_ij = beta_i R beta_j^T / ((beta_i a)(beta_j a)).
Eigen::MatrixXd expected_cooccurrence(const Eigen::MatrixXd& beta,
                                      const Eigen::MatrixXd& r, const Eigen::VectorXd& a);

/// D(i,j) from any full matrix of co-occurrence values.
double matrix_distance(const Eigen::MatrixXd& c, std::size_t i, std::size_t j);

/// Nonnegative least squares min ||a x - b|| s.t. x >= 0 (Lawson-Hanson).
Eigen::VectorXd nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                     int max_iter = 500);

/// Whether `query` lies in the convex hull of the rows of `points`
/// (sum-to-one enforced through a penalty row on top of NNLS).
bool in_convex_hull(const Eigen::MatrixXd& points, const Eigen::RowVectorXd& query,
                    double tol = 1e-7);

/// Extreme-point flags for a row set.  Duplicate rows are grouped first, so
/// every copy of an extreme position is flagged extreme.
std::vector<char> extreme_rows(const Eigen::MatrixXd& rows, double tol = 1e-7);

/// Minimum assignment cost by K! enumeration.
double brute_force_assignment_cost(const Eigen::MatrixXd& cost);

/// Minimum of b' quad b - 2 lin' b over the 3-simplex by a coarse grid with
/// two local refinement passes.
double grid_qp_minimum(const Eigen::MatrixXd& quad, const Eigen::VectorXd& lin);

/// Best two-way normalized cut by enumeration (n <= 20); returns 0/1 labels.
std::vector<int> best_normalized_cut(const Eigen::MatrixXd& affinity);

/// Straight-line UCI docword reader into a dense W x D counts matrix.
Eigen::MatrixXd dense_uci_counts(const std::filesystem::path& path);

}  // namespace oracle
