#pragma once

// Plain-text matrix exchange: tab-separated rows with 17 significant digits,
// enough to round-trip IEEE doubles exactly.

#include <filesystem>

#include <Eigen/Dense>

namespace septopic {

void write_matrix_tsv(const Eigen::MatrixXd& mat, const std::filesystem::path& path);
Eigen::MatrixXd read_matrix_tsv(const std::filesystem::path& path);

}  // namespace septopic
