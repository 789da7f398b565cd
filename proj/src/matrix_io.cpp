#include "septopic/matrix_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "septopic/common.hpp"

namespace septopic {

void write_matrix_tsv(const Eigen::MatrixXd& mat, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write matrix file: " + path.string());
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < mat.rows(); ++i) {
    for (Eigen::Index j = 0; j < mat.cols(); ++j) {
      if (j > 0) out << '\t';
      out << mat(i, j);
    }
    out << '\n';
  }
  if (!out) throw Error("failed writing matrix file: " + path.string());
}

Eigen::MatrixXd read_matrix_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix file: " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ss(line);
    std::vector<double> row;
    double v;
    while (ss >> v) row.push_back(v);
    if (!ss.eof()) throw ParseError("malformed numeric row", line_no);
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ParseError("ragged row in matrix file", line_no);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ParseError("matrix file is empty", line_no);
  Eigen::MatrixXd mat(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows.front().size(); ++j) {
      mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  return mat;
}

}  // namespace septopic
