#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "rbfm/manifold.hpp"

namespace rbfm {

// Columns x1..xn, then t1..td when intrinsic coordinates are known, then q when given.
void write_cloud_csv(const std::string& path, const PointCloud& cloud, const VectorXd* q = nullptr,
                     const std::string& header_comment = "");
PointCloud read_cloud_csv(const std::string& path);

struct DenseMatrixFile {
  MatrixXd M;
  int N = 0;
  int n = 0;
  std::string kind;
};

// Binary row-major container with magic "RBFMDNS1".
void write_dense_matrix(const std::string& path, const MatrixXd& M, int N, int n, const std::string& kind);
DenseMatrixFile read_dense_matrix(const std::string& path);

struct ConvergenceRow {
  int N = 0;
  double error = 0;
};

void write_convergence_csv(const std::string& path, const std::string& quantity, const std::vector<ConvergenceRow>& rows,
                           double slope, const std::string& header_comment = "");

void append_jsonl(const std::string& path, const nlohmann::json& record);

std::string join_path(const std::string& dir, const std::string& file);
void ensure_directory(const std::string& dir);

}  // namespace rbfm
