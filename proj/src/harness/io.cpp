#include "rbfm/harness/io.hpp"

#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rbfm {

namespace {

constexpr char kDenseMagic[8] = {'R', 'B', 'F', 'M', 'D', 'N', 'S', '1'};

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

void write_cloud_csv(const std::string& path, const PointCloud& cloud, const VectorXd* q,
                     const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const bool intr = cloud.intrinsic.has_value();
  out << "# rbfm-cloud v1 manifold=" << (cloud.spec ? cloud.spec->name() : "given") << " N=" << cloud.N()
      << " n=" << cloud.n() << " d=" << cloud.d << " seed=" << cloud.seed << " sampling=" << to_string(cloud.sampling)
      << "\n";
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  for (int i = 0; i < cloud.n(); ++i) out << (i ? "," : "") << "x" << i + 1;
  if (intr)
    for (int i = 0; i < cloud.d; ++i) out << ",t" << i + 1;
  if (q) out << ",q";
  out << "\n" << std::setprecision(17);
  for (int j = 0; j < cloud.N(); ++j) {
    for (int i = 0; i < cloud.n(); ++i) out << (i ? "," : "") << cloud.points(j, i);
    if (intr)
      for (int i = 0; i < cloud.d; ++i) out << "," << (*cloud.intrinsic)(j, i);
    if (q) out << "," << (*q)(j);
    out << "\n";
  }
}

PointCloud read_cloud_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  int d = 0;
  std::vector<std::string> cols;
  while (std::getline(in, line)) {
    if (line.rfind("# rbfm-cloud", 0) == 0) {
      for (const auto& tok : split(line, ' '))
        if (tok.rfind("d=", 0) == 0) d = std::stoi(tok.substr(2));
      continue;
    }
    if (!line.empty() && line[0] == '#') continue;
    cols = split(line, ',');
    break;
  }
  int n = 0, nt = 0, t0 = -1;
  for (int k = 0; k < static_cast<int>(cols.size()); ++k) {
    if (!cols[k].empty() && cols[k][0] == 'x') ++n;
    if (!cols[k].empty() && cols[k][0] == 't') {
      if (t0 < 0) t0 = k;
      ++nt;
    }
  }
  if (n == 0) throw std::runtime_error("read_cloud_csv: no coordinate columns in " + path);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> r;
    for (const auto& tok : split(line, ',')) r.push_back(std::stod(tok));
    if (static_cast<int>(r.size()) < n) throw std::runtime_error("read_cloud_csv: short row in " + path);
    rows.push_back(std::move(r));
  }
  MatrixXd X(rows.size(), n);
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (int i = 0; i < n; ++i) X(j, i) = rows[j][i];
  PointCloud cloud = cloud_from_points(X, d > 0 ? d : n);
  if (nt > 0) {
    MatrixXd T(rows.size(), nt);
    for (std::size_t j = 0; j < rows.size(); ++j)
      for (int i = 0; i < nt; ++i) T(j, i) = rows[j].at(t0 + i);
    cloud.intrinsic = T;
  }
  return cloud;
}

void write_dense_matrix(const std::string& path, const MatrixXd& M, int N, int n, const std::string& kind) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(kDenseMagic, 8);
  const std::int64_t hdr[4] = {M.rows(), M.cols(), N, n};
  out.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  const std::uint32_t klen = static_cast<std::uint32_t>(kind.size());
  out.write(reinterpret_cast<const char*>(&klen), sizeof(klen));
  out.write(kind.data(), klen);
  const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R = M;
  out.write(reinterpret_cast<const char*>(R.data()), static_cast<std::streamsize>(R.size() * sizeof(double)));
}

DenseMatrixFile read_dense_matrix(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (!in || std::memcmp(magic, kDenseMagic, 8) != 0) throw std::runtime_error("read_dense_matrix: bad magic in " + path);
  std::int64_t hdr[4];
  in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  std::uint32_t klen = 0;
  in.read(reinterpret_cast<char*>(&klen), sizeof(klen));
  if (!in || hdr[0] < 0 || hdr[1] < 0 || klen > 4096) throw std::runtime_error("read_dense_matrix: bad header");
  DenseMatrixFile f;
  f.kind.resize(klen);
  in.read(f.kind.data(), klen);
  f.N = static_cast<int>(hdr[2]);
  f.n = static_cast<int>(hdr[3]);
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> R(hdr[0], hdr[1]);
  in.read(reinterpret_cast<char*>(R.data()), static_cast<std::streamsize>(R.size() * sizeof(double)));
  if (!in) throw std::runtime_error("read_dense_matrix: truncated " + path);
  f.M = R;
  return f;
}

void write_convergence_csv(const std::string& path, const std::string& quantity, const std::vector<ConvergenceRow>& rows,
                           double slope, const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# rbfm-convergence v1 quantity=" << quantity << " slope=" << std::setprecision(17) << slope << "\n";
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "N,mean_error\n";
  for (const auto& r : rows) out << r.N << "," << r.error << "\n";
}

void append_jsonl(const std::string& path, const nlohmann::json& record) {
  std::ofstream out(path, std::ios::app);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << record.dump() << "\n";
}

std::string join_path(const std::string& dir, const std::string& file) {
  return (std::filesystem::path(dir) / file).string();
}

void ensure_directory(const std::string& dir) {
  if (!dir.empty()) std::filesystem::create_directories(dir);
}

}  // namespace rbfm
