#include "rbfm/projection.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace rbfm {

int ProjectionField::flagged() const {
  int c = 0;
  for (auto f : flags) c += f != 0;
  return c;
}

MatrixXd projector_from_basis(const MatrixXd& T) {
  const Eigen::Index n = T.rows();
  MatrixXd P(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) {
      double s = 0;
      for (Eigen::Index k = 0; k < T.cols(); ++k) s += T(i, k) * T(j, k);
      P(i, j) = s;
      P(j, i) = s;
    }
  return P;
}

MatrixXd tangent_basis(const MatrixXd& P, int d) { return leading_eigvecs(P, d); }

ProjectionField analytic_projection(const PointCloud& cloud) {
  if (!cloud.intrinsic || !cloud.spec) throw std::invalid_argument("analytic_projection: intrinsic coordinates missing");
  const ManifoldSpec& spec = *cloud.spec;
  ProjectionField f;
  f.source = ProjectionSource::Analytic;
  f.d = spec.intrinsic_dim();
  f.mats.reserve(cloud.N());
  f.flags.assign(cloud.N(), 0);
  f.gaps.assign(cloud.N(), 0.0);
  const int n = spec.ambient_dim();
  for (int i = 0; i < cloud.N(); ++i) {
    if (spec.kind == ManifoldKind::Sphere) {
      VectorXd x = cloud.points.row(i).transpose();
      x /= x.norm();
      MatrixXd P = MatrixXd::Identity(n, n);
      for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) P(r, c) -= x(r) * x(c);
      f.mats.push_back(std::move(P));
      continue;
    }
    const MatrixXd J = spec.jacobian(cloud.intrinsic->row(i).transpose());
    Eigen::HouseholderQR<MatrixXd> qr(J);
    const MatrixXd T = qr.householderQ() * MatrixXd::Identity(n, f.d);
    f.mats.push_back(projector_from_basis(T));
  }
  return f;
}

ProjectionDiagnostics projection_diagnostics(const ProjectionField& est, const ProjectionField& truth) {
  if (est.N() != truth.N() || est.n() != truth.n())
    throw std::invalid_argument("projection_diagnostics: shape mismatch");
  ProjectionDiagnostics d;
  d.per_point.resize(est.N());
  double sum = 0;
  for (int i = 0; i < est.N(); ++i) {
    const double e = (est.mats[i] - truth.mats[i]).norm();
    d.per_point[i] = e;
    d.max_frob = std::max(d.max_frob, e);
    sum += e;
  }
  d.mean_frob = est.N() ? sum / est.N() : 0.0;
  return d;
}

ProjectionField projection_subset(const ProjectionField& field, int count) {
  if (count < 0 || count > field.N()) throw std::invalid_argument("projection_subset: count out of range");
  ProjectionField f = field;
  f.mats.resize(count);
  f.flags.resize(count);
  f.gaps.resize(count);
  return f;
}

std::string to_string(ProjectionSource s) {
  switch (s) {
    case ProjectionSource::Analytic: return "analytic";
    case ProjectionSource::FirstOrder: return "first_order";
    case ProjectionSource::SecondOrder: return "second_order";
  }
  return "analytic";
}

ProjectionSource projection_source_from_string(const std::string& s) {
  if (s == "analytic") return ProjectionSource::Analytic;
  if (s == "first_order") return ProjectionSource::FirstOrder;
  if (s == "second_order") return ProjectionSource::SecondOrder;
  throw std::invalid_argument("unknown projection source: " + s);
}

void write_projection_csv(const std::string& path, const ProjectionField& field) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  const int n = field.n();
  out << "# rbfm-projection v1 source=" << to_string(field.source) << " d=" << field.d << " K=" << field.K_used
      << " N=" << field.N() << " n=" << n << "\n";
  out << "index,flag";
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) out << ",p" << r << "_" << c;
  out << "\n" << std::setprecision(17);
  for (int i = 0; i < field.N(); ++i) {
    out << i << "," << int(field.flags.empty() ? 0 : field.flags[i]);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) out << "," << field.mats[i](r, c);
    out << "\n";
  }
}

ProjectionField read_projection_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string header;
  std::getline(in, header);
  if (header.rfind("# rbfm-projection v1", 0) != 0) throw std::runtime_error("not a projection CSV: " + path);
  ProjectionField f;
  int N = 0, n = 0;
  {
    std::istringstream hs(header.substr(20));
    std::string tok;
    while (hs >> tok) {
      auto eq = tok.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
      if (key == "source") f.source = projection_source_from_string(val);
      if (key == "d") f.d = std::stoi(val);
      if (key == "K") f.K_used = std::stoi(val);
      if (key == "N") N = std::stoi(val);
      if (key == "n") n = std::stoi(val);
    }
  }
  std::string line;
  std::getline(in, line);
  f.mats.reserve(N);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::getline(ls, cell, ',');
    std::getline(ls, cell, ',');
    f.flags.push_back(static_cast<std::uint8_t>(std::stoi(cell)));
    MatrixXd P(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) {
        std::getline(ls, cell, ',');
        P(r, c) = std::stod(cell);
      }
    f.mats.push_back(std::move(P));
  }
  if (f.N() != N) throw std::runtime_error("projection CSV row count mismatch: " + path);
  f.gaps.assign(N, 0.0);
  return f;
}

namespace {
constexpr char kMagic[8] = {'R', 'B', 'F', 'M', 'P', 'R', 'J', '1'};
}

void write_projection_binary(const std::string& path, const ProjectionField& field) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  const std::int64_t hdr[5] = {field.N(), field.n(), field.d, field.K_used, static_cast<std::int64_t>(field.source)};
  out.write(kMagic, 8);
  out.write(reinterpret_cast<const char*>(hdr), sizeof(hdr));
  for (int i = 0; i < field.N(); ++i) {
    const std::uint8_t flag = field.flags.empty() ? 0 : field.flags[i];
    out.write(reinterpret_cast<const char*>(&flag), 1);
    for (int r = 0; r < field.n(); ++r)
      for (int c = 0; c < field.n(); ++c) {
        const double v = field.mats[i](r, c);
        out.write(reinterpret_cast<const char*>(&v), sizeof(double));
      }
  }
}

ProjectionField read_projection_binary(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, kMagic, 8) != 0) throw std::runtime_error("not a projection binary: " + path);
  std::int64_t hdr[5];
  in.read(reinterpret_cast<char*>(hdr), sizeof(hdr));
  ProjectionField f;
  const int N = static_cast<int>(hdr[0]), n = static_cast<int>(hdr[1]);
  f.d = static_cast<int>(hdr[2]);
  f.K_used = static_cast<int>(hdr[3]);
  f.source = static_cast<ProjectionSource>(hdr[4]);
  for (int i = 0; i < N; ++i) {
    std::uint8_t flag;
    in.read(reinterpret_cast<char*>(&flag), 1);
    f.flags.push_back(flag);
    MatrixXd P(n, n);
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < n; ++c) in.read(reinterpret_cast<char*>(&P(r, c)), sizeof(double));
    f.mats.push_back(std::move(P));
  }
  if (!in) throw std::runtime_error("truncated projection binary: " + path);
  f.gaps.assign(N, 0.0);
  return f;
}

}  // namespace rbfm
