#include "rbfm/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace rbfm {

double silverman_bandwidth(const PointCloud& cloud) {
  const int N = cloud.N(), n = cloud.n();
  if (N < 2) throw std::invalid_argument("silverman_bandwidth: need N >= 2");
  const Eigen::RowVectorXd mean = cloud.points.colwise().mean();
  double sd = 0;
  for (int c = 0; c < n; ++c) sd += std::sqrt((cloud.points.col(c).array() - mean(c)).square().sum() / (N - 1));
  sd /= n;
  if (!(sd > 1e-12 * (1.0 + cloud.points.cwiseAbs().maxCoeff()))) throw std::invalid_argument("silverman_bandwidth: zero variance");
  return sd * std::pow(4.0 / ((n + 2.0) * N), 1.0 / (n + 4.0));
}

DensityEstimate kde_density(const PointCloud& cloud, double h) {
  if (!(h > 0)) throw std::invalid_argument("kde_density: bandwidth must be positive");
  const int N = cloud.N(), n = cloud.n();
  const double norm = 1.0 / (N * std::pow(h * std::sqrt(2.0 * std::numbers::pi), n));
  DensityEstimate e;
  e.bandwidth = h;
  e.method = DensityMethod::KdeSilverman;
  e.q.resize(N);
  for (int i = 0; i < N; ++i) {
    double s = 0;
    for (int j = 0; j < N; ++j) s += std::exp(-(cloud.points.row(i) - cloud.points.row(j)).squaredNorm() / (2 * h * h));
    e.q(i) = norm * s;
  }
  return e;
}

DensityEstimate estimate_density(const PointCloud& cloud, DensityMethod method) {
  switch (method) {
    case DensityMethod::KdeSilverman: return kde_density(cloud, silverman_bandwidth(cloud));
    case DensityMethod::Analytic: {
      DensityEstimate e;
      e.method = method;
      e.q = sampling_density(cloud);
      return e;
    }
    case DensityMethod::Uniform: {
      DensityEstimate e;
      e.method = method;
      e.q = VectorXd::Constant(cloud.N(), cloud.spec ? 1.0 / cloud.spec->volume() : 1.0);
      return e;
    }
  }
  throw std::invalid_argument("estimate_density: unknown method");
}

namespace {
VectorXd ranks(const VectorXd& v) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return v(a) < v(b); });
  VectorXd r(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v(idx[j + 1]) == v(idx[i])) ++j;
    for (std::size_t k = i; k <= j; ++k) r(idx[k]) = 0.5 * double(i + j);
    i = j + 1;
  }
  return r;
}
}  // namespace

double spearman_correlation(const VectorXd& a, const VectorXd& b) {
  if (a.size() != b.size() || a.size() < 2) throw std::invalid_argument("spearman_correlation: size mismatch");
  VectorXd ra = ranks(a), rb = ranks(b);
  ra.array() -= ra.mean();
  rb.array() -= rb.mean();
  return ra.dot(rb) / (ra.norm() * rb.norm());
}

std::string to_string(DensityMethod m) {
  switch (m) {
    case DensityMethod::KdeSilverman: return "kde";
    case DensityMethod::Analytic: return "analytic";
    case DensityMethod::Uniform: return "uniform";
  }
  return "kde";
}

DensityMethod density_method_from_string(const std::string& s) {
  if (s == "kde") return DensityMethod::KdeSilverman;
  if (s == "analytic") return DensityMethod::Analytic;
  if (s == "uniform") return DensityMethod::Uniform;
  throw std::invalid_argument("unknown density method: " + s);
}

}  // namespace rbfm
