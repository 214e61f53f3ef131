#include "rbfm/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace rbfm {

MatrixXd kernel_matrix(const MatrixXd& a, const MatrixXd& b, const KernelModel& model) {
  MatrixXd K(a.rows(), b.rows());
  for (Eigen::Index k = 0; k < b.rows(); ++k)
    for (Eigen::Index j = 0; j < a.rows(); ++j) K(j, k) = kernel_eval(model, (a.row(j) - b.row(k)).norm());
  return K;
}

InterpolationSystem build_system(const MatrixXd& points, const KernelModel& model) {
  model.validate();
  const Eigen::Index N = points.rows();
  if (N < 2) throw std::invalid_argument("build_system: need at least two points");
  InterpolationSystem sys;
  sys.points = points;
  sys.model = model;
  sys.Phi.resize(N, N);
  for (Eigen::Index k = 0; k < N; ++k) {
    sys.Phi(k, k) = kernel_eval(model, 0.0);
    for (Eigen::Index j = k + 1; j < N; ++j) {
      const double v = kernel_eval(model, (points.row(j) - points.row(k)).norm());
      sys.Phi(j, k) = v;
      sys.Phi(k, j) = v;
    }
  }
  SymEig eig = sym_eig(sys.Phi, true);
  std::vector<Eigen::Index> order(N);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return std::abs(eig.values(x)) > std::abs(eig.values(y)); });
  sys.sigma.resize(N);
  for (Eigen::Index i = 0; i < N; ++i) sys.sigma(i) = std::abs(eig.values(order[i]));
  const double cut = model.pinv_tol * sys.sigma(0);
  int L = 0;
  while (L < N && sys.sigma(L) >= cut && sys.sigma(L) > 0) ++L;
  sys.rank = L;
  sys.basis.resize(N, L);
  sys.inv_lambda.resize(L);
  for (int i = 0; i < L; ++i) {
    sys.basis.col(i) = eig.vectors.col(order[i]);
    sys.inv_lambda(i) = 1.0 / eig.values(order[i]);
  }
  return sys;
}

InterpolationSystem build_system(const PointCloud& cloud, const KernelModel& model) {
  return build_system(cloud.points, model);
}

MatrixXd pinv_apply(const InterpolationSystem& sys, const MatrixXd& rhs) {
  if (rhs.rows() != sys.N()) throw std::invalid_argument("pinv_apply: row count mismatch");
  MatrixXd t = sys.basis.transpose() * rhs;
  t = sys.inv_lambda.asDiagonal() * t;
  return sys.basis * t;
}

VectorXd pinv_apply(const InterpolationSystem& sys, const VectorXd& rhs) {
  return pinv_apply(sys, MatrixXd(rhs)).col(0);
}

MatrixXd pinv_matrix(const InterpolationSystem& sys) {
  return sys.basis * sys.inv_lambda.asDiagonal() * sys.basis.transpose();
}

double interpolate_eval(const InterpolationSystem& sys, const VectorXd& coeffs, const VectorXd& query) {
  if (coeffs.size() != sys.N()) throw std::invalid_argument("interpolate_eval: coefficient length mismatch");
  double s = 0;
  for (int k = 0; k < sys.N(); ++k) s += coeffs(k) * kernel_eval(sys.model, (query.transpose() - sys.points.row(k)).norm());
  return s;
}

VectorXd interpolate_grad(const InterpolationSystem& sys, const VectorXd& coeffs, const VectorXd& query) {
  VectorXd g = VectorXd::Zero(sys.n());
  for (int k = 0; k < sys.N(); ++k) {
    const VectorXd diff = query - sys.points.row(k).transpose();
    g += coeffs(k) * kernel_deriv_over_r(sys.model, diff.norm()) * diff;
  }
  return g;
}

std::vector<MatrixXd> node_gradients(const InterpolationSystem& sys, const MatrixXd& coeffs) {
  const int N = sys.N(), n = sys.n();
  std::vector<MatrixXd> out(n, MatrixXd::Zero(N, coeffs.cols()));
  MatrixXd w(N, N);
  for (int k = 0; k < N; ++k)
    for (int j = 0; j < N; ++j) w(j, k) = kernel_deriv_over_r(sys.model, (sys.points.row(j) - sys.points.row(k)).norm());
  for (int s = 0; s < n; ++s) {
    // (E_s)_jk = x_js w_jk - w_jk x_ks
    const VectorXd xs = sys.points.col(s);
    out[s] = xs.asDiagonal() * (w * coeffs) - w * (xs.asDiagonal() * coeffs);
  }
  return out;
}

}  // namespace rbfm
