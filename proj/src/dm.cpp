#include "rbfm/dm.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <queue>
#include <stdexcept>

namespace rbfm {

int default_dm_K(int N) { return static_cast<int>(std::ceil(std::sqrt(double(N)))); }

std::vector<std::vector<int>> dm_neighbours(const MatrixXd& points, int K) {
  const int N = static_cast<int>(points.rows());
  if (K < 2 || K > N) throw std::invalid_argument("DM: K_neighbors must satisfy 1 < K <= N");
  std::vector<std::vector<int>> out(N);
  std::vector<std::pair<double, int>> dist(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) dist[j] = {j == i ? -1.0 : (points.row(i) - points.row(j)).squaredNorm(), j};
    std::partial_sort(dist.begin(), dist.begin() + K, dist.end());
    for (int k = 0; k < K; ++k) out[i].push_back(dist[k].second);
  }
  return out;
}

double autotune_epsilon(const PointCloud& cloud, int K) {
  const auto nbr = dm_neighbours(cloud.points, K);
  std::vector<double> d2;
  for (int i = 0; i < cloud.N(); ++i)
    for (int j : nbr[i]) d2.push_back((cloud.points.row(i) - cloud.points.row(j)).squaredNorm());
  const double step = 0.1;
  const int lo = -300, hi = 100;  // log2(eps) in tenths
  std::vector<double> logT;
  for (int l = lo; l <= hi; ++l) {
    const double eps = std::exp2(l * step);
    double T = 0;
    for (double v : d2) T += std::exp(-v / (4 * eps));
    logT.push_back(std::log(T));
  }
  const double dlog = step * std::log(2.0);
  int best = 1;
  double best_slope = -1;
  for (std::size_t i = 1; i + 1 < logT.size(); ++i) {
    const double slope = (logT[i + 1] - logT[i - 1]) / (2 * dlog);
    if (slope > best_slope) {
      best_slope = slope;
      best = static_cast<int>(i);
    }
  }
  return std::exp2((lo + best) * step);
}

DmOperator dm_laplacian(const PointCloud& cloud, const DmConfig& config) {
  const int N = cloud.N();
  DmOperator op;
  op.K_neighbors = config.K_neighbors > 0 ? config.K_neighbors : default_dm_K(N);
  op.epsilon = config.epsilon ? *config.epsilon : autotune_epsilon(cloud, op.K_neighbors);
  if (!(op.epsilon > 0)) throw std::invalid_argument("DM: epsilon must be positive");
  const auto nbr = dm_neighbours(cloud.points, op.K_neighbors);
  std::vector<Eigen::Triplet<double>> trip;
  for (int i = 0; i < N; ++i)
    for (int j : nbr[i]) {
      const double w = std::exp(-(cloud.points.row(i) - cloud.points.row(j)).squaredNorm() / (4 * op.epsilon));
      trip.emplace_back(i, j, w);
      if (j != i) trip.emplace_back(j, i, w);
    }
  Eigen::SparseMatrix<double> W(N, N);
  // duplicates (mutual neighbours) are entered twice; keep one copy
  W.setFromTriplets(trip.begin(), trip.end(), [](double a, double) { return a; });
  op.W = W;

  const VectorXd q = W * VectorXd::Ones(N);
  Eigen::SparseMatrix<double> Wt = W;
  for (int k = 0; k < Wt.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(Wt, k); it; ++it) it.valueRef() /= q(it.row()) * q(it.col());
  op.dtilde = Wt * VectorXd::Ones(N);

  // connectivity
  std::vector<int> comp(N, -1);
  int nc = 0;
  for (int s = 0; s < N; ++s) {
    if (comp[s] >= 0) continue;
    std::queue<int> bfs;
    bfs.push(s);
    comp[s] = nc;
    while (!bfs.empty()) {
      const int u = bfs.front();
      bfs.pop();
      for (Eigen::SparseMatrix<double>::InnerIterator it(W, u); it; ++it)
        if (comp[it.row()] < 0) {
          comp[it.row()] = nc;
          bfs.push(static_cast<int>(it.row()));
        }
    }
    ++nc;
  }
  op.components = nc;
  op.connected = nc == 1;
  if (!op.connected) std::cerr << "warning: DM KNN graph has " << nc << " connected components\n";

  const VectorXd s = op.dtilde.cwiseSqrt().cwiseInverse();
  op.L_sym = -MatrixXd(s.asDiagonal() * Wt * s.asDiagonal());
  op.L_sym.diagonal().array() += 1.0;
  op.L_sym = symmetrize(op.L_sym) / op.epsilon;
  return op;
}

SpectralResult solve_dm(const DmOperator& op, int k) {
  const int N = static_cast<int>(op.L_sym.rows());
  k = std::clamp(k, 1, N);
  SymEig e = sym_eig_range(op.L_sym, 0, k - 1, true);
  SpectralResult r;
  r.ordering = Ordering::ByRealAscending;
  r.real = true;
  r.values = e.values.cast<std::complex<double>>();
  const double zero = 1e-8 * op.L_sym.diagonal().cwiseAbs().maxCoeff();
  r.trivial.resize(e.values.size());
  for (Eigen::Index j = 0; j < e.values.size(); ++j) r.trivial[j] = std::abs(e.values(j)) <= zero;
  MatrixXd V = op.dtilde.cwiseSqrt().cwiseInverse().asDiagonal() * e.vectors;
  for (Eigen::Index j = 0; j < V.cols(); ++j) V.col(j).normalize();
  r.vectors = V.cast<std::complex<double>>();
  return r;
}

}  // namespace rbfm
