#include "rbfm/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace rbfm {

namespace {

void flag_trivial(SpectralResult& r, double rel) {
  double scale = 0;
  for (Eigen::Index i = 0; i < r.values.size(); ++i) scale = std::max(scale, std::abs(r.values(i)));
  r.trivial_threshold = rel * scale;
  r.trivial.resize(r.values.size());
  for (Eigen::Index i = 0; i < r.values.size(); ++i) r.trivial[i] = std::abs(r.values(i)) < r.trivial_threshold;
}

int clamp_k(int k, Eigen::Index n) { return (k < 0 || k > n) ? static_cast<int>(n) : k; }

void normalize_columns(MatrixXcd& V) {
  for (Eigen::Index j = 0; j < V.cols(); ++j) {
    const double nrm = V.col(j).norm();
    if (nrm > 0) V.col(j) /= nrm;
  }
}

SpectralResult from_sym(const SymEig& eig, const VectorXd& back_scale, const MatrixXd* Q, int k, double rel) {
  SpectralResult r;
  r.ordering = Ordering::ByRealAscending;
  r.real = true;
  r.values = eig.values.cast<std::complex<double>>();
  flag_trivial(r, rel);
  k = clamp_k(k, eig.values.size());
  MatrixXd V = eig.vectors.leftCols(k);
  if (Q) V = (*Q) * V;
  V = back_scale.asDiagonal() * V;
  r.vectors = V.cast<std::complex<double>>();
  return r;
}

SpectralResult from_gen(const GenEig& eig, const MatrixXd* lift, int k, double rel, bool vectors) {
  SpectralResult r;
  r.ordering = Ordering::ByMagnitudeAscending;
  r.real = false;
  const std::vector<int> order = spectrum_order(eig.values, Ordering::ByMagnitudeAscending);
  r.values.resize(eig.values.size());
  for (std::size_t i = 0; i < order.size(); ++i) r.values(i) = eig.values(order[i]);
  flag_trivial(r, rel);
  if (vectors) {
    k = clamp_k(k, eig.values.size());
    MatrixXcd Y(eig.vectors.rows(), k);
    for (int j = 0; j < k; ++j) Y.col(j) = eig.vectors.col(order[j]);
    r.vectors = lift ? MatrixXcd(lift->cast<std::complex<double>>() * Y) : Y;
    normalize_columns(r.vectors);
  }
  return r;
}

}  // namespace

std::vector<int> SpectralResult::nontrivial(int count) const {
  std::vector<int> idx;
  for (int i = 0; i < size() && static_cast<int>(idx.size()) < count; ++i)
    if (!trivial[i]) idx.push_back(i);
  return idx;
}

std::vector<int> spectrum_order(const VectorXcd& v, Ordering ordering) {
  std::vector<int> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  auto key = [&](int i) {
    const double m = ordering == Ordering::ByMagnitudeAscending ? std::abs(v(i)) : v(i).real();
    return std::make_tuple(m, v(i).real(), v(i).imag(), i);
  };
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return key(a) < key(b); });
  return idx;
}

SpectralResult solve_symmetric(const GeneralizedPair& pair, int k, double rel) {
  const Eigen::Index N = pair.A.rows();
  if (pair.A.cols() != N || pair.b.size() != N) throw std::invalid_argument("solve_symmetric: shape mismatch");
  if (!(pair.b.minCoeff() > 0)) throw std::invalid_argument("solve_symmetric: B is not positive definite");
  const VectorXd s = pair.b.cwiseSqrt().cwiseInverse();
  MatrixXd C = s.asDiagonal() * pair.A * s.asDiagonal();
  SymEig eig = sym_eig(symmetrize(C), true);
  return from_sym(eig, s, nullptr, k, rel);
}

SpectralResult solve_symmetric(const LowRankPair& pair, int k, double rel, double min_resolution) {
  const Eigen::Index m = pair.F.cols();
  if (pair.b.size() != m || pair.K.rows() != pair.F.rows() || pair.K.cols() != pair.K.rows())
    throw std::invalid_argument("solve_symmetric: low-rank shape mismatch");
  if (!(pair.b.minCoeff() > 0)) throw std::invalid_argument("solve_symmetric: B is not positive definite");
  const VectorXd s = pair.b.cwiseSqrt().cwiseInverse();
  const MatrixXd Et = s.asDiagonal() * pair.F.transpose();  // m x r
  Eigen::ColPivHouseholderQR<MatrixXd> qr(Et);
  const Eigen::Index rk = qr.rank();
  const MatrixXd Q = qr.householderQ() * MatrixXd::Identity(m, rk);
  const MatrixXd R = qr.matrixR().topRows(rk).triangularView<Eigen::Upper>();
  const MatrixXd RP = R * qr.colsPermutation().transpose();  // Et = Q RP
  const MatrixXd S = RP * pair.K * RP.transpose();
  SymEig eig = sym_eig(symmetrize(S), true);
  SpectralResult r = from_sym(eig, s, &Q, k, rel);
  r.nullity = static_cast<int>(m - rk);
  const MatrixXd U = s.asDiagonal() * (Q * eig.vectors);
  const MatrixXd FU = pair.F * U;
  r.resolution.resize(U.cols());
  for (Eigen::Index i = 0; i < U.cols(); ++i) {
    const double nu = U.col(i).norm();
    r.resolution[i] = nu > 0 ? std::min(1.0, FU.col(i).norm() / nu) : 0.0;
    if (r.resolution[i] < min_resolution) r.trivial[i] = true;
  }
  return r;
}

SpectralResult solve_nonsymmetric(const MatrixXd& L, int k, double rel, bool vectors) {
  if (L.rows() != L.cols()) throw std::invalid_argument("solve_nonsymmetric: matrix not square");
  GenEig eig = nonsym_eig(L, vectors);
  return from_gen(eig, nullptr, k, rel, vectors);
}

SpectralResult solve_nonsymmetric(const ReducedOperator& op, int k, double rel, bool vectors, double min_resolution) {
  GenEig eig = nonsym_eig(op.K, true);
  SpectralResult r = from_gen(eig, nullptr, k, rel, false);
  r.nullity = op.full_dim - static_cast<int>(op.K.rows());
  const std::vector<int> order = spectrum_order(eig.values, Ordering::ByMagnitudeAscending);
  const MatrixXcd U = op.lift.cast<std::complex<double>>() * eig.vectors;
  if (vectors) {
    k = clamp_k(k, eig.values.size());
    r.vectors.resize(U.rows(), k);
    for (int j = 0; j < k; ++j) r.vectors.col(j) = U.col(order[j]);
    normalize_columns(r.vectors);
  }
  r.resolution.resize(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const int j = order[i];
    const double nu = U.col(j).norm();
    r.resolution[i] = nu > 0 ? std::min(1.0, std::abs(eig.values(j)) * eig.vectors.col(j).norm() / nu) : 0.0;
    if (r.resolution[i] < min_resolution) r.trivial[i] = true;
  }
  return r;
}

AlignmentReport align_eigenvectors_ols(const MatrixXcd& F, const MatrixXcd& U) {
  if (F.rows() != U.rows()) throw std::invalid_argument("align_eigenvectors_ols: row mismatch");
  AlignmentReport rep;
  Eigen::ColPivHouseholderQR<MatrixXcd> qr(U);
  if (qr.rank() < U.cols()) {
    rep.rank_deficient = true;
    std::cerr << "warning: align_eigenvectors_ols: estimated vectors are rank deficient, using pseudo-inverse\n";
    rep.beta = Eigen::CompleteOrthogonalDecomposition<MatrixXcd>(U).solve(F);
  } else {
    rep.beta = qr.solve(F);
  }
  rep.aligned = U * rep.beta;
  for (Eigen::Index j = 0; j < F.cols(); ++j) {
    const double nf = F.col(j).norm();
    rep.per_mode_error.push_back((F.col(j) - rep.aligned.col(j)).norm() / (nf > 0 ? nf : 1.0));
  }
  return rep;
}

AlignmentReport align_eigenvectors_ols(const MatrixXd& F, const MatrixXd& U) {
  return align_eigenvectors_ols(MatrixXcd(F.cast<std::complex<double>>()), MatrixXcd(U.cast<std::complex<double>>()));
}

std::vector<int> matched_indices(const SpectralResult& est, const std::vector<double>& truth) {
  struct Cand {
    double mag;
    bool trivial;
    int index;
  };
  double first_positive = std::numeric_limits<double>::infinity();
  for (double t : truth)
    if (t > 0) first_positive = std::min(first_positive, t);
  std::vector<Cand> c;
  for (int i = 0; i < est.size(); ++i) c.push_back({std::abs(est.values(i)), static_cast<bool>(est.trivial[i]), i});
  std::stable_sort(c.begin(), c.end(), [](const Cand& a, const Cand& b) { return a.mag < b.mag; });
  const int zeros = static_cast<int>(std::count(truth.begin(), truth.end(), 0.0));
  std::size_t next = 0;
  std::vector<int> zero_est;
  // explicit estimates nearer to zero than to the first positive level, then implicit zeros
  while (static_cast<int>(zero_est.size()) < zeros && next < c.size() && c[next].mag < 0.5 * first_positive)
    zero_est.push_back(c[next++].index);
  for (int i = 0; i < est.nullity && static_cast<int>(zero_est.size()) < zeros; ++i) zero_est.push_back(kImplicitZero);
  while (static_cast<int>(zero_est.size()) < zeros && next < c.size()) zero_est.push_back(c[next++].index);
  std::vector<int> rest;
  for (; next < c.size(); ++next)
    if (!c[next].trivial && !(zeros > 0 && c[next].mag < 0.5 * first_positive)) rest.push_back(c[next].index);
  std::vector<int> out(truth.size(), kUnmatched);
  std::size_t zi = 0, ri = 0;
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (truth[t] == 0.0) {
      if (zi < zero_est.size()) out[t] = zero_est[zi++];
    } else if (ri < rest.size()) {
      out[t] = rest[ri++];
    }
  }
  return out;
}

std::vector<double> matched_estimates(const SpectralResult& est, const std::vector<double>& truth) {
  const std::vector<int> idx = matched_indices(est, truth);
  std::vector<double> out(truth.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t t = 0; t < truth.size(); ++t) {
    if (idx[t] == kImplicitZero) {
      out[t] = 0.0;
    } else if (idx[t] >= 0) {
      const auto v = est.values(idx[t]);
      out[t] = est.real ? v.real() : std::abs(v);
    }
  }
  return out;
}

std::vector<double> eigenvalue_errors(const SpectralResult& est, const std::vector<double>& truth) {
  const std::vector<double> m = matched_estimates(est, truth);
  std::vector<double> err(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) err[i] = std::abs(m[i] - truth[i]) / std::max(truth[i], 1.0);
  return err;
}

std::vector<double> eigenvalue_errors(const SpectralResult& est, const EigenTruth& truth, int count) {
  return eigenvalue_errors(est, truth.expanded(count));
}

void write_spectrum_csv(const std::string& path, const SpectralResult& r, const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# rbfm-spectrum v1 ordering=" << (r.ordering == Ordering::ByMagnitudeAscending ? "magnitude" : "real")
      << " rank_L=" << r.rank_L << " nullity=" << r.nullity << "\n";
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "mode,re,im,magnitude,trivial_flag\n" << std::setprecision(17);
  for (int i = 0; i < r.size(); ++i)
    out << i + 1 << "," << r.values(i).real() << "," << r.values(i).imag() << "," << std::abs(r.values(i)) << ","
        << int(r.trivial[i]) << "\n";
}

void write_alignment_csv(const std::string& path, const std::vector<double>& truth_values,
                         const std::vector<double>& est_values, const std::vector<double>& vec_errors,
                         const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# rbfm-alignment v1 metric=relative_discrete_L2_after_OLS\n";
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "mode,truth_value,est_value,vec_error\n" << std::setprecision(17);
  for (std::size_t i = 0; i < truth_values.size(); ++i) {
    out << i + 1 << "," << truth_values[i] << "," << (i < est_values.size() ? est_values[i] : NAN) << ",";
    if (i < vec_errors.size()) out << vec_errors[i];
    out << "\n";
  }
}

}  // namespace rbfm
