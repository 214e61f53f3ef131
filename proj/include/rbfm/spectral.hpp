#pragma once

#include <string>
#include <vector>

#include "rbfm/linalg.hpp"
#include "rbfm/truth.hpp"

namespace rbfm {

// Symmetric pencil A f = lambda B f with diagonal positive B.
struct GeneralizedPair {
  MatrixXd A;
  VectorXd b;  // diagonal of B
};

// Pencil with A = F^T K F (F is r x m, K symmetric r x r) and diagonal B; nonzero spectrum is solved at size r.
struct LowRankPair {
  MatrixXd F;
  MatrixXd K;
  VectorXd b;
};

// Operator L = lift * R^T with K = R^T lift (R orthonormal columns); the spectrum of L is that of K plus
// (full_dim - K.rows()) exact zeros. Eigenvectors of L are lift * y.
struct ReducedOperator {
  MatrixXd K;
  MatrixXd lift;
  int full_dim = 0;
};

enum class Ordering { ByMagnitudeAscending, ByRealAscending };

struct SpectralResult {
  VectorXcd values;            // full computed spectrum, sorted
  std::vector<bool> trivial;   // |lambda| below trivial_threshold
  MatrixXcd vectors;           // first k modes of `values`
  Ordering ordering = Ordering::ByRealAscending;
  int rank_L = 0;              // pinv rank of the underlying interpolation, 0 when unknown
  int nullity = 0;             // exact zeros implied by a low-rank reduction, not listed in `values`
  double trivial_threshold = 0;
  bool real = true;
  // Reduced and low-rank solves only: near 1 for modes resolved by the interpolation space.
  std::vector<double> resolution;

  int size() const { return static_cast<int>(values.size()); }
  MatrixXd real_vectors() const { return vectors.real(); }
  // Indices of the first `count` non-trivial modes.
  std::vector<int> nontrivial(int count) const;
};

struct AlignmentReport {
  MatrixXcd beta;
  MatrixXcd aligned;
  std::vector<double> per_mode_error;
  std::string metric = "relative discrete L2 after OLS";
  bool rank_deficient = false;
};

// trivial_rel: modes with |lambda| < trivial_rel * max|lambda| are flagged trivial.
SpectralResult solve_symmetric(const GeneralizedPair& pair, int k, double trivial_rel = 1e-7);
// Resolution of a mode f is |F f| / |f| when F has orthonormal rows; modes below min_resolution are flagged trivial.
SpectralResult solve_symmetric(const LowRankPair& pair, int k, double trivial_rel = 1e-7, double min_resolution = 0.5);
SpectralResult solve_nonsymmetric(const MatrixXd& L, int k, double trivial_rel = 1e-7, bool vectors = true);
// Modes whose resolution falls below min_resolution are also flagged trivial.
SpectralResult solve_nonsymmetric(const ReducedOperator& op, int k, double trivial_rel = 1e-7, bool vectors = true,
                                  double min_resolution = 0.5);

AlignmentReport align_eigenvectors_ols(const MatrixXcd& F, const MatrixXcd& U);
AlignmentReport align_eigenvectors_ols(const MatrixXd& F, const MatrixXd& U);

// Estimated eigenvalue matched to each of the first `count` expanded truth values. Truth zeros take the
// smallest-magnitude estimates (implicit zeros included); the rest take non-trivial estimates in order.
// NaN marks a truth mode with no estimate left.
std::vector<double> matched_estimates(const SpectralResult& est, const std::vector<double>& truth);

inline constexpr int kImplicitZero = -1;
inline constexpr int kUnmatched = -2;
// Same matching, as indices into est.values (or kImplicitZero / kUnmatched).
std::vector<int> matched_indices(const SpectralResult& est, const std::vector<double>& truth);

std::vector<double> eigenvalue_errors(const SpectralResult& est, const EigenTruth& truth, int count);
std::vector<double> eigenvalue_errors(const SpectralResult& est, const std::vector<double>& truth);

// Sort permutation for a complex spectrum under the given ordering (ties: real part, then imaginary part).
std::vector<int> spectrum_order(const VectorXcd& values, Ordering ordering);

void write_spectrum_csv(const std::string& path, const SpectralResult& r, const std::string& header_comment = "");
void write_alignment_csv(const std::string& path, const std::vector<double>& truth_values,
                         const std::vector<double>& est_values, const std::vector<double>& vec_errors,
                         const std::string& header_comment = "");

}  // namespace rbfm
