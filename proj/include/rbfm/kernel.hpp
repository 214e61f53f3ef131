#pragma once

#include <string>

namespace rbfm {

enum class KernelFamily { Gaussian, InverseQuadratic, Matern };

struct KernelModel {
  KernelFamily family = KernelFamily::Gaussian;
  double shape = 1.0;       // s
  double pinv_tol = 1e-8;   // relative to the largest singular value
  int matern_order = 2;     // smoothness nu = order + 1/2, order in {1,2,3}

  void validate() const;  // throws std::invalid_argument
  std::string name() const;
};

KernelModel gaussian(double s, double pinv_tol = 1e-8);
KernelModel inverse_quadratic(double s, double pinv_tol = 1e-8);
KernelModel matern(int order, double s, double pinv_tol = 1e-8);

double kernel_eval(const KernelModel& m, double r);
double kernel_deriv(const KernelModel& m, double r);
// phi'(r)/r with its analytic limit at r = 0.
double kernel_deriv_over_r(const KernelModel& m, double r);

KernelFamily kernel_family_from_string(const std::string& s);
std::string to_string(KernelFamily f);

}  // namespace rbfm
