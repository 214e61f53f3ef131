#include "rbfm/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace rbfm {

void KernelModel::validate() const {
  if (!(shape > 0)) throw std::invalid_argument("kernel shape parameter must be positive");
  if (!(pinv_tol >= 1e-12 && pinv_tol <= 1e-2)) throw std::invalid_argument("pinv_tol must lie in [1e-12, 1e-2]");
  if (family == KernelFamily::Matern && (matern_order < 1 || matern_order > 3))
    throw std::invalid_argument("Matern order must be 1, 2 or 3");
}

std::string KernelModel::name() const {
  std::string s = to_string(family);
  if (family == KernelFamily::Matern) s += std::to_string(matern_order);
  return s;
}

KernelModel gaussian(double s, double tol) {
  KernelModel m{KernelFamily::Gaussian, s, tol};
  m.validate();
  return m;
}

KernelModel inverse_quadratic(double s, double tol) {
  KernelModel m{KernelFamily::InverseQuadratic, s, tol};
  m.validate();
  return m;
}

KernelModel matern(int order, double s, double tol) {
  KernelModel m{KernelFamily::Matern, s, tol, order};
  m.validate();
  return m;
}

double kernel_eval(const KernelModel& m, double r) {
  const double t = m.shape * r;
  switch (m.family) {
    case KernelFamily::Gaussian: return std::exp(-t * t);
    case KernelFamily::InverseQuadratic: return 1.0 / (1.0 + t * t);
    case KernelFamily::Matern: {
      const double e = std::exp(-t);
      switch (m.matern_order) {
        case 1: return (1.0 + t) * e;
        case 2: return (1.0 + t + t * t / 3.0) * e;
        default: return (1.0 + t + 0.4 * t * t + t * t * t / 15.0) * e;
      }
    }
  }
  return 0.0;
}

double kernel_deriv_over_r(const KernelModel& m, double r) {
  const double s2 = m.shape * m.shape;
  const double t = m.shape * r;
  switch (m.family) {
    case KernelFamily::Gaussian: return -2.0 * s2 * std::exp(-t * t);
    case KernelFamily::InverseQuadratic: {
      const double q = 1.0 + t * t;
      return -2.0 * s2 / (q * q);
    }
    case KernelFamily::Matern: {
      const double e = std::exp(-t);
      switch (m.matern_order) {
        case 1: return -s2 * e;
        case 2: return -s2 * (1.0 + t) * e / 3.0;
        default: return -s2 * (3.0 + 3.0 * t + t * t) * e / 15.0;
      }
    }
  }
  return 0.0;
}

double kernel_deriv(const KernelModel& m, double r) { return r * kernel_deriv_over_r(m, r); }

KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "gaussian" || s == "ga") return KernelFamily::Gaussian;
  if (s == "inverse_quadratic" || s == "iq") return KernelFamily::InverseQuadratic;
  if (s == "matern") return KernelFamily::Matern;
  throw std::invalid_argument("unknown kernel family: " + s);
}

std::string to_string(KernelFamily f) {
  switch (f) {
    case KernelFamily::Gaussian: return "gaussian";
    case KernelFamily::InverseQuadratic: return "inverse_quadratic";
    case KernelFamily::Matern: return "matern";
  }
  return "gaussian";
}

}  // namespace rbfm
