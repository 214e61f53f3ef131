#include "rbfm/truth.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numbers>
#include <stdexcept>

namespace rbfm {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ---------------------------------------------------------------- sphere harmonics

struct Harmonic {
  std::function<double(const Eigen::Vector3d&)> f;
  std::function<Eigen::Vector3d(const Eigen::Vector3d&)> grad;  // Euclidean gradient of the polynomial
};

Harmonic poly(std::function<double(double, double, double)> f,
              std::function<Eigen::Vector3d(double, double, double)> g) {
  return {[f](const Eigen::Vector3d& x) { return f(x(0), x(1), x(2)); },
          [g](const Eigen::Vector3d& x) { return g(x(0), x(1), x(2)); }};
}

Harmonic legendre_harmonic(int l, int m, bool sine) {
  auto f = [l, m, sine](const Eigen::Vector3d& p) {
    const Eigen::Vector3d x = p.normalized();
    const double th = std::acos(std::clamp(x(2), -1.0, 1.0));
    const double ph = std::atan2(x(1), x(0));
    const double y = std::sph_legendre(l, m, th);
    return m == 0 ? y : (sine ? y * std::sin(m * ph) : y * std::cos(m * ph));
  };
  auto g = [f](const Eigen::Vector3d& x) {
    const double h = 1e-6;
    Eigen::Vector3d out;
    for (int k = 0; k < 3; ++k) {
      Eigen::Vector3d e = Eigen::Vector3d::Zero();
      e(k) = h;
      out(k) = (f(x + e) - f(x - e)) / (2 * h);
    }
    return out;
  };
  return {f, g};
}

std::vector<Harmonic> sphere_harmonics(int l) {
  using V = Eigen::Vector3d;
  std::vector<Harmonic> h;
  switch (l) {
    case 0:
      h.push_back(poly([](double, double, double) { return 1.0; }, [](double, double, double) { return V(0, 0, 0); }));
      break;
    case 1:
      h.push_back(poly([](double x, double, double) { return x; }, [](double, double, double) { return V(1, 0, 0); }));
      h.push_back(poly([](double, double y, double) { return y; }, [](double, double, double) { return V(0, 1, 0); }));
      h.push_back(poly([](double, double, double z) { return z; }, [](double, double, double) { return V(0, 0, 1); }));
      break;
    case 2:
      h.push_back(poly([](double x, double y, double) { return x * y; }, [](double x, double y, double) { return V(y, x, 0); }));
      h.push_back(poly([](double, double y, double z) { return y * z; }, [](double, double y, double z) { return V(0, z, y); }));
      h.push_back(poly([](double x, double, double z) { return x * z; }, [](double x, double, double z) { return V(z, 0, x); }));
      h.push_back(poly([](double x, double y, double) { return x * x - y * y; },
                       [](double x, double y, double) { return V(2 * x, -2 * y, 0); }));
      h.push_back(poly([](double x, double y, double z) { return 2 * z * z - x * x - y * y; },
                       [](double x, double y, double z) { return V(-2 * x, -2 * y, 4 * z); }));
      break;
    case 3:
      h.push_back(poly([](double x, double y, double) { return x * x * x - 3 * x * y * y; },
                       [](double x, double y, double) { return V(3 * x * x - 3 * y * y, -6 * x * y, 0); }));
      h.push_back(poly([](double x, double y, double) { return 3 * x * x * y - y * y * y; },
                       [](double x, double y, double) { return V(6 * x * y, 3 * x * x - 3 * y * y, 0); }));
      h.push_back(poly([](double x, double y, double z) { return z * (x * x - y * y); },
                       [](double x, double y, double z) { return V(2 * x * z, -2 * y * z, x * x - y * y); }));
      h.push_back(poly([](double x, double y, double z) { return x * y * z; },
                       [](double x, double y, double z) { return V(y * z, x * z, x * y); }));
      h.push_back(poly([](double x, double y, double z) { return x * (4 * z * z - x * x - y * y); },
                       [](double x, double y, double z) { return V(4 * z * z - 3 * x * x - y * y, -2 * x * y, 8 * x * z); }));
      h.push_back(poly([](double x, double y, double z) { return y * (4 * z * z - x * x - y * y); },
                       [](double x, double y, double z) { return V(-2 * x * y, 4 * z * z - x * x - 3 * y * y, 8 * y * z); }));
      h.push_back(poly([](double x, double y, double z) { return z * (2 * z * z - 3 * x * x - 3 * y * y); },
                       [](double x, double y, double z) { return V(-6 * x * z, -6 * y * z, 6 * z * z - 3 * x * x - 3 * y * y); }));
      break;
    default:
      h.push_back(legendre_harmonic(l, 0, false));
      for (int m = 1; m <= l; ++m) {
        h.push_back(legendre_harmonic(l, m, false));
        h.push_back(legendre_harmonic(l, m, true));
      }
  }
  return h;
}

EigenTruth sphere_scalar(int count) {
  EigenTruth t;
  for (int l = 0; l < count; ++l) {
    t.levels.push_back({double(l) * (l + 1), 2 * l + 1});
    for (auto& h : sphere_harmonics(l)) {
      auto f = h.f;
      t.modes.push_back([f](const VectorXd& x) { return VectorXd::Constant(1, f(Eigen::Vector3d(x(0), x(1), x(2)))); });
    }
  }
  return t;
}

// ---------------------------------------------------------------- flat torus

EigenTruth flat_scalar(const ManifoldSpec& spec, int count) {
  const int d = spec.flat_d;
  for (int B = 1;; ++B) {
    std::map<long, std::vector<std::vector<int>>> byval;
    std::vector<int> k(d, -B);
    while (true) {
      long v = 0;
      for (int x : k) v += long(x) * x;
      if (v <= long(B) * B) byval[v].push_back(k);
      int i = 0;
      while (i < d && ++k[i] > B) k[i++] = -B;
      if (i == d) break;
    }
    if (static_cast<int>(byval.size()) < count) continue;
    EigenTruth t;
    int levels = 0;
    for (auto& [v, ks] : byval) {
      if (levels++ == count) break;
      t.levels.push_back({double(v), static_cast<int>(ks.size())});
      for (const auto& kv : ks) {
        int first = 0;
        while (first < d && kv[first] == 0) ++first;
        if (first < d && kv[first] < 0) continue;  // canonical representative of {k, -k}
        const std::vector<int> freq = kv;
        auto phase = [spec, freq](const VectorXd& x) {
          const VectorXd th = spec.intrinsic_of(x);
          double s = 0;
          for (std::size_t i = 0; i < freq.size(); ++i) s += freq[i] * th(i);
          return s;
        };
        if (v == 0) {
          t.modes.push_back([](const VectorXd&) { return VectorXd::Constant(1, 1.0); });
        } else {
          t.modes.push_back([phase](const VectorXd& x) { return VectorXd::Constant(1, std::cos(phase(x))); });
          t.modes.push_back([phase](const VectorXd& x) { return VectorXd::Constant(1, std::sin(phase(x))); });
        }
      }
    }
    return t;
  }
}

// ---------------------------------------------------------------- Sturm-Liouville

struct RadialMode {
  double value;
  int m;
  std::shared_ptr<std::vector<double>> theta_profile;  // full periodic grid
};

double profile_at(const std::vector<double>& g, double th) {
  const int N = static_cast<int>(g.size());
  double u = std::fmod(th, kTwoPi);
  if (u < 0) u += kTwoPi;
  const double pos = u / kTwoPi * N;
  const int j = static_cast<int>(std::floor(pos)) % N;
  const double w = pos - std::floor(pos);
  return (1 - w) * g[j] + w * g[(j + 1) % N];
}

}  // namespace

std::vector<double> EigenTruth::expanded(int count) const {
  std::vector<double> v;
  for (const auto& l : levels)
    for (int k = 0; k < l.multiplicity; ++k) v.push_back(l.value);
  if (count >= 0 && count < static_cast<int>(v.size())) v.resize(count);
  return v;
}

int EigenTruth::total_modes() const {
  int c = 0;
  for (const auto& l : levels) c += l.multiplicity;
  return c;
}

MatrixXd EigenTruth::evaluate_scalar(const MatrixXd& points, int first, int count) const {
  if (value_dim != 1) throw std::invalid_argument("evaluate_scalar on vector truth");
  if (first < 0 || first + count > static_cast<int>(modes.size())) throw std::out_of_range("evaluate_scalar: mode range");
  MatrixXd F(points.rows(), count);
  for (int c = 0; c < count; ++c)
    for (Eigen::Index i = 0; i < points.rows(); ++i) F(i, c) = modes[first + c](points.row(i).transpose())(0);
  return F;
}

MatrixXd EigenTruth::evaluate_vector(const MatrixXd& points, int first, int count) const {
  if (first < 0 || first + count > static_cast<int>(modes.size())) throw std::out_of_range("evaluate_vector: mode range");
  const Eigen::Index N = points.rows();
  const int n = static_cast<int>(points.cols());
  MatrixXd F(n * N, count);
  for (int c = 0; c < count; ++c)
    for (Eigen::Index i = 0; i < N; ++i) {
      const VectorXd u = modes[first + c](points.row(i).transpose());
      for (int r = 0; r < n; ++r) F(r * N + i, c) = u(r);
    }
  return F;
}

EigenTruth sturm_liouville_truth(const ManifoldSpec& spec, int N_theta, int max_fourier_mode, int per_mode) {
  if (spec.kind != ManifoldKind::GeneralTorus && spec.kind != ManifoldKind::Torus)
    throw std::invalid_argument("sturm_liouville_truth: torus spec required");
  if (N_theta < 128 || N_theta % 2) throw std::invalid_argument("sturm_liouville_truth: N_theta must be even and >= 128");
  if (max_fourier_mode < 0) throw std::invalid_argument("sturm_liouville_truth: negative max_fourier_mode");
  const double a = spec.a, b = spec.torus_b();
  const int pairs = spec.torus_pairs();
  const int N = N_theta, M = N / 2;
  const double h = kTwoPi / N;
  auto p = [&](double th) { return (a + std::cos(th)) / b; };
  auto w = [&](double th) { return a + std::cos(th); };

  std::vector<RadialMode> all;
  double cut = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= max_fourier_mode; ++m) {
    auto q = [&](double th) { return double(m) * m / (pairs * (a + std::cos(th))); };
    double top = -std::numeric_limits<double>::infinity();
    // even in theta: nodes 0..M, end rows halved to restore symmetry
    {
      const int sz = M + 1;
      VectorXd c = VectorXd::Ones(sz);
      c(0) = c(M) = 0.5;
      VectorXd diag(sz), off(sz - 1), wt(sz);
      for (int j = 0; j < sz; ++j) {
        const double th = j * h;
        const double pl = p(th - h / 2), pr = p(th + h / 2);
        diag(j) = c(j) * ((pl + pr) / (h * h) + q(th));
        wt(j) = c(j) * w(th);
        if (j < M) off(j) = -pr / (h * h);
      }
      for (int j = 0; j < sz; ++j) diag(j) /= wt(j);
      for (int j = 0; j < sz - 1; ++j) off(j) /= std::sqrt(wt(j) * wt(j + 1));
      const int k = std::min(per_mode, sz);
      SymEig e = tridiag_eig_range(diag, off, 0, k - 1);
      for (int i = 0; i < e.values.size(); ++i) {
        auto g = std::make_shared<std::vector<double>>(N);
        for (int j = 0; j <= M; ++j) {
          const double v = e.vectors(j, i) / std::sqrt(wt(j));
          (*g)[j] = v;
          if (j > 0 && j < M) (*g)[N - j] = v;
        }
        all.push_back({e.values(i), m, g});
      }
      if (k < sz) top = std::max(top, e.values(e.values.size() - 1));
      else top = std::numeric_limits<double>::infinity();
    }
    // odd in theta: nodes 1..M-1 with zero ends
    {
      const int sz = M - 1;
      VectorXd diag(sz), off(sz - 1), wt(sz);
      for (int j = 1; j <= sz; ++j) {
        const double th = j * h;
        diag(j - 1) = (p(th - h / 2) + p(th + h / 2)) / (h * h) + q(th);
        wt(j - 1) = w(th);
        if (j < sz) off(j - 1) = -p(th + h / 2) / (h * h);
      }
      for (int j = 0; j < sz; ++j) diag(j) /= wt(j);
      for (int j = 0; j < sz - 1; ++j) off(j) /= std::sqrt(wt(j) * wt(j + 1));
      const int k = std::min(per_mode, sz);
      SymEig e = tridiag_eig_range(diag, off, 0, k - 1);
      for (int i = 0; i < e.values.size(); ++i) {
        auto g = std::make_shared<std::vector<double>>(N, 0.0);
        for (int j = 1; j <= sz; ++j) {
          const double v = e.vectors(j - 1, i) / std::sqrt(wt(j - 1));
          (*g)[j] = v;
          (*g)[N - j] = -v;
        }
        all.push_back({e.values(i), m, g});
      }
      if (k < sz) top = std::min(top, e.values(e.values.size() - 1));
    }
    cut = std::min(cut, top);
  }
  // every mode above max_fourier_mode has eigenvalue at least min(q/w)
  const double next = max_fourier_mode + 1.0;
  cut = std::min(cut, next * next / (pairs * (a + 1.0) * (a + 1.0)));

  std::stable_sort(all.begin(), all.end(), [](const RadialMode& x, const RadialMode& y) {
    return x.value < y.value || (x.value == y.value && x.m < y.m);
  });
  EigenTruth t;
  for (const auto& r : all) {
    if (r.value > cut) break;
    // the lowest mode is the constant
    t.levels.push_back({t.levels.empty() ? 0.0 : std::max(r.value, 0.0), r.m == 0 ? 1 : 2});
    auto g = r.theta_profile;
    const int m = r.m;
    auto theta_of = [spec](const VectorXd& x) { return spec.intrinsic_of(x); };
    if (m == 0) {
      t.modes.push_back([g, theta_of](const VectorXd& x) {
        return VectorXd::Constant(1, profile_at(*g, theta_of(x)(0)));
      });
    } else {
      t.modes.push_back([g, m, theta_of](const VectorXd& x) {
        const VectorXd th = theta_of(x);
        return VectorXd::Constant(1, profile_at(*g, th(0)) * std::cos(m * th(1)));
      });
      t.modes.push_back([g, m, theta_of](const VectorXd& x) {
        const VectorXd th = theta_of(x);
        return VectorXd::Constant(1, profile_at(*g, th(0)) * std::sin(m * th(1)));
      });
    }
  }
  return t;
}

EigenTruth scalar_eigen_truth(const ManifoldSpec& spec, int count, int N_theta) {
  spec.validate();
  if (count < 1) throw std::invalid_argument("scalar_eigen_truth: count must be positive");
  switch (spec.kind) {
    case ManifoldKind::Sphere: return sphere_scalar(count);
    case ManifoldKind::FlatTorus: return flat_scalar(spec, count);
    case ManifoldKind::Torus:
    case ManifoldKind::GeneralTorus:
      for (int M = 8;; M *= 2) {
        EigenTruth t = sturm_liouville_truth(spec, N_theta, M, count + 2);
        if (static_cast<int>(t.levels.size()) >= count) {
          int total = 0;
          for (int i = 0; i < count; ++i) total += t.levels[i].multiplicity;
          t.levels.resize(count);
          t.modes.resize(total);
          return t;
        }
        if (M > 4096) throw std::runtime_error("scalar_eigen_truth: could not resolve requested levels");
      }
    default:
      throw std::invalid_argument("scalar_eigen_truth: no truth for " + spec.name());
  }
}

EigenTruth vector_eigen_truth(const ManifoldSpec& spec, VectorLaplacian which, int max_degree) {
  if (spec.kind != ManifoldKind::Sphere) throw std::invalid_argument("vector_eigen_truth: sphere only");
  struct Family {
    double value;
    int l;
    bool gradient;
  };
  std::vector<Family> fam;
  for (int l = 1; l <= max_degree; ++l) {
    const double ll = double(l) * (l + 1);
    switch (which) {
      case VectorLaplacian::Hodge:
        fam.push_back({ll, l, false});
        fam.push_back({ll, l, true});
        break;
      case VectorLaplacian::Bochner:
        fam.push_back({ll - 1, l, false});
        fam.push_back({ll - 1, l, true});
        break;
      case VectorLaplacian::Lichnerowicz:
        fam.push_back({ll - 2, l, false});
        fam.push_back({2 * ll - 2, l, true});
        break;
    }
  }
  std::stable_sort(fam.begin(), fam.end(), [](const Family& x, const Family& y) {
    if (x.value != y.value) return x.value < y.value;
    if (x.l != y.l) return x.l < y.l;
    return !x.gradient && y.gradient;
  });
  // only levels whose every contributing degree is <= max_degree are complete
  double limit = std::numeric_limits<double>::infinity();
  {
    const double L1 = double(max_degree + 1) * (max_degree + 2);
    switch (which) {
      case VectorLaplacian::Hodge: limit = L1; break;
      case VectorLaplacian::Bochner: limit = L1 - 1; break;
      case VectorLaplacian::Lichnerowicz: limit = L1 - 2; break;
    }
  }
  EigenTruth t;
  t.value_dim = 3;
  for (const auto& f : fam) {
    if (f.value >= limit) break;
    if (t.levels.empty() || t.levels.back().value != f.value) t.levels.push_back({f.value, 0});
    for (auto& h : sphere_harmonics(f.l)) {
      auto grad = h.grad;
      const bool g = f.gradient;
      t.modes.push_back([grad, g](const VectorXd& p) {
        const Eigen::Vector3d x(p(0), p(1), p(2));
        const Eigen::Vector3d gr = grad(x);
        const Eigen::Vector3d u = g ? Eigen::Vector3d(gr - gr.dot(x) * x) : Eigen::Vector3d(x.cross(gr));
        return VectorXd(u);
      });
      ++t.levels.back().multiplicity;
    }
  }
  return t;
}

std::string to_string(VectorLaplacian v) {
  switch (v) {
    case VectorLaplacian::Bochner: return "bochner";
    case VectorLaplacian::Hodge: return "hodge";
    case VectorLaplacian::Lichnerowicz: return "lichnerowicz";
  }
  return "bochner";
}

VectorLaplacian vector_laplacian_from_string(const std::string& s) {
  if (s == "bochner") return VectorLaplacian::Bochner;
  if (s == "hodge") return VectorLaplacian::Hodge;
  if (s == "lichnerowicz" || s == "lich") return VectorLaplacian::Lichnerowicz;
  throw std::invalid_argument("unknown vector laplacian: " + s);
}

EllipseFieldTruth ellipse_field_truth(const ManifoldSpec& spec, const MatrixXd& theta) {
  if (spec.kind != ManifoldKind::Ellipse) throw std::invalid_argument("ellipse_field_truth: ellipse only");
  const double a = spec.a;
  const Eigen::Index N = theta.rows();
  EllipseFieldTruth t;
  t.U.resize(2 * N);
  t.grad.resize(2 * N, 2);
  t.bochner.resize(2 * N);
  t.covariant.resize(2 * N);
  for (Eigen::Index j = 0; j < N; ++j) {
    const double th = theta(j, 0), s = std::sin(th), c = std::cos(th);
    const double g = s * s + a * a * c * c;
    const double gp = 2 * s * c * (1 - a * a), gpp = 2 * std::cos(2 * th) * (1 - a * a);
    const double G = gp / (2 * g), Gp = (gpp * g - gp * gp) / (2 * g * g);
    const double u = s, up = c, upp = -s;
    const double u1 = up + u * G;  // u^1_{,1}
    const double u11 = upp + up * G + u * Gp;
    const double tx = -s, ty = a * c;
    t.U(j) = u * tx;
    t.U(N + j) = u * ty;
    t.bochner(j) = -u11 / g * tx;
    t.bochner(N + j) = -u11 / g * ty;
    t.covariant(j) = u * u1 * tx;
    t.covariant(N + j) = u * u1 * ty;
    t.grad(j, 0) = u1 * tx * tx / g;
    t.grad(j, 1) = u1 * tx * ty / g;
    t.grad(N + j, 0) = u1 * ty * tx / g;
    t.grad(N + j, 1) = u1 * ty * ty / g;
  }
  return t;
}

}  // namespace rbfm
