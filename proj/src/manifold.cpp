#include "rbfm/manifold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rbfm/rng.hpp"

namespace rbfm {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap(double t) {
  double w = std::fmod(t, kTwoPi);
  return w < 0 ? w + kTwoPi : w;
}

double flat_norm(int m) {
  double s = 0;
  for (int k = 1; k <= m; ++k) s += double(k) * k;
  return std::sqrt(s);
}

}  // namespace

ManifoldSpec ManifoldSpec::ellipse(double a) {
  ManifoldSpec s;
  s.kind = ManifoldKind::Ellipse;
  s.a = a;
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::torus(double a) {
  ManifoldSpec s;
  s.kind = ManifoldKind::Torus;
  s.a = a;
  s.n_ambient = 3;
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::general_torus(double a, int n) {
  ManifoldSpec s;
  s.kind = ManifoldKind::GeneralTorus;
  s.a = a;
  s.n_ambient = n;
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::flat_torus(int d, int m) {
  ManifoldSpec s;
  s.kind = ManifoldKind::FlatTorus;
  s.flat_d = d;
  s.flat_m = m;
  s.validate();
  return s;
}

ManifoldSpec ManifoldSpec::sphere() {
  ManifoldSpec s;
  s.kind = ManifoldKind::Sphere;
  return s;
}

int ManifoldSpec::intrinsic_dim() const {
  switch (kind) {
    case ManifoldKind::Ellipse: return 1;
    case ManifoldKind::FlatTorus: return flat_d;
    default: return 2;
  }
}

int ManifoldSpec::ambient_dim() const {
  switch (kind) {
    case ManifoldKind::Ellipse: return 2;
    case ManifoldKind::Torus: return 3;
    case ManifoldKind::GeneralTorus: return n_ambient;
    case ManifoldKind::FlatTorus: return 2 * flat_m * flat_d;
    case ManifoldKind::Sphere: return 3;
  }
  return 0;
}

void ManifoldSpec::validate() const {
  switch (kind) {
    case ManifoldKind::Ellipse:
      if (!(a > 0)) throw std::invalid_argument("ellipse requires a > 0");
      break;
    case ManifoldKind::Torus:
      if (!(a > 1)) throw std::invalid_argument("torus requires a > 1");
      break;
    case ManifoldKind::GeneralTorus:
      if (!(a > 1)) throw std::invalid_argument("general torus requires a > 1");
      if (n_ambient < 3 || n_ambient % 2 == 0) throw std::invalid_argument("general torus requires odd n >= 3");
      break;
    case ManifoldKind::FlatTorus:
      if (flat_d < 1 || flat_m < 1) throw std::invalid_argument("flat torus requires d >= 1 and m >= 1");
      break;
    case ManifoldKind::Sphere:
      break;
  }
}

std::string ManifoldSpec::name() const {
  switch (kind) {
    case ManifoldKind::Ellipse: return "ellipse";
    case ManifoldKind::Torus: return "torus";
    case ManifoldKind::GeneralTorus: return "general_torus";
    case ManifoldKind::FlatTorus: return "flat_torus";
    case ManifoldKind::Sphere: return "sphere";
  }
  return "unknown";
}

int ManifoldSpec::torus_pairs() const { return (ambient_dim() - 1) / 2; }

double ManifoldSpec::torus_b() const {
  double b = 0;
  for (int i = 1; i <= torus_pairs(); ++i) b += 1.0 / (double(i) * i);
  return b;
}

VectorXd ManifoldSpec::embed(const VectorXd& t) const {
  if (t.size() != intrinsic_dim()) throw std::invalid_argument("embed: wrong intrinsic dimension");
  VectorXd x(ambient_dim());
  switch (kind) {
    case ManifoldKind::Ellipse:
      x << std::cos(t(0)), a * std::sin(t(0));
      break;
    case ManifoldKind::Torus:
    case ManifoldKind::GeneralTorus: {
      const int p = torus_pairs();
      const double r = a + std::cos(t(0));
      for (int i = 1; i <= p; ++i) {
        x(2 * (i - 1)) = r * std::cos(i * t(1)) / i;
        x(2 * (i - 1) + 1) = r * std::sin(i * t(1)) / i;
      }
      x(2 * p) = std::sqrt(torus_b()) * std::sin(t(0));
      break;
    }
    case ManifoldKind::FlatTorus: {
      const double c = flat_norm(flat_m);
      for (int i = 0; i < flat_d; ++i)
        for (int k = 1; k <= flat_m; ++k) {
          x(2 * flat_m * i + 2 * (k - 1)) = std::cos(k * t(i)) / c;
          x(2 * flat_m * i + 2 * (k - 1) + 1) = std::sin(k * t(i)) / c;
        }
      break;
    }
    case ManifoldKind::Sphere:
      x << std::sin(t(0)) * std::cos(t(1)), std::sin(t(0)) * std::sin(t(1)), std::cos(t(0));
      break;
  }
  return x;
}

MatrixXd ManifoldSpec::jacobian(const VectorXd& t) const {
  if (t.size() != intrinsic_dim()) throw std::invalid_argument("jacobian: wrong intrinsic dimension");
  MatrixXd J = MatrixXd::Zero(ambient_dim(), intrinsic_dim());
  switch (kind) {
    case ManifoldKind::Ellipse:
      J << -std::sin(t(0)), a * std::cos(t(0));
      break;
    case ManifoldKind::Torus:
    case ManifoldKind::GeneralTorus: {
      const int p = torus_pairs();
      const double r = a + std::cos(t(0));
      const double st = std::sin(t(0));
      for (int i = 1; i <= p; ++i) {
        J(2 * (i - 1), 0) = -st * std::cos(i * t(1)) / i;
        J(2 * (i - 1) + 1, 0) = -st * std::sin(i * t(1)) / i;
        J(2 * (i - 1), 1) = -r * std::sin(i * t(1));
        J(2 * (i - 1) + 1, 1) = r * std::cos(i * t(1));
      }
      J(2 * p, 0) = std::sqrt(torus_b()) * std::cos(t(0));
      break;
    }
    case ManifoldKind::FlatTorus: {
      const double c = flat_norm(flat_m);
      for (int i = 0; i < flat_d; ++i)
        for (int k = 1; k <= flat_m; ++k) {
          J(2 * flat_m * i + 2 * (k - 1), i) = -k * std::sin(k * t(i)) / c;
          J(2 * flat_m * i + 2 * (k - 1) + 1, i) = k * std::cos(k * t(i)) / c;
        }
      break;
    }
    case ManifoldKind::Sphere:
      J << std::cos(t(0)) * std::cos(t(1)), -std::sin(t(0)) * std::sin(t(1)),
          std::cos(t(0)) * std::sin(t(1)), std::sin(t(0)) * std::cos(t(1)),
          -std::sin(t(0)), 0.0;
      break;
  }
  return J;
}

double ManifoldSpec::sqrt_det_metric(const VectorXd& t) const {
  switch (kind) {
    case ManifoldKind::Ellipse: {
      const double s = std::sin(t(0)), c = std::cos(t(0));
      return std::sqrt(s * s + a * a * c * c);
    }
    case ManifoldKind::Torus:
    case ManifoldKind::GeneralTorus:
      return std::sqrt(torus_b() * torus_pairs()) * (a + std::cos(t(0)));
    case ManifoldKind::FlatTorus:
      return 1.0;
    case ManifoldKind::Sphere:
      return std::abs(std::sin(t(0)));
  }
  return 0.0;
}

VectorXd ManifoldSpec::box_lo() const { return VectorXd::Zero(intrinsic_dim()); }

VectorXd ManifoldSpec::box_hi() const {
  VectorXd hi = VectorXd::Constant(intrinsic_dim(), kTwoPi);
  if (kind == ManifoldKind::Sphere) hi(0) = kPi;
  return hi;
}

double ManifoldSpec::box_measure() const { return (box_hi() - box_lo()).prod(); }

double ManifoldSpec::volume() const {
  switch (kind) {
    case ManifoldKind::Ellipse: {
      const int m = 4096;
      double s = 0;
      VectorXd t(1);
      for (int j = 0; j < m; ++j) {
        t(0) = kTwoPi * j / m;
        s += sqrt_det_metric(t);
      }
      return s * kTwoPi / m;
    }
    case ManifoldKind::Torus:
    case ManifoldKind::GeneralTorus:
      return kTwoPi * kTwoPi * a * std::sqrt(torus_b() * torus_pairs());
    case ManifoldKind::FlatTorus:
      return std::pow(kTwoPi, flat_d);
    case ManifoldKind::Sphere:
      return 4.0 * kPi;
  }
  return 0.0;
}

double ManifoldSpec::max_sqrt_det_metric() const {
  switch (kind) {
    case ManifoldKind::Ellipse: return std::max(1.0, std::abs(a));
    case ManifoldKind::Torus:
    case ManifoldKind::GeneralTorus: return std::sqrt(torus_b() * torus_pairs()) * (a + 1.0);
    case ManifoldKind::FlatTorus: return 1.0;
    case ManifoldKind::Sphere: return 1.0;
  }
  return 1.0;
}

VectorXd ManifoldSpec::intrinsic_of(const VectorXd& x) const {
  if (x.size() != ambient_dim()) throw std::invalid_argument("intrinsic_of: wrong ambient dimension");
  VectorXd t(intrinsic_dim());
  switch (kind) {
    case ManifoldKind::Ellipse:
      t(0) = wrap(std::atan2(x(1) / a, x(0)));
      break;
    case ManifoldKind::Torus:
    case ManifoldKind::GeneralTorus: {
      const int p = torus_pairs();
      const double r = std::hypot(x(0), x(1));
      t(0) = wrap(std::atan2(x(2 * p) / std::sqrt(torus_b()), r - a));
      t(1) = wrap(std::atan2(x(1), x(0)));
      break;
    }
    case ManifoldKind::FlatTorus:
      for (int i = 0; i < flat_d; ++i) t(i) = wrap(std::atan2(x(2 * flat_m * i + 1), x(2 * flat_m * i)));
      break;
    case ManifoldKind::Sphere: {
      const double r = x.norm();
      t(0) = std::acos(std::clamp(x(2) / r, -1.0, 1.0));
      t(1) = wrap(std::atan2(x(1), x(0)));
      break;
    }
  }
  return t;
}

PointCloud cloud_from_intrinsic(const ManifoldSpec& spec, const MatrixXd& theta) {
  spec.validate();
  if (theta.cols() != spec.intrinsic_dim()) throw std::invalid_argument("cloud_from_intrinsic: wrong column count");
  PointCloud c;
  c.spec = spec;
  c.d = spec.intrinsic_dim();
  c.intrinsic = theta;
  c.points.resize(theta.rows(), spec.ambient_dim());
  for (Eigen::Index i = 0; i < theta.rows(); ++i) c.points.row(i) = spec.embed(theta.row(i).transpose()).transpose();
  return c;
}

PointCloud cloud_from_points(const MatrixXd& points, int d) {
  if (d < 1 || d > points.cols()) throw std::invalid_argument("cloud_from_points: need 1 <= d <= n");
  PointCloud c;
  c.points = points;
  c.d = d;
  return c;
}

PointCloud first_rows(const PointCloud& cloud, int count) {
  if (count < 0 || count > cloud.N()) throw std::invalid_argument("first_rows: count out of range");
  PointCloud c = cloud;
  c.points = cloud.points.topRows(count);
  if (cloud.intrinsic) c.intrinsic = cloud.intrinsic->topRows(count);
  return c;
}

PointCloud sample_manifold(const ManifoldSpec& spec, int N, std::uint64_t seed, SamplingMode mode) {
  spec.validate();
  if (N < 1) throw std::invalid_argument("sample_manifold: N must be >= 1");
  const int d = spec.intrinsic_dim();
  const VectorXd lo = spec.box_lo(), hi = spec.box_hi();
  MatrixXd theta(N, d);
  if (mode == SamplingMode::Grid) {
    const int m = static_cast<int>(std::llround(std::pow(double(N), 1.0 / d)));
    long long total = 1;
    for (int j = 0; j < d; ++j) total *= m;
    if (total != N)
      throw std::invalid_argument("grid sampling needs N to be a perfect " + std::to_string(d) +
                                  "-th power; got N=" + std::to_string(N));
    for (int i = 0; i < N; ++i) {
      int r = i;
      for (int j = 0; j < d; ++j) {
        const int k = r % m;
        r /= m;
        // the polar angle of the sphere is cell-centred so no sample sits on a pole
        const double off = (spec.kind == ManifoldKind::Sphere && j == 0) ? 0.5 : 0.0;
        theta(i, j) = lo(j) + (hi(j) - lo(j)) * (k + off) / m;
      }
    }
  } else if (mode == SamplingMode::RandomIntrinsic || mode == SamplingMode::RandomVolume) {
    CounterRng rng(seed, mode == SamplingMode::RandomIntrinsic ? 1 : 2);
    const double gmax = spec.max_sqrt_det_metric();
    for (int i = 0; i < N; ++i) {
      const std::uint64_t base = static_cast<std::uint64_t>(i) << 24;
      if (mode == SamplingMode::RandomVolume && spec.kind == ManifoldKind::Sphere) {
        theta(i, 0) = std::acos(1.0 - 2.0 * rng.uniform(base));
        theta(i, 1) = kTwoPi * rng.uniform(base + 1);
        continue;
      }
      for (std::uint64_t attempt = 0;; ++attempt) {
        VectorXd t(d);
        for (int j = 0; j < d; ++j) t(j) = lo(j) + (hi(j) - lo(j)) * rng.uniform(base + attempt * (d + 1) + j);
        if (mode == SamplingMode::RandomIntrinsic ||
            rng.uniform(base + attempt * (d + 1) + d) * gmax <= spec.sqrt_det_metric(t)) {
          theta.row(i) = t.transpose();
          break;
        }
      }
    }
  } else {
    throw std::invalid_argument("sample_manifold: unsupported sampling mode");
  }
  PointCloud c = cloud_from_intrinsic(spec, theta);
  c.seed = seed;
  c.sampling = mode;
  return c;
}

VectorXd sampling_density(const PointCloud& cloud) {
  if (!cloud.spec || !cloud.intrinsic) throw std::invalid_argument("sampling_density: cloud has no analytic metric");
  const ManifoldSpec& spec = *cloud.spec;
  VectorXd q(cloud.N());
  if (cloud.sampling == SamplingMode::RandomVolume) {
    q.setConstant(1.0 / spec.volume());
    return q;
  }
  if (cloud.sampling == SamplingMode::Given)
    throw std::invalid_argument("sampling_density: sampling law unknown for a given cloud");
  const double box = spec.box_measure();
  for (int i = 0; i < cloud.N(); ++i) q(i) = 1.0 / (box * spec.sqrt_det_metric(cloud.intrinsic->row(i).transpose()));
  return q;
}

ManifoldKind manifold_kind_from_string(const std::string& s) {
  if (s == "ellipse") return ManifoldKind::Ellipse;
  if (s == "torus") return ManifoldKind::Torus;
  if (s == "general_torus") return ManifoldKind::GeneralTorus;
  if (s == "flat_torus") return ManifoldKind::FlatTorus;
  if (s == "sphere") return ManifoldKind::Sphere;
  throw std::invalid_argument("unknown manifold: " + s);
}

std::string to_string(SamplingMode mode) {
  switch (mode) {
    case SamplingMode::RandomIntrinsic: return "random_intrinsic";
    case SamplingMode::RandomVolume: return "random_volume";
    case SamplingMode::Grid: return "grid";
    case SamplingMode::Given: return "given";
  }
  return "given";
}

SamplingMode sampling_mode_from_string(const std::string& s) {
  if (s == "random_intrinsic") return SamplingMode::RandomIntrinsic;
  if (s == "random_volume") return SamplingMode::RandomVolume;
  if (s == "grid") return SamplingMode::Grid;
  throw std::invalid_argument("unknown sampling mode: " + s);
}

}  // namespace rbfm
