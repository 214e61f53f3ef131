#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "rbfm/linalg.hpp"

namespace rbfm {

enum class ManifoldKind { Ellipse, Torus, GeneralTorus, FlatTorus, Sphere };

struct ManifoldSpec {
  ManifoldKind kind = ManifoldKind::Sphere;
  double a = 2.0;      // ellipse semi-axis, torus radius
  int n_ambient = 3;   // general torus only (odd)
  int flat_d = 2;      // flat torus intrinsic dimension
  int flat_m = 1;      // flat torus frequencies per coordinate

  static ManifoldSpec ellipse(double a);
  static ManifoldSpec torus(double a);
  static ManifoldSpec general_torus(double a, int n = 21);
  static ManifoldSpec flat_torus(int d, int m);
  static ManifoldSpec sphere();

  int intrinsic_dim() const;
  int ambient_dim() const;
  void validate() const;  // throws std::invalid_argument
  std::string name() const;

  // Torus and GeneralTorus share one parameterization; these return (a, n, b).
  int torus_pairs() const;  // (n-1)/2
  double torus_b() const;   // sum_{i<=(n-1)/2} 1/i^2

  VectorXd embed(const VectorXd& theta) const;
  MatrixXd jacobian(const VectorXd& theta) const;  // n x d
  double sqrt_det_metric(const VectorXd& theta) const;

  // Intrinsic coordinate box [lo_i, hi_i).
  VectorXd box_lo() const;
  VectorXd box_hi() const;
  double box_measure() const;
  double volume() const;
  double max_sqrt_det_metric() const;

  // Recover intrinsic coordinates from an ambient point on the manifold.
  VectorXd intrinsic_of(const VectorXd& x) const;
};

enum class SamplingMode { RandomIntrinsic, RandomVolume, Grid, Given };

struct PointCloud {
  MatrixXd points;                    // N x n
  std::optional<MatrixXd> intrinsic;  // N x d
  std::optional<ManifoldSpec> spec;
  int d = 0;
  std::uint64_t seed = 0;
  SamplingMode sampling = SamplingMode::Given;

  int N() const { return static_cast<int>(points.rows()); }
  int n() const { return static_cast<int>(points.cols()); }
};

PointCloud sample_manifold(const ManifoldSpec& spec, int N, std::uint64_t seed,
                           SamplingMode mode = SamplingMode::RandomIntrinsic);
PointCloud cloud_from_intrinsic(const ManifoldSpec& spec, const MatrixXd& theta);
PointCloud cloud_from_points(const MatrixXd& points, int d);
PointCloud first_rows(const PointCloud& cloud, int count);

// Density of the sample w.r.t. the Riemannian volume, normalized to integrate to one.
VectorXd sampling_density(const PointCloud& cloud);

ManifoldKind manifold_kind_from_string(const std::string& s);

std::string to_string(SamplingMode mode);
SamplingMode sampling_mode_from_string(const std::string& s);

}  // namespace rbfm
