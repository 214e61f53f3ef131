#pragma once

#include <string>

#include "rbfm/manifold.hpp"

namespace rbfm {

enum class DensityMethod { KdeSilverman, Analytic, Uniform };

struct DensityEstimate {
  VectorXd q;
  double bandwidth = 0;
  DensityMethod method = DensityMethod::KdeSilverman;
};

double silverman_bandwidth(const PointCloud& cloud);
DensityEstimate kde_density(const PointCloud& cloud, double h);

// Dispatch used by the harness; Uniform gives 1/Vol when the spec is known and 1 otherwise.
DensityEstimate estimate_density(const PointCloud& cloud, DensityMethod method);

double spearman_correlation(const VectorXd& a, const VectorXd& b);

std::string to_string(DensityMethod m);
DensityMethod density_method_from_string(const std::string& s);

}  // namespace rbfm
