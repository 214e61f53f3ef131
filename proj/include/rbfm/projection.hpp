#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rbfm/manifold.hpp"

namespace rbfm {

enum class ProjectionSource { Analytic, FirstOrder, SecondOrder };

enum PointFlag : std::uint8_t {
  kDegenerate = 1,   // neighbourhood rank below d
  kFallback = 2,     // second-order fit rank deficient, first-order result kept
};

struct ProjectionField {
  std::vector<MatrixXd> mats;  // N matrices, n x n
  ProjectionSource source = ProjectionSource::Analytic;
  int d = 0;
  int K_used = 0;
  std::vector<std::uint8_t> flags;  // per point, PointFlag bits
  std::vector<double> gaps;         // per point sigma_d - sigma_{d+1} of the local difference matrix

  int N() const { return static_cast<int>(mats.size()); }
  int n() const { return mats.empty() ? 0 : static_cast<int>(mats.front().rows()); }
  int flagged() const;
};

ProjectionField analytic_projection(const PointCloud& cloud);

// Orthonormal basis (n x d) of the range of P.
MatrixXd tangent_basis(const MatrixXd& P, int d);

// P = T T^T built entrywise so the result is exactly symmetric.
MatrixXd projector_from_basis(const MatrixXd& T);

struct ProjectionDiagnostics {
  double max_frob = 0;
  double mean_frob = 0;
  std::vector<double> per_point;
};

ProjectionDiagnostics projection_diagnostics(const ProjectionField& est, const ProjectionField& truth);

ProjectionField projection_subset(const ProjectionField& field, int count);

void write_projection_csv(const std::string& path, const ProjectionField& field);
ProjectionField read_projection_csv(const std::string& path);
void write_projection_binary(const std::string& path, const ProjectionField& field);
ProjectionField read_projection_binary(const std::string& path);

std::string to_string(ProjectionSource s);
ProjectionSource projection_source_from_string(const std::string& s);

}  // namespace rbfm
