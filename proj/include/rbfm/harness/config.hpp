#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rbfm/density.hpp"
#include "rbfm/dm.hpp"
#include "rbfm/kernel.hpp"
#include "rbfm/manifold.hpp"
#include "rbfm/projection.hpp"
#include "rbfm/tangent.hpp"

namespace rbfm {

enum class Method { NRBF, SRBF, DM };
enum class OperatorKind { LB, Bochner, Hodge, Lich, Covariant };
enum class Study { Spectrum, Projection, OperatorCheck };

struct ExperimentConfig {
  ManifoldSpec manifold = ManifoldSpec::sphere();
  SamplingMode sampling = SamplingMode::RandomIntrinsic;
  std::vector<int> N_list{1024};
  std::optional<int> N_p;  // size of the separate tangent-estimation cloud
  Method method = Method::NRBF;
  OperatorKind op = OperatorKind::LB;
  Study study = Study::Spectrum;
  ProjectionSource projection = ProjectionSource::Analytic;
  int K_tangent = 0;  // 0 selects default_tangent_K(d)
  KernelModel kernel;
  DensityMethod density = DensityMethod::KdeSilverman;
  int modes = 20;       // truth modes scored
  int mode_first = 0;   // first scored truth mode (0-based, expanded order)
  std::vector<std::uint64_t> seeds{1};
  DmConfig dm;
  int truth_N_theta = 2048;
  int truth_max_degree = 6;
  double trivial_rel = 1e-7;
  double min_resolution = 0.5;
  std::string output_dir;  // empty: no files
  int threads = 1;

  void validate() const;  // throws std::invalid_argument
  int tangent_K() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
ExperimentConfig config_from_json(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);

nlohmann::json to_json(const ManifoldSpec& m);
ManifoldSpec manifold_from_json(const nlohmann::json& j);
nlohmann::json to_json(const KernelModel& k);
KernelModel kernel_from_json(const nlohmann::json& j);

std::string to_string(Method m);
std::string to_string(OperatorKind o);
std::string to_string(Study s);
Method method_from_string(const std::string& s);
OperatorKind operator_from_string(const std::string& s);
Study study_from_string(const std::string& s);

bool is_vector_operator(OperatorKind o);
VectorLaplacian to_vector_laplacian(OperatorKind o);

// Dense-memory budget in bytes from RBFM_DENSE_MEMORY_CAP, default 2 GiB.
std::size_t dense_memory_cap();
std::size_t estimate_dense_bytes(const ExperimentConfig& c, int N);

}  // namespace rbfm
