#include "rbfm/harness/config.hpp"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace rbfm {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::NRBF: return "nrbf";
    case Method::SRBF: return "srbf";
    case Method::DM: return "dm";
  }
  return "nrbf";
}

std::string to_string(OperatorKind o) {
  switch (o) {
    case OperatorKind::LB: return "lb";
    case OperatorKind::Bochner: return "bochner";
    case OperatorKind::Hodge: return "hodge";
    case OperatorKind::Lich: return "lich";
    case OperatorKind::Covariant: return "covariant";
  }
  return "lb";
}

std::string to_string(Study s) {
  switch (s) {
    case Study::Spectrum: return "spectrum";
    case Study::Projection: return "projection";
    case Study::OperatorCheck: return "operator_check";
  }
  return "spectrum";
}

Method method_from_string(const std::string& s) {
  if (s == "nrbf") return Method::NRBF;
  if (s == "srbf") return Method::SRBF;
  if (s == "dm") return Method::DM;
  throw std::invalid_argument("unknown method: " + s);
}

OperatorKind operator_from_string(const std::string& s) {
  if (s == "lb") return OperatorKind::LB;
  if (s == "bochner") return OperatorKind::Bochner;
  if (s == "hodge") return OperatorKind::Hodge;
  if (s == "lich" || s == "lichnerowicz") return OperatorKind::Lich;
  if (s == "covariant") return OperatorKind::Covariant;
  throw std::invalid_argument("unknown operator: " + s);
}

Study study_from_string(const std::string& s) {
  if (s == "spectrum") return Study::Spectrum;
  if (s == "projection") return Study::Projection;
  if (s == "operator_check") return Study::OperatorCheck;
  throw std::invalid_argument("unknown study: " + s);
}

bool is_vector_operator(OperatorKind o) {
  return o == OperatorKind::Bochner || o == OperatorKind::Hodge || o == OperatorKind::Lich;
}

VectorLaplacian to_vector_laplacian(OperatorKind o) {
  switch (o) {
    case OperatorKind::Bochner: return VectorLaplacian::Bochner;
    case OperatorKind::Hodge: return VectorLaplacian::Hodge;
    case OperatorKind::Lich: return VectorLaplacian::Lichnerowicz;
    default: throw std::invalid_argument("not a vector Laplacian: " + to_string(o));
  }
}

int ExperimentConfig::tangent_K() const {
  return K_tangent > 0 ? K_tangent : default_tangent_K(manifold.intrinsic_dim());
}

void ExperimentConfig::validate() const {
  manifold.validate();
  kernel.validate();
  if (N_list.empty()) throw std::invalid_argument("config: N_list is empty");
  for (int N : N_list)
    if (N < 2) throw std::invalid_argument("config: every N must be at least 2");
  if (seeds.empty()) throw std::invalid_argument("config: seeds is empty");
  if (N_p) {
    if (projection == ProjectionSource::Analytic)
      throw std::invalid_argument("config: N_p needs an estimated projection");
    for (int N : N_list)
      if (*N_p < N) throw std::invalid_argument("config: N_p must be at least every N");
  }
  if (modes < 1 || mode_first < 0) throw std::invalid_argument("config: modes must be positive");
  if (K_tangent < 0) throw std::invalid_argument("config: K_tangent must be non-negative");
  if (threads < 1) throw std::invalid_argument("config: threads must be positive");
  if (study == Study::Spectrum) {
    if (method == Method::DM && op != OperatorKind::LB) throw std::invalid_argument("config: dm supports operator lb only");
    if (op == OperatorKind::Covariant) throw std::invalid_argument("config: covariant has no spectrum");
    if (is_vector_operator(op) && manifold.kind != ManifoldKind::Sphere)
      throw std::invalid_argument("config: vector spectra need a manifold with vector truth (sphere)");
    if (op == OperatorKind::LB && manifold.kind == ManifoldKind::Ellipse)
      throw std::invalid_argument("config: no scalar truth for the ellipse");
  }
  if (study == Study::OperatorCheck && manifold.kind != ManifoldKind::Ellipse)
    throw std::invalid_argument("config: operator_check runs on the ellipse");
  if (dm.K_neighbors == 1 || dm.K_neighbors < 0) throw std::invalid_argument("config: dm K_neighbors must exceed 1");
  if (dm.epsilon && !(*dm.epsilon > 0)) throw std::invalid_argument("config: dm epsilon must be positive");
  for (int N : N_list)
    if (dm.K_neighbors > N) throw std::invalid_argument("config: dm K_neighbors exceeds N");
}

json to_json(const ManifoldSpec& m) {
  return json{{"kind", m.name()}, {"a", m.a}, {"n_ambient", m.n_ambient}, {"flat_d", m.flat_d}, {"flat_m", m.flat_m}};
}

ManifoldSpec manifold_from_json(const json& j) {
  const ManifoldKind kind = manifold_kind_from_string(j.at("kind").get<std::string>());
  ManifoldSpec m;
  switch (kind) {
    case ManifoldKind::Ellipse: m = ManifoldSpec::ellipse(j.value("a", 2.0)); break;
    case ManifoldKind::Torus: m = ManifoldSpec::torus(j.value("a", 2.0)); break;
    case ManifoldKind::GeneralTorus: m = ManifoldSpec::general_torus(j.value("a", 2.0), j.value("n_ambient", 21)); break;
    case ManifoldKind::FlatTorus: m = ManifoldSpec::flat_torus(j.value("flat_d", 2), j.value("flat_m", 1)); break;
    case ManifoldKind::Sphere: m = ManifoldSpec::sphere(); break;
  }
  return m;
}

json to_json(const KernelModel& k) {
  return json{{"family", to_string(k.family)}, {"shape", k.shape}, {"pinv_tol", k.pinv_tol},
              {"matern_order", k.matern_order}};
}

KernelModel kernel_from_json(const json& j) {
  KernelModel k;
  k.family = kernel_family_from_string(j.value("family", std::string("gaussian")));
  k.shape = j.value("shape", 1.0);
  k.pinv_tol = j.value("pinv_tol", 1e-8);
  k.matern_order = j.value("matern_order", 2);
  return k;
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["manifold"] = to_json(c.manifold);
  j["sampling"] = to_string(c.sampling);
  j["N_list"] = c.N_list;
  j["N_p"] = c.N_p ? json(*c.N_p) : json(nullptr);
  j["method"] = to_string(c.method);
  j["operator"] = to_string(c.op);
  j["study"] = to_string(c.study);
  j["projection"] = to_string(c.projection);
  j["K_tangent"] = c.tangent_K();
  j["kernel"] = to_json(c.kernel);
  j["density"] = to_string(c.density);
  j["modes"] = c.modes;
  j["mode_first"] = c.mode_first;
  j["seeds"] = c.seeds;
  j["dm"] = json{{"K_neighbors", c.dm.K_neighbors}, {"epsilon", c.dm.epsilon ? json(*c.dm.epsilon) : json(nullptr)}};
  j["truth"] = json{{"N_theta", c.truth_N_theta}, {"max_degree", c.truth_max_degree}};
  j["solver"] = json{{"trivial_rel", c.trivial_rel}, {"min_resolution", c.min_resolution}};
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  return j;
}

ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  if (j.contains("manifold")) c.manifold = manifold_from_json(j.at("manifold"));
  if (j.contains("sampling")) c.sampling = sampling_mode_from_string(j.at("sampling").get<std::string>());
  if (j.contains("N_list")) c.N_list = j.at("N_list").get<std::vector<int>>();
  if (j.contains("N_p") && !j.at("N_p").is_null()) c.N_p = j.at("N_p").get<int>();
  if (j.contains("method")) c.method = method_from_string(j.at("method").get<std::string>());
  if (j.contains("operator")) c.op = operator_from_string(j.at("operator").get<std::string>());
  if (j.contains("study")) c.study = study_from_string(j.at("study").get<std::string>());
  if (j.contains("projection")) c.projection = projection_source_from_string(j.at("projection").get<std::string>());
  c.K_tangent = j.value("K_tangent", 0);
  if (j.contains("kernel")) c.kernel = kernel_from_json(j.at("kernel"));
  if (j.contains("density")) c.density = density_method_from_string(j.at("density").get<std::string>());
  c.modes = j.value("modes", c.modes);
  c.mode_first = j.value("mode_first", c.mode_first);
  if (j.contains("seeds")) c.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
  if (j.contains("dm")) {
    const json& d = j.at("dm");
    c.dm.K_neighbors = d.value("K_neighbors", 0);
    if (d.contains("epsilon") && !d.at("epsilon").is_null()) c.dm.epsilon = d.at("epsilon").get<double>();
  }
  if (j.contains("truth")) {
    c.truth_N_theta = j.at("truth").value("N_theta", c.truth_N_theta);
    c.truth_max_degree = j.at("truth").value("max_degree", c.truth_max_degree);
  }
  if (j.contains("solver")) {
    c.trivial_rel = j.at("solver").value("trivial_rel", c.trivial_rel);
    c.min_resolution = j.at("solver").value("min_resolution", c.min_resolution);
  }
  c.output_dir = j.value("output_dir", std::string());
  c.threads = j.value("threads", 1);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config " + path);
  return config_from_json(json::parse(in, nullptr, true, true));
}

std::size_t dense_memory_cap() {
  const char* env = std::getenv("RBFM_DENSE_MEMORY_CAP");
  if (env && *env) {
    if (std::strchr(env, '-')) throw std::invalid_argument(std::string("RBFM_DENSE_MEMORY_CAP is not a positive byte count: ") + env);
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw std::invalid_argument(std::string("RBFM_DENSE_MEMORY_CAP is not a positive byte count: ") + env);
  }
  return std::size_t(2) << 30;
}

std::size_t estimate_dense_bytes(const ExperimentConfig& c, int N) {
  if (c.study == Study::Projection) return 0;
  const std::size_t m = is_vector_operator(c.op) ? std::size_t(c.manifold.ambient_dim()) * N : std::size_t(N);
  // kernel matrix, eigenvectors, operator and one working copy
  return 4 * m * m * sizeof(double);
}

}  // namespace rbfm
