#include <CLI11.hpp>

#include <cmath>
#include <iomanip>
#include <iostream>
#include <optional>

#include "rbfm/harness/experiment.hpp"
#include "rbfm/tangent.hpp"
#include "rbfm/truth.hpp"

using namespace rbfm;

namespace {

struct Flags {
  std::string config;
  std::optional<std::string> manifold, sampling, method, op, study, projection, kernel, density, out;
  std::optional<double> a, shape, pinv_tol, dm_epsilon;
  std::optional<int> n_ambient, flat_d, flat_m, N_p, K_tangent, matern_order, modes, mode_first, dm_K, threads;
  std::vector<int> N_list;
  std::vector<std::uint64_t> seeds;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("-c,--config", f.config, "JSON experiment config");
  app->add_option("--manifold", f.manifold, "ellipse|torus|general_torus|flat_torus|sphere");
  app->add_option("--a", f.a, "ellipse semi-axis or torus radius");
  app->add_option("--n-ambient", f.n_ambient, "general torus ambient dimension");
  app->add_option("--flat-d", f.flat_d, "flat torus dimension");
  app->add_option("--flat-m", f.flat_m, "flat torus frequencies per coordinate");
  app->add_option("--sampling", f.sampling, "random_intrinsic|random_volume|grid");
  app->add_option("-N,--N", f.N_list, "cloud sizes");
  app->add_option("--N-p", f.N_p, "tangent-estimation cloud size");
  app->add_option("--method", f.method, "nrbf|srbf|dm");
  app->add_option("--operator", f.op, "lb|bochner|hodge|lich|covariant");
  app->add_option("--study", f.study, "spectrum|projection|operator_check");
  app->add_option("--projection", f.projection, "analytic|first_order|second_order");
  app->add_option("--K-tangent", f.K_tangent, "neighbours for tangent estimation");
  app->add_option("--kernel", f.kernel, "gaussian|inverse_quadratic|matern");
  app->add_option("--shape", f.shape, "kernel shape parameter s");
  app->add_option("--pinv-tol", f.pinv_tol, "relative pseudo-inverse tolerance");
  app->add_option("--matern-order", f.matern_order, "Matern order 1..3");
  app->add_option("--density", f.density, "kde|analytic|uniform");
  app->add_option("--modes", f.modes, "number of scored truth modes");
  app->add_option("--mode-first", f.mode_first, "first scored truth mode (0-based)");
  app->add_option("--seeds", f.seeds, "random seeds");
  app->add_option("--dm-K", f.dm_K, "diffusion maps neighbours (0: ceil(sqrt N))");
  app->add_option("--dm-epsilon", f.dm_epsilon, "diffusion maps bandwidth (default: auto)");
  app->add_option("-o,--out", f.out, "output directory");
  app->add_option("--threads", f.threads, "worker threads");
}

ExperimentConfig resolve(const Flags& f) {
  ExperimentConfig c = f.config.empty() ? ExperimentConfig{} : load_config(f.config);
  if (f.manifold) {
    nlohmann::json m = to_json(c.manifold);
    m["kind"] = *f.manifold;
    c.manifold = manifold_from_json(m);
  }
  if (f.a) c.manifold.a = *f.a;
  if (f.n_ambient) c.manifold.n_ambient = *f.n_ambient;
  if (f.flat_d) c.manifold.flat_d = *f.flat_d;
  if (f.flat_m) c.manifold.flat_m = *f.flat_m;
  if (f.sampling) c.sampling = sampling_mode_from_string(*f.sampling);
  if (!f.N_list.empty()) c.N_list = f.N_list;
  if (f.N_p) c.N_p = *f.N_p;
  if (f.method) c.method = method_from_string(*f.method);
  if (f.op) c.op = operator_from_string(*f.op);
  if (f.study) c.study = study_from_string(*f.study);
  if (f.projection) c.projection = projection_source_from_string(*f.projection);
  if (f.K_tangent) c.K_tangent = *f.K_tangent;
  if (f.kernel) c.kernel.family = kernel_family_from_string(*f.kernel);
  if (f.shape) c.kernel.shape = *f.shape;
  if (f.pinv_tol) c.kernel.pinv_tol = *f.pinv_tol;
  if (f.matern_order) c.kernel.matern_order = *f.matern_order;
  if (f.density) c.density = density_method_from_string(*f.density);
  if (f.modes) c.modes = *f.modes;
  if (f.mode_first) c.mode_first = *f.mode_first;
  if (!f.seeds.empty()) c.seeds = f.seeds;
  if (f.dm_K) c.dm.K_neighbors = *f.dm_K;
  if (f.dm_epsilon) c.dm.epsilon = *f.dm_epsilon;
  if (f.out) c.output_dir = *f.out;
  if (f.threads) c.threads = *f.threads;
  c.validate();
  return c;
}

void print_run(const RunRecord& r) {
  std::cout << "N=" << r.N << " seed=" << r.seed << " rank_L=" << r.rank_L << "\n";
  if (!r.truth.empty()) {
    std::cout << "mode,truth,estimate,value_error,vector_error\n" << std::setprecision(8);
    for (std::size_t i = 0; i < r.truth.size(); ++i)
      std::cout << i + 1 << "," << r.truth[i] << "," << r.estimate[i] << "," << r.value_errors[i] << ","
                << r.vector_errors[i] << "\n";
    std::cout << "mean value error " << r.mean_value_error << ", mean vector error " << r.mean_vector_error << "\n";
  }
  for (const auto& [k, v] : r.metrics) std::cout << k << " = " << v << "\n";
}

int cmd_sample(const Flags& f, const std::string& path, bool with_density) {
  const ExperimentConfig c = resolve(f);
  const PointCloud cloud = sample_for(c, c.N_list.front(), c.seeds.front());
  if (with_density) {
    const VectorXd q = estimate_density(cloud, c.density).q;
    write_cloud_csv(path, cloud, &q, "density=" + to_string(c.density));
  } else {
    write_cloud_csv(path, cloud);
  }
  std::cout << "wrote " << cloud.N() << " points to " << path << "\n";
  return 0;
}

int cmd_tangent(const Flags& f, const std::string& path, bool binary) {
  ExperimentConfig c = resolve(f);
  if (c.projection == ProjectionSource::Analytic) c.projection = ProjectionSource::SecondOrder;
  const PointCloud cloud = sample_for(c, c.N_list.front(), c.seeds.front());
  const ProjectionField P = projection_for(c, cloud, c.seeds.front());
  const ProjectionDiagnostics d = projection_diagnostics(P, analytic_projection(cloud));
  if (!path.empty()) {
    if (binary) write_projection_binary(path, P);
    else write_projection_csv(path, P);
  }
  std::cout << "source=" << to_string(P.source) << " K=" << P.K_used << " flagged=" << P.flagged()
            << " mean_frob=" << d.mean_frob << " max_frob=" << d.max_frob << "\n";
  return 0;
}

int cmd_spectrum(const Flags& f) {
  ExperimentConfig c = resolve(f);
  c.N_list = {c.N_list.front()};
  c.seeds = {c.seeds.front()};
  const Report rep = run_experiment(c);
  print_run(rep.runs.front());
  return 0;
}

int cmd_converge(const Flags& f) {
  const ExperimentConfig c = resolve(f);
  const Report rep = run_experiment(c);
  for (const auto& [q, rows] : rep.tables) {
    std::cout << q << ": slope " << rep.slopes.at(q) << "\n  N,mean_error\n";
    for (const auto& r : rows) std::cout << "  " << r.N << "," << r.error << "\n";
  }
  return 0;
}

int cmd_compare(const Flags& f) {
  ExperimentConfig a = resolve(f);
  if (a.method == Method::DM) a.method = Method::SRBF;
  ExperimentConfig b = a;
  b.method = Method::DM;
  b.op = OperatorKind::LB;
  const auto rows = compare_methods(a, b, a.N_list.front(), a.seeds.front());
  std::cout << "mode,truth," << to_string(a.method) << ",dm," << to_string(a.method) << "_error,dm_error\n";
  for (const auto& r : rows)
    std::cout << r.mode << "," << r.truth << "," << r.value_a << "," << r.value_b << "," << r.error_a << ","
              << r.error_b << "\n";
  if (!a.output_dir.empty()) {
    ensure_directory(a.output_dir);
    write_compare_csv(join_path(a.output_dir, "compare_dm.csv"), to_string(a.method), "dm", rows,
                      "config=" + to_json(a).dump());
  }
  return 0;
}

int cmd_truth(const Flags& f, int count) {
  const ExperimentConfig c = resolve(f);
  EigenTruth t = is_vector_operator(c.op) ? vector_eigen_truth(c.manifold, to_vector_laplacian(c.op), c.truth_max_degree)
                                          : scalar_eigen_truth(c.manifold, count, c.truth_N_theta);
  std::cout << "level,value,multiplicity\n" << std::setprecision(12);
  for (std::size_t i = 0; i < t.levels.size() && static_cast<int>(i) < count; ++i)
    std::cout << i + 1 << "," << t.levels[i].value << "," << t.levels[i].multiplicity << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"RBF spectral estimation of manifold Laplacians"};
  app.require_subcommand(1);
  Flags f;

  std::string sample_out = "cloud.csv";
  bool sample_q = false;
  auto* sample = app.add_subcommand("sample", "sample a point cloud and write it as CSV");
  add_flags(sample, f);
  sample->add_option("--file", sample_out, "output CSV");
  sample->add_flag("--with-density", sample_q, "append the density column");

  std::string tangent_out;
  bool tangent_bin = false;
  auto* tangent = app.add_subcommand("tangent", "estimate tangent projections and report their error");
  add_flags(tangent, f);
  tangent->add_option("--file", tangent_out, "write the projection field");
  tangent->add_flag("--binary", tangent_bin, "binary projection file");

  auto* spectrum = app.add_subcommand("spectrum", "one spectrum run (first N, first seed)");
  add_flags(spectrum, f);

  auto* converge = app.add_subcommand("converge", "all N and seeds, with convergence slopes");
  add_flags(converge, f);

  auto* compare = app.add_subcommand("compare-dm", "scored eigenvalues of an RBF method against diffusion maps");
  add_flags(compare, f);

  int truth_count = 10;
  auto* truth = app.add_subcommand("truth", "print reference eigenvalues");
  add_flags(truth, f);
  truth->add_option("--count", truth_count, "number of levels");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sample) return cmd_sample(f, sample_out, sample_q);
    if (*tangent) return cmd_tangent(f, tangent_out, tangent_bin);
    if (*spectrum) return cmd_spectrum(f);
    if (*converge) return cmd_converge(f);
    if (*compare) return cmd_compare(f);
    if (*truth) return cmd_truth(f, truth_count);
  } catch (const InfeasibleSize& e) {
    std::cerr << "refused: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
