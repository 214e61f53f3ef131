#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "rbfm/density.hpp"
#include "rbfm/harness/config.hpp"
#include "rbfm/harness/experiment.hpp"
#include "rbfm/interpolation.hpp"
#include "rbfm/kernel.hpp"
#include "rbfm/linalg.hpp"
#include "rbfm/manifold.hpp"
#include "rbfm/projection.hpp"
#include "rbfm/scalar_ops.hpp"
#include "rbfm/spectral.hpp"
#include "rbfm/tangent.hpp"
#include "rbfm/truth.hpp"

using namespace rbfm;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [fail: " << what << "]";
    }
  }
};

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

double max_of(const std::vector<double>& v, std::size_t from = 0, std::size_t to = std::string::npos) {
  double m = 0;
  for (std::size_t i = from; i < std::min(to, v.size()); ++i) m = std::max(m, std::isfinite(v[i]) ? v[i] : INFINITY);
  return m;
}

std::vector<double> abs_errors(const RunRecord& r) {
  std::vector<double> e;
  for (std::size_t i = 0; i < r.truth.size(); ++i) {
    const double d = std::abs(r.estimate[i] - r.truth[i]);
    e.push_back(std::isfinite(d) ? d : INFINITY);
  }
  return e;
}

Eigen::MatrixXd random_orthogonal(int m, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXd A(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) A(i, j) = g(gen);
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
  return qr.householderQ();
}

// 1 -----------------------------------------------------------------------------------------------
Outcome projection_invariants() {
  Outcome o;
  const std::vector<ManifoldSpec> zoo{ManifoldSpec::ellipse(2.0),        ManifoldSpec::torus(2.0),
                                      ManifoldSpec::general_torus(2.0, 21), ManifoldSpec::sphere(),
                                      ManifoldSpec::flat_torus(2, 1),       ManifoldSpec::flat_torus(3, 1),
                                      ManifoldSpec::flat_torus(4, 1)};
  double worst_a = 0, worst_e = 0;
  for (const auto& spec : zoo) {
    const auto cloud = sample_manifold(spec, 1000, 1);
    const int d = spec.intrinsic_dim();
    const auto measure = [d](const ProjectionField& P) {
      double w = 0;
      for (const auto& M : P.mats) w = std::max({w, (M * M - M).norm(), std::abs(M.trace() - d)});
      return w;
    };
    worst_a = std::max(worst_a, measure(analytic_projection(cloud)));
    worst_e = std::max(worst_e, measure(second_order_svd(cloud, default_tangent_K(d), d)));
    worst_e = std::max(worst_e, measure(first_order_svd(cloud, default_tangent_K(d), d)));
  }
  o.detail << "analytic " << fmt(worst_a) << ", estimated " << fmt(worst_e);
  o.check(worst_a <= 1e-12, "analytic > 1e-12");
  o.check(worst_e <= 1e-8, "estimated > 1e-8");
  return o;
}

// 2 -----------------------------------------------------------------------------------------------
Outcome tangent_rates() {
  Outcome o;
  ExperimentConfig c;
  c.manifold = ManifoldSpec::torus(2.0);
  c.study = Study::Projection;
  c.K_tangent = 40;
  c.N_list = {900, 1600, 2500, 3600};
  const Report rep = run_experiment(c);
  const double s1 = rep.slopes.at("first_order"), s2 = rep.slopes.at("second_order");
  o.detail << "slope first " << fmt(s1) << ", second " << fmt(s2);
  o.check(s1 >= -0.75 && s1 <= -0.3, "first-order slope");
  o.check(s2 >= -1.3 && s2 <= -0.7, "second-order slope");
  const auto& r1 = rep.tables.at("first_order");
  const auto& r2 = rep.tables.at("second_order");
  for (std::size_t i = 0; i < r1.size(); ++i)
    if (r1[i].N >= 1600) o.check(r2[i].error < r1[i].error, "second order not better at N=" + std::to_string(r1[i].N));
  return o;
}

// 3, 4 --------------------------------------------------------------------------------------------
ExperimentConfig ellipse_check(ProjectionSource p) {
  ExperimentConfig c;
  c.manifold = ManifoldSpec::ellipse(2.0);
  c.study = Study::OperatorCheck;
  c.N_list = {400};
  c.seeds = {7};
  c.kernel = gaussian(1.5, 1e-8);
  c.projection = p;
  c.K_tangent = 10;
  return c;
}

Outcome ellipse_operators() {
  Outcome o;
  const auto a = run_single(ellipse_check(ProjectionSource::Analytic), 400, 7).metrics;
  const auto e = run_single(ellipse_check(ProjectionSource::SecondOrder), 400, 7).metrics;
  o.detail << "bochner " << fmt(a.at("bochner")) << ", lich " << fmt(a.at("lich")) << ", covariant "
           << fmt(a.at("covariant")) << ", covariant with estimated P " << fmt(e.at("covariant"));
  o.check(a.at("bochner") <= 0.05, "bochner");
  o.check(a.at("lich") <= 0.1, "lichnerowicz");
  o.check(a.at("covariant") <= 1e-4, "covariant");
  o.check(e.at("covariant") <= 1e-2, "covariant with estimated P");
  return o;
}

Outcome one_dimensional_identities() {
  Outcome o;
  const auto a = run_single(ellipse_check(ProjectionSource::Analytic), 400, 7).metrics;
  o.detail << "hodge vs bochner " << fmt(a.at("hodge_vs_bochner")) << ", lich vs 2 bochner "
           << fmt(a.at("lich_vs_2bochner"));
  o.check(a.at("hodge_vs_bochner") <= 1e-6, "hodge vs bochner");
  o.check(a.at("lich_vs_2bochner") <= 1e-4, "lichnerowicz vs 2 bochner");
  return o;
}

// 5 -----------------------------------------------------------------------------------------------
ExperimentConfig sphere_vector(Method m, OperatorKind op, int modes) {
  ExperimentConfig c;
  c.manifold = ManifoldSpec::sphere();
  c.sampling = SamplingMode::RandomVolume;
  c.N_list = {1024};
  c.method = m;
  c.op = op;
  c.projection = ProjectionSource::SecondOrder;
  c.K_tangent = 40;
  c.kernel = m == Method::NRBF ? gaussian(1.0, 1e-10) : inverse_quadratic(0.5, 1e-8);
  c.modes = modes;
  return c;
}

Outcome sphere_vector_spectra() {
  Outcome o;
  const auto b = abs_errors(run_single(sphere_vector(Method::NRBF, OperatorKind::Bochner, 30), 1024, 1));
  const auto h = abs_errors(run_single(sphere_vector(Method::NRBF, OperatorKind::Hodge, 16), 1024, 1));
  const auto l = abs_errors(run_single(sphere_vector(Method::NRBF, OperatorKind::Lich, 23), 1024, 1));
  const double eb = max_of(b), eh = max_of(h), el = std::max(max_of(l, 3, 6), max_of(l, 11, 23));
  o.detail << "nrbf max abs error bochner " << fmt(eb) << ", hodge " << fmt(eh) << ", lich " << fmt(el);
  o.check(eb <= 0.05, "nrbf bochner");
  o.check(eh <= 0.05, "nrbf hodge");
  o.check(el <= 0.1, "nrbf lichnerowicz");
  double mode1 = NAN;
  for (auto op : {OperatorKind::Bochner, OperatorKind::Hodge, OperatorKind::Lich}) {
    const auto r = run_single(sphere_vector(Method::SRBF, op, 1), 1024, 1);
    const double scale = r.spectrum.values.cwiseAbs().maxCoeff();
    o.check(r.spectrum.real, "srbf " + to_string(op) + " not real");
    o.check(r.spectrum.values.real().minCoeff() >= -1e-8 * scale, "srbf " + to_string(op) + " negative");
    if (op == OperatorKind::Bochner) mode1 = r.estimate[0];
  }
  o.detail << "; srbf bochner mode 1 " << fmt(mode1);
  o.check(mode1 >= 0.7 && mode1 <= 1.0, "srbf bochner mode 1");
  return o;
}

// 6 -----------------------------------------------------------------------------------------------
Outcome general_torus_scalar() {
  Outcome o;
  const auto spec = ManifoldSpec::general_torus(2.0, 21);
  ExperimentConfig c;
  c.manifold = spec;
  c.N_list = {2500};
  c.kernel = inverse_quadratic(0.5);
  c.modes = 13;
  const auto nr = run_single(c, 2500, 1);
  const double e13 = max_of(nr.value_errors);
  o.detail << "nrbf max rel error (13 modes) " << fmt(e13);
  o.check(e13 <= 5e-2, "nrbf leading 13");

  const auto cloud = sample_manifold(spec, 2500, 1);
  const auto ops = build_grad_matrices(build_system(cloud, inverse_quadratic(0.5)), analytic_projection(cloud));
  const auto q = estimate_density(cloud, DensityMethod::KdeSilverman).q;
  const auto pair = laplace_beltrami_symmetric(ops, q);
  const auto r = solve_symmetric(pair, 40);
  const Eigen::MatrixXd V = r.real_vectors();
  const Eigen::MatrixXd I = V.transpose() * pair.b.asDiagonal() * V;
  const double orth = (I - Eigen::MatrixXd::Identity(I.rows(), I.cols())).cwiseAbs().maxCoeff();
  const double lo = r.values.real().minCoeff();
  o.detail << "; srbf min eigenvalue " << fmt(lo) << ", B-orthogonality " << fmt(orth);
  o.check(r.real, "srbf not real");
  o.check(lo >= -1e-8, "srbf negative");
  o.check(orth <= 1e-8, "srbf orthogonality");

  ExperimentConfig s;
  s.manifold = spec;
  s.method = Method::SRBF;
  s.N_list = {512, 1024, 2048, 4096};
  s.seeds = {1, 2, 3, 4, 5, 6, 7, 8};
  s.projection = ProjectionSource::SecondOrder;
  s.kernel = inverse_quadratic(0.1, 1e-12);
  s.density = DensityMethod::Analytic;
  s.mode_first = 1;
  s.modes = 4;
  const double slope = run_experiment(s).slopes.at("eigenvalue");
  o.detail << "; srbf leading-4 slope " << fmt(slope);
  o.check(slope >= -0.8 && slope <= -0.25, "srbf slope");
  return o;
}

// 7 -----------------------------------------------------------------------------------------------
Outcome np_refinement() {
  Outcome o;
  ExperimentConfig c;
  c.manifold = ManifoldSpec::general_torus(2.0, 3);
  c.N_list = {1600};
  c.projection = ProjectionSource::SecondOrder;
  c.K_tangent = 40;
  c.kernel = inverse_quadratic(0.5);
  c.mode_first = 1;
  c.modes = 12;
  std::vector<ConvergenceRow> rows;
  for (int Np : {1600, 3200, 6400}) {
    c.N_p = Np;
    rows.push_back({Np, run_single(c, 1600, 1).mean_value_error});
  }
  const double slope = fit_convergence_slope(rows);
  o.detail << "errors";
  for (const auto& r : rows) o.detail << " " << fmt(r.error);
  o.detail << ", slope " << fmt(slope);
  o.check(rows[1].error < rows[0].error && rows[2].error < rows[1].error, "not strictly decreasing");
  o.check(slope <= -0.6, "slope");
  return o;
}

// 8 -----------------------------------------------------------------------------------------------
Outcome dm_baseline() {
  Outcome o;
  ExperimentConfig c;
  c.manifold = ManifoldSpec::sphere();
  c.sampling = SamplingMode::RandomVolume;
  c.method = Method::DM;
  c.N_list = {1024};
  c.dm.K_neighbors = 32;
  c.mode_first = 1;
  c.modes = 1;
  const double l1 = run_single(c, 1024, 1).estimate[0];
  o.detail << "sphere leading eigenvalue " << fmt(l1);
  o.check(std::abs(l1 - 2.0) <= 0.2, "sphere leading eigenvalue");

  ExperimentConfig a;
  a.manifold = ManifoldSpec::general_torus(2.0, 21);
  a.N_list = {2500};
  a.method = Method::SRBF;
  a.kernel = inverse_quadratic(0.5);
  a.modes = 13;
  ExperimentConfig b = a;
  b.method = Method::DM;
  b.dm.K_neighbors = 100;
  const auto rows = compare_methods(a, b, 2500, 1);
  const fs::path dir = fs::temp_directory_path() / "rbfm_acceptance";
  fs::create_directories(dir);
  const std::string path = (dir / "compare_dm.csv").string();
  write_compare_csv(path, "srbf", "dm", rows);
  double worst = 1;
  for (const auto& r : rows)
    if (r.truth > 0) worst = std::max({worst, r.value_a / r.value_b, r.value_b / r.value_a});
  o.detail << "; torus table " << rows.size() << " rows, worst ratio " << fmt(worst);
  o.check(rows.size() == 13 && fs::file_size(path) > 0, "comparison table");
  o.check(worst <= 10, "order of magnitude");
  return o;
}

// 9 -----------------------------------------------------------------------------------------------
Outcome property_suites() {
  Outcome o;
  {
    const auto cloud = sample_manifold(ManifoldSpec::torus(2.0), 150, 4);
    const auto sys = build_system(cloud, inverse_quadratic(0.8, 1e-12));
    Eigen::VectorXd f(150);
    for (int j = 0; j < 150; ++j) f(j) = std::sin(cloud.points(j, 0)) + cloud.points(j, 2) * cloud.points(j, 1);
    const Eigen::VectorXd c = pinv_apply(sys, f);
    double worst = 0;
    for (int j = 0; j < 150; ++j)
      worst = std::max(worst, std::abs(interpolate_eval(sys, c, cloud.points.row(j).transpose()) - f(j)));
    worst /= f.cwiseAbs().maxCoeff();
    o.detail << "exactness " << fmt(worst);
    o.check(worst <= 1e-8, "interpolation exactness");
  }
  {
    const double h = 1e-6;
    double worst = 0;
    for (const auto& m : {gaussian(1.5), inverse_quadratic(0.5), matern(1, 1.0), matern(2, 1.3), matern(3, 0.7)})
      for (int k = 1; k <= 20; ++k) {
        const double r = 0.1 * k;
        worst = std::max(worst, std::abs(kernel_deriv(m, r) - (kernel_eval(m, r + h) - kernel_eval(m, r - h)) / (2 * h)));
      }
    o.detail << ", kernel fd " << fmt(worst);
    o.check(worst <= 1e-7, "kernel derivative");
  }
  {
    const auto cloud = sample_manifold(ManifoldSpec::torus(2.0), 400, 5);
    const auto ops = build_grad_matrices(build_system(cloud, inverse_quadratic(0.5)), analytic_projection(cloud));
    const auto pair = laplace_beltrami_symmetric(ops, estimate_density(cloud, DensityMethod::KdeSilverman).q);
    const auto all = sym_eig(pair.A, false).values;
    const double scale = all.cwiseAbs().maxCoeff();
    const auto r = solve_symmetric(pair, 40);
    const Eigen::MatrixXd V = r.real_vectors();
    const Eigen::MatrixXd I = V.transpose() * pair.b.asDiagonal() * V;
    const double orth = (I - Eigen::MatrixXd::Identity(I.rows(), I.cols())).cwiseAbs().maxCoeff();
    const double neg = std::max(0.0, -all.minCoeff() / scale);
    o.detail << ", psd " << fmt(neg) << ", orthogonality " << fmt(orth);
    o.check(neg <= 1e-8 && orth <= 1e-8, "symmetric pencil");
  }
  {
    const auto cloud = sample_manifold(ManifoldSpec::torus(2.0), 500, 7);
    const Eigen::MatrixXd Q = random_orthogonal(3, 5);
    const auto rotated = cloud_from_points(cloud.points * Q.transpose(), 2);
    double worst = 0;
    for (int order = 0; order < 2; ++order) {
      const auto a = order ? second_order_svd(cloud, 40, 2) : first_order_svd(cloud, 40, 2);
      const auto b = order ? second_order_svd(rotated, 40, 2) : first_order_svd(rotated, 40, 2);
      for (int j = 0; j < cloud.N(); ++j) worst = std::max(worst, (Q * a.mats[j] * Q.transpose() - b.mats[j]).norm());
    }
    o.detail << ", rotation " << fmt(worst);
    o.check(worst <= 1e-9, "rotation equivariance");
  }
  {
    std::mt19937_64 gen(6);
    std::normal_distribution<double> g;
    Eigen::MatrixXd F(150, 5), U(150, 5);
    for (int i = 0; i < 150; ++i)
      for (int j = 0; j < 5; ++j) F(i, j) = g(gen);
    for (int i = 0; i < 150; ++i)
      for (int j = 0; j < 5; ++j) U(i, j) = F(i, j) + 0.2 * g(gen);
    const Eigen::MatrixXd R = random_orthogonal(5, 8);
    const auto a = align_eigenvectors_ols(F, U);
    const auto b = align_eigenvectors_ols(F * R, U);
    const double ta = (a.aligned - F.cast<std::complex<double>>()).squaredNorm();
    const double tb = (b.aligned - (F * R).cast<std::complex<double>>()).squaredNorm();
    const double rel = std::abs(ta - tb) / ta;
    o.detail << ", ols " << fmt(rel);
    o.check(rel <= 1e-10, "ols invariance");
  }
  {
    const fs::path dir = fs::temp_directory_path() / "rbfm_acceptance_determinism";
    ExperimentConfig c;
    c.sampling = SamplingMode::RandomVolume;
    c.N_list = {200, 300, 400};
    c.kernel = inverse_quadratic(0.5);
    c.modes = 4;
    c.output_dir = dir.string();
    const auto snapshot = [&] {
      fs::remove_all(dir);
      fs::create_directories(dir);
      run_experiment(c);
      std::vector<std::string> out;
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().filename() == "run_log.jsonl") continue;
        std::ifstream in(e.path(), std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        out.push_back(e.path().filename().string() + "\n" + ss.str());
      }
      std::sort(out.begin(), out.end());
      return out;
    };
    const bool same = snapshot() == snapshot();
    o.detail << ", determinism " << (same ? "bit-exact" : "differs");
    o.check(same, "determinism");
  }
  return o;
}

// flat torus substitute -----------------------------------------------------------------------------
Outcome flat_torus_spectrum() {
  Outcome o;
  ExperimentConfig c;
  c.manifold = ManifoldSpec::flat_torus(2, 1);
  c.N_list = {4096};
  c.kernel = inverse_quadratic(0.5);
  c.modes = 21;
  const auto r = run_single(c, 4096, 1);
  const double e = max_of(r.value_errors);
  o.detail << "d=2 N=4096 max rel error (21 modes) " << fmt(e);
  o.check(e <= 5e-2, "flat torus eigenvalues");
  return o;
}

}  // namespace

int main() {
  struct Item {
    std::string name;
    std::function<Outcome()> run;
  };
  const std::vector<Item> items{
      {"1 projection invariants", projection_invariants},
      {"2 tangent estimation rates", tangent_rates},
      {"3 ellipse operator checks", ellipse_operators},
      {"4 one-dimensional identities", one_dimensional_identities},
      {"5 sphere vector spectra", sphere_vector_spectra},
      {"6 general torus scalar spectrum", general_torus_scalar},
      {"7 projection cloud refinement", np_refinement},
      {"8 diffusion maps baseline", dm_baseline},
      {"9 property suites", property_suites},
      {"flat torus spectrum", flat_torus_spectrum},
  };
  int failed = 0;
  for (const auto& it : items) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << "exception: " << e.what();
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("%s criterion %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", it.name.c_str(), o.detail.str().c_str(), dt);
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
