#include "rbfm/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <thread>

#include "rbfm/density.hpp"
#include "rbfm/dm.hpp"
#include "rbfm/interpolation.hpp"
#include "rbfm/scalar_ops.hpp"
#include "rbfm/tangent.hpp"
#include "rbfm/truth.hpp"
#include "rbfm/vector_ops.hpp"

namespace rbfm {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double finite_mean(const std::vector<double>& v) {
  double s = 0;
  int c = 0;
  for (double x : v)
    if (std::isfinite(x)) {
      s += x;
      ++c;
    }
  return c ? s / c : kNaN;
}

double plain_mean(const std::vector<double>& v) {
  return v.empty() ? kNaN : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

std::string file_tag(int N, std::uint64_t seed) { return "N" + std::to_string(N) + "_seed" + std::to_string(seed); }

int scored_count(const ExperimentConfig& c) { return c.mode_first + c.modes; }

EigenTruth truth_for(const ExperimentConfig& c) {
  if (is_vector_operator(c.op)) {
    EigenTruth t = vector_eigen_truth(c.manifold, to_vector_laplacian(c.op), c.truth_max_degree);
    if (t.total_modes() < scored_count(c))
      throw std::invalid_argument("vector truth has too few modes; raise truth.max_degree");
    return t;
  }
  return scalar_eigen_truth(c.manifold, scored_count(c), c.truth_N_theta);
}

// Level index of every expanded truth mode.
std::vector<int> level_of_modes(const EigenTruth& t, int count) {
  std::vector<int> out;
  for (std::size_t l = 0; l < t.levels.size() && static_cast<int>(out.size()) < count; ++l)
    for (int m = 0; m < t.levels[l].multiplicity; ++m) out.push_back(static_cast<int>(l));
  out.resize(count);
  return out;
}

std::vector<double> vector_errors_by_level(const ExperimentConfig& c, const EigenTruth& truth, const SpectralResult& r,
                                           const MatrixXd& points) {
  const int total = scored_count(c);
  std::vector<double> err(total, kNaN);
  // cover whole levels so eigenspaces are aligned as a unit
  int last_level = level_of_modes(truth, total).back();
  int span = 0;
  for (int l = 0; l <= last_level; ++l) span += truth.levels[l].multiplicity;
  const std::vector<double> tv = truth.expanded(span);
  const std::vector<int> all_idx = matched_indices(r, tv);
  const std::vector<int> lev = level_of_modes(truth, span);
  int start = 0;
  while (start < span) {
    int end = start;
    while (end < span && lev[end] == lev[start]) ++end;
    if (end > c.mode_first) {
      bool ok = true;
      for (int m = start; m < end; ++m)
        if (all_idx[m] < 0 || all_idx[m] >= r.vectors.cols()) ok = false;
      if (ok) {
        const MatrixXd F = truth.value_dim == 1 ? truth.evaluate_scalar(points, start, end - start)
                                                : truth.evaluate_vector(points, start, end - start);
        MatrixXcd U(r.vectors.rows(), end - start);
        for (int m = start; m < end; ++m) U.col(m - start) = r.vectors.col(all_idx[m]);
        const AlignmentReport rep = align_eigenvectors_ols(MatrixXcd(F.cast<std::complex<double>>()), U);
        for (int m = std::max(start, c.mode_first); m < std::min(end, total); ++m) err[m] = rep.per_mode_error[m - start];
      }
    }
    start = end;
  }
  return err;
}

void score_spectrum(const ExperimentConfig& c, RunRecord& rec, const MatrixXd& points) {
  const EigenTruth truth = truth_for(c);
  const std::vector<double> tv = truth.expanded(scored_count(c));
  const std::vector<double> est = matched_estimates(rec.spectrum, tv);
  const std::vector<double> errs = eigenvalue_errors(rec.spectrum, tv);
  const std::vector<double> verr = vector_errors_by_level(c, truth, rec.spectrum, points);
  for (int m = c.mode_first; m < scored_count(c); ++m) {
    rec.truth.push_back(tv[m]);
    rec.estimate.push_back(est[m]);
    rec.value_errors.push_back(errs[m]);
    rec.vector_errors.push_back(verr[m]);
  }
  rec.mean_value_error = plain_mean(rec.value_errors);
  rec.mean_vector_error = finite_mean(rec.vector_errors);
}

void run_spectrum(const ExperimentConfig& c, const PointCloud& cloud, std::uint64_t seed, RunRecord& rec) {
  const int k_all = -1;
  if (c.method == Method::DM) {
    const DmOperator op = dm_laplacian(cloud, c.dm);
    rec.spectrum = solve_dm(op, std::min(cloud.N(), scored_count(c) + 32));
    rec.metrics["epsilon"] = op.epsilon;
    rec.metrics["K_neighbors"] = op.K_neighbors;
    rec.metrics["components"] = op.components;
    score_spectrum(c, rec, cloud.points);
    return;
  }
  const ProjectionField P = projection_for(c, cloud, seed);
  const InterpolationSystem sys = build_system(cloud, c.kernel);
  rec.rank_L = sys.rank;
  const ScalarOperatorSet ops = build_grad_matrices(sys, P);
  if (c.op == OperatorKind::LB) {
    if (c.method == Method::NRBF) {
      rec.spectrum = solve_nonsymmetric(laplace_beltrami_nonsymmetric_reduced(ops), k_all, c.trivial_rel, true,
                                        c.min_resolution);
    } else {
      const DensityEstimate q = estimate_density(cloud, c.density);
      rec.spectrum = solve_symmetric(laplace_beltrami_symmetric_lowrank(ops, q.q), k_all, c.trivial_rel, c.min_resolution);
    }
  } else {
    const VectorOperatorSet v = build_vector_ops(ops, P);
    const VectorLaplacian kind = to_vector_laplacian(c.op);
    if (c.method == Method::NRBF) {
      rec.spectrum = solve_nonsymmetric(vector_laplacian_nonsymmetric_reduced(kind, v), k_all, c.trivial_rel, true,
                                        c.min_resolution);
    } else {
      const DensityEstimate q = estimate_density(cloud, c.density);
      rec.spectrum = solve_restricted(vector_laplacian_symmetric_lowrank(kind, v, q.q), k_all, c.trivial_rel,
                                      c.min_resolution);
    }
  }
  rec.spectrum.rank_L = sys.rank;
  rec.metrics["projection_flagged"] = P.flagged();
  score_spectrum(c, rec, cloud.points);
}

void run_projection_study(const ExperimentConfig& c, const PointCloud& cloud, std::uint64_t seed, RunRecord& rec) {
  const ProjectionField truth = analytic_projection(cloud);
  ExperimentConfig c1 = c, c2 = c;
  c1.projection = ProjectionSource::FirstOrder;
  c2.projection = ProjectionSource::SecondOrder;
  const ProjectionField p1 = projection_for(c1, cloud, seed);
  const ProjectionField p2 = projection_for(c2, cloud, seed);
  rec.metrics["first_order"] = projection_diagnostics(p1, truth).mean_frob;
  rec.metrics["second_order"] = projection_diagnostics(p2, truth).mean_frob;
  rec.metrics["first_order_max"] = projection_diagnostics(p1, truth).max_frob;
  rec.metrics["second_order_max"] = projection_diagnostics(p2, truth).max_frob;
  rec.metrics["second_order_flagged"] = p2.flagged();
}

void run_operator_check(const ExperimentConfig& c, const PointCloud& cloud, std::uint64_t seed, RunRecord& rec) {
  const ProjectionField P = projection_for(c, cloud, seed);
  const InterpolationSystem sys = build_system(cloud, c.kernel);
  rec.rank_L = sys.rank;
  const VectorOperatorSet v = build_vector_ops(build_grad_matrices(sys, P), P);
  const EllipseFieldTruth t = ellipse_field_truth(c.manifold, *cloud.intrinsic);
  const int N = cloud.N();
  const VectorXd B = vector_laplacian_apply(VectorLaplacian::Bochner, v, t.U);
  const VectorXd H = vector_laplacian_apply(VectorLaplacian::Hodge, v, t.U);
  const VectorXd L = vector_laplacian_apply(VectorLaplacian::Lichnerowicz, v, t.U);
  const VectorXd C = covariant_derivative(v, sys, t.U, t.U);
  double grad = 0;
  for (int i = 0; i < v.n; ++i)
    grad = std::max(grad, (v.apply_H(i, t.U) - t.grad.col(i)).cwiseAbs().maxCoeff());
  rec.metrics["grad"] = grad;
  rec.metrics["bochner"] = (B - t.bochner).head(N).cwiseAbs().maxCoeff();
  rec.metrics["lich"] = (L - 2 * t.bochner).head(N).cwiseAbs().maxCoeff();
  rec.metrics["covariant"] = (C - t.covariant).head(N).cwiseAbs().maxCoeff();
  rec.metrics["hodge_vs_bochner"] = (H - B).norm() / B.norm();
  rec.metrics["lich_vs_2bochner"] = (L - 2 * B).norm() / B.norm();
}

std::string config_comment(const ExperimentConfig& c) { return "config=" + to_json(c).dump(); }

void write_run_files(const ExperimentConfig& c, const RunRecord& rec) {
  if (c.output_dir.empty() || c.study != Study::Spectrum) return;
  const std::string tag = file_tag(rec.N, rec.seed);
  const std::string comment = config_comment(c) + " method=" + to_string(c.method);
  write_spectrum_csv(join_path(c.output_dir, "spectrum_" + tag + ".csv"), rec.spectrum, comment);
  write_alignment_csv(join_path(c.output_dir, "alignment_" + tag + ".csv"), rec.truth, rec.estimate, rec.vector_errors,
                      comment);
}

nlohmann::json run_log_entry(const RunRecord& rec) {
  nlohmann::json j;
  j["N"] = rec.N;
  j["seed"] = rec.seed;
  j["rank_L"] = rec.rank_L;
  j["wall_time_s"] = rec.wall_time;
  if (!rec.truth.empty()) {
    j["mean_value_error"] = rec.mean_value_error;
    j["mean_vector_error"] = rec.mean_vector_error;
  }
  for (const auto& [k, v] : rec.metrics) j["metrics"][k] = v;
  return j;
}

}  // namespace

double fit_convergence_slope(const std::vector<ConvergenceRow>& rows) {
  if (rows.size() < 3) throw std::invalid_argument("fit_convergence_slope: need at least three points");
  double sx = 0, sy = 0;
  for (const auto& r : rows) {
    if (!(r.error > 0) || !std::isfinite(r.error)) throw std::invalid_argument("fit_convergence_slope: errors must be positive");
    if (r.N <= 0) throw std::invalid_argument("fit_convergence_slope: N must be positive");
    sx += std::log(double(r.N));
    sy += std::log(r.error);
  }
  const double n = static_cast<double>(rows.size());
  const double mx = sx / n, my = sy / n;
  double sxy = 0, sxx = 0;
  for (const auto& r : rows) {
    const double dx = std::log(double(r.N)) - mx;
    sxy += dx * (std::log(r.error) - my);
    sxx += dx * dx;
  }
  if (sxx == 0) throw std::invalid_argument("fit_convergence_slope: N values must differ");
  return sxy / sxx;
}

PointCloud sample_for(const ExperimentConfig& c, int N, std::uint64_t seed) {
  return sample_manifold(c.manifold, N, seed, c.sampling);
}

ProjectionField projection_for(const ExperimentConfig& c, const PointCloud& cloud, std::uint64_t seed) {
  if (c.projection == ProjectionSource::Analytic) return analytic_projection(cloud);
  const int d = c.manifold.intrinsic_dim();
  const int K = c.tangent_K();
  if (c.N_p && *c.N_p > cloud.N()) {
    const PointCloud big = sample_for(c, *c.N_p, seed);
    return estimate_projection_at(big.points, cloud.points, K, d, c.projection);
  }
  return c.projection == ProjectionSource::FirstOrder ? first_order_svd(cloud, K, d) : second_order_svd(cloud, K, d);
}

void check_memory(const ExperimentConfig& c, int N) {
  const std::size_t need = estimate_dense_bytes(c, N), cap = dense_memory_cap();
  if (need > cap) {
    throw InfeasibleSize("N=" + std::to_string(N) + " needs an estimated " + std::to_string(need) +
                         " bytes of dense storage, above the cap of " + std::to_string(cap) +
                         " bytes (set RBFM_DENSE_MEMORY_CAP to raise it)");
  }
}

RunRecord run_single(const ExperimentConfig& c, int N, std::uint64_t seed) {
  c.validate();
  check_memory(c, N);
  const auto t0 = std::chrono::steady_clock::now();
  RunRecord rec;
  rec.N = N;
  rec.seed = seed;
  const PointCloud cloud = sample_for(c, N, seed);
  switch (c.study) {
    case Study::Spectrum: run_spectrum(c, cloud, seed, rec); break;
    case Study::Projection: run_projection_study(c, cloud, seed, rec); break;
    case Study::OperatorCheck: run_operator_check(c, cloud, seed, rec); break;
  }
  rec.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

Report run_experiment(const ExperimentConfig& c) {
  c.validate();
  for (int N : c.N_list) check_memory(c, N);
  ensure_directory(c.output_dir);

  std::vector<std::pair<int, std::uint64_t>> jobs;
  for (int N : c.N_list)
    for (std::uint64_t s : c.seeds) jobs.emplace_back(N, s);

  Report rep;
  rep.config = to_json(c);
  rep.runs.resize(jobs.size());
  std::vector<std::exception_ptr> failures(jobs.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      try {
        rep.runs[i] = run_single(c, jobs[i].first, jobs[i].second);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int nthreads = std::min<int>(c.threads, static_cast<int>(jobs.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);

  std::vector<std::string> quantities;
  if (c.study == Study::Spectrum) {
    quantities = {"eigenvalue", "eigenvector"};
  } else if (!rep.runs.empty()) {
    for (const auto& [k, v] : rep.runs.front().metrics) quantities.push_back(k);
  }
  std::vector<int> Ns = c.N_list;
  std::sort(Ns.begin(), Ns.end());
  Ns.erase(std::unique(Ns.begin(), Ns.end()), Ns.end());
  for (const auto& q : quantities) {
    std::vector<ConvergenceRow> rows;
    for (int N : Ns) {
      std::vector<double> vals;
      for (const auto& r : rep.runs) {
        if (r.N != N) continue;
        if (q == "eigenvalue") vals.push_back(r.mean_value_error);
        else if (q == "eigenvector") vals.push_back(r.mean_vector_error);
        else vals.push_back(r.metrics.at(q));
      }
      rows.push_back({N, plain_mean(vals)});
    }
    rep.tables[q] = rows;
    double slope = kNaN;
    if (rows.size() >= 3) {
      try {
        slope = fit_convergence_slope(rows);
      } catch (const std::invalid_argument&) {
        slope = kNaN;
      }
    }
    rep.slopes[q] = slope;
  }

  if (!c.output_dir.empty()) {
    const std::string comment = config_comment(c);
    for (const auto& r : rep.runs) write_run_files(c, r);
    for (const auto& [q, rows] : rep.tables)
      write_convergence_csv(join_path(c.output_dir, "convergence_" + q + ".csv"), q, rows, rep.slopes.at(q), comment);
    const std::string log = join_path(c.output_dir, "run_log.jsonl");
    append_jsonl(log, nlohmann::json{{"event", "start"}, {"config", rep.config}});
    for (const auto& r : rep.runs) append_jsonl(log, run_log_entry(r));
    nlohmann::json done{{"event", "done"}};
    for (const auto& [q, s] : rep.slopes) done["slopes"][q] = std::isfinite(s) ? nlohmann::json(s) : nlohmann::json(nullptr);
    append_jsonl(log, done);
  }
  return rep;
}

std::vector<CompareRow> compare_methods(const ExperimentConfig& a, const ExperimentConfig& b, int N,
                                        std::uint64_t seed) {
  const RunRecord ra = run_single(a, N, seed);
  const RunRecord rb = run_single(b, N, seed);
  const std::size_t n = std::min(ra.truth.size(), rb.truth.size());
  std::vector<CompareRow> rows;
  for (std::size_t i = 0; i < n; ++i)
    rows.push_back({a.mode_first + static_cast<int>(i) + 1, ra.truth[i], ra.estimate[i], rb.estimate[i],
                    ra.value_errors[i], rb.value_errors[i]});
  return rows;
}

void write_compare_csv(const std::string& path, const std::string& name_a, const std::string& name_b,
                       const std::vector<CompareRow>& rows, const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "# rbfm-compare v1 a=" << name_a << " b=" << name_b << "\n";
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "mode,truth_value," << name_a << "_value," << name_b << "_value," << name_a << "_error," << name_b
      << "_error\n"
      << std::setprecision(17);
  for (const auto& r : rows)
    out << r.mode << "," << r.truth << "," << r.value_a << "," << r.value_b << "," << r.error_a << "," << r.error_b
        << "\n";
}

}  // namespace rbfm
