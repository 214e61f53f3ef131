#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rbfm/harness/config.hpp"
#include "rbfm/harness/io.hpp"
#include "rbfm/spectral.hpp"

namespace rbfm {

class InfeasibleSize : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunRecord {
  int N = 0;
  std::uint64_t seed = 0;
  int rank_L = 0;
  // scored truth modes mode_first .. mode_first+modes-1
  std::vector<double> truth;
  std::vector<double> estimate;
  std::vector<double> value_errors;
  std::vector<double> vector_errors;  // NaN where no estimated vector exists
  double mean_value_error = 0;
  double mean_vector_error = 0;
  std::map<std::string, double> metrics;
  SpectralResult spectrum;
  double wall_time = 0;
};

struct Report {
  nlohmann::json config;
  std::vector<RunRecord> runs;
  std::map<std::string, std::vector<ConvergenceRow>> tables;  // seed-averaged, ascending N
  std::map<std::string, double> slopes;                       // NaN with fewer than three N values
};

// Least-squares slope of log(error) against log(N); needs at least three rows with positive errors.
double fit_convergence_slope(const std::vector<ConvergenceRow>& rows);

PointCloud sample_for(const ExperimentConfig& c, int N, std::uint64_t seed);
ProjectionField projection_for(const ExperimentConfig& c, const PointCloud& cloud, std::uint64_t seed);
void check_memory(const ExperimentConfig& c, int N);

RunRecord run_single(const ExperimentConfig& c, int N, std::uint64_t seed);
Report run_experiment(const ExperimentConfig& c);

struct CompareRow {
  int mode = 0;
  double truth = 0;
  double value_a = 0;
  double value_b = 0;
  double error_a = 0;
  double error_b = 0;
};
std::vector<CompareRow> compare_methods(const ExperimentConfig& a, const ExperimentConfig& b, int N,
                                        std::uint64_t seed);
void write_compare_csv(const std::string& path, const std::string& name_a, const std::string& name_b,
                       const std::vector<CompareRow>& rows, const std::string& header_comment = "");

}  // namespace rbfm
