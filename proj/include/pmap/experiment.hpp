#pragma once

// Desk-scale spin-glass experiments producing tidy CSV plus a JSON sidecar
// that holds the full configuration; rerunning the sidecar reproduces the
// CSV byte for byte.

#include <cstdint>
#include <string>
#include <vector>

#include "pmap/map_solvers.hpp"
#include "pmap/model_io.hpp"

namespace pmap {

enum class ExperimentKind { LOWER_BOUNDS, MARGINAL_ERROR, ACCEPTANCE };

const char* to_string(ExperimentKind k);
ExperimentKind experiment_from_string(const std::string& s);

struct ExperimentSpec {
  ExperimentKind experiment = ExperimentKind::LOWER_BOUNDS;
  int rows = 3;
  int cols = 3;
  /// ACCEPTANCE only: square grid sides to sweep; empty means {rows}.
  std::vector<int> grid_sides;
  double field_range = 1.0;
  std::vector<double> couplings{0.5, 1.0, 2.0, 3.0};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
  std::uint64_t mc_samples = 1000;  // M
  int replicas = 50;                // m
  std::uint64_t draws = 1000;       // approximate samples / acceptance trials
  std::uint64_t sweeps = 10000;     // Gibbs chain length
  std::uint64_t root_seed = 0;
  SolverKind solver = SolverKind::AUTO;
  unsigned workers = 1;
  std::string output;  // CSV path; sidecar is output + ".json"
};

Json spec_to_json(const ExperimentSpec& spec);
ExperimentSpec spec_from_json(const Json& j);

/// Throws InvalidInput on an unusable spec.
void check_spec(const ExperimentSpec& spec);

inline constexpr const char* kMarginalCsvHeader = "c,method,mean_tv,se_tv,models";
inline constexpr const char* kAcceptanceCsvHeader =
    "rows,cols,c,seed,exact_logz,u0,u0_se,accept_oracle,accept_empirical,accept_se,"
    "accept_proxy";

struct ExperimentOutput {
  std::string csv;
  Json sidecar;
};

/// Runs the experiment; writes output and output + ".json" when output is
/// non-empty.
ExperimentOutput run_experiment(const ExperimentSpec& spec);

std::string sidecar_path(const std::string& csv_path);

}  // namespace pmap
