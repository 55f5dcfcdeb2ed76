#include "pmap/experiment.hpp"

#include <cmath>
#include <fstream>

#include "pmap/baselines.hpp"
#include "pmap/bounds.hpp"
#include "pmap/detail/parallel.hpp"
#include "pmap/errors.hpp"
#include "pmap/exact.hpp"
#include "pmap/samplers.hpp"

namespace pmap {

const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::LOWER_BOUNDS: return "lower-bounds";
    case ExperimentKind::MARGINAL_ERROR: return "marginal-error";
    case ExperimentKind::ACCEPTANCE: return "acceptance";
  }
  return "?";
}

ExperimentKind experiment_from_string(const std::string& s) {
  for (auto k : {ExperimentKind::LOWER_BOUNDS, ExperimentKind::MARGINAL_ERROR,
                 ExperimentKind::ACCEPTANCE})
    if (s == to_string(k)) return k;
  throw InvalidInput("unknown experiment '" + s + "'");
}

Json spec_to_json(const ExperimentSpec& s) {
  Json j;
  j["experiment"] = to_string(s.experiment);
  j["rows"] = s.rows;
  j["cols"] = s.cols;
  j["grid_sides"] = s.grid_sides;
  j["field_range"] = s.field_range;
  j["couplings"] = s.couplings;
  j["seeds"] = s.seeds;
  j["mc_samples"] = s.mc_samples;
  j["replicas"] = s.replicas;
  j["draws"] = s.draws;
  j["sweeps"] = s.sweeps;
  j["root_seed"] = s.root_seed;
  j["solver"] = to_string(s.solver);
  j["workers"] = s.workers;
  j["output"] = s.output;
  return j;
}

ExperimentSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidInput("experiment spec must be a JSON object");
  ExperimentSpec s;
  try {
    s.experiment = experiment_from_string(j.at("experiment").get<std::string>());
    auto opt = [&](const char* key, auto& field) {
      if (j.contains(key)) j.at(key).get_to(field);
    };
    opt("rows", s.rows);
    opt("cols", s.cols);
    opt("grid_sides", s.grid_sides);
    opt("field_range", s.field_range);
    opt("couplings", s.couplings);
    opt("seeds", s.seeds);
    opt("mc_samples", s.mc_samples);
    opt("replicas", s.replicas);
    opt("draws", s.draws);
    opt("sweeps", s.sweeps);
    opt("root_seed", s.root_seed);
    opt("workers", s.workers);
    opt("output", s.output);
    if (j.contains("solver")) s.solver = solver_from_string(j.at("solver").get<std::string>());
  } catch (const Json::exception& e) {
    throw InvalidInput(std::string("experiment spec: ") + e.what());
  }
  check_spec(s);
  return s;
}

void check_spec(const ExperimentSpec& s) {
  if (s.rows < 1 || s.cols < 1) throw InvalidInput("experiment: grid must be at least 1x1");
  for (int side : s.grid_sides)
    if (side < 1) throw InvalidInput("experiment: grid sides must be >= 1");
  if (s.couplings.empty()) throw InvalidInput("experiment: empty coupling grid");
  if (s.seeds.empty()) throw InvalidInput("experiment: empty seed list");
  for (double c : s.couplings)
    if (!std::isfinite(c) || c < 0) throw InvalidInput("experiment: couplings must be finite and >= 0");
  if (!std::isfinite(s.field_range) || s.field_range < 0)
    throw InvalidInput("experiment: field range must be finite and >= 0");
  if (s.mc_samples < 1 || s.draws < 1 || s.replicas < 1)
    throw InvalidInput("experiment: mc_samples, draws and replicas must be >= 1");
  if (s.experiment == ExperimentKind::MARGINAL_ERROR && s.sweeps < 2)
    throw InvalidInput("experiment: sweeps must be >= 2");
}

std::string sidecar_path(const std::string& csv_path) { return csv_path + ".json"; }

namespace {

PairwiseModel grid_model(const ExperimentSpec& s, int rows, int cols, double c,
                         std::uint64_t seed) {
  SpinGlassConfig cfg;
  cfg.rows = rows;
  cfg.cols = cols;
  cfg.field_range = s.field_range;
  cfg.coupling_max = c;
  cfg.seed = seed;
  return generate_spin_glass(cfg);
}

std::string lower_bounds_csv(const ExperimentSpec& s) {
  BoundsReportConfig cfg;
  cfg.rows = s.rows;
  cfg.cols = s.cols;
  cfg.field_range = s.field_range;
  cfg.couplings = s.couplings;
  cfg.seeds = s.seeds;
  cfg.mc_samples = s.mc_samples;
  cfg.replicas = s.replicas;
  cfg.root_seed = s.root_seed;
  cfg.solver = s.solver;
  cfg.workers = s.workers;
  return bounds_csv(bounds_report(cfg));
}

std::vector<MarginalTable> sample_vertex_marginals(const PairwiseModel& model,
                                                   const std::vector<Assignment>& xs) {
  std::vector<MarginalTable> out;
  for (int i = 0; i < model.num_vertices(); ++i) {
    const int v[1] = {i};
    out.push_back(empirical_marginal(model, v, xs));
  }
  return out;
}

std::string marginal_error_csv(const ExperimentSpec& s) {
  const char* methods[3] = {"approx-unary", "approx-pairwise", "gibbs"};
  std::string out = kMarginalCsvHeader;
  out += '\n';
  for (std::size_t ci = 0; ci < s.couplings.size(); ++ci) {
    const double c = s.couplings[ci];
    std::vector<std::vector<double>> tv(3);
    for (std::uint64_t seed : s.seeds) {
      const PairwiseModel model = grid_model(s, s.rows, s.cols, c, seed);
      const auto oracle = vertex_marginals(model);
      const SeedPath cell = SeedPath(s.root_seed).child(ci).child(seed);
      const SampleBatch unary =
          approx_map_batch(model, Scheme::UNARY, s.solver, s.draws, cell.child(0), s.workers);
      // Pairwise noise breaks attractiveness; these grids are solved by
      // enumeration or max-product as AUTO decides.
      const SampleBatch pairwise = approx_map_batch(model, Scheme::PAIRWISE, SolverKind::AUTO,
                                                    s.draws, cell.child(1), s.workers);
      ChainConfig chain;
      chain.sweeps = s.sweeps;
      Rng rng = cell.child(2).rng();
      const SampleBatch gibbs = gibbs_chain(model, chain, rng);
      tv[0].push_back(mean_vertex_tv(oracle, sample_vertex_marginals(model, unary.samples)));
      tv[1].push_back(mean_vertex_tv(oracle, sample_vertex_marginals(model, pairwise.samples)));
      tv[2].push_back(mean_vertex_tv(oracle, sample_vertex_marginals(model, gibbs.samples)));
    }
    for (int m = 0; m < 3; ++m) {
      const auto st = detail::mean_and_se(tv[m]);
      out += format_number(c) + ',' + methods[m] + ',' + format_number(st.mean) + ',' +
             format_number(std::isnan(st.std_error) ? std::nullopt
                                                    : std::optional<double>(st.std_error)) +
             ',' + std::to_string(tv[m].size()) + '\n';
    }
  }
  return out;
}

std::string acceptance_csv(const ExperimentSpec& s) {
  std::vector<std::pair<int, int>> grids;
  if (s.grid_sides.empty()) grids.emplace_back(s.rows, s.cols);
  for (int side : s.grid_sides) grids.emplace_back(side, side);
  std::string out = kAcceptanceCsvHeader;
  out += '\n';
  for (std::size_t gi = 0; gi < grids.size(); ++gi) {
    const auto [rows, cols] = grids[gi];
    for (std::size_t ci = 0; ci < s.couplings.size(); ++ci) {
      for (std::uint64_t seed : s.seeds) {
        const PairwiseModel model = grid_model(s, rows, cols, s.couplings[ci], seed);
        const SeedPath cell = SeedPath(s.root_seed).child(gi).child(ci).child(seed);
        std::optional<double> logz;
        if (state_space_size(model) <= kDefaultStateCap) logz = log_partition(model);
        UpperBoundFamily family = make_bound_family(model, {}, FamilyKind::GUMBEL_MC,
                                                    s.mc_samples, cell.child(0), s.solver,
                                                    kDefaultStateCap, s.workers);
        const FamilyValue u0 = family.evaluate({});
        Rng rng = cell.child(1).rng();
        const AcceptanceEstimate acc = acceptance_rate(family, s.draws, rng);
        BoundsReportConfig bc;
        bc.mc_samples = s.mc_samples;
        bc.replicas = s.replicas;
        bc.solver = s.solver;
        bc.workers = s.workers;
        bc.exact = false;
        bc.which.lower_expected = false;
        const BoundsRow b = compute_bounds(model, bc, cell.child(2));
        std::optional<double> oracle;
        if (logz) oracle = std::exp(*logz - u0.value);
        out += std::to_string(rows) + ',' + std::to_string(cols) + ',' +
               format_number(s.couplings[ci]) + ',' + std::to_string(seed) + ',' +
               format_number(logz) + ',' + format_number(u0.value) + ',' +
               format_number(u0.std_error) + ',' + format_number(oracle) + ',' +
               format_number(acc.rate) + ',' + format_number(acc.std_error) + ',' +
               format_number(b.accept_proxy) + '\n';
      }
    }
  }
  return out;
}

}  // namespace

ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  check_spec(spec);
  ExperimentOutput out;
  switch (spec.experiment) {
    case ExperimentKind::LOWER_BOUNDS: out.csv = lower_bounds_csv(spec); break;
    case ExperimentKind::MARGINAL_ERROR: out.csv = marginal_error_csv(spec); break;
    case ExperimentKind::ACCEPTANCE: out.csv = acceptance_csv(spec); break;
  }
  out.sidecar["config"] = spec_to_json(spec);
  out.sidecar["csv_header"] = out.csv.substr(0, out.csv.find('\n'));
  std::size_t lines = 0;
  for (char ch : out.csv) lines += ch == '\n';
  out.sidecar["rows"] = lines - 1;
  if (!spec.output.empty()) {
    std::ofstream csv(spec.output, std::ios::binary);
    if (!csv) throw InvalidInput("cannot write '" + spec.output + "'");
    csv << out.csv;
    std::ofstream side(sidecar_path(spec.output), std::ios::binary);
    if (!side) throw InvalidInput("cannot write '" + sidecar_path(spec.output) + "'");
    side << out.sidecar.dump(2) << '\n';
  }
  return out;
}

}  // namespace pmap
