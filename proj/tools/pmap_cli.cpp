// pmap: command-line front end.
//
// Exit codes: 0 ok, 2 validation error, 3 resource cap exceeded, 1 internal
// error. Failures print one JSON line on stderr:
//
//   {"error":"invalid_input","exit_code":2,"message":"..."}

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pmap/baselines.hpp"
#include "pmap/bounds.hpp"
#include "pmap/errors.hpp"
#include "pmap/exact.hpp"
#include "pmap/experiment.hpp"
#include "pmap/map_solvers.hpp"
#include "pmap/model_io.hpp"
#include "pmap/samplers.hpp"

using namespace pmap;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInternal = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitCap = 3;

int report_error(const char* kind, int code, const std::string& message) {
  Json j;
  j["error"] = kind;
  j["exit_code"] = code;
  j["message"] = message;
  std::cerr << j.dump() << '\n';
  return code;
}

// --seed wins over PMAP_SEED; neither is a validation error.
std::uint64_t require_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv(kSeedEnvVar); env && *env) {
    std::uint64_t v = 0;
    if (!seed_from_env(v))
      throw InvalidInput(std::string(kSeedEnvVar) + " is not an unsigned integer: '" + env + "'");
    return v;
  }
  throw InvalidInput(std::string("randomized command needs --seed or ") + kSeedEnvVar);
}

PairwiseModel load_model(const std::string& path) {
  if (path == "-") {
    std::stringstream ss;
    ss << std::cin.rdbuf();
    return model_from_string(ss.str());
  }
  return read_model_file(path);
}

// Writes to a file, or stdout for "" and "-".
class Output {
 public:
  explicit Output(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path, std::ios::binary);
    if (!file_) throw InvalidInput("cannot write '" + path + "'");
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidInput("not an unsigned integer: '" + s + "'");
  return v;
}

// "0-9", "1,4,7" or a mix of both.
std::vector<std::uint64_t> parse_seed_list(const std::vector<std::string>& items) {
  std::vector<std::uint64_t> out;
  for (const auto& item : items) {
    const auto dash = item.find('-');
    if (dash == std::string::npos) {
      out.push_back(parse_u64(item));
      continue;
    }
    const std::uint64_t lo = parse_u64(item.substr(0, dash));
    const std::uint64_t hi = parse_u64(item.substr(dash + 1));
    if (hi < lo) throw InvalidInput("empty seed range '" + item + "'");
    for (std::uint64_t s = lo; s <= hi; ++s) out.push_back(s);
  }
  return out;
}

Json assignment_json(const Assignment& x) { return Json(x); }

// --- gen-model -------------------------------------------------------------

struct GenOpts {
  int rows = 3;
  int cols = 3;
  double coupling = 1.0;
  double field = 1.0;
  bool mixed = false;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_gen(const GenOpts& o) {
  SpinGlassConfig cfg;
  cfg.rows = o.rows;
  cfg.cols = o.cols;
  cfg.coupling_max = o.coupling;
  cfg.field_range = o.field;
  cfg.attractive = !o.mixed;
  cfg.seed = require_seed(o.seed);
  if (o.rows < 1 || o.cols < 1) throw InvalidInput("grid must be at least 1x1");
  if (o.coupling < 0 || o.field < 0) throw InvalidInput("ranges must be >= 0");
  Output out(o.out);
  out.stream() << model_to_string(generate_spin_glass(cfg)) << '\n';
  return kExitOk;
}

// --- map / exact -----------------------------------------------------------

struct MapOpts {
  std::string model;
  std::string strategy = "auto";
  std::uint64_t cap = kDefaultStateCap;
};

int run_map(const MapOpts& o) {
  const PairwiseModel m = load_model(o.model);
  const MapResult r = solve_map(m, solver_from_string(o.strategy), o.cap);
  Json j;
  j["assignment"] = assignment_json(r.argmax);
  j["value"] = number_or_neg_inf(r.value);
  j["solver"] = to_string(r.solver);
  j["ties_possible"] = r.ties_possible;
  std::cout << j.dump() << '\n';
  return kExitOk;
}

struct ExactOpts {
  std::string model;
  std::uint64_t cap = kDefaultStateCap;
  bool marginals = false;
};

int run_exact(const ExactOpts& o) {
  const PairwiseModel m = load_model(o.model);
  Json j;
  j["log_z"] = number_or_neg_inf(log_partition(m, o.cap));
  if (o.marginals) {
    Json rows = Json::array();
    for (const auto& t : vertex_marginals(m, o.cap)) rows.push_back(t.probs);
    j["marginals"] = rows;
  }
  std::cout << j.dump() << '\n';
  return kExitOk;
}

// --- sample ----------------------------------------------------------------

struct SampleOpts {
  std::string model;
  std::string sampler = "approx-unary";
  std::uint64_t draws = 100;
  int m_replicas = 1;
  std::vector<int> anchor;
  std::uint64_t mc_samples = 1000;
  std::string family = "gumbel-mc";
  std::string strategy = "auto";
  std::uint64_t max_restarts = 1'000'000;
  std::uint64_t cap = kDefaultStateCap;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

void write_jsonl(std::ostream& os, Json header, const SampleBatch& b) {
  header["sampler"] = to_string(b.sampler);
  header["draws"] = b.samples.size();
  header["heuristic"] = b.heuristic;
  header["wall_time"] = b.wall_time;
  os << header.dump() << '\n';
  for (const auto& x : b.samples) os << assignment_json(x).dump() << '\n';
}

int run_sample(const SampleOpts& o) {
  const std::uint64_t root = require_seed(o.seed);
  const PairwiseModel m = load_model(o.model);
  const SeedPath seed(root);
  if (o.draws < 1) throw InvalidInput("--draws must be >= 1");
  Json header;
  header["type"] = "header";
  header["seed"] = root;
  SampleBatch batch;
  const auto start = std::chrono::steady_clock::now();
  if (o.sampler == "gumbel-full" || o.sampler == "exact") {
    batch.sampler = o.sampler == "exact" ? SamplerKind::EXACT : SamplerKind::GUMBEL_FULL;
    batch.samples.reserve(o.draws);
    if (batch.sampler == SamplerKind::EXACT) {
      const ExactSampler sampler(m, o.cap);
      for (std::uint64_t k = 0; k < o.draws; ++k) {
        Rng rng = seed.child(k).rng();
        batch.samples.push_back(sampler(rng));
      }
    } else {
      const GumbelMaxSampler sampler(m, o.cap);
      for (std::uint64_t k = 0; k < o.draws; ++k) {
        Rng rng = seed.child(k).rng();
        batch.samples.push_back(sampler(rng));
      }
    }
  } else if (o.sampler == "approx-unary" || o.sampler == "approx-pairwise") {
    const Scheme scheme = o.sampler == "approx-unary" ? Scheme::UNARY : Scheme::PAIRWISE;
    const SolverKind solver = solver_from_string(o.strategy);
    if (o.m_replicas < 1) throw InvalidInput("--m-replicas must be >= 1");
    if (o.m_replicas == 1) {
      batch = approx_map_batch(m, scheme, solver, o.draws, seed, o.workers);
    } else {
      if (o.anchor.size() != 2) throw InvalidInput("--m-replicas > 1 needs --anchor u,v");
      const ExpandedModel ex = expand_tree(m, {o.anchor[0], o.anchor[1]}, o.m_replicas);
      batch.sampler = scheme == Scheme::UNARY ? SamplerKind::APPROX_UNARY
                                              : SamplerKind::APPROX_PAIRWISE;
      for (std::uint64_t k = 0; k < o.draws; ++k) {
        Rng rng = seed.child(k).rng();
        batch.samples.push_back(ex.project(tree_map(perturb_expanded(ex, scheme, rng)).argmax));
      }
      header["m_replicas"] = o.m_replicas;
      header["anchor"] = o.anchor;
    }
  } else if (o.sampler == "unbiased") {
    FamilyKind kind;
    if (o.family == "gumbel-mc")
      kind = FamilyKind::GUMBEL_MC;
    else if (o.family == "exact")
      kind = FamilyKind::EXACT_LSE;
    else
      throw InvalidInput("unknown --family '" + o.family + "'");
    UpperBoundFamily fam = make_bound_family(m, {}, kind, o.mc_samples, seed.child(0),
                                             solver_from_string(o.strategy), o.cap, o.workers);
    batch = unbiased_batch(fam, o.draws, seed.child(1), o.max_restarts);
    header["family"] = to_string(kind);
    header["mc_samples"] = o.mc_samples;
    header["u0"] = fam({});
    header["restarts"] = batch.restarts;
    header["slack_violations"] = batch.slack_violations;
  } else {
    throw InvalidInput("unknown --sampler '" + o.sampler + "'");
  }
  if (batch.wall_time == 0.0)
    batch.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  Output out(o.out);
  write_jsonl(out.stream(), header, batch);
  return kExitOk;
}

// --- baseline --------------------------------------------------------------

struct BaselineOpts {
  std::string model;
  std::string sampler = "gibbs";
  std::uint64_t draws = 1;  // independent chains
  std::uint64_t sweeps = 1000;
  std::optional<std::uint64_t> burn_in;
  std::uint64_t thin = 1;
  std::string init = "random";
  bool random_scan = false;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_baseline(const BaselineOpts& o) {
  const std::uint64_t root = require_seed(o.seed);
  const PairwiseModel m = load_model(o.model);
  SamplerKind kind;
  if (o.sampler == "gibbs")
    kind = SamplerKind::GIBBS;
  else if (o.sampler == "metropolis")
    kind = SamplerKind::METROPOLIS;
  else
    throw InvalidInput("unknown --sampler '" + o.sampler + "'");
  ChainConfig cfg;
  cfg.sweeps = o.sweeps;
  cfg.burn_in = o.burn_in;
  cfg.thin = o.thin;
  cfg.random_scan = o.random_scan;
  if (o.init == "random")
    cfg.init = ChainInit::RANDOM;
  else if (o.init == "map")
    cfg.init = ChainInit::MAP;
  else
    throw InvalidInput("unknown --init '" + o.init + "'");
  if (o.draws < 1) throw InvalidInput("--draws must be >= 1");
  const SampleBatch batch = run_chains(m, kind, cfg, o.draws, SeedPath(root), o.workers);
  Json header;
  header["type"] = "header";
  header["seed"] = root;
  header["chains"] = o.draws;
  header["sweeps"] = cfg.sweeps;
  header["burn_in"] = cfg.effective_burn_in();
  header["thin"] = cfg.thin;
  Output out(o.out);
  write_jsonl(out.stream(), header, batch);
  return kExitOk;
}

// --- bounds ----------------------------------------------------------------

struct BoundsOpts {
  std::string model;
  std::string bound = "all";
  int rows = 3;
  int cols = 3;
  double field = 1.0;
  std::vector<double> couplings{0.5, 1.0, 2.0, 3.0};
  std::vector<std::string> seeds{"0-9"};
  std::uint64_t mc_samples = 1000;
  int replicas = 50;
  std::string strategy = "auto";
  bool no_exact = false;
  std::uint64_t cap = kDefaultStateCap;
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

Json estimate_json(const BoundEstimate& b) {
  Json j;
  j["value"] = b.value;
  j["kind"] = to_string(b.kind);
  j["samples"] = b.samples;
  if (b.std_error) j["std_error"] = *b.std_error;
  if (b.analytic_std_error) j["analytic_std_error"] = *b.analytic_std_error;
  if (b.epsilon_slack) j["epsilon_slack"] = *b.epsilon_slack;
  j["seed"] = b.seed.to_string();
  return j;
}

int run_bounds(const BoundsOpts& o) {
  const std::uint64_t root = require_seed(o.seed);
  BoundsReportConfig cfg;
  cfg.rows = o.rows;
  cfg.cols = o.cols;
  cfg.field_range = o.field;
  cfg.couplings = o.couplings;
  cfg.seeds = parse_seed_list(o.seeds);
  cfg.mc_samples = o.mc_samples;
  cfg.replicas = o.replicas;
  cfg.root_seed = root;
  cfg.solver = solver_from_string(o.strategy);
  cfg.exact = !o.no_exact;
  cfg.cap = o.cap;
  cfg.workers = o.workers;
  if (o.bound == "upper")
    cfg.which = {true, false, false};
  else if (o.bound == "lower-expected")
    cfg.which = {false, true, false};
  else if (o.bound == "lower-probable")
    cfg.which = {false, false, true};
  else if (o.bound != "all")
    throw InvalidInput("unknown --bound '" + o.bound + "'");
  if (cfg.mc_samples < 1 || cfg.replicas < 1)
    throw InvalidInput("--mc-samples and --replicas must be >= 1");
  Output out(o.out);
  if (!o.model.empty()) {
    const BoundsRow r = compute_bounds(load_model(o.model), cfg, SeedPath(root));
    Json j;
    j["seed"] = root;
    if (r.exact_logz) j["exact_logz"] = number_or_neg_inf(*r.exact_logz);
    if (r.upper) j["upper"] = estimate_json(*r.upper);
    if (r.lower_expected) j["lower_expected"] = estimate_json(*r.lower_expected);
    if (r.lower_probable) j["lower_probable"] = estimate_json(*r.lower_probable);
    if (r.accept_proxy) j["accept_proxy"] = *r.accept_proxy;
    out.stream() << j.dump() << '\n';
    return kExitOk;
  }
  if (o.rows < 1 || o.cols < 1) throw InvalidInput("grid must be at least 1x1");
  if (cfg.couplings.empty() || cfg.seeds.empty())
    throw InvalidInput("empty --coupling-grid or --seeds");
  out.stream() << bounds_csv(bounds_report(cfg));
  return kExitOk;
}

// --- experiment ------------------------------------------------------------

struct ExperimentOpts {
  std::string kind;
  std::string from_sidecar;
  int rows = 3;
  int cols = 3;
  std::vector<int> grid_sides;
  double field = 1.0;
  std::vector<double> couplings{0.5, 1.0, 2.0, 3.0};
  std::vector<std::string> seeds{"0-9"};
  std::uint64_t mc_samples = 1000;
  int replicas = 50;
  std::uint64_t draws = 1000;
  std::uint64_t sweeps = 10000;
  std::string strategy = "auto";
  unsigned workers = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_experiment_cmd(const ExperimentOpts& o) {
  ExperimentSpec spec;
  if (!o.from_sidecar.empty()) {
    std::ifstream in(o.from_sidecar, std::ios::binary);
    if (!in) throw InvalidInput("cannot read '" + o.from_sidecar + "'");
    Json side;
    try {
      side = Json::parse(in);
    } catch (const Json::exception& e) {
      throw InvalidInput(std::string("sidecar: ") + e.what());
    }
    if (!side.is_object() || !side.contains("config"))
      throw InvalidInput("sidecar has no config object");
    spec = spec_from_json(side["config"]);
    if (!o.out.empty()) spec.output = o.out;
  } else {
    if (o.kind.empty()) throw InvalidInput("--kind or --from-sidecar is required");
    spec.experiment = experiment_from_string(o.kind);
    spec.rows = o.rows;
    spec.cols = o.cols;
    spec.grid_sides = o.grid_sides;
    spec.field_range = o.field;
    spec.couplings = o.couplings;
    spec.seeds = parse_seed_list(o.seeds);
    spec.mc_samples = o.mc_samples;
    spec.replicas = o.replicas;
    spec.draws = o.draws;
    spec.sweeps = o.sweeps;
    spec.root_seed = require_seed(o.seed);
    spec.solver = solver_from_string(o.strategy);
    spec.workers = o.workers;
    spec.output = o.out;
  }
  if (spec.output.empty()) throw InvalidInput("--out is required");
  const ExperimentOutput r = run_experiment(spec);
  Json j;
  j["csv"] = spec.output;
  j["sidecar"] = sidecar_path(spec.output);
  j["rows"] = r.sidecar["rows"];
  std::cout << j.dump() << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Perturb-and-MAP sampling and log-partition bounds"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "pmap 0.1.0");

  GenOpts gen;
  auto* g = app.add_subcommand("gen-model", "Generate a grid spin glass as model JSON");
  g->add_option("--rows", gen.rows);
  g->add_option("--cols", gen.cols);
  g->add_option("--coupling", gen.coupling, "couplings drawn from [0,c] ([-c,c] with --mixed)");
  g->add_option("--field", gen.field, "fields drawn from [-f,f]");
  g->add_flag("--mixed", gen.mixed, "mixed-sign couplings");
  g->add_option("--seed", gen.seed);
  g->add_option("--out", gen.out);

  MapOpts mp;
  auto* mc = app.add_subcommand("map", "MAP assignment and value");
  mc->add_option("--model", mp.model, "model JSON path, - for stdin")->required();
  mc->add_option("--strategy", mp.strategy, "auto|exhaustive|tree|graphcut");
  mc->add_option("--cap", mp.cap, "enumeration state cap");

  ExactOpts ex;
  auto* ec = app.add_subcommand("exact", "log Z (and marginals) by enumeration");
  ec->add_option("--model", ex.model)->required();
  ec->add_option("--cap", ex.cap);
  ec->add_flag("--marginals", ex.marginals);

  SampleOpts sm;
  auto* sc = app.add_subcommand("sample", "Perturb-and-MAP samples as JSONL");
  sc->add_option("--model", sm.model)->required();
  sc->add_option("--sampler", sm.sampler, "gumbel-full|approx-unary|approx-pairwise|unbiased|exact");
  sc->add_option("--draws", sm.draws);
  sc->add_option("--m-replicas", sm.m_replicas, "subtree copies for approximate samplers on forests");
  sc->add_option("--anchor", sm.anchor, "anchor edge u,v for --m-replicas")->delimiter(',');
  sc->add_option("--mc-samples", sm.mc_samples, "Monte Carlo draws per bound (unbiased)");
  sc->add_option("--family", sm.family, "gumbel-mc|exact (unbiased)");
  sc->add_option("--strategy", sm.strategy);
  sc->add_option("--max-restarts", sm.max_restarts);
  sc->add_option("--cap", sm.cap);
  sc->add_option("--workers", sm.workers);
  sc->add_option("--seed", sm.seed);
  sc->add_option("--out", sm.out);

  BaselineOpts bl;
  auto* bc = app.add_subcommand("baseline", "MCMC reference samples as JSONL");
  bc->add_option("--model", bl.model)->required();
  bc->add_option("--sampler", bl.sampler, "gibbs|metropolis");
  bc->add_option("--draws", bl.draws, "independent chains");
  bc->add_option("--sweeps", bl.sweeps);
  bc->add_option("--burn-in", bl.burn_in);
  bc->add_option("--thin", bl.thin);
  bc->add_option("--init", bl.init, "random|map");
  bc->add_flag("--random-scan", bl.random_scan);
  bc->add_option("--workers", bl.workers);
  bc->add_option("--seed", bl.seed);
  bc->add_option("--out", bl.out);

  BoundsOpts bd;
  auto* dc = app.add_subcommand("bounds", "Upper and lower bounds on log Z");
  dc->add_option("--model", bd.model, "single model (JSON output) instead of a grid sweep");
  dc->add_option("--bound", bd.bound, "upper|lower-expected|lower-probable|all");
  dc->add_option("--rows", bd.rows);
  dc->add_option("--cols", bd.cols);
  dc->add_option("--field", bd.field);
  dc->add_option("--coupling-grid", bd.couplings)->delimiter(',');
  dc->add_option("--seeds", bd.seeds, "model seeds, e.g. 0-9 or 1,3,5")->delimiter(',');
  dc->add_option("--mc-samples", bd.mc_samples);
  dc->add_option("--replicas", bd.replicas);
  dc->add_option("--strategy", bd.strategy);
  dc->add_flag("--no-exact", bd.no_exact, "skip the exact_logz column");
  dc->add_option("--cap", bd.cap);
  dc->add_option("--workers", bd.workers);
  dc->add_option("--seed", bd.seed);
  dc->add_option("--out", bd.out);

  ExperimentOpts xp;
  auto* xc = app.add_subcommand("experiment", "Spin-glass experiments: CSV plus JSON sidecar");
  xc->add_option("--kind", xp.kind, "lower-bounds|marginal-error|acceptance");
  xc->add_option("--from-sidecar", xp.from_sidecar, "rerun the config stored in a sidecar");
  xc->add_option("--rows", xp.rows);
  xc->add_option("--cols", xp.cols);
  xc->add_option("--grid-sides", xp.grid_sides, "square grid sides (acceptance)")->delimiter(',');
  xc->add_option("--field", xp.field);
  xc->add_option("--coupling-grid", xp.couplings)->delimiter(',');
  xc->add_option("--seeds", xp.seeds)->delimiter(',');
  xc->add_option("--mc-samples", xp.mc_samples);
  xc->add_option("--replicas", xp.replicas);
  xc->add_option("--draws", xp.draws);
  xc->add_option("--sweeps", xp.sweeps);
  xc->add_option("--strategy", xp.strategy);
  xc->add_option("--workers", xp.workers);
  xc->add_option("--seed", xp.seed);
  xc->add_option("--out", xp.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", kExitInvalid, e.what());
  }

  try {
    if (*g) return run_gen(gen);
    if (*mc) return run_map(mp);
    if (*ec) return run_exact(ex);
    if (*sc) return run_sample(sm);
    if (*bc) return run_baseline(bl);
    if (*dc) return run_bounds(bd);
    if (*xc) return run_experiment_cmd(xp);
  } catch (const StateSpaceTooLarge& e) {
    return report_error("state_space_too_large", kExitCap, e.what());
  } catch (const RestartsExhausted& e) {
    return report_error("restarts_exhausted", kExitCap, e.what());
  } catch (const InvalidInput& e) {
    return report_error("invalid_input", kExitInvalid, e.what());
  } catch (const Infeasible& e) {
    return report_error("infeasible", kExitInvalid, e.what());
  } catch (const NotAttractive& e) {
    return report_error("not_attractive", kExitInvalid, e.what());
  } catch (const CycleDetected& e) {
    return report_error("cycle_detected", kExitInvalid, e.what());
  } catch (const NumericalError& e) {
    return report_error("numerical_error", kExitInvalid, e.what());
  } catch (const std::exception& e) {
    return report_error("internal", kExitInternal, e.what());
  }
  return kExitInternal;
}
