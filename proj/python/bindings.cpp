#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "pmap/baselines.hpp"
#include "pmap/bounds.hpp"
#include "pmap/errors.hpp"
#include "pmap/exact.hpp"
#include "pmap/experiment.hpp"
#include "pmap/map_solvers.hpp"
#include "pmap/model_io.hpp"
#include "pmap/samplers.hpp"

namespace py = pybind11;
using namespace pmap;

namespace {

py::dict estimate_dict(const BoundEstimate& b) {
  py::dict d;
  d["value"] = b.value;
  d["kind"] = to_string(b.kind);
  d["samples"] = b.samples;
  d["std_error"] = b.std_error ? py::cast(*b.std_error) : py::none();
  d["analytic_std_error"] = b.analytic_std_error ? py::cast(*b.analytic_std_error) : py::none();
  d["seed"] = b.seed.to_string();
  return d;
}

Scheme scheme_from(const std::string& s) {
  if (s == "unary") return Scheme::UNARY;
  if (s == "pairwise") return Scheme::PAIRWISE;
  throw InvalidInput("scheme must be 'unary' or 'pairwise'");
}

}  // namespace

PYBIND11_MODULE(_pmap, m) {
  m.doc() = "Perturb-and-MAP sampling and log-partition bounds";

  // later registrations are tried first
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidInput>(m, "InvalidInput", PyExc_ValueError);
  py::register_exception<StateSpaceTooLarge>(m, "StateSpaceTooLarge", PyExc_MemoryError);

  py::class_<PairwiseModel>(m, "Model")
      .def_static("from_json", &model_from_string, py::arg("text"))
      .def("to_json", &model_to_string)
      .def_property_readonly("num_vertices", &PairwiseModel::num_vertices)
      .def_property_readonly("num_edges", &PairwiseModel::num_edges)
      .def_property_readonly("domain_sizes", &PairwiseModel::domain_sizes)
      .def("energy", [](const PairwiseModel& self, const Assignment& x) {
        check_assignment(self, x);
        return energy(self, x);
      })
      .def("is_attractive", &is_attractive)
      .def("is_forest", &is_forest)
      .def("__repr__", [](const PairwiseModel& self) {
        return "<pmap.Model vertices=" + std::to_string(self.num_vertices()) +
               " edges=" + std::to_string(self.num_edges()) + ">";
      });

  m.def(
      "spin_glass",
      [](int rows, int cols, double coupling, std::uint64_t seed, double field, bool attractive) {
        SpinGlassConfig cfg;
        cfg.rows = rows;
        cfg.cols = cols;
        cfg.coupling_max = coupling;
        cfg.seed = seed;
        cfg.field_range = field;
        cfg.attractive = attractive;
        return generate_spin_glass(cfg);
      },
      py::arg("rows"), py::arg("cols"), py::arg("coupling"), py::arg("seed"),
      py::arg("field") = 1.0, py::arg("attractive") = true);

  m.def("log_partition", [](const PairwiseModel& model) { return log_partition(model); });
  m.def("joint_distribution", [](const PairwiseModel& model) { return joint_distribution(model); });
  m.def("vertex_marginals", [](const PairwiseModel& model) {
    std::vector<std::vector<double>> out;
    for (const auto& t : vertex_marginals(model)) out.push_back(t.probs);
    return out;
  });
  m.def("assignment_index", [](const PairwiseModel& model, const Assignment& x) {
    return assignment_index(model.domain_sizes(), x);
  });

  m.def(
      "solve_map",
      [](const PairwiseModel& model, const std::string& strategy) {
        const MapResult r = solve_map(model, solver_from_string(strategy));
        py::dict d;
        d["assignment"] = r.argmax;
        d["value"] = r.value;
        d["solver"] = to_string(r.solver);
        d["ties_possible"] = r.ties_possible;
        return d;
      },
      py::arg("model"), py::arg("strategy") = "auto");

  m.def(
      "gumbel_max_samples",
      [](const PairwiseModel& model, std::uint64_t draws, std::uint64_t seed) {
        const GumbelMaxSampler sampler(model);
        std::vector<Assignment> out;
        for (std::uint64_t k = 0; k < draws; ++k) {
          Rng rng = SeedPath(seed).child(k).rng();
          out.push_back(sampler(rng));
        }
        return out;
      },
      py::arg("model"), py::arg("draws"), py::arg("seed"));

  m.def(
      "approx_samples",
      [](const PairwiseModel& model, std::uint64_t draws, std::uint64_t seed,
         const std::string& scheme, const std::string& strategy) {
        return approx_map_batch(model, scheme_from(scheme), solver_from_string(strategy), draws,
                                SeedPath(seed))
            .samples;
      },
      py::arg("model"), py::arg("draws"), py::arg("seed"), py::arg("scheme") = "unary",
      py::arg("strategy") = "auto");

  m.def(
      "unbiased_samples",
      [](const PairwiseModel& model, std::uint64_t draws, std::uint64_t seed,
         std::uint64_t mc_samples, bool exact_family) {
        UpperBoundFamily fam =
            make_bound_family(model, {}, exact_family ? FamilyKind::EXACT_LSE : FamilyKind::GUMBEL_MC,
                              mc_samples, SeedPath(seed).child(0));
        const SampleBatch b = unbiased_batch(fam, draws, SeedPath(seed).child(1));
        py::dict d;
        d["samples"] = b.samples;
        d["restarts"] = b.restarts;
        d["slack_violations"] = b.slack_violations;
        d["u0"] = fam({});
        return d;
      },
      py::arg("model"), py::arg("draws"), py::arg("seed"), py::arg("mc_samples") = 1000,
      py::arg("exact_family") = false);

  m.def(
      "gibbs_samples",
      [](const PairwiseModel& model, std::uint64_t sweeps, std::uint64_t seed) {
        ChainConfig cfg;
        cfg.sweeps = sweeps;
        Rng rng = SeedPath(seed).rng();
        return gibbs_chain(model, cfg, rng).samples;
      },
      py::arg("model"), py::arg("sweeps"), py::arg("seed"));

  m.def(
      "upper_bound",
      [](const PairwiseModel& model, std::uint64_t mc_samples, std::uint64_t seed) {
        return estimate_dict(upper_bound(model, mc_samples, SeedPath(seed)));
      },
      py::arg("model"), py::arg("mc_samples"), py::arg("seed"));
  m.def(
      "lower_bound_expected",
      [](const PairwiseModel& model, std::uint64_t mc_samples, std::uint64_t seed) {
        return estimate_dict(
            lower_bound_expected(model, singleton_subsets(model), mc_samples, SeedPath(seed)));
      },
      py::arg("model"), py::arg("mc_samples"), py::arg("seed"));
  m.def(
      "lower_bound_probable",
      [](const PairwiseModel& model, int replicas, std::uint64_t seed) {
        return estimate_dict(lower_bound_probable(model, replicas, SeedPath(seed)));
      },
      py::arg("model"), py::arg("replicas"), py::arg("seed"));

  m.def(
      "run_experiment",
      [](const std::string& spec_json) {
        const ExperimentOutput out = run_experiment(spec_from_json(Json::parse(spec_json)));
        return py::make_tuple(out.csv, out.sidecar.dump());
      },
      py::arg("spec_json"),
      "Runs an experiment from a JSON spec; returns (csv, sidecar_json).");
}
