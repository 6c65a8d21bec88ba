// Python surface for the subpress core.  Mirrors the CLI subcommands with
// in-process return values: config loading and hashing, pressure schedules,
// the power system, measure functionals, the variational search, and the
// invariant battery.  Heavy entry points release the GIL; the underlying
// library never calls back into python.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <vector>

#include <subpress/config.hpp>
#include <subpress/measures.hpp>
#include <subpress/potentials.hpp>
#include <subpress/pressure.hpp>
#include <subpress/system.hpp>
#include <subpress/variational.hpp>
#include <subpress/verify.hpp>

#ifndef SUBPRESS_VERSION
#define SUBPRESS_VERSION "0.0.0"
#endif

namespace py = pybind11;
using namespace subpress;

namespace {

std::vector<std::vector<double>> mat_rows(const Mat& m) {
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(m.rows()));
  for (int i = 0; i < m.rows(); ++i) {
    rows[static_cast<std::size_t>(i)].resize(static_cast<std::size_t>(m.cols()));
    for (int j = 0; j < m.cols(); ++j)
      rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  return rows;
}

const RandomMarkovMeasure& require_measure(const ExperimentConfig& cfg) {
  if (!cfg.measure)
    throw ConfigError("$.measure", "this operation requires a measure; add kernels or sample_seed");
  return *cfg.measure;
}

PhiStarOptions phi_options(const ExperimentConfig& cfg, std::optional<std::uint64_t> seed,
                           int threads) {
  PhiStarOptions pho;
  pho.horizon = cfg.phi_horizon;
  pho.exact_budget = cfg.budget.exact_phi;
  pho.samples = cfg.budget.samples;
  pho.seed = seed.value_or(cfg.optimizer.seed);
  pho.threads = threads;
  return pho;
}

std::vector<int> halved_schedule(const ExperimentConfig& cfg) {
  std::vector<int> halved;
  for (int n : cfg.pressure_schedule)
    if (n % cfg.power_k == 0) halved.push_back(n / cfg.power_k);
  if (halved.empty())
    throw ConfigError("$.schedules.pressure",
                      "no scheduled horizon is divisible by power k=" + std::to_string(cfg.power_k));
  return halved;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Pressure, entropy, and variational diagnostics for random subshifts of finite type";
  m.attr("__version__") = SUBPRESS_VERSION;

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  py::class_<ExperimentConfig>(m, "Experiment")
      .def_property_readonly("hash", &config_hash)
      .def_property_readonly("canonical", &canonical_config)
      .def_property_readonly("depth", [](const ExperimentConfig& c) { return c.depth; })
      .def_property_readonly("metric_lambda", [](const ExperimentConfig& c) { return c.lambda; })
      .def_property_readonly("phi_horizon", [](const ExperimentConfig& c) { return c.phi_horizon; })
      .def_property_readonly("pressure_schedule",
                             [](const ExperimentConfig& c) { return c.pressure_schedule; })
      .def_property_readonly("entropy_schedule",
                             [](const ExperimentConfig& c) { return c.entropy_schedule; })
      .def_property_readonly("power_k", [](const ExperimentConfig& c) { return c.power_k; })
      .def_property_readonly("fibers",
                             [](const ExperimentConfig& c) { return c.system->base().size(); })
      .def_property_readonly("alphabet",
                             [](const ExperimentConfig& c) { return c.system->alphabet(); })
      .def_property_readonly("measure",
                             [](const ExperimentConfig& c) { return c.measure; })
      .def("__repr__", [](const ExperimentConfig& c) {
        return "<subpress.Experiment hash=" + config_hash(c) + ">";
      });

  py::class_<RandomMarkovMeasure>(m, "Measure")
      .def_property_readonly("initials",
                             [](const RandomMarkovMeasure& mu) {
                               std::vector<std::vector<double>> out;
                               for (int f = 0; f < mu.system().base().size(); ++f)
                                 out.push_back(mu.initial(f));
                               return out;
                             })
      .def_property_readonly("kernels",
                             [](const RandomMarkovMeasure& mu) {
                               std::vector<std::vector<std::vector<double>>> out;
                               for (int f = 0; f < mu.system().base().size(); ++f)
                                 out.push_back(mat_rows(mu.kernel(f)));
                               return out;
                             })
      .def_property_readonly("initial_entropy",
                             [](const RandomMarkovMeasure& mu) { return mu.initial_entropy(); });

  py::class_<PressureEstimate>(m, "PressureEstimate")
      .def_readonly("schedule", &PressureEstimate::schedule)
      .def_readonly("a_values", &PressureEstimate::a_values)
      .def_readonly("rates", &PressureEstimate::rates)
      .def_readonly("reported", &PressureEstimate::reported)
      .def_readonly("upper_envelope", &PressureEstimate::upper_envelope)
      .def_readonly("depth", &PressureEstimate::depth);

  py::class_<PhiStarEstimate>(m, "PhiStarEstimate")
      .def_readonly("value", &PhiStarEstimate::value)
      .def_readonly("horizon", &PhiStarEstimate::horizon)
      .def_readonly("exact", &PhiStarEstimate::exact)
      .def_readonly("std_error", &PhiStarEstimate::std_error)
      .def_readonly("per_fiber", &PhiStarEstimate::per_fiber);

  py::class_<TraceRow>(m, "TraceRow")
      .def_readonly("iteration", &TraceRow::iteration)
      .def_readonly("objective", &TraceRow::objective)
      .def_readonly("diameter", &TraceRow::diameter);

  py::class_<VariationalReport>(m, "VariationalReport")
      .def_readonly("best", &VariationalReport::best)
      .def_readonly("best_objective", &VariationalReport::best_objective)
      .def_readonly("reported", &VariationalReport::reported)
      .def_readonly("envelope", &VariationalReport::envelope)
      .def_readonly("gap", &VariationalReport::gap)
      .def_readonly("allowance", &VariationalReport::allowance)
      .def_readonly("neg_inf_regime", &VariationalReport::neg_inf_regime)
      .def_readonly("best_start", &VariationalReport::best_start)
      .def_readonly("evals", &VariationalReport::evals)
      .def_readonly("trace", &VariationalReport::trace);

  py::class_<CheckResult>(m, "CheckResult")
      .def_readonly("name", &CheckResult::name)
      .def_readonly("passed", &CheckResult::pass)
      .def_readonly("skipped", &CheckResult::skipped)
      .def_readonly("slack", &CheckResult::slack)
      .def_readonly("detail", &CheckResult::detail);

  py::class_<VerifyReport>(m, "VerifyReport")
      .def_readonly("tolerance", &VerifyReport::tolerance)
      .def_readonly("checks", &VerifyReport::checks)
      .def_readonly("all_pass", &VerifyReport::all_pass);

  m.def("load_config", &load_config, py::arg("path"),
        "Parse and validate an experiment config file.");
  m.def("parse_config", &parse_config_text, py::arg("text"),
        "Parse and validate an experiment config from a JSON string.");

  m.def(
      "pressure",
      [](const ExperimentConfig& cfg, int threads) {
        return estimate_pressure(*cfg.system, *cfg.potential, cfg.depth, cfg.pressure_schedule,
                                 threads);
      },
      py::arg("config"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>(),
      "A_n over the pressure schedule with the subadditivity envelope.");

  m.def(
      "power_pressure",
      [](const ExperimentConfig& cfg, int threads) {
        return pressure_of_power(*cfg.system, cfg.potential, cfg.power_k, cfg.depth,
                                 halved_schedule(cfg), threads);
      },
      py::arg("config"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>(),
      "Pressure of the k-block power system on the divisible horizons of the schedule.");

  m.def(
      "fiber_entropy",
      [](const ExperimentConfig& cfg) { return fiber_entropy(require_measure(cfg)); },
      py::arg("config"), "Fiber entropy of the configured measure.");

  m.def(
      "entropy_rate",
      [](const ExperimentConfig& cfg, int n) {
        return entropy_rate_at(require_measure(cfg), n);
      },
      py::arg("config"), py::arg("n"), py::call_guard<py::gil_scoped_release>(),
      "Cylinder entropy rate of the configured measure at horizon n.");

  m.def(
      "phistar",
      [](const ExperimentConfig& cfg, std::optional<std::uint64_t> seed, int threads) {
        return phi_star(require_measure(cfg), *cfg.potential, phi_options(cfg, seed, threads));
      },
      py::arg("config"), py::arg("seed") = std::nullopt, py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>(),
      "Normalized potential integral against the configured measure.");

  m.def(
      "sample_measure",
      [](const ExperimentConfig& cfg, std::uint64_t seed) {
        return sample_markov_measure(cfg.system, seed);
      },
      py::arg("config"), py::arg("seed"), "Seeded random invariant Markov measure.");

  m.def(
      "objective",
      [](const ExperimentConfig& cfg, const RandomMarkovMeasure& mu,
         std::optional<std::uint64_t> seed) {
        return objective_value(mu, *cfg.potential, phi_options(cfg, seed, 1));
      },
      py::arg("config"), py::arg("measure"), py::arg("seed") = std::nullopt,
      py::call_guard<py::gil_scoped_release>(),
      "Entropy plus normalized integral for one measure.");

  m.def(
      "varprinciple",
      [](const ExperimentConfig& cfg, int threads) {
        OptimizerOptions opts = cfg.optimizer;
        opts.threads = threads;
        return search_variational(cfg.system, *cfg.potential, cfg.depth, cfg.pressure_schedule,
                                  opts);
      },
      py::arg("config"), py::arg("threads") = 1, py::call_guard<py::gil_scoped_release>(),
      "Maximize the objective over invariant Markov measures and report the gap.");

  m.def(
      "verify",
      [](const ExperimentConfig& cfg, double tolerance, int threads) {
        return run_verify(cfg, tolerance, threads);
      },
      py::arg("config"), py::arg("tolerance") = 1e-9, py::arg("threads") = 1,
      py::call_guard<py::gil_scoped_release>(),
      "Run the full invariant battery against the configured system.");
}
