// Command-line front end: each subcommand reads one JSON config, runs the
// corresponding computation, and writes <out>/<command>.json plus a CSV
// convergence table.  Outputs carry the tool version and the canonical
// config hash, never timestamps, and are byte-identical for identical
// config and seed regardless of --threads.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "subpress/config.hpp"
#include "subpress/ext_real.hpp"
#include "subpress/measures.hpp"
#include "subpress/pressure.hpp"
#include "subpress/variational.hpp"
#include "subpress/verify.hpp"

namespace {

using Json = nlohmann::ordered_json;
using namespace subpress;

#ifndef SUBPRESS_VERSION
#define SUBPRESS_VERSION "0.0.0"
#endif

// JSON has no infinities; they travel as strings.
Json num(double x) {
  if (is_neg_inf(x)) return "-inf";
  if (std::isinf(x)) return "inf";
  return x;
}

Json num_array(const std::vector<double>& xs) {
  Json arr = Json::array();
  for (double x : xs) arr.push_back(num(x));
  return arr;
}

std::string csv_num(double x) {
  if (is_neg_inf(x)) return "-inf";
  if (std::isinf(x)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    out += c;
  }
  out += "\"";
  return out;
}

struct Invocation {
  ExperimentConfig cfg;
  std::string hash;
  std::string command;
  std::filesystem::path out_dir;
  std::string format;  // json | csv | both
  int threads = 1;
};

Json header(const Invocation& inv) {
  Json root;
  root["tool"] = "subpress";
  root["version"] = SUBPRESS_VERSION;
  root["command"] = inv.command;
  root["config_hash"] = inv.hash;
  return root;
}

std::string csv_header(const Invocation& inv) {
  return "# tool=subpress version=" SUBPRESS_VERSION " command=" + inv.command +
         " config_hash=" + inv.hash + "\n";
}

void write_outputs(const Invocation& inv, const Json& result, const std::string& csv) {
  std::filesystem::create_directories(inv.out_dir);
  if (inv.format != "csv") {
    std::ofstream out(inv.out_dir / (inv.command + ".json"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output JSON");
    out << result.dump(2) << "\n";
  }
  if (inv.format != "json") {
    std::ofstream out(inv.out_dir / (inv.command + ".csv"), std::ios::binary);
    if (!out) throw std::runtime_error("cannot write output CSV");
    out << csv;
  }
}

const RandomMarkovMeasure& require_measure(const ExperimentConfig& cfg) {
  if (!cfg.measure)
    throw ConfigError("$.measure", "this command needs a measure block (kernels or sample_seed)");
  return *cfg.measure;
}

void pressure_json_body(Json& root, const PressureEstimate& est) {
  root["depth"] = est.depth;
  root["schedule"] = est.schedule;
  root["a_values"] = num_array(est.a_values);
  root["rates"] = num_array(est.rates);
  root["reported"] = num(est.reported);
  root["upper_envelope"] = num(est.upper_envelope);
}

std::string pressure_csv_body(const PressureEstimate& est) {
  std::string csv = "n,a_n,rate\n";
  for (std::size_t i = 0; i < est.schedule.size(); ++i)
    csv += std::to_string(est.schedule[i]) + "," + csv_num(est.a_values[i]) + "," +
           csv_num(est.rates[i]) + "\n";
  return csv;
}

int cmd_pressure(const Invocation& inv) {
  const PressureEstimate est = estimate_pressure(*inv.cfg.system, *inv.cfg.potential,
                                                 inv.cfg.depth, inv.cfg.pressure_schedule,
                                                 inv.threads);
  Json root = header(inv);
  pressure_json_body(root, est);
  write_outputs(inv, root, csv_header(inv) + pressure_csv_body(est));
  return 0;
}

int cmd_entropy(const Invocation& inv) {
  const RandomMarkovMeasure& mu = require_measure(inv.cfg);
  const double h = fiber_entropy(mu);
  const double h1 = mu.initial_entropy();
  Json root = header(inv);
  root["fiber_entropy"] = num(h);
  root["initial_entropy"] = num(h1);
  root["schedule"] = inv.cfg.entropy_schedule;
  Json hbar = Json::array();
  Json rates = Json::array();
  std::string csv = csv_header(inv) + "n,hbar_n,rate\n";
  for (int n : inv.cfg.entropy_schedule) {
    const double rate = entropy_rate_at(mu, n);
    const double total = rate * n;
    hbar.push_back(num(total));
    rates.push_back(num(rate));
    csv += std::to_string(n) + "," + csv_num(total) + "," + csv_num(rate) + "\n";
  }
  root["hbar"] = std::move(hbar);
  root["rates"] = std::move(rates);
  write_outputs(inv, root, csv);
  return 0;
}

int cmd_phistar(const Invocation& inv) {
  const RandomMarkovMeasure& mu = require_measure(inv.cfg);
  PhiStarOptions opts;
  opts.horizon = inv.cfg.phi_horizon;
  opts.exact_budget = inv.cfg.budget.exact_phi;
  opts.samples = inv.cfg.budget.samples;
  opts.seed = inv.cfg.optimizer.seed;
  opts.threads = inv.threads;
  const PhiStarEstimate est = phi_star(mu, *inv.cfg.potential, opts);
  Json root = header(inv);
  root["seed"] = inv.cfg.optimizer.seed;
  root["value"] = num(est.value);
  root["horizon"] = est.horizon;
  root["exact"] = est.exact;
  root["std_error"] = num(est.std_error);
  root["per_fiber"] = num_array(est.per_fiber);
  std::string csv = csv_header(inv) + "fiber,weight,integral\n";
  for (std::size_t f = 0; f < est.per_fiber.size(); ++f)
    csv += std::to_string(f) + "," + csv_num(inv.cfg.system->base().weight(static_cast<int>(f))) +
           "," + csv_num(est.per_fiber[f]) + "\n";
  write_outputs(inv, root, csv);
  return 0;
}

int cmd_varprinciple(const Invocation& inv) {
  OptimizerOptions opts = inv.cfg.optimizer;
  opts.threads = inv.threads;
  const VariationalReport report = search_variational(
      inv.cfg.system, *inv.cfg.potential, inv.cfg.depth, inv.cfg.pressure_schedule, opts);
  Json root = header(inv);
  root["seed"] = opts.seed;
  root["reported"] = num(report.reported);
  root["envelope"] = num(report.envelope);
  root["best_objective"] = num(report.best_objective);
  root["gap"] = num(report.gap);
  root["allowance"] = num(report.allowance);
  root["neg_inf_regime"] = report.neg_inf_regime;
  root["best_start"] = report.best_start;
  root["evals"] = report.evals;
  Json best;
  Json initials = Json::array();
  Json kernels = Json::array();
  const int m = inv.cfg.system->base().size();
  const int a = inv.cfg.system->alphabet();
  for (int f = 0; f < m; ++f) {
    initials.push_back(num_array(report.best.initial(f)));
    Json rows = Json::array();
    for (int s = 0; s < a; ++s) {
      Json row = Json::array();
      for (int j = 0; j < a; ++j) row.push_back(num(report.best.kernel(f)(s, j)));
      rows.push_back(std::move(row));
    }
    kernels.push_back(std::move(rows));
  }
  best["initials"] = std::move(initials);
  best["kernels"] = std::move(kernels);
  root["best"] = std::move(best);
  std::string csv = csv_header(inv) + "iteration,objective,diameter\n";
  for (const TraceRow& row : report.trace)
    csv += std::to_string(row.iteration) + "," + csv_num(row.objective) + "," +
           csv_num(row.diameter) + "\n";
  write_outputs(inv, root, csv);
  return 0;
}

int cmd_verify(const Invocation& inv, double tolerance) {
  const VerifyReport report = run_verify(inv.cfg, tolerance, inv.threads);
  Json root = header(inv);
  root["seed"] = inv.cfg.optimizer.seed;
  root["tolerance"] = tolerance;
  root["all_pass"] = report.all_pass;
  Json checks = Json::array();
  std::string csv = csv_header(inv) + "check,pass,skipped,slack,detail\n";
  for (const CheckResult& c : report.checks) {
    Json entry;
    entry["name"] = c.name;
    entry["pass"] = c.pass;
    entry["skipped"] = c.skipped;
    entry["slack"] = num(c.slack);
    entry["detail"] = c.detail;
    checks.push_back(std::move(entry));
    csv += c.name + "," + (c.pass ? "1" : "0") + "," + (c.skipped ? "1" : "0") + "," +
           csv_num(c.slack) + "," + csv_quote(c.detail) + "\n";
  }
  root["checks"] = std::move(checks);
  write_outputs(inv, root, csv);
  return report.all_pass ? 0 : 1;
}

int cmd_power(const Invocation& inv) {
  const int k = inv.cfg.power_k;
  std::vector<int> halved;
  for (int n : inv.cfg.pressure_schedule)
    if (n % k == 0) halved.push_back(n / k);
  if (halved.empty())
    throw ConfigError("$.schedules.pressure",
                      "no scheduled horizon is divisible by power k=" + std::to_string(k));
  const PressureEstimate est = pressure_of_power(*inv.cfg.system, inv.cfg.potential, k,
                                                 inv.cfg.depth, halved, inv.threads);
  Json root = header(inv);
  root["k"] = k;
  pressure_json_body(root, est);
  write_outputs(inv, root, csv_header(inv) + pressure_csv_body(est));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pressure, entropy, and variational diagnostics for random subshifts"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir;
  std::string format = "both";
  std::uint64_t seed = 0;
  int threads = 1;
  double tolerance = 1e-9;

  app.add_option("--config", config_path, "experiment config JSON")->required();
  app.add_option("--out", out_dir, "output directory")->required();
  auto* seed_opt = app.add_option("--seed", seed, "override the configured seed");
  app.add_option("--threads", threads, "worker threads for fan-out stages");
  app.add_option("--format", format, "json, csv, or both")
      ->check(CLI::IsMember({"json", "csv", "both"}));
  auto* tol_opt = app.add_option("--tolerance", tolerance, "verify slack tolerance");

  const char* commands[] = {"pressure", "entropy", "phistar", "varprinciple", "verify", "power"};
  const char* blurbs[] = {
      "separated-set pressure over the horizon schedule",
      "cylinder entropy table for the configured measure",
      "asymptotic potential average of the configured measure",
      "variational search against the pressure envelope",
      "invariant battery; nonzero exit on violation",
      "pressure of the k-fold power system on the matched schedule",
  };
  for (std::size_t i = 0; i < 6; ++i) app.add_subcommand(commands[i], blurbs[i]);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  if (tol_opt->count() > 0 && command != "verify") {
    std::cerr << "--tolerance only applies to verify\n";
    return 2;
  }
  if (threads < 1) {
    std::cerr << "--threads must be at least 1\n";
    return 2;
  }
  if (!(tolerance > 0.0)) {
    std::cerr << "--tolerance must be positive\n";
    return 2;
  }

  try {
    Invocation inv{load_config(config_path), "", command, out_dir, format, threads};
    if (seed_opt->count() > 0) inv.cfg.optimizer.seed = seed;
    inv.hash = config_hash(inv.cfg);

    if (command == "pressure") return cmd_pressure(inv);
    if (command == "entropy") return cmd_entropy(inv);
    if (command == "phistar") return cmd_phistar(inv);
    if (command == "varprinciple") return cmd_varprinciple(inv);
    if (command == "verify") return cmd_verify(inv, tolerance);
    return cmd_power(inv);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ResourceError& e) {
    std::cerr << "resource budget exceeded: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}
