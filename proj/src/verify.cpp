#include "subpress/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>

#include "subpress/ext_real.hpp"
#include "subpress/metric.hpp"
#include "subpress/pressure.hpp"
#include "subpress/summation.hpp"
#include "subpress/variational.hpp"

namespace subpress {
namespace {

std::string fmt(double x) {
  if (is_neg_inf(x)) return "-inf";
  if (std::isinf(x)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

// Tracks the worst (smallest-slack) instance of one invariant.
struct Worst {
  double slack = kPosInf;
  std::string detail;
  long long instances = 0;
  long long skipped_instances = 0;

  void note(double s, const std::string& d) {
    ++instances;
    if (s < slack || instances == 1) {
      slack = s;
      detail = d;
    }
  }
  void skip() { ++skipped_instances; }

  CheckResult finish(const std::string& name, const std::string& empty_reason) const {
    CheckResult r;
    r.name = name;
    if (instances == 0) {
      r.skipped = true;
      r.pass = true;
      r.slack = kPosInf;
      r.detail = empty_reason;
      return r;
    }
    r.slack = slack;
    r.pass = slack >= 0.0;
    r.detail = detail;
    if (skipped_instances > 0)
      r.detail += " (" + std::to_string(skipped_instances) + " instances skipped)";
    return r;
  }
};

// log Z_n(omega) for n = 1..N at the configured depth; kNegInf rows allowed.
struct PartitionTable {
  int max_n = 0;
  std::vector<std::vector<double>> logz;  // [fiber][n-1]
};

PartitionTable build_partition_table(const ExperimentConfig& cfg, int max_n) {
  const RandomSFT& sys = *cfg.system;
  PartitionTable table;
  table.max_n = max_n;
  const int m = sys.base().size();
  table.logz.assign(static_cast<std::size_t>(m), {});
  for (int f = 0; f < m; ++f) {
    table.logz[static_cast<std::size_t>(f)].reserve(static_cast<std::size_t>(max_n));
    for (int n = 1; n <= max_n; ++n)
      table.logz[static_cast<std::size_t>(f)].push_back(
          partition_function(sys, *cfg.potential, f, n, cfg.depth, cfg.budget.nodes));
  }
  return table;
}

// Per-fiber cocycle form: log Z_{n+m}(omega) <= log Z_n(omega) + log Z_m(theta^n omega).
CheckResult check_subadditivity(const ExperimentConfig& cfg, const PartitionTable& table,
                                double tol) {
  const RandomSFT& sys = *cfg.system;
  const int m = sys.base().size();
  Worst worst;
  for (int f = 0; f < m; ++f) {
    for (int n = 1; n < table.max_n; ++n) {
      for (int mm = 1; n + mm <= table.max_n; ++mm) {
        const double whole = table.logz[static_cast<std::size_t>(f)][static_cast<std::size_t>(n + mm - 1)];
        const double head = table.logz[static_cast<std::size_t>(f)][static_cast<std::size_t>(n - 1)];
        const int shifted = sys.base().step_n(f, n);
        const double tail = table.logz[static_cast<std::size_t>(shifted)][static_cast<std::size_t>(mm - 1)];
        const std::string where =
            "fiber " + std::to_string(f) + ", n=" + std::to_string(n) + ", m=" + std::to_string(mm);
        if (is_neg_inf(whole)) {
          worst.note(kPosInf, where + ": vacuous, product at -inf");
        } else if (is_neg_inf(head) || is_neg_inf(tail)) {
          worst.note(kNegInf, where + ": factor vanished while the product did not");
        } else {
          worst.note(head + tail - whole + tol, where + ": excess " + fmt(whole - head - tail));
        }
      }
    }
  }
  return worst.finish("subadditivity", "horizon range too short");
}

// Brute-force separated supremum equals the direct partition sum.
CheckResult check_oracle_equivalence(const ExperimentConfig& cfg, double tol) {
  const RandomSFT& sys = *cfg.system;
  const int m = sys.base().size();
  Worst worst;
  for (int f = 0; f < m; ++f) {
    for (int n = 1; n <= 4; ++n) {
      for (int td = min_depth(*cfg.potential, n); n + td <= 4; ++td) {
        if (sys.enumerate_words(f, n + td).size() > 20) {
          worst.skip();
          continue;
        }
        const MetricParams mp = MetricParams::from_depth(cfg.lambda, td);
        const double bf = separated_pressure_bruteforce(sys, *cfg.potential, mp, f, n);
        const double pf = partition_function(sys, *cfg.potential, f, n, td, cfg.budget.nodes);
        const std::string where =
            "fiber " + std::to_string(f) + ", n=" + std::to_string(n) + ", t=" + std::to_string(td);
        if (is_neg_inf(bf) && is_neg_inf(pf)) {
          worst.note(kPosInf, where + ": both sides -inf");
        } else if (is_neg_inf(bf) || is_neg_inf(pf)) {
          worst.note(kNegInf, where + ": only one side vanished");
        } else {
          worst.note(tol - std::abs(bf - pf), where + ": residual " + fmt(std::abs(bf - pf)));
        }
      }
    }
  }
  return worst.finish("oracle_equivalence", "no (n, t) grid points with n+t <= 4");
}

// Averaged sequence A_n obeys the pairwise Fekete inequality.
CheckResult check_fekete(const ExperimentConfig& cfg, int threads, double tol) {
  const int cap = std::min(12, cfg.pressure_schedule.back());
  std::vector<int> sched;
  for (int n = 1; n <= cap; ++n)
    if (min_depth(*cfg.potential, n) <= cfg.depth) sched.push_back(n);
  Worst worst;
  if (sched.size() >= 2) {
    const PressureEstimate est =
        estimate_pressure(*cfg.system, *cfg.potential, cfg.depth, sched, threads);
    std::map<int, double> a;
    for (std::size_t i = 0; i < est.schedule.size(); ++i) a[est.schedule[i]] = est.a_values[i];
    for (int n : sched) {
      for (int mm : sched) {
        auto it = a.find(n + mm);
        if (it == a.end()) continue;
        const double whole = it->second;
        const std::string where = "n=" + std::to_string(n) + ", m=" + std::to_string(mm);
        if (is_neg_inf(whole)) {
          worst.note(kPosInf, where + ": vacuous, sum at -inf");
        } else if (is_neg_inf(a[n]) || is_neg_inf(a[mm])) {
          worst.note(kNegInf, where + ": factor vanished while the sum did not");
        } else {
          worst.note(a[n] + a[mm] - whole + tol,
                     where + ": excess " + fmt(whole - a[n] - a[mm]));
        }
      }
    }
  }
  return worst.finish("fekete", "fewer than two evaluable horizons");
}

// Uniform kernels over the one-step-live allowed targets; throws when the
// measure construction rejects the support.
RandomMarkovMeasure uniform_test_measure(const std::shared_ptr<const RandomSFT>& sys) {
  const int m = sys->base().size();
  const int a = sys->alphabet();
  std::vector<Mat> kernels;
  kernels.reserve(static_cast<std::size_t>(m));
  for (int f = 0; f < m; ++f) {
    const int next = sys->base().step(f);
    Mat k(a, a);
    for (int s = 0; s < a; ++s) {
      std::vector<int> allowed;
      for (int j = 0; j < a; ++j) {
        if (!sys->transition(f, s, j)) continue;
        bool live = false;
        for (int jj = 0; jj < a; ++jj)
          if (sys->transition(next, j, jj)) live = true;
        if (live) allowed.push_back(j);
      }
      if (allowed.empty())
        for (int j = 0; j < a; ++j) k(s, j) = 1.0 / a;
      else
        for (int j : allowed) k(s, j) = 1.0 / static_cast<double>(allowed.size());
    }
    kernels.push_back(std::move(k));
  }
  return RandomMarkovMeasure::from_kernels(sys, std::move(kernels));
}

// Gibbs family identity plus the variational inequality for a fixed test
// measure: Hbar_{n+t}(mu) + integral of f_n d mu <= A_n.
CheckResult check_gibbs_identity(const ExperimentConfig& cfg, const PartitionTable& table,
                                 double tol) {
  const RandomSFT& sys = *cfg.system;
  const int m = sys.base().size();
  const int cap = std::min({8, table.max_n});
  Worst worst;
  for (int n = 1; n <= cap; ++n) {
    if (m * sys.node_budget_estimate(n + cfg.depth) > 1e6) {
      worst.skip();
      continue;
    }
    try {
      const GibbsIdentityReport r = gibbs_identity_check(sys, *cfg.potential, n, cfg.depth);
      worst.note(tol - r.residual, "identity at n=" + std::to_string(n) + ": residual " +
                                       fmt(r.residual));
    } catch (const std::domain_error&) {
      worst.skip();
    }
  }

  bool have_test_measure = true;
  RandomMarkovMeasure* test = nullptr;
  std::optional<RandomMarkovMeasure> storage;
  try {
    storage.emplace(uniform_test_measure(cfg.system));
    test = &*storage;
  } catch (const std::invalid_argument&) {
    have_test_measure = false;
  }
  if (have_test_measure) {
    for (int n = 1; n <= cap; ++n) {
      if (m * sys.node_budget_estimate(n + cfg.depth) > 1e6) {
        worst.skip();
        continue;
      }
      PhiStarOptions pho;
      pho.horizon = n;
      pho.exact_budget = std::max(cfg.budget.exact_phi, 2e6);
      pho.samples = cfg.budget.samples;
      pho.seed = cfg.optimizer.seed;
      const PhiStarEstimate phi = phi_star(*test, *cfg.potential, pho);
      if (!phi.exact) continue;  // the bound is only asserted for exact sums
      double an = kNegInf;
      {
        bool bottom = false;
        CompensatedSum sum;
        for (int f = 0; f < m; ++f) {
          const double z = table.logz[static_cast<std::size_t>(f)][static_cast<std::size_t>(n - 1)];
          if (is_neg_inf(z)) {
            bottom = true;
            break;
          }
          sum.add(sys.base().weight(f) * z);
        }
        if (!bottom) an = sum.value();
      }
      const std::string where = "test measure at n=" + std::to_string(n);
      if (is_neg_inf(phi.value)) {
        worst.note(kPosInf, where + ": integral at -inf");
        continue;
      }
      const double lhs = cylinder_entropy_avg(*test, n + cfg.depth, cfg.budget.nodes) +
                         static_cast<double>(n) * phi.value;
      if (is_neg_inf(an)) {
        worst.note(kNegInf, where + ": finite objective above a vanished partition sum");
      } else {
        worst.note(an + tol - lhs, where + ": excess " + fmt(lhs - an));
      }
    }
  }
  return worst.finish("gibbs_identity", "no finite normalization at any horizon");
}

// Chained block bound for the Gibbs family at each horizon.
CheckResult check_block_chain(const ExperimentConfig& cfg, double tol) {
  const RandomSFT& sys = *cfg.system;
  const int m = sys.base().size();
  Worst worst;
  for (int n = 2; n <= 10; ++n) {
    if (m * sys.node_budget_estimate(n + cfg.depth) > 1e6) {
      worst.skip();
      continue;
    }
    std::optional<AtomicFiberMeasure> nu;
    try {
      nu.emplace(gibbs_atomic(sys, *cfg.potential, n, cfg.depth, -1, cfg.budget.nodes));
    } catch (const std::domain_error&) {
      worst.skip();
      continue;
    }
    for (int k = 1; k <= 3 && 2 * k <= n; ++k) {
      const BlockChainReport r = block_chain_check(sys, *cfg.potential, *nu, n, k);
      worst.note(r.margin + tol,
                 "n=" + std::to_string(n) + ", k=" + std::to_string(k) + ": margin " +
                     fmt(r.margin));
    }
  }
  return worst.finish("block_chain", "no finite normalization at any horizon");
}

// Entropy chunking bound for the Gibbs family.
CheckResult check_chunking(const ExperimentConfig& cfg, double tol) {
  const RandomSFT& sys = *cfg.system;
  const int m = sys.base().size();
  Worst worst;
  for (int n = 3; n <= 8; ++n) {
    for (int q = 2; q <= 3 && q < n; ++q) {
      if (m * sys.node_budget_estimate(n + cfg.depth + q) > 1e6) {
        worst.skip();
        continue;
      }
      try {
        const ChunkingReport r = chunking_check(sys, *cfg.potential, n, q, cfg.depth);
        worst.note(r.margin + tol, "n=" + std::to_string(n) + ", q=" + std::to_string(q) +
                                       ": margin " + fmt(r.margin));
      } catch (const std::domain_error&) {
        worst.skip();
      }
    }
  }
  return worst.finish("chunking", "no finite normalization at any horizon");
}

// k-power scaling: lifted measures multiply fiber entropy by k, and the
// power pressure at the halved schedule reproduces k times the base value.
CheckResult check_power_consistency(const ExperimentConfig& cfg, const PressureEstimate& base,
                                    int threads, double tol) {
  const int k = cfg.power_k;
  Worst worst;
  if (k == 1) {
    worst.note(kPosInf, "k=1 is the identity");
    return worst.finish("power_consistency", "");
  }

  const RandomMarkovMeasure* mu = cfg.measure ? &*cfg.measure : nullptr;
  std::optional<RandomMarkovMeasure> sampled;
  if (mu == nullptr) {
    sampled.emplace(sample_markov_measure(cfg.system, cfg.optimizer.seed + 1));
    mu = &*sampled;
  }
  try {
    const RandomMarkovMeasure lifted = lift_measure_power(*mu, k);
    const double diff = std::abs(fiber_entropy(lifted) - k * fiber_entropy(*mu));
    worst.note(tol - diff, "entropy lift residual " + fmt(diff));
  } catch (const ResourceError&) {
    worst.skip();
  }

  std::vector<int> halved;
  for (int n : cfg.pressure_schedule)
    if (n % k == 0) halved.push_back(n / k);
  if (!halved.empty()) {
    try {
      const PressureEstimate pw =
          pressure_of_power(*cfg.system, cfg.potential, k, cfg.depth, halved, threads);
      // The matched base horizon is k times the power schedule tail.
      const int matched = halved.back() * k;
      std::size_t idx = 0;
      while (cfg.pressure_schedule[idx] != matched) ++idx;
      const double want = base.a_values[idx] / static_cast<double>(halved.back());
      const double got = pw.reported;
      if (is_neg_inf(want) && is_neg_inf(got)) {
        worst.note(kPosInf, "both power and base pressure at -inf");
      } else if (is_neg_inf(want) || is_neg_inf(got)) {
        worst.note(kNegInf, "power and base pressure disagree about -inf");
      } else {
        const double residual = std::abs(got - want);
        worst.note(tol - residual, "pressure scaling residual " + fmt(residual));
      }
    } catch (const ResourceError&) {
      worst.skip();
    }
  }
  return worst.finish("power_consistency", "no scheduled horizon divisible by k");
}

// Objectives of the configured and sampled measures stay under the envelope
// plus the finite-horizon allowance, and -inf pressure is equivalent to all
// objectives sitting at -inf.
CheckResult check_measure_bound(const ExperimentConfig& cfg, const PressureEstimate& base,
                                int threads, double tol) {
  PhiStarOptions pho;
  pho.horizon = cfg.phi_horizon;
  pho.exact_budget = cfg.budget.exact_phi;
  pho.samples = cfg.budget.samples;
  pho.seed = cfg.optimizer.seed;
  pho.threads = threads;

  std::vector<std::pair<std::string, double>> objectives;
  if (cfg.measure)
    objectives.emplace_back("config measure",
                            objective_value(*cfg.measure, *cfg.potential, pho));
  for (std::uint64_t i = 1; i <= 3; ++i) {
    const RandomMarkovMeasure mu = sample_markov_measure(cfg.system, cfg.optimizer.seed + i);
    objectives.emplace_back("sampled seed " + std::to_string(cfg.optimizer.seed + i),
                            objective_value(mu, *cfg.potential, pho));
  }

  Worst worst;
  if (is_neg_inf(base.reported)) {
    for (const auto& [name, obj] : objectives) {
      if (is_neg_inf(obj))
        worst.note(kPosInf, name + " at -inf, matching the pressure");
      else
        worst.note(kNegInf, name + ": finite objective " + fmt(obj) + " under -inf pressure");
    }
    return worst.finish("measure_bound", "no measures available");
  }

  double allowance = 0.0;
  if (!cfg.potential->has_exact_averages()) {
    const int h = cfg.phi_horizon;
    const int tphi = std::max(cfg.depth, min_depth(*cfg.potential, h));
    CompensatedSum sum;
    bool bottom = false;
    for (int f = 0; f < cfg.system->base().size(); ++f) {
      const double z =
          partition_function(*cfg.system, *cfg.potential, f, h, tphi, cfg.budget.nodes);
      if (is_neg_inf(z)) {
        bottom = true;
        break;
      }
      sum.add(cfg.system->base().weight(f) * z);
    }
    if (!bottom) allowance = std::max(0.0, sum.value() / h - base.upper_envelope);
  }

  bool any_finite = false;
  for (const auto& [name, obj] : objectives) {
    if (is_neg_inf(obj)) {
      worst.note(kPosInf, name + " at -inf");
      continue;
    }
    any_finite = true;
    worst.note(base.upper_envelope + allowance + tol - obj,
               name + ": objective " + fmt(obj) + " vs envelope " + fmt(base.upper_envelope) +
                   " + allowance " + fmt(allowance));
  }
  if (!any_finite)
    worst.note(kPosInf, "diagnostic: every sampled objective is -inf under finite pressure");
  return worst.finish("measure_bound", "no measures available");
}

}  // namespace

VerifyReport run_verify(const ExperimentConfig& cfg, double tolerance, int threads) {
  if (!(tolerance > 0.0)) throw std::invalid_argument("run_verify: tolerance must be positive");
  if (threads < 1) throw std::invalid_argument("run_verify: threads must be >= 1");

  VerifyReport report;
  report.tolerance = tolerance;

  const int table_n = std::min(10, std::max(2, cfg.pressure_schedule.back()));
  const PartitionTable table = build_partition_table(cfg, table_n);
  const PressureEstimate base =
      estimate_pressure(*cfg.system, *cfg.potential, cfg.depth, cfg.pressure_schedule, threads);

  report.checks.push_back(check_subadditivity(cfg, table, tolerance));
  report.checks.push_back(check_oracle_equivalence(cfg, tolerance));
  report.checks.push_back(check_fekete(cfg, threads, tolerance));
  report.checks.push_back(check_gibbs_identity(cfg, table, tolerance));
  report.checks.push_back(check_block_chain(cfg, tolerance));
  report.checks.push_back(check_chunking(cfg, tolerance));
  report.checks.push_back(check_power_consistency(cfg, base, threads, tolerance));
  report.checks.push_back(check_measure_bound(cfg, base, threads, tolerance));

  report.all_pass = true;
  for (const CheckResult& c : report.checks) report.all_pass = report.all_pass && c.pass;
  return report;
}

}  // namespace subpress
