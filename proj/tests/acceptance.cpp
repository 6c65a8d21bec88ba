// Acceptance battery.  Each criterion prints exactly one line,
//
//   C## PASS|FAIL  <measured values against pinned tolerances>
//
// Run with no arguments for the full battery (exit = number of failures) or
// with a single criterion number for just that one (exit 0/1); the ctest
// registrations use the second form.  Oracles here are independent of the
// library: closed forms, integer combinatorics, and power iteration.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <subpress/config.hpp>
#include <subpress/ext_real.hpp>
#include <subpress/measures.hpp>
#include <subpress/metric.hpp>
#include <subpress/potentials.hpp>
#include <subpress/pressure.hpp>
#include <subpress/summation.hpp>
#include <subpress/system.hpp>
#include <subpress/variational.hpp>
#include <subpress/verify.hpp>

#include "oracles.hpp"

namespace {

using namespace subpress;

struct Outcome {
  bool pass = true;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string num(double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3g", x);
  return buf;
}

ExperimentConfig fixture(const std::string& name) {
  return load_config(std::string(SUBPRESS_FIXTURE_DIR) + "/" + name);
}

// The fixtures whose partition functions are finite at every horizon; the
// all-zero cocycle fixture is exercised separately by criterion 10.
const std::vector<std::string> kFiniteFixtures = {
    "full2_zero.json", "bernoulli_log2.json", "s2_goldmean.json", "diag_cocycle.json"};

PhiStarOptions phi_options(const ExperimentConfig& cfg, std::uint64_t seed) {
  PhiStarOptions pho;
  pho.horizon = cfg.phi_horizon;
  pho.exact_budget = cfg.budget.exact_phi;
  pho.samples = cfg.budget.samples;
  pho.seed = seed;
  pho.threads = 1;
  return pho;
}

// 1. Zero potential on the full a-shift: every scheduled rate is log a.
Outcome crit01() {
  const auto t0 = Clock::now();
  const std::vector<int> schedule = {1, 2, 3, 4, 6, 8, 10, 12};
  double worst = 0.0;
  for (int a : {2, 3, 4}) {
    const auto fx = testing::full_shift(1, a);
    const auto est = estimate_pressure(*fx.sys, *zero_potential(), 0, schedule);
    for (double r : est.rates)
      worst = std::max(worst, std::abs(r - std::log(static_cast<double>(a))));
  }
  const double dt = seconds_since(t0);
  Outcome out;
  out.pass = worst <= 1e-12 && dt < 1.0;
  out.detail = "full a-shift, a in {2,3,4}, n up to 12: max |A_n/n - log a| = " + num(worst) +
               " (tol 1e-12), " + num(dt) + " s (budget 1 s)";
  return out;
}

// 2. One-coordinate potential (0, log 2) on the full 2-shift: pressure log 3
//    via the closed form (1+2)^n, and the optimizer recovers the (1/3, 2/3)
//    kernel with objective near log 3.
Outcome crit02() {
  const auto t0 = Clock::now();
  auto cfg = fixture("bernoulli_log2.json");
  const double log3 = std::log(3.0);
  const auto est =
      estimate_pressure(*cfg.system, *cfg.potential, cfg.depth, cfg.pressure_schedule);
  const double perr = std::abs(est.reported - log3);
  const auto rep = search_variational(cfg.system, *cfg.potential, cfg.depth,
                                      cfg.pressure_schedule, cfg.optimizer);
  const double oerr = std::abs(rep.best_objective - log3);
  double kerr = 0.0;
  const Mat& kernel = rep.best.kernel(0);
  for (int i = 0; i < 2; ++i) {
    kerr = std::max(kerr, std::abs(kernel(i, 0) - 1.0 / 3.0));
    kerr = std::max(kerr, std::abs(kernel(i, 1) - 2.0 / 3.0));
  }
  const double dt = seconds_since(t0);
  Outcome out;
  out.pass = perr <= 1e-9 && oerr <= 1e-4 && kerr <= 1e-3 && dt < 30.0;
  out.detail = "pressure |err| = " + num(perr) + " (tol 1e-9), objective |err| = " + num(oerr) +
               " (tol 1e-4), kernel row |err| = " + num(kerr) + " (tol 1e-3), " + num(dt) +
               " s (budget 30 s)";
  return out;
}

// 3. Swap-base mixed shift, zero potential: A_24/24 against (1/2) log rho,
//    with rho the spectral radius of A_0 A_1 found by power iteration on the
//    raw transition matrices.
Outcome crit03() {
  const auto t0 = Clock::now();
  auto cfg = fixture("s2_goldmean.json");
  const auto& sys = *cfg.system;
  double a0[2][2], a1[2][2], prod[2][2];
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      a0[i][j] = sys.transition(0, i, j) ? 1.0 : 0.0;
      a1[i][j] = sys.transition(1, i, j) ? 1.0 : 0.0;
    }
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) prod[i][j] = a0[i][0] * a1[0][j] + a0[i][1] * a1[1][j];
  double v[2] = {1.0, 1.0};
  double rho = 0.0;
  for (int it = 0; it < 64; ++it) {
    const double w0 = prod[0][0] * v[0] + prod[0][1] * v[1];
    const double w1 = prod[1][0] * v[0] + prod[1][1] * v[1];
    const double norm = std::abs(w0) + std::abs(w1);
    rho = norm / (std::abs(v[0]) + std::abs(v[1]));
    v[0] = w0 / norm;
    v[1] = w1 / norm;
  }
  const double oracle = 0.5 * std::log(rho);
  const auto est = estimate_pressure(sys, *cfg.potential, cfg.depth, cfg.pressure_schedule);
  const double err = std::abs(est.reported - oracle);
  const double dt = seconds_since(t0);
  Outcome out;
  out.pass = est.schedule.back() == 24 && err <= 5e-3 && dt < 10.0;
  out.detail = "|A_24/24 - (1/2) log rho| = " + num(err) + " (tol 5e-3, rho = " + num(rho) +
               " by power iteration), " + num(dt) + " s (budget 10 s)";
  return out;
}

// 4. Diagonal matrix cocycle diag(2,1)/diag(1,3) under the max-norm on the
//    full 2-shift: log Z_16 against the integer sum oracle
//    sum_k C(16,k) max(2^(16-k), 3^k), pressure near log 4, and the
//    variational search closes the gap.
Outcome crit04() {
  const auto t0 = Clock::now();
  auto cfg = fixture("diag_cocycle.json");
  const unsigned long long kFrozenZ16 = 4319648371ull;
  unsigned long long oracle = 0, binom = 1;
  for (int k = 0; k <= 16; ++k) {
    unsigned long long pow2 = 1, pow3 = 1;
    for (int i = 0; i < 16 - k; ++i) pow2 *= 2;
    for (int i = 0; i < k; ++i) pow3 *= 3;
    oracle += binom * std::max(pow2, pow3);
    binom = binom * static_cast<unsigned long long>(16 - k) / static_cast<unsigned long long>(k + 1);
  }
  const double logz =
      partition_function(*cfg.system, *cfg.potential, 0, 16, cfg.depth, cfg.budget.nodes);
  const double zerr = std::abs(logz - std::log(static_cast<double>(kFrozenZ16)));
  const auto est =
      estimate_pressure(*cfg.system, *cfg.potential, cfg.depth, cfg.pressure_schedule);
  const double perr = std::abs(est.reported - std::log(4.0));
  const auto rep = search_variational(cfg.system, *cfg.potential, cfg.depth,
                                      cfg.pressure_schedule, cfg.optimizer);
  const double dt = seconds_since(t0);
  Outcome out;
  out.pass = oracle == kFrozenZ16 && zerr <= 1e-9 && perr <= 5e-2 && rep.gap <= 0.08 && dt < 60.0;
  out.detail = std::string("sum oracle ") +
               (oracle == kFrozenZ16 ? "matches" : "DISAGREES WITH") + " frozen Z_16, |log Z_16 - log oracle| = " +
               num(zerr) + " (tol 1e-9), |A_16/16 - log 4| = " + num(perr) +
               " (tol 5e-2), variational gap = " + num(rep.gap) + " (tol 0.08), " + num(dt) +
               " s (budget 60 s)";
  return out;
}

// 5. The literal separated-set supremum agrees with the partition function on
//    every (n, t) with n + t <= 4, fiber by fiber, over the finite fixtures.
Outcome crit05() {
  double worst = 0.0;
  int instances = 0;
  for (const auto& name : kFiniteFixtures) {
    auto cfg = fixture(name);
    for (int n = 1; n <= 4; ++n)
      for (int t = 0; n + t <= 4; ++t)
        for (int f = 0; f < cfg.system->base().size(); ++f) {
          const auto mp = MetricParams::from_depth(cfg.lambda, t);
          const double brute =
              separated_pressure_bruteforce(*cfg.system, *cfg.potential, mp, f, n);
          const double part =
              partition_function(*cfg.system, *cfg.potential, f, n, t, cfg.budget.nodes);
          worst = std::max(worst, std::abs(brute - part));
          ++instances;
        }
  }
  Outcome out;
  out.pass = worst <= 1e-12;
  out.detail = std::to_string(instances) +
               " (fiber, n, t) instances over four fixtures: max |separated sup - log Z| = " +
               num(worst) + " (tol 1e-12)";
  return out;
}

// 6. Upper bound: 1000 seeded random invariant Markov measures per fixture
//    never push the objective above envelope + 1e-6 + truncation allowance.
Outcome crit06() {
  int violations = 0, finite = 0, bottom = 0;
  double min_slack = kPosInf;
  std::vector<std::string> all = kFiniteFixtures;
  all.push_back("zero_cocycle.json");
  for (const auto& name : all) {
    auto cfg = fixture(name);
    const auto est =
        estimate_pressure(*cfg.system, *cfg.potential, cfg.depth, cfg.pressure_schedule);
    double allowance = 0.0;
    if (!cfg.potential->has_exact_averages() && !is_neg_inf(est.upper_envelope)) {
      const int h = cfg.phi_horizon;
      const int tphi = std::max(cfg.depth, min_depth(*cfg.potential, h));
      CompensatedSum sum;
      bool vanished = false;
      for (int f = 0; f < cfg.system->base().size(); ++f) {
        const double z =
            partition_function(*cfg.system, *cfg.potential, f, h, tphi, cfg.budget.nodes);
        if (is_neg_inf(z)) {
          vanished = true;
          break;
        }
        sum.add(cfg.system->base().weight(f) * z);
      }
      if (!vanished) allowance = std::max(0.0, sum.value() / h - est.upper_envelope);
    }
    const double bound = est.upper_envelope + 1e-6 + allowance;
    for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
      const auto mu = sample_markov_measure(cfg.system, seed);
      const double obj = objective_value(mu, *cfg.potential, phi_options(cfg, seed));
      if (is_neg_inf(obj)) {
        ++bottom;
        continue;
      }
      ++finite;
      min_slack = std::min(min_slack, bound - obj);
      if (obj > bound) ++violations;
    }
  }
  Outcome out;
  out.pass = violations == 0;
  out.detail = "5000 seeded measures over five fixtures (" + std::to_string(finite) +
               " finite, " + std::to_string(bottom) + " at -inf): violations = " +
               std::to_string(violations) + ", min slack = " + num(min_slack);
  return out;
}

// 7. Power scaling at matched horizons: the k = 2 power system run on the
//    halved schedule reports twice the base pressure.
Outcome crit07() {
  double worst_exact = 0.0, cocycle_diff = 0.0;
  for (const auto& name : kFiniteFixtures) {
    auto cfg = fixture(name);
    std::vector<int> halved;
    for (int n : cfg.pressure_schedule)
      if (n % 2 == 0) halved.push_back(n / 2);
    const auto base =
        estimate_pressure(*cfg.system, *cfg.potential, cfg.depth, cfg.pressure_schedule);
    const auto power = pressure_of_power(*cfg.system, cfg.potential, 2, cfg.depth, halved);
    const double diff = std::abs(power.reported - 2.0 * base.reported);
    if (name == "diag_cocycle.json")
      cocycle_diff = diff;
    else
      worst_exact = std::max(worst_exact, diff);
  }
  Outcome out;
  out.pass = worst_exact <= 1e-9 && cocycle_diff <= 5e-2;
  out.detail = "max |power reported - 2 base reported|: exact-average fixtures " +
               num(worst_exact) + " (tol 1e-9), cocycle fixture " + num(cocycle_diff) +
               " (tol 5e-2)";
  return out;
}

// 8. Entropy + integral = log Z for the atomic family at every horizon, and
//    the chunking inequality holds with margin >= 0.
Outcome crit08() {
  double worst_residual = 0.0, worst_margin = kPosInf;
  int identities = 0, chunks = 0;
  for (const auto& name : kFiniteFixtures) {
    auto cfg = fixture(name);
    for (int n = 1; n <= 8; ++n) {
      worst_residual =
          std::max(worst_residual, gibbs_identity_check(*cfg.system, *cfg.potential, n, cfg.depth).residual);
      ++identities;
    }
    for (int q : {2, 3})
      for (int n = q + 1; n <= 8; ++n) {
        worst_margin =
            std::min(worst_margin, chunking_check(*cfg.system, *cfg.potential, n, q, cfg.depth).margin);
        ++chunks;
      }
  }
  Outcome out;
  out.pass = worst_residual <= 1e-9 && worst_margin >= -1e-9;
  out.detail = std::to_string(identities) + " identities: max residual = " + num(worst_residual) +
               " (tol 1e-9); " + std::to_string(chunks) +
               " chunkings: min margin = " + num(worst_margin) + " (floor -1e-9)";
  return out;
}

// 9. Block chaining: the atomic family at horizon n dominates its k-block
//    coarsening for every k with 2k <= n.
Outcome crit09() {
  double worst_margin = kPosInf;
  int instances = 0;
  for (const auto& name : kFiniteFixtures) {
    auto cfg = fixture(name);
    for (int n = 2; n <= 10; ++n) {
      const auto nu = gibbs_atomic(*cfg.system, *cfg.potential, n, cfg.depth, -1, cfg.budget.nodes);
      for (int k = 1; k <= 3 && 2 * k <= n; ++k) {
        worst_margin =
            std::min(worst_margin, block_chain_check(*cfg.system, *cfg.potential, nu, n, k).margin);
        ++instances;
      }
    }
  }
  Outcome out;
  out.pass = worst_margin >= -1e-9;
  out.detail = std::to_string(instances) + " (n, k) instances over four fixtures: min margin = " +
               num(worst_margin) + " (floor -1e-9)";
  return out;
}

// 10. Bottom regime: the all-zero cocycle fixture pins pressure and every
//     sampled objective at -inf, and the verify battery confirms it.
Outcome crit10() {
  auto cfg = fixture("zero_cocycle.json");
  const auto est =
      estimate_pressure(*cfg.system, *cfg.potential, cfg.depth, cfg.pressure_schedule);
  const bool pressure_bottom = is_neg_inf(est.reported) && is_neg_inf(est.upper_envelope);
  int objectives = 0, at_bottom = 0;
  for (std::uint64_t seed = 1; seed <= 100; ++seed) {
    const auto mu = sample_markov_measure(cfg.system, seed);
    ++objectives;
    if (is_neg_inf(objective_value(mu, *cfg.potential, phi_options(cfg, seed)))) ++at_bottom;
  }
  if (cfg.measure) {
    ++objectives;
    if (is_neg_inf(objective_value(*cfg.measure, *cfg.potential, phi_options(cfg, 0)))) ++at_bottom;
  }
  const auto report = run_verify(cfg, 1e-9, 1);
  Outcome out;
  out.pass = pressure_bottom && at_bottom == objectives && report.all_pass;
  out.detail = std::string("pressure at -inf: ") + (pressure_bottom ? "yes" : "NO") + ", " +
               std::to_string(at_bottom) + "/" + std::to_string(objectives) +
               " objectives at -inf, verify all_pass: " + (report.all_pass ? "yes" : "NO");
  return out;
}

// 11. Determinism: verify through the CLI is byte-identical across repeated
//     runs and across --threads 1 / --threads 8.
Outcome crit11() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / "subpress_acceptance_c11";
  std::error_code ec;
  fs::remove_all(root, ec);
  const std::string config = std::string(SUBPRESS_FIXTURE_DIR) + "/s2_goldmean.json";
  const struct {
    const char* label;
    int threads;
  } runs[] = {{"a", 1}, {"b", 8}, {"c", 1}};
  std::vector<std::string> payloads;
  Outcome out;
  for (const auto& r : runs) {
    const fs::path dir = root / r.label;
    std::ostringstream cmd;
    cmd << '"' << SUBPRESS_CLI_PATH << '"' << " verify --config \"" << config << "\" --out \""
        << dir.string() << "\" --threads " << r.threads << " > /dev/null";
    if (std::system(cmd.str().c_str()) != 0) {
      out.pass = false;
      out.detail = std::string("CLI verify run '") + r.label + "' did not exit 0";
      return out;
    }
    std::ifstream in(dir / "verify.json", std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    payloads.push_back(buf.str());
  }
  const bool identical = !payloads[0].empty() && payloads[0] == payloads[1] &&
                         payloads[0] == payloads[2];
  out.pass = identical;
  out.detail = "verify.json across --threads 1, 8, 1: " +
               std::string(identical ? "byte-identical" : "DIFFERS") + " (" +
               std::to_string(payloads[0].size()) + " bytes)";
  return out;
}

struct Entry {
  int id;
  Outcome (*fn)();
};

const Entry kCriteria[] = {{1, crit01}, {2, crit02}, {3, crit03}, {4, crit04},
                           {5, crit05}, {6, crit06}, {7, crit07}, {8, crit08},
                           {9, crit09}, {10, crit10}, {11, crit11}};

int run_one(const Entry& entry) {
  Outcome out;
  try {
    out = entry.fn();
  } catch (const std::exception& e) {
    out.pass = false;
    out.detail = std::string("unexpected exception: ") + e.what();
  }
  std::printf("C%02d %s  %s\n", entry.id, out.pass ? "PASS" : "FAIL", out.detail.c_str());
  std::fflush(stdout);
  return out.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 2) {
    std::fprintf(stderr, "usage: %s [criterion 1..11]\n", argv[0]);
    return 2;
  }
  if (argc == 2) {
    const int want = std::atoi(argv[1]);
    for (const auto& entry : kCriteria)
      if (entry.id == want) return run_one(entry);
    std::fprintf(stderr, "unknown criterion '%s' (expected 1..11)\n", argv[1]);
    return 2;
  }
  int failures = 0;
  for (const auto& entry : kCriteria) failures += run_one(entry);
  return failures;
}
