#pragma once

// Variational side of the pressure computation: maximize h(mu) + Phi*(mu)
// over random Markov measures and compare against the separated-set value.
// The comparison carries an explicit finite-horizon allowance: for every
// invariant Markov measure, n h(mu) + integral of f_n is at most A_n, so
// the objective computed at horizon n can exceed the schedule envelope by
// at most A_n / n - envelope and never more.

#include <cstdint>
#include <memory>
#include <vector>

#include "subpress/measures.hpp"
#include "subpress/potentials.hpp"
#include "subpress/pressure.hpp"
#include "subpress/system.hpp"

namespace subpress {

// h(mu) + (1/n) integral of f_n under mu at n = opts.horizon.  Potentials
// with exact site averages collapse the horizon to 1; -infinity when mu
// charges vanished cylinders.
double objective_value(const RandomMarkovMeasure& mu, const Potential& pot,
                       const PhiStarOptions& opts = {});

struct OptimizerOptions {
  int starts = 16;        // independent simplex starts
  int max_evals = 2000;   // objective evaluations per start
  double tol = 1e-8;      // simplex diameter at convergence
  double step = 0.75;     // initial simplex edge in softmax coordinates
  std::uint64_t seed = 0;
  int threads = 1;        // fan-out over starts
  int horizon = 12;       // objective horizon (ignored for exact averages)
  double exact_budget = 1e7;
  long long samples = 1 << 17;
};

struct TraceRow {
  long long iteration = 0;
  double objective = 0.0;  // best vertex so far
  double diameter = 0.0;   // simplex extent in softmax coordinates
};

struct VariationalReport {
  RandomMarkovMeasure best;
  double best_objective;
  double reported;     // pressure at the schedule tail
  double envelope;     // min over the schedule of A_n / n
  double gap;          // reported - best_objective (0 in the bottom regime)
  double allowance;    // certificate slack A_h / h - envelope, clamped at 0
  bool neg_inf_regime; // pressure and every objective sit at -infinity
  int best_start;
  long long evals;
  std::vector<TraceRow> trace;  // iteration log of the winning start
};

// Multi-start simplex search over the kernel rows (softmax coordinates on
// the allowed targets of each live symbol, stationary initial laws).  The
// start combination order is fixed, so the result is worker-count
// independent; identical seeds give identical reports.
VariationalReport search_variational(const std::shared_ptr<const RandomSFT>& sys,
                                     const Potential& pot, int t,
                                     const std::vector<int>& schedule,
                                     const OptimizerOptions& opts = {});

// Objective of the k-block lift of mu on the power system, with the power
// potential read on super-symbols, at the given super-horizon.  Equals k
// times the base objective at horizon k * horizon.
double power_objective(const RandomMarkovMeasure& mu, const PotentialPtr& pot, int k,
                       int horizon);

}  // namespace subpress
