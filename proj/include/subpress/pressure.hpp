#pragma once

// Separated-set topological pressure on the finite model.  At separation
// depth t every pair of distinct (n+t)-cylinders is Bowen-separated at
// horizon n, so the supremum of sum exp f_n over separated families is the
// full sum over admissible (n+t)-words; partition_function computes that
// directly, and the brute-force subset search plus the greedy construction
// exist as independent cross-checks of the same value.

#include <vector>

#include "subpress/metric.hpp"
#include "subpress/potentials.hpp"
#include "subpress/system.hpp"

namespace subpress {

// Smallest depth t valid for horizon n: the potential must be constant on
// the separating cylinders, so n + t >= locality(n).
int min_depth(const Potential& pot, int n);
int min_depth_over(const Potential& pot, const std::vector<int>& schedule);

// log sum over admissible (n+t)-words at `fiber` of exp f_n.  Lexicographic
// compensated summation; -infinity when every term vanishes.
double partition_function(const RandomSFT& sys, const Potential& pot, int fiber, int n, int t,
                          double node_budget = 1 << 26);

// Literal supremum over all Bowen-separated families of (n+t)-cylinder
// representatives (subset enumeration; requires at most 20 candidates).
double separated_pressure_bruteforce(const RandomSFT& sys, const Potential& pot,
                                     const MetricParams& mp, int fiber, int n);

// Max-first greedy separated family: repeatedly take the admissible word of
// largest f_n (ties lexicographically) separated from everything chosen.
// In this model the result is a maximal family attaining the supremum.
std::vector<Word> greedy_separated_set(const RandomSFT& sys, const Potential& pot,
                                       const MetricParams& mp, int fiber, int n);

struct PressureEstimate {
  std::vector<int> schedule;
  std::vector<double> a_values;  // A_n = base-averaged log partition function
  std::vector<double> rates;     // A_n / n
  double reported;               // A_{n_max} / n_max
  double upper_envelope;         // min over the schedule of A_n / n
  int depth;                     // separation depth t used throughout
};

// A_n for every n in the schedule (strictly increasing, positive), with the
// subadditivity envelope.  Fiber/horizon tasks fan out over `threads`; the
// combination order is fixed, so results are worker-count independent.
PressureEstimate estimate_pressure(const RandomSFT& sys, const Potential& pot, int t,
                                   const std::vector<int>& schedule, int threads = 1);

// Pressure of the k-fold power system: k-block super-alphabet, base theta^k,
// potential {f_{kn}}.  With horizons n the computed A_n equal A_{kn} of the
// base system exactly, which makes the scaling law directly testable.
PressureEstimate pressure_of_power(const RandomSFT& sys, const PotentialPtr& pot, int k, int t,
                                   const std::vector<int>& schedule, int threads = 1);

}  // namespace subpress
