#include "subpress/pressure.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "subpress/ext_real.hpp"
#include "subpress/summation.hpp"
#include "subpress/threading.hpp"

namespace subpress {

int min_depth(const Potential& pot, int n) {
  return std::max(0, pot.locality(n) - n);
}

int min_depth_over(const Potential& pot, const std::vector<int>& schedule) {
  int t = 0;
  for (int n : schedule) t = std::max(t, min_depth(pot, n));
  return t;
}

namespace {

void check_schedule(const std::vector<int>& schedule) {
  if (schedule.empty()) throw std::invalid_argument("schedule must be nonempty");
  int prev = 0;
  for (int n : schedule) {
    if (n <= prev) throw std::invalid_argument("schedule must be strictly increasing and positive");
    prev = n;
  }
}

void check_depth(const Potential& pot, int n, int t) {
  if (t < 0) throw std::invalid_argument("separation depth must be >= 0");
  const int need = min_depth(pot, n);
  if (t < need)
    throw std::invalid_argument("separation depth too small for this potential: need t >= " +
                                std::to_string(need) + " at horizon " + std::to_string(n));
}

struct PartitionHooks {
  CylinderWalker* walker;
  CompensatedSum sum;
  void push(std::uint8_t s) { walker->push(s); }
  void pop() { walker->pop(); }
  void leaf(std::span<const std::uint8_t>) { sum.add(std::exp(walker->value())); }
};

}  // namespace

double partition_function(const RandomSFT& sys, const Potential& pot, int fiber, int n, int t,
                          double node_budget) {
  if (n < 1) throw std::invalid_argument("partition_function: horizon must be >= 1");
  check_depth(pot, n, t);
  if (sys.node_budget_estimate(n + t) > node_budget)
    throw ResourceError("partition_function: enumeration of a^" + std::to_string(n + t) +
                        " words exceeds the node budget");
  auto walker = pot.make_walker(fiber, n);
  PartitionHooks hooks{walker.get()};
  sys.walk_words(fiber, n + t, hooks);
  return std::log(hooks.sum.value());
}

double separated_pressure_bruteforce(const RandomSFT& sys, const Potential& pot,
                                     const MetricParams& mp, int fiber, int n) {
  if (n < 1) throw std::invalid_argument("separated pressure: horizon must be >= 1");
  const int t = mp.depth;
  check_depth(pot, n, t);
  const std::vector<Word> words = sys.enumerate_words(fiber, n + t);
  if (words.size() > 20)
    throw ResourceError("separated pressure brute force: more than 20 cylinder candidates");
  std::vector<double> weights(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    weights[i] = std::exp(eval_potential(pot, n, words[i]));

  // Depth-first scan of all separated subsets, tracking the best weight sum.
  double best = 0.0;
  std::vector<std::size_t> chosen;
  auto extend = [&](auto&& self, std::size_t from, double sum) -> void {
    best = std::max(best, sum);
    for (std::size_t i = from; i < words.size(); ++i) {
      bool ok = true;
      for (std::size_t j : chosen) {
        if (!bowen_separated(mp, words[i], words[j], n)) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      chosen.push_back(i);
      self(self, i + 1, sum + weights[i]);
      chosen.pop_back();
    }
  };
  extend(extend, 0, 0.0);
  return std::log(best);
}

std::vector<Word> greedy_separated_set(const RandomSFT& sys, const Potential& pot,
                                       const MetricParams& mp, int fiber, int n) {
  if (n < 1) throw std::invalid_argument("greedy separated set: horizon must be >= 1");
  const int t = mp.depth;
  check_depth(pot, n, t);
  std::vector<Word> words = sys.enumerate_words(fiber, n + t);
  std::vector<double> weights(words.size());
  for (std::size_t i = 0; i < words.size(); ++i)
    weights[i] = eval_potential(pot, n, words[i]);
  // Max-first order; equal weights resolved by word order (lexicographic,
  // inherited from enumeration) so the construction is deterministic.
  std::vector<std::size_t> order(words.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return weights[a] > weights[b]; });
  std::vector<Word> out;
  for (std::size_t i : order) {
    bool ok = true;
    for (const Word& w : out) {
      if (!bowen_separated(mp, words[i], w, n)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(words[i]);
  }
  return out;
}

PressureEstimate estimate_pressure(const RandomSFT& sys, const Potential& pot, int t,
                                   const std::vector<int>& schedule, int threads) {
  check_schedule(schedule);
  for (int n : schedule) check_depth(pot, n, t);
  const int m = sys.base().size();
  const std::size_t horizons = schedule.size();
  std::vector<double> log_z(static_cast<std::size_t>(m) * horizons);
  run_indexed(log_z.size(), threads, [&](std::size_t task) {
    const int fiber = static_cast<int>(task / horizons);
    const int n = schedule[task % horizons];
    log_z[task] = partition_function(sys, pot, fiber, n, t);
  });

  PressureEstimate est;
  est.schedule = schedule;
  est.depth = t;
  est.a_values.resize(horizons);
  est.rates.resize(horizons);
  for (std::size_t h = 0; h < horizons; ++h) {
    bool bottom = false;
    CompensatedSum acc;
    for (int fiber = 0; fiber < m; ++fiber) {
      const double w = sys.base().weight(fiber);
      if (w == 0.0) continue;  // null fibers do not contribute to the average
      const double lz = log_z[static_cast<std::size_t>(fiber) * horizons + h];
      if (is_neg_inf(lz)) {
        bottom = true;
        break;
      }
      acc.add(w * lz);
    }
    est.a_values[h] = bottom ? kNegInf : acc.value();
    est.rates[h] = bottom ? kNegInf : est.a_values[h] / schedule[h];
  }
  est.reported = est.rates.back();
  est.upper_envelope = est.rates.front();
  for (double r : est.rates) est.upper_envelope = std::min(est.upper_envelope, r);
  return est;
}

PressureEstimate pressure_of_power(const RandomSFT& sys, const PotentialPtr& pot, int k, int t,
                                   const std::vector<int>& schedule, int threads) {
  if (k < 1) throw std::invalid_argument("pressure_of_power: k must be >= 1");
  if (k == 1) return estimate_pressure(sys, *pot, t, schedule, threads);
  const auto power_sys = RandomSFT::power_system(sys, k);
  const auto lifted = lift_to_blocks(pot, k, sys.alphabet());
  return estimate_pressure(*power_sys, *lifted, t, schedule, threads);
}

}  // namespace subpress
