#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "subpress/ext_real.hpp"
#include "subpress/measures.hpp"
#include "subpress/potentials.hpp"
#include "subpress/pressure.hpp"
#include "subpress/system.hpp"
#include "subpress/variational.hpp"

using namespace subpress;
using namespace subpress::testing;

namespace {

Mat diag2(double a, double b) {
  Mat m(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

PotentialPtr diag_cocycle(const Fixture& full) {
  return matrix_cocycle_potential(full.sys->base_ptr(), 2, {{diag2(2.0, 1.0), diag2(1.0, 3.0)}});
}

}  // namespace

TEST_CASE("objective value combines entropy and the potential average") {
  const Fixture full = full_shift(1, 2);
  const RandomMarkovMeasure uniform = RandomMarkovMeasure::from_kernels(
      full.sys, {[] {
        Mat k(2, 2, 0.5);
        return k;
      }()});

  const PotentialPtr zero = zero_potential();
  PhiStarOptions opts;
  opts.horizon = 5;
  CHECK(objective_value(uniform, *zero, opts) == doctest::Approx(std::log(2.0)).epsilon(1e-12));

  // Exact site averages ignore the horizon entirely.
  const PotentialPtr add = additive_potential(full.sys->base_ptr(), 2, 1, {{0.0, std::log(2.0)}});
  PhiStarOptions o1, o9;
  o1.horizon = 1;
  o9.horizon = 9;
  CHECK(objective_value(uniform, *add, o1) == objective_value(uniform, *add, o9));

  // Mass on vanished cylinders sends the objective to the bottom.
  Mat dead(1, 1);
  Mat one(1, 1);
  one(0, 0) = 1.0;
  const PotentialPtr gone = matrix_cocycle_potential(full.sys->base_ptr(), 2, {{dead, one}});
  CHECK(is_neg_inf(objective_value(uniform, *gone, opts)));
}

TEST_CASE("search finds the uniform optimum of the zero potential") {
  const Fixture full = full_shift(1, 2);
  const PotentialPtr zero = zero_potential();
  OptimizerOptions opts;
  opts.starts = 6;
  opts.seed = 5;

  const VariationalReport rep = search_variational(full.sys, *zero, 0, {1, 2, 4, 8}, opts);
  CHECK(rep.reported == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rep.envelope == doctest::Approx(std::log(2.0)).epsilon(1e-12));
  CHECK(rep.best_objective == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  // The objective of an invariant measure never beats any A_n / n.
  CHECK(rep.gap >= -1e-9);
  CHECK(rep.allowance == 0.0);
  CHECK_FALSE(rep.neg_inf_regime);
  CHECK(rep.evals > 0);
}

TEST_CASE("search recovers the exact optimizer of a site potential") {
  const Fixture full = full_shift(1, 2);
  // Pressure log(1 + 2), optimum at the (1/3, 2/3) product measure.
  const PotentialPtr add = additive_potential(full.sys->base_ptr(), 2, 1, {{0.0, std::log(2.0)}});
  OptimizerOptions opts;
  opts.starts = 8;
  opts.max_evals = 600;
  opts.seed = 2;

  const VariationalReport rep = search_variational(full.sys, *add, 0, {1, 2, 4, 6}, opts);
  CHECK(rep.envelope == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(rep.best_objective == doctest::Approx(std::log(3.0)).epsilon(1e-7));
  CHECK(rep.gap >= -1e-9);
  CHECK(rep.gap <= 1e-5);
  CHECK(rep.allowance == 0.0);
  CHECK(rep.best.initial(0)[0] == doctest::Approx(1.0 / 3).epsilon(1e-3));
  CHECK(rep.best.initial(0)[1] == doctest::Approx(2.0 / 3).epsilon(1e-3));
}

TEST_CASE("search on the norm cocycle respects the finite horizon certificate") {
  const Fixture full = full_shift(1, 2);
  const PotentialPtr pot = diag_cocycle(full);
  OptimizerOptions opts;
  opts.starts = 10;
  opts.max_evals = 500;
  opts.horizon = 10;
  opts.seed = 9;

  const VariationalReport rep = search_variational(full.sys, *pot, 0, {1, 2, 4, 8, 12, 16}, opts);
  // The infinite horizon optimum is log 4 at the (1/4, 3/4) product measure;
  // the finite horizon objective dominates it.
  CHECK(rep.best_objective >= std::log(4.0) - 5e-3);
  CHECK(rep.allowance > 0.0);
  CHECK(rep.allowance < 0.01);
  // Rigorous upper bound: objective <= A_h / h = envelope + allowance.
  CHECK(rep.best_objective <= rep.envelope + rep.allowance + 1e-9);
  CHECK_FALSE(rep.neg_inf_regime);

  // Identical seeds give identical reports, independent of the worker count.
  OptimizerOptions threaded = opts;
  threaded.threads = 4;
  const VariationalReport rep2 = search_variational(full.sys, *pot, 0, {1, 2, 4, 8, 12, 16}, threaded);
  CHECK(rep2.best_objective == rep.best_objective);
  CHECK(rep2.evals == rep.evals);
  for (int s = 0; s < 2; ++s)
    for (int t = 0; t < 2; ++t) CHECK(rep2.best.kernel(0)(s, t) == rep.best.kernel(0)(s, t));
}

TEST_CASE("search on the mixed system stays below the envelope") {
  const Fixture s2 = two_fiber_mixed();
  const PotentialPtr zero = zero_potential();
  OptimizerOptions opts;
  opts.starts = 8;
  opts.seed = 4;

  const VariationalReport rep = search_variational(s2.sys, *zero, 0, {2, 4, 8, 12}, opts);
  // Zero potential has exact averages: the envelope bound is unconditional.
  CHECK(rep.allowance == 0.0);
  CHECK(rep.gap >= -1e-9);
  CHECK(rep.best_objective > 0.5);
  CHECK(rep.best_objective <= rep.envelope + 1e-9);
}

TEST_CASE("bottom regime: pressure and objectives agree at -infinity") {
  const Fixture full = full_shift(1, 2);
  const PotentialPtr gone =
      matrix_cocycle_potential(full.sys->base_ptr(), 2, {{Mat(1, 1), Mat(1, 1)}});
  OptimizerOptions opts;
  opts.starts = 4;

  const VariationalReport rep = search_variational(full.sys, *gone, 0, {1, 2, 4}, opts);
  CHECK(rep.neg_inf_regime);
  CHECK(is_neg_inf(rep.reported));
  CHECK(is_neg_inf(rep.best_objective));
  CHECK(rep.gap == 0.0);
  CHECK(rep.allowance == 0.0);
}

TEST_CASE("power objective scales the base objective by k") {
  const Fixture s2 = two_fiber_mixed();
  std::vector<std::vector<double>> initials = {{0.75, 0.25}, {0.5, 0.5}};
  std::vector<Mat> kernels = {[] {
                                Mat k(2, 2, 0.5);
                                return k;
                              }(),
                              [] {
                                Mat k(2, 2);
                                k(0, 0) = 0.5;
                                k(0, 1) = 0.5;
                                k(1, 0) = 1.0;
                                return k;
                              }()};
  const RandomMarkovMeasure mu(s2.sys, initials, kernels);

  const PotentialPtr add =
      additive_potential(s2.sys->base_ptr(), 2, 1, {{0.25, -1.5}, {2.0, 0.5}});
  PhiStarOptions base_opts;
  base_opts.horizon = 6;
  CHECK(power_objective(mu, add, 2, 3) ==
        doctest::Approx(2 * objective_value(mu, *add, base_opts)).epsilon(1e-10));
  CHECK(power_objective(mu, add, 1, 6) ==
        doctest::Approx(objective_value(mu, *add, base_opts)).epsilon(1e-12));

  const Fixture full = full_shift(1, 2);
  const PotentialPtr coc = diag_cocycle(full);
  const RandomMarkovMeasure bern = RandomMarkovMeasure::from_kernels(
      full.sys, {[] {
        Mat k(2, 2);
        k(0, 0) = k(1, 0) = 1.0 / 3;
        k(0, 1) = k(1, 1) = 2.0 / 3;
        return k;
      }()});
  PhiStarOptions deep;
  deep.horizon = 8;
  CHECK(power_objective(bern, coc, 2, 4) ==
        doctest::Approx(2 * objective_value(bern, *coc, deep)).epsilon(1e-10));

  CHECK_THROWS_AS(power_objective(mu, nullptr, 2, 3), std::invalid_argument);
  CHECK_THROWS_AS(power_objective(mu, add, 0, 3), std::invalid_argument);
}

TEST_CASE("search validates its options") {
  const Fixture full = full_shift(1, 2);
  const PotentialPtr zero = zero_potential();
  OptimizerOptions opts;
  CHECK_THROWS_AS(search_variational(nullptr, *zero, 0, {1, 2}, opts), std::invalid_argument);
  opts.starts = 0;
  CHECK_THROWS_AS(search_variational(full.sys, *zero, 0, {1, 2}, opts), std::invalid_argument);
  opts.starts = 2;
  opts.horizon = 0;
  CHECK_THROWS_AS(search_variational(full.sys, *zero, 0, {1, 2}, opts), std::invalid_argument);
  opts.horizon = 4;
  opts.max_evals = 1;
  CHECK_THROWS_AS(search_variational(full.sys, *zero, 0, {1, 2}, opts), std::invalid_argument);
}
