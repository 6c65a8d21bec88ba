#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "subpress/ext_real.hpp"
#include "subpress/potentials.hpp"
#include "subpress/small_matrix.hpp"
#include "subpress/system.hpp"

using namespace subpress;
using namespace subpress::testing;

namespace {

Mat diag2(double a, double b) {
  Mat m(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

Mat mat2(double a, double b, double c, double d) {
  Mat m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

// Direct site-sum oracle for depth-d additive sequences.
double additive_oracle(const Fixture& fx, const std::vector<std::vector<double>>& table, int depth,
                       int n, const Word& w) {
  double total = 0.0;
  int fib = w.fiber;
  for (int i = 0; i < n; ++i) {
    int code = 0;
    for (int j = 0; j < depth; ++j) code = code * fx.alphabet + w.symbols[static_cast<std::size_t>(i + j)];
    total += table[static_cast<std::size_t>(fib)][static_cast<std::size_t>(code)];
    fib = fx.perm[static_cast<std::size_t>(fib)];
  }
  return total;
}

}  // namespace

TEST_CASE("zero and constant sequences") {
  auto full = full_shift(1, 2);
  auto zero = zero_potential();
  auto five = constant_potential(2.5);

  CHECK(zero->locality(7) == 0);
  CHECK(five->locality(7) == 0);
  CHECK(zero->has_exact_averages());
  CHECK(five->has_exact_averages());

  Word w = full.sys->make_word(0, {1, 0, 1});
  CHECK(eval_potential(*zero, 3, w) == 0.0);
  CHECK(eval_potential(*five, 3, w) == doctest::Approx(7.5).epsilon(1e-14));
  CHECK(eval_potential(*five, 1, Word{0, {}}) == doctest::Approx(2.5));
  CHECK_THROWS_AS(eval_potential(*five, 0, w), std::invalid_argument);
  CHECK_THROWS_AS(constant_potential(kPosInf), std::invalid_argument);
}

TEST_CASE("additive sequences sum a site table along the orbit") {
  auto full = full_shift(1, 2);
  const double log2 = std::log(2.0);
  auto pot = additive_potential(full.base, 2, 1, {{0.0, log2}});

  CHECK(pot->locality(3) == 3);
  CHECK(pot->has_exact_averages());
  Word w = full.sys->make_word(0, {0, 1, 1});
  CHECK(eval_potential(*pot, 3, w) == doctest::Approx(2 * log2).epsilon(1e-14));
  CHECK(eval_potential(*pot, 1, w) == doctest::Approx(0.0));
  CHECK_THROWS_AS(eval_potential(*pot, 4, w), std::invalid_argument);

  auto fx = two_fiber_mixed();
  std::vector<std::vector<double>> table{{0.25, -1.5}, {2.0, 0.125}};
  auto mixed = additive_potential(fx.base, 2, 1, table);
  for (int fiber = 0; fiber < 2; ++fiber)
    for (int n = 1; n <= 5; ++n)
      for (const Word& word : fx.sys->enumerate_words(fiber, n))
        CHECK(eval_potential(*mixed, n, word) ==
              doctest::Approx(additive_oracle(fx, table, 1, n, word)).epsilon(1e-13));
}

TEST_CASE("additive sequences with block depth two") {
  auto gm = golden_mean_static();
  std::vector<std::vector<double>> table{{0.5, -0.25, 1.0, -2.0}};
  auto pot = additive_potential(gm.base, 2, 2, table);

  CHECK(pot->locality(4) == 5);
  for (int n = 1; n <= 5; ++n)
    for (const Word& word : gm.sys->enumerate_words(0, n + 1))
      CHECK(eval_potential(*pot, n, word) ==
            doctest::Approx(additive_oracle(gm, table, 2, n, word)).epsilon(1e-13));
}

TEST_CASE("additive table validation") {
  auto full = full_shift(1, 2);
  CHECK_THROWS_AS(additive_potential(full.base, 2, 1, {{0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(additive_potential(full.base, 2, 1, {}), std::invalid_argument);
  CHECK_THROWS_AS(additive_potential(full.base, 2, 0, {{0.0}}), std::invalid_argument);
  CHECK_THROWS_AS(additive_potential(full.base, 2, 1, {{0.0, kPosInf}}), std::invalid_argument);
  CHECK_THROWS_AS(additive_potential(full.base, 2, 21, {{}}), std::invalid_argument);
  CHECK_THROWS_AS(additive_potential(nullptr, 2, 1, {{0.0, 0.0}}), std::invalid_argument);
}

TEST_CASE("matrix cocycles multiply right to left") {
  auto full = full_shift(1, 2);
  auto pot = matrix_cocycle_potential(full.base, 2, {{diag2(2, 1), diag2(1, 3)}});

  CHECK(pot->locality(5) == 5);
  CHECK_FALSE(pot->has_exact_averages());
  CHECK(eval_potential(*pot, 1, full.sys->make_word(0, {0})) == doctest::Approx(std::log(2.0)));
  CHECK(eval_potential(*pot, 1, full.sys->make_word(0, {1})) == doctest::Approx(std::log(3.0)));
  // Products are diag(2^{count of 0}, 3^{count of 1}) whatever the order.
  CHECK(eval_potential(*pot, 2, full.sys->make_word(0, {0, 1})) == doctest::Approx(std::log(3.0)));
  CHECK(eval_potential(*pot, 2, full.sys->make_word(0, {1, 0})) == doctest::Approx(std::log(3.0)));
  CHECK(eval_potential(*pot, 3, full.sys->make_word(0, {0, 1, 1})) ==
        doctest::Approx(std::log(9.0)));
  CHECK(eval_potential(*pot, 3, full.sys->make_word(0, {0, 0, 0})) ==
        doctest::Approx(3 * std::log(2.0)));
}

TEST_CASE("matrix cocycle norms") {
  CHECK(inf_norm(mat2(1, 1, 0, 1)) == doctest::Approx(2.0));
  CHECK(inf_norm(diag2(2, 3)) == doctest::Approx(3.0));
  // Largest singular value of [[1,1],[0,1]] is the golden ratio.
  const double golden = 0.5 * (1.0 + std::sqrt(5.0));
  CHECK(two_norm(mat2(1, 1, 0, 1)) == doctest::Approx(golden).epsilon(1e-12));
  CHECK(two_norm(diag2(2, 3)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(two_norm(Mat(3, 3)) == doctest::Approx(0.0));

  auto full = full_shift(1, 2);
  auto two = matrix_cocycle_potential(full.base, 2, {{mat2(1, 1, 0, 1), mat2(1, 0, 1, 1)}},
                                      MatrixNorm::Two);
  CHECK(eval_potential(*two, 1, full.sys->make_word(0, {0})) ==
        doctest::Approx(std::log(golden)).epsilon(1e-12));
}

TEST_CASE("vanishing cocycle blocks give minus infinity") {
  auto full = full_shift(1, 2);
  Mat zero1(1, 1);
  Mat one1(1, 1);
  one1(0, 0) = 1.0;
  auto pot = matrix_cocycle_potential(full.base, 2, {{zero1, one1}});

  CHECK(is_neg_inf(eval_potential(*pot, 1, full.sys->make_word(0, {0}))));
  CHECK(eval_potential(*pot, 2, full.sys->make_word(0, {1, 1})) == doctest::Approx(0.0));
  CHECK(is_neg_inf(eval_potential(*pot, 3, full.sys->make_word(0, {1, 0, 1}))));

  auto report = check_subadditive(*pot, *full.sys, 5);
  CHECK(report.pass(1e-9));
  CHECK(report.worst_margin == doctest::Approx(0.0));
}

TEST_CASE("matrix cocycle validation") {
  auto full = full_shift(1, 2);
  Mat neg(2, 2);
  neg(0, 0) = -1.0;
  CHECK_THROWS_AS(matrix_cocycle_potential(full.base, 2, {{neg, diag2(1, 1)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(matrix_cocycle_potential(full.base, 2, {{Mat(2, 3), Mat(2, 3)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(matrix_cocycle_potential(full.base, 2, {{diag2(1, 1), Mat(3, 3, 1.0)}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(matrix_cocycle_potential(full.base, 2, {{diag2(1, 1)}}), std::invalid_argument);
  CHECK_THROWS_AS(matrix_cocycle_potential(full.base, 2, {}), std::invalid_argument);
}

TEST_CASE("subadditivity margins") {
  auto fx = two_fiber_mixed();
  std::vector<std::vector<double>> table{{0.25, -1.5}, {2.0, 0.125}};
  auto additive = additive_potential(fx.base, 2, 1, table);
  auto add_report = check_subadditive(*additive, *fx.sys, 6);
  CHECK(add_report.checks > 0);
  CHECK(std::abs(add_report.worst_margin) <= 1e-12);

  auto constant = constant_potential(-0.75);
  auto const_report = check_subadditive(*constant, *fx.sys, 6);
  CHECK(const_report.checks > 0);
  CHECK(std::abs(const_report.worst_margin) <= 1e-12);

  auto full = full_shift(1, 2);
  for (auto norm : {MatrixNorm::Infinity, MatrixNorm::Two}) {
    auto cocycle =
        matrix_cocycle_potential(full.base, 2, {{mat2(1, 1, 0, 1), mat2(1, 0, 1, 1)}}, norm);
    auto report = check_subadditive(*cocycle, *full.sys, 6);
    CHECK(report.checks > 0);
    CHECK(report.pass(1e-9));
  }

  CHECK_THROWS_AS(check_subadditive(*additive, *fx.sys, 1), std::invalid_argument);
}

TEST_CASE("additive sequences telescope under the skew step") {
  auto fx = three_fiber_three_symbols();
  std::vector<std::vector<double>> table{
      {0.2, -0.4, 1.1}, {0.0, 2.5, -3.25}, {0.75, 0.5, -0.125}};
  auto pot = additive_potential(fx.base, 3, 1, table);
  for (int fiber = 0; fiber < 3; ++fiber) {
    for (int n = 2; n <= 4; ++n) {
      for (const Word& w : fx.sys->enumerate_words(fiber, n)) {
        const double whole = eval_potential(*pot, n, w);
        const double split =
            eval_potential(*pot, 1, w) + eval_potential(*pot, n - 1, skew_step(*fx.sys, w));
        CHECK(whole == doctest::Approx(split).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("power sequences reindex by k") {
  auto full = full_shift(1, 2);
  const double log2 = std::log(2.0);
  auto add = additive_potential(full.base, 2, 1, {{0.0, log2}});

  auto pow2 = power_potential(add, 2);
  CHECK(pow2->locality(3) == 6);
  CHECK(pow2->has_exact_averages());
  for (int n = 1; n <= 3; ++n)
    for (const Word& w : full.sys->enumerate_words(0, 2 * n))
      CHECK(eval_potential(*pow2, n, w) == doctest::Approx(eval_potential(*add, 2 * n, w)));

  CHECK(power_potential(add, 1).get() == add.get());
  CHECK_THROWS_AS(power_potential(add, 0), std::invalid_argument);
  CHECK_THROWS_AS(power_potential(nullptr, 2), std::invalid_argument);

  auto cocycle = matrix_cocycle_potential(full.base, 2, {{diag2(2, 1), diag2(1, 3)}});
  CHECK_FALSE(power_potential(cocycle, 2)->has_exact_averages());
}

TEST_CASE("block lift reads power sequences on super-symbol words") {
  auto fx = two_fiber_mixed();
  auto pow_sys = RandomSFT::power_system(*fx.sys, 2);
  std::vector<std::vector<double>> table{{0.25, -1.5}, {2.0, 0.125}};
  auto add = additive_potential(fx.base, 2, 1, table);
  auto lifted = lift_to_blocks(add, 2, 2);

  CHECK(lifted->locality(3) == 3);  // ceil(locality(6) / 2)
  CHECK(lift_to_blocks(add, 1, 2).get() == add.get());

  for (int fiber = 0; fiber < 2; ++fiber) {
    for (int n = 1; n <= 3; ++n) {
      for (const Word& sw : pow_sys->enumerate_words(fiber, n)) {
        std::vector<std::uint8_t> flat;
        for (auto s : sw.symbols) {
          auto block = decode_block(s, 2, 2);
          flat.insert(flat.end(), block.begin(), block.end());
        }
        const Word plain = fx.sys->make_word(fiber, flat);
        CHECK(eval_potential(*lifted, n, sw) ==
              doctest::Approx(eval_potential(*add, 2 * n, plain)).epsilon(1e-13));
      }
    }
  }
}

TEST_CASE("first-level norms") {
  auto fx = two_fiber_mixed();
  std::vector<std::vector<double>> table{{0.25, -1.5}, {2.0, 0.125}};
  auto additive = additive_potential(fx.base, 2, 1, table);
  CHECK(sup_abs_f1(*fx.sys, *additive, 0) == doctest::Approx(1.5));
  CHECK(sup_abs_f1(*fx.sys, *additive, 1) == doctest::Approx(2.0));
  CHECK(f1_norm(*fx.sys, *additive) == doctest::Approx(1.75));

  auto full = full_shift(1, 2);
  auto cocycle = matrix_cocycle_potential(full.base, 2, {{diag2(2, 1), diag2(1, 3)}});
  CHECK(sup_abs_f1(*full.sys, *cocycle, 0) == doctest::Approx(std::log(3.0)));
  CHECK(f1_norm(*full.sys, *cocycle) == doctest::Approx(std::log(3.0)));

  Mat zero1(1, 1);
  Mat one1(1, 1);
  one1(0, 0) = 1.0;
  auto vanishing = matrix_cocycle_potential(full.base, 2, {{zero1, one1}});
  CHECK(f1_norm(*full.sys, *vanishing) == kPosInf);

  CHECK(f1_norm(*full.sys, *zero_potential()) == doctest::Approx(0.0));
  CHECK(f1_norm(*full.sys, *constant_potential(-2.0)) == doctest::Approx(2.0));
}
