#pragma once

// Subadditive sequences of potentials Phi = {f_n}.  Every variant satisfies
// f_{n+m}(omega, x) <= f_n(omega, x) + f_m applied after n skew steps, and
// f_n of a point depends only on its first locality(n) symbols, so cylinder
// words of that length are enough to evaluate it.
//
// Variants:
//   zero                f_n = 0
//   constant(c)         f_n = n c
//   additive(d, table)  f_n = sum of a depth-d site potential along the
//                       orbit; table[omega] holds f_1(omega, w) for every
//                       length-d block w in lexicographic order
//   matrix_cocycle      f_n = log || M_{theta^{n-1} omega}(x_{n-1}) ...
//                       M_omega(x_0) || for nonnegative square matrices
//                       attached to (fiber, symbol); a vanishing product
//                       gives f_n = -infinity
//   power(Phi, k)       f^{(k)}_n = f_{kn}, the sequence of the k-fold
//                       power system (read on original-alphabet words)
//   block lift          power sequence re-read on k-block super-symbols;
//                       produced by lift_to_blocks for power-system runs
//
// Evaluation is incremental: a CylinderWalker consumes symbols one at a time
// along a depth-first enumeration and exposes f_n of the current prefix, so
// partition sums cost O(1) amortized per tree node instead of O(n) per word.

#include <cstdint>
#include <memory>
#include <vector>

#include "subpress/small_matrix.hpp"
#include "subpress/system.hpp"

namespace subpress {

class CylinderWalker {
 public:
  virtual ~CylinderWalker() = default;
  virtual void push(std::uint8_t symbol) = 0;
  virtual void pop() = 0;
  // f_n of the current prefix; valid once at least locality(n) symbols are
  // pushed (extra symbols are ignored).
  virtual double value() const = 0;
};

class Potential {
 public:
  virtual ~Potential() = default;
  // Number of leading symbols f_n can read.
  virtual int locality(int n) const = 0;
  virtual std::unique_ptr<CylinderWalker> make_walker(int fiber, int n) const = 0;
  // True when (1/n) integral f_n d mu is independent of n for every
  // invariant mu (additive-type sequences); lets callers evaluate the
  // asymptotic average exactly at horizon 1.
  virtual bool has_exact_averages() const = 0;
};

using PotentialPtr = std::shared_ptr<const Potential>;

enum class MatrixNorm { Infinity, Two };

PotentialPtr zero_potential();
PotentialPtr constant_potential(double c);
// table[fiber] has alphabet^depth entries, lexicographic in the block.
PotentialPtr additive_potential(std::shared_ptr<const BaseSystem> base, int alphabet, int depth,
                                std::vector<std::vector<double>> table);
// matrices[fiber][symbol] are square, entrywise nonnegative, one shared size.
PotentialPtr matrix_cocycle_potential(std::shared_ptr<const BaseSystem> base, int alphabet,
                                      std::vector<std::vector<Mat>> matrices,
                                      MatrixNorm norm = MatrixNorm::Infinity);
// The power sequence {f_{kn}} evaluated on original-alphabet words.
PotentialPtr power_potential(PotentialPtr inner, int k);
// The power sequence re-read on k-block super-symbol words (the alphabet of
// RandomSFT::power_system); original_alphabet is the block coding base.
PotentialPtr lift_to_blocks(PotentialPtr inner, int k, int original_alphabet);

// f_n(w) for an admissible word with at least locality(n) symbols.
double eval_potential(const Potential& pot, int n, const Word& w);

// max over admissible words of |f_1(fiber, .)|; +infinity when a cocycle
// block norm vanishes.
double sup_abs_f1(const RandomSFT& sys, const Potential& pot, int fiber);
// Base-averaged sup norm of f_1 (the L1 bound used by truncation slack).
double f1_norm(const RandomSFT& sys, const Potential& pot);

struct SubadditivityReport {
  double worst_margin;  // min over all checks of f_n + f_m(shifted) - f_{n+m}
  long long checks = 0;
  int fiber = -1;       // witness of the worst margin
  int split_n = 0;
  int split_m = 0;
  std::vector<std::uint8_t> word;
  bool pass(double tol) const { return worst_margin >= -tol; }
};

// Exhaustively verifies f_{n+m} <= f_n + f_m after n skew steps for every
// admissible word of length locality(n+m) and every split with n+m <= n_max.
SubadditivityReport check_subadditive(const Potential& pot, const RandomSFT& sys, int n_max);

}  // namespace subpress
