#pragma once

// Invariant measures on the bundle and the functionals the variational
// comparison needs.
//
// A RandomMarkovMeasure is a family of fiber measures mu_omega given by an
// initial law p_omega and a stochastic kernel P_omega supported on the
// fiber's transitions, subject to the invariance p_omega P_omega =
// p_{theta omega}; together with the base law it is a skew-product invariant
// measure, and every cylinder mass is an explicit product.
//
// Entropy splits into closed forms: the fiber entropy h is the base-averaged
// conditional row entropy, and the averaged n-cylinder entropy is exactly
// Hbar_1 + (n-1) h, so the partition rate Hbar_n / n decreases to h.
//
// AtomicFiberMeasure carries finitely many weighted words per fiber.  The
// atomic family with masses exp(f_n)/Z_n on separating cylinders realizes
// the partition function as entropy plus integral (an exact identity, see
// gibbs_identity_check), and its Cesaro shifts feed the two inequalities
// (block_chain_check, chunking_check) that connect finite-horizon data to
// the asymptotic comparison.

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "subpress/potentials.hpp"
#include "subpress/small_matrix.hpp"
#include "subpress/system.hpp"

namespace subpress {

class RandomMarkovMeasure {
 public:
  // initials[fiber] has one entry per symbol (zero on non-live symbols,
  // summing to 1); kernels[fiber] is row-stochastic with support inside the
  // fiber's transition matrix and live targets.  Rows of non-live symbols
  // are never read; the constructor normalizes them to uniform so equal
  // measures compare equal.  Invariance p_omega P_omega = p_{theta omega}
  // is validated to 1e-10.
  RandomMarkovMeasure(std::shared_ptr<const RandomSFT> sys,
                      std::vector<std::vector<double>> initials, std::vector<Mat> kernels);

  // Builds the unique family of initial laws that the kernels transport
  // along each theta-cycle (damped power iteration on the cycle product,
  // started uniform on live symbols).
  static RandomMarkovMeasure from_kernels(std::shared_ptr<const RandomSFT> sys,
                                          std::vector<Mat> kernels);

  const RandomSFT& system() const { return *sys_; }
  const std::shared_ptr<const RandomSFT>& system_ptr() const { return sys_; }
  const std::vector<double>& initial(int fiber) const;
  const Mat& kernel(int fiber) const;

  // mu_omega of the cylinder [w]: p(x_0) times the kernel steps.
  double word_mass(const Word& w) const;

  // Base-averaged entropy of the initial laws (the n = 1 cylinder entropy).
  double initial_entropy() const;

 private:
  std::shared_ptr<const RandomSFT> sys_;
  std::vector<std::vector<double>> initials_;
  std::vector<Mat> kernels_;
};

// Base-averaged conditional row entropy: the fiber entropy of the measure.
double fiber_entropy(const RandomMarkovMeasure& mu);

// Base-averaged entropy of the n-cylinder partition, by enumeration.
double cylinder_entropy_avg(const RandomMarkovMeasure& mu, int n, double node_budget = 1 << 26);

// The same quantity divided by n, through the closed form
// (Hbar_1 + (n-1) h) / n; decreases monotonically to the fiber entropy.
double entropy_rate_at(const RandomMarkovMeasure& mu, int n);

struct PhiStarOptions {
  int horizon = 8;             // the n of (1/n) integral of f_n
  double exact_budget = 1e7;   // enumerate while m * a^locality(n) fits
  long long samples = 1 << 17; // per-fiber Monte Carlo sample count otherwise
  std::uint64_t seed = 0;
  int threads = 1;
};

struct PhiStarEstimate {
  double value = 0.0;           // (1/horizon) * base-averaged integral of f_n
  int horizon = 0;
  bool exact = true;
  double std_error = 0.0;       // 0 for exact evaluation
  std::vector<double> per_fiber;  // integral of f_n d mu_omega, not divided
};

// (1/n) integral of f_n against the measure, exactly when the cylinder
// enumeration fits the budget, otherwise by counter-based Monte Carlo whose
// result is independent of the worker count.
PhiStarEstimate phi_star(const RandomMarkovMeasure& mu, const Potential& pot,
                         const PhiStarOptions& opts = {});

// Finitely many weighted words per fiber; fiber masses each sum to 1.
struct AtomicFiberMeasure {
  struct Atom {
    std::vector<std::uint8_t> symbols;
    double mass = 0.0;
  };
  std::vector<std::vector<Atom>> atoms;  // indexed by fiber
};

// The atomic family with masses exp(f_n) / Z_n(omega) on (n+t)-cylinder
// representatives, each extended to rep_len symbols (default n + t) along
// the lexicographically minimal admissible continuation.  Throws
// std::domain_error when some Z_n(omega) vanishes.
AtomicFiberMeasure gibbs_atomic(const RandomSFT& sys, const Potential& pot, int n, int t,
                                int rep_len = -1, double node_budget = 1 << 26);

// Base-averaged integral of f_n against the atomic family.
double atomic_integral(const RandomSFT& sys, const Potential& pot, const AtomicFiberMeasure& nu,
                       int n);

// Base-averaged entropy of the partition into length-prefix_len cylinders.
double atomic_prefix_entropy(const RandomSFT& sys, const AtomicFiberMeasure& nu, int prefix_len);

// (1/shifts) sum of the first `shifts` skew-shift pushforwards; atoms merge
// by (fiber, word) and every source atom must carry at least `shifts`
// symbols beyond nothing (its shifted copies keep symbols from index i on).
AtomicFiberMeasure cesaro_partial(const RandomSFT& sys, const AtomicFiberMeasure& nu, int shifts);

// Entropy plus integral equals log Z, fiber by fiber, for the gibbs_atomic
// family at horizon n and depth t; the residual is pure floating error.
struct GibbsIdentityReport {
  double entropy = 0.0;     // base-averaged (n+t)-cylinder entropy of nu
  double integral = 0.0;    // base-averaged integral of f_n d nu
  double log_partition = 0.0;
  double residual = 0.0;    // |entropy + integral - log_partition|
  bool pass(double tol) const { return residual <= tol; }
};
GibbsIdentityReport gibbs_identity_check(const RandomSFT& sys, const Potential& pot, int n, int t);

// Finite-horizon chaining bound: for any atomic family nu with long enough
// atoms and any 2 <= 2k <= n,
//   int f_n d nu <= ((n-k+1)/k) int f_k d mu' + 2k |f_1|,
// where mu' is the Cesaro average of the first n-k+1 shifts of nu and |f_1|
// is the base-averaged sup norm.  An infinite |f_1| passes trivially.
struct BlockChainReport {
  int n = 0;
  int k = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  bool pass(double tol) const { return margin >= -tol; }
};
BlockChainReport block_chain_check(const RandomSFT& sys, const Potential& pot,
                                   const AtomicFiberMeasure& nu, int n, int k);

// Entropy chunking: with nu the gibbs_atomic family at horizon n (atoms
// extended so every shift keeps q + t symbols) and mu its full n-step Cesaro
// average,
//   q Hbar_nu((n+t)-cylinders) <= n Hbar_mu((q+t)-cylinders)
//                                 + 2 q^2 (t+1) log a,
// for 1 < q < n.
struct ChunkingReport {
  int n = 0;
  int q = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  bool pass(double tol) const { return margin >= -tol; }
};
ChunkingReport chunking_check(const RandomSFT& sys, const Potential& pot, int n, int q, int t);

// A reproducible random measure: kernel rows drawn flat-Dirichlet on each
// live row's allowed targets (one stream per row), initials from
// from_kernels.
RandomMarkovMeasure sample_markov_measure(const std::shared_ptr<const RandomSFT>& sys,
                                          std::uint64_t seed);

// The same measure read on the k-block power system: super-symbol initials
// are k-step cylinder masses and super-kernels multiply the k step rows.
RandomMarkovMeasure lift_measure_power(const RandomMarkovMeasure& mu, int k);

}  // namespace subpress
