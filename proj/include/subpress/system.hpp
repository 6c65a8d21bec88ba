#pragma once

// Finite model of a bundle random dynamical system over symbolic fibers.
//
// The base is a finite weighted set of points permuted by an invertible map
// theta; weights are a theta-invariant probability vector.  Each base point
// omega carries a one-sided subshift: sequences x with
// A_{theta^i omega}(x_i, x_{i+1}) = 1 for all i, where A_omega is a 0/1
// transition matrix attached to the fiber.  The fiber map is the left shift,
// so the skew product sends (omega, x) to (theta omega, shift x).
//
// Finite admissible words stand in for cylinder sets: symbol i of a word
// anchored at omega is read at fiber theta^i omega.  A word is admissible
// when every step is allowed and its last symbol can still be extended;
// with the constructor's no-dead-end transition matrices the extendability
// clause is automatic, but k-block power systems (see power_system) contain
// super-symbols that are only usable on some fibers, and there the clause
// does real work.

#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace subpress {

// Budget overruns (enumerations that would exceed a stated cap) are resource
// errors, distinct from domain errors; the CLI maps them to exit code 3.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class BaseSystem {
 public:
  // perm must be a permutation of {0..m-1}; weights a probability vector
  // constant along perm-cycles (that is theta-invariance of the base law).
  BaseSystem(std::vector<int> perm, std::vector<double> weights);

  int size() const { return static_cast<int>(perm_.size()); }
  int step(int fiber) const { return perm_[check(fiber)]; }
  int step_back(int fiber) const { return inverse_[check(fiber)]; }
  int step_n(int fiber, int n) const;  // theta^n, n may be negative
  double weight(int fiber) const { return weights_[check(fiber)]; }

  const std::vector<int>& perm() const { return perm_; }
  const std::vector<double>& weights() const { return weights_; }

  // Cycles of theta, each listed from its smallest member in orbit order.
  std::vector<std::vector<int>> cycles() const;

  // Base of the k-fold power system: same points and weights, map theta^k.
  std::shared_ptr<const BaseSystem> power(int k) const;

 private:
  int check(int fiber) const {
    if (fiber < 0 || fiber >= size()) throw std::invalid_argument("fiber index out of range");
    return fiber;
  }
  std::vector<int> perm_;
  std::vector<int> inverse_;
  std::vector<double> weights_;
};

// A finite admissible word: symbols.size() symbols anchored at `fiber`.
// Construct through RandomSFT::make_word (or enumeration) so admissibility
// holds by construction; the empty word is the full-fiber cylinder.
struct Word {
  int fiber = 0;
  std::vector<std::uint8_t> symbols;

  bool operator==(const Word& o) const { return fiber == o.fiber && symbols == o.symbols; }
};

class RandomSFT {
 public:
  // transitions[omega] is the a-by-a matrix A_omega, row-major.  Every row
  // and every column of every A_omega must contain a 1 (no dead ends), so
  // each finite admissible word extends to an infinite point.
  RandomSFT(std::shared_ptr<const BaseSystem> base, int alphabet,
            std::vector<std::vector<std::uint8_t>> transitions);

  // k-block power: base theta^k, super-symbols = length-k words over the
  // original alphabet (lexicographically encoded), transitions induced by
  // concatenation admissibility.  Super-symbols that are inadmissible on a
  // fiber have empty rows/columns there, which is why liveness is tracked
  // per (fiber, symbol) instead of demanding dense matrices.
  static std::shared_ptr<const RandomSFT> power_system(const RandomSFT& sys, int k);

  const BaseSystem& base() const { return *base_; }
  const std::shared_ptr<const BaseSystem>& base_ptr() const { return base_; }
  int alphabet() const { return alphabet_; }

  bool transition(int fiber, int from, int to) const {
    return trans_[fiber][static_cast<std::size_t>(from) * alphabet_ + to] != 0;
  }
  // A symbol is live at a fiber when its transition row there is nonempty,
  // i.e. a point of the fiber can start with it.
  bool live(int fiber, int symbol) const { return live_[fiber][symbol] != 0; }

  bool is_admissible(int fiber, std::span<const std::uint8_t> symbols) const;
  Word make_word(int fiber, std::vector<std::uint8_t> symbols) const;

  // All admissible length-len words anchored at fiber, lexicographic order.
  std::vector<Word> enumerate_words(int fiber, int len) const;

  // Lexicographically smallest admissible extension of w to target_len
  // symbols (the canonical representative point of the cylinder [w]).
  Word extend_lex_min(const Word& w, int target_len) const;

  // Depth-first walk over admissible length-len words in lexicographic
  // order.  Hooks: push(symbol) / pop() around each tree edge and
  // leaf(symbols) at each complete word; enables incremental evaluation.
  template <class Hooks>
  void walk_words(int fiber, int len, Hooks&& hooks) const {
    if (len < 0) throw std::invalid_argument("walk_words: negative length");
    if (len == 0) return;
    std::vector<int> fibs(static_cast<std::size_t>(len));
    fibs[0] = fiber;
    base_->step(fiber);  // validates the fiber index
    for (int i = 1; i < len; ++i) fibs[i] = base_->step(fibs[i - 1]);
    std::vector<std::uint8_t> buf(static_cast<std::size_t>(len));
    walk_rec(fibs, buf, 0, len, hooks);
  }

  // Number of DFS nodes a length-len walk can touch, capped; used for
  // enumeration budgets.
  double node_budget_estimate(int len) const;

 private:
  template <class Hooks>
  void walk_rec(const std::vector<int>& fibs, std::vector<std::uint8_t>& buf, int depth, int len,
                Hooks& hooks) const {
    const int fib = fibs[depth];
    for (int s = 0; s < alphabet_; ++s) {
      const auto sym = static_cast<std::uint8_t>(s);
      if (depth == 0) {
        if (!live(fib, s)) continue;
      } else if (!transition(fibs[depth - 1], buf[depth - 1], s)) {
        continue;
      }
      if (depth == len - 1 && !live(fib, s)) continue;
      buf[depth] = sym;
      hooks.push(sym);
      if (depth == len - 1) {
        hooks.leaf(std::span<const std::uint8_t>(buf.data(), static_cast<std::size_t>(len)));
      } else {
        walk_rec(fibs, buf, depth + 1, len, hooks);
      }
      hooks.pop();
    }
  }

  struct PowerTag {};
  RandomSFT(PowerTag, std::shared_ptr<const BaseSystem> base, int alphabet,
            std::vector<std::vector<std::uint8_t>> transitions);
  void finish_init(bool require_dense);

  std::shared_ptr<const BaseSystem> base_;
  int alphabet_ = 0;
  std::vector<std::vector<std::uint8_t>> trans_;
  std::vector<std::vector<std::uint8_t>> live_;
};

// One step of the skew product on cylinder words: (omega, s0 s1 ... s_{n-1})
// becomes (theta omega, s1 ... s_{n-1}).
Word skew_step(const RandomSFT& sys, const Word& w);
Word skew_step_n(const RandomSFT& sys, const Word& w, int n);

// Lexicographic encode/decode between length-k symbol blocks and power
// super-symbols (first symbol most significant).
int encode_block(std::span<const std::uint8_t> symbols, int alphabet);
std::vector<std::uint8_t> decode_block(int code, int alphabet, int k);

}  // namespace subpress
