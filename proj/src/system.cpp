#include "subpress/system.hpp"

#include <algorithm>
#include <cmath>

namespace subpress {

namespace {
constexpr double kWeightTol = 1e-12;
}

BaseSystem::BaseSystem(std::vector<int> perm, std::vector<double> weights)
    : perm_(std::move(perm)), weights_(std::move(weights)) {
  const int m = static_cast<int>(perm_.size());
  if (m == 0) throw std::invalid_argument("base: empty point set");
  if (static_cast<int>(weights_.size()) != m)
    throw std::invalid_argument("base: weights size does not match perm size");
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m), 0);
  inverse_.assign(static_cast<std::size_t>(m), 0);
  for (int i = 0; i < m; ++i) {
    const int j = perm_[i];
    if (j < 0 || j >= m || seen[j]) throw std::invalid_argument("base: perm is not a permutation");
    seen[j] = 1;
    inverse_[j] = i;
  }
  double total = 0.0;
  for (int i = 0; i < m; ++i) {
    if (weights_[i] < 0.0) throw std::invalid_argument("base: negative weight");
    total += weights_[i];
  }
  if (std::abs(total - 1.0) > kWeightTol)
    throw std::invalid_argument("base: weights must sum to 1");
  for (int i = 0; i < m; ++i) {
    if (std::abs(weights_[perm_[i]] - weights_[i]) > kWeightTol)
      throw std::invalid_argument("base: weights must be invariant under the permutation");
  }
}

int BaseSystem::step_n(int fiber, int n) const {
  int f = check(fiber);
  if (n >= 0) {
    for (int i = 0; i < n; ++i) f = perm_[f];
  } else {
    for (int i = 0; i < -n; ++i) f = inverse_[f];
  }
  return f;
}

std::vector<std::vector<int>> BaseSystem::cycles() const {
  const int m = size();
  std::vector<std::uint8_t> seen(static_cast<std::size_t>(m), 0);
  std::vector<std::vector<int>> out;
  for (int start = 0; start < m; ++start) {
    if (seen[start]) continue;
    std::vector<int> cyc;
    int f = start;
    do {
      seen[f] = 1;
      cyc.push_back(f);
      f = perm_[f];
    } while (f != start);
    out.push_back(std::move(cyc));
  }
  return out;
}

std::shared_ptr<const BaseSystem> BaseSystem::power(int k) const {
  if (k < 1) throw std::invalid_argument("base power: k must be >= 1");
  const int m = size();
  std::vector<int> p(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) p[i] = step_n(i, k);
  return std::make_shared<BaseSystem>(std::move(p), weights_);
}

RandomSFT::RandomSFT(std::shared_ptr<const BaseSystem> base, int alphabet,
                     std::vector<std::vector<std::uint8_t>> transitions)
    : base_(std::move(base)), alphabet_(alphabet), trans_(std::move(transitions)) {
  finish_init(/*require_dense=*/true);
}

RandomSFT::RandomSFT(PowerTag, std::shared_ptr<const BaseSystem> base, int alphabet,
                     std::vector<std::vector<std::uint8_t>> transitions)
    : base_(std::move(base)), alphabet_(alphabet), trans_(std::move(transitions)) {
  finish_init(/*require_dense=*/false);
}

void RandomSFT::finish_init(bool require_dense) {
  if (!base_) throw std::invalid_argument("subshift: null base");
  const int m = base_->size();
  const int a = alphabet_;
  if (a < 1 || a > 255) throw std::invalid_argument("subshift: alphabet size out of range");
  if (static_cast<int>(trans_.size()) != m)
    throw std::invalid_argument("subshift: one transition matrix per fiber required");
  live_.assign(static_cast<std::size_t>(m), std::vector<std::uint8_t>(static_cast<std::size_t>(a), 0));
  for (int f = 0; f < m; ++f) {
    if (static_cast<int>(trans_[f].size()) != a * a)
      throw std::invalid_argument("subshift: transition matrix has wrong shape at fiber " +
                                  std::to_string(f));
    for (auto v : trans_[f]) {
      if (v > 1) throw std::invalid_argument("subshift: transition entries must be 0 or 1");
    }
    for (int i = 0; i < a; ++i) {
      int row = 0;
      for (int j = 0; j < a; ++j) row += trans_[f][static_cast<std::size_t>(i) * a + j];
      live_[f][i] = row > 0 ? 1 : 0;
    }
    if (require_dense) {
      for (int i = 0; i < a; ++i) {
        if (!live_[f][i])
          throw std::invalid_argument("subshift: empty transition row at fiber " +
                                      std::to_string(f) + ", symbol " + std::to_string(i));
        int col = 0;
        for (int j = 0; j < a; ++j) col += trans_[f][static_cast<std::size_t>(j) * a + i];
        if (col == 0)
          throw std::invalid_argument("subshift: empty transition column at fiber " +
                                      std::to_string(f) + ", symbol " + std::to_string(i));
      }
    }
  }
  // Liveness must propagate: a live symbol needs a live successor, or some
  // admissible word would fail to extend to an infinite point.
  for (int f = 0; f < m; ++f) {
    const int g = base_->step(f);
    bool any_live = false;
    for (int i = 0; i < a; ++i) {
      if (!live_[f][i]) continue;
      any_live = true;
      bool ok = false;
      for (int j = 0; j < a && !ok; ++j) ok = transition(f, i, j) && live(g, j);
      if (!ok)
        throw std::invalid_argument("subshift: live symbol with no live successor at fiber " +
                                    std::to_string(f) + ", symbol " + std::to_string(i));
    }
    if (!any_live)
      throw std::invalid_argument("subshift: fiber " + std::to_string(f) + " has no live symbol");
  }
}

bool RandomSFT::is_admissible(int fiber, std::span<const std::uint8_t> symbols) const {
  base_->step(fiber);  // validates the index
  const int len = static_cast<int>(symbols.size());
  if (len == 0) return true;
  for (auto s : symbols) {
    if (s >= alphabet_) return false;
  }
  int fib = fiber;
  if (!live(fib, symbols[0])) return false;
  for (int i = 0; i + 1 < len; ++i) {
    if (!transition(fib, symbols[i], symbols[i + 1])) return false;
    fib = base_->step(fib);
  }
  if (len > 1 && !live(fib, symbols[len - 1])) return false;
  return true;
}

Word RandomSFT::make_word(int fiber, std::vector<std::uint8_t> symbols) const {
  if (!is_admissible(fiber, symbols))
    throw std::invalid_argument("make_word: symbols are not admissible at the given fiber");
  return Word{fiber, std::move(symbols)};
}

namespace {
struct CollectHooks {
  int fiber;
  std::vector<Word>* out;
  void push(std::uint8_t) {}
  void pop() {}
  void leaf(std::span<const std::uint8_t> symbols) {
    out->push_back(Word{fiber, std::vector<std::uint8_t>(symbols.begin(), symbols.end())});
  }
};
}  // namespace

std::vector<Word> RandomSFT::enumerate_words(int fiber, int len) const {
  if (len < 1) throw std::invalid_argument("enumerate_words: length must be >= 1");
  std::vector<Word> out;
  CollectHooks hooks{fiber, &out};
  walk_words(fiber, len, hooks);
  return out;
}

Word RandomSFT::extend_lex_min(const Word& w, int target_len) const {
  if (target_len < static_cast<int>(w.symbols.size()))
    throw std::invalid_argument("extend_lex_min: target shorter than the word");
  Word out = w;
  out.symbols.reserve(static_cast<std::size_t>(target_len));
  int fib = base_->step_n(w.fiber, static_cast<int>(w.symbols.size()));
  while (static_cast<int>(out.symbols.size()) < target_len) {
    int chosen = -1;
    if (out.symbols.empty()) {
      for (int s = 0; s < alphabet_ && chosen < 0; ++s)
        if (live(fib, s)) chosen = s;
    } else {
      const int prev_fib = base_->step_back(fib);
      const std::uint8_t prev = out.symbols.back();
      for (int s = 0; s < alphabet_ && chosen < 0; ++s)
        if (transition(prev_fib, prev, s) && live(fib, s)) chosen = s;
    }
    if (chosen < 0)
      throw std::logic_error("extend_lex_min: no admissible extension (liveness violated)");
    out.symbols.push_back(static_cast<std::uint8_t>(chosen));
    fib = base_->step(fib);
  }
  return out;
}

double RandomSFT::node_budget_estimate(int len) const {
  return std::pow(static_cast<double>(alphabet_), static_cast<double>(len));
}

std::shared_ptr<const RandomSFT> RandomSFT::power_system(const RandomSFT& sys, int k) {
  if (k < 1) throw std::invalid_argument("power_system: k must be >= 1");
  const int a = sys.alphabet();
  double super_count = std::pow(static_cast<double>(a), static_cast<double>(k));
  if (super_count > 4096.0)
    throw ResourceError("power_system: super-alphabet a^k exceeds 4096 symbols");
  const int sa = static_cast<int>(super_count + 0.5);
  const int m = sys.base().size();

  // Chunk admissibility per (fiber, super-symbol).
  std::vector<std::vector<std::uint8_t>> adm(static_cast<std::size_t>(m),
                                             std::vector<std::uint8_t>(static_cast<std::size_t>(sa), 0));
  std::vector<std::vector<std::uint8_t>> blocks(static_cast<std::size_t>(sa));
  for (int u = 0; u < sa; ++u) blocks[u] = decode_block(u, a, k);
  for (int f = 0; f < m; ++f)
    for (int u = 0; u < sa; ++u)
      adm[f][u] = sys.is_admissible(f, blocks[u]) ? 1 : 0;

  std::vector<std::vector<std::uint8_t>> trans(
      static_cast<std::size_t>(m),
      std::vector<std::uint8_t>(static_cast<std::size_t>(sa) * sa, 0));
  for (int f = 0; f < m; ++f) {
    const int junction_fib = sys.base().step_n(f, k - 1);
    const int next_f = sys.base().step_n(f, k);
    for (int u = 0; u < sa; ++u) {
      if (!adm[f][u]) continue;
      const std::uint8_t tail = blocks[u][static_cast<std::size_t>(k) - 1];
      for (int v = 0; v < sa; ++v) {
        if (!adm[next_f][v]) continue;
        if (sys.transition(junction_fib, tail, blocks[v][0]))
          trans[f][static_cast<std::size_t>(u) * sa + v] = 1;
      }
    }
  }
  return std::shared_ptr<const RandomSFT>(
      new RandomSFT(PowerTag{}, sys.base().power(k), sa, std::move(trans)));
}

Word skew_step(const RandomSFT& sys, const Word& w) {
  if (w.symbols.empty()) throw std::invalid_argument("skew_step: empty word");
  Word out;
  out.fiber = sys.base().step(w.fiber);
  out.symbols.assign(w.symbols.begin() + 1, w.symbols.end());
  return out;
}

Word skew_step_n(const RandomSFT& sys, const Word& w, int n) {
  if (n < 0 || n > static_cast<int>(w.symbols.size()))
    throw std::invalid_argument("skew_step_n: shift count out of range");
  Word out;
  out.fiber = sys.base().step_n(w.fiber, n);
  out.symbols.assign(w.symbols.begin() + n, w.symbols.end());
  return out;
}

int encode_block(std::span<const std::uint8_t> symbols, int alphabet) {
  int code = 0;
  for (auto s : symbols) code = code * alphabet + s;
  return code;
}

std::vector<std::uint8_t> decode_block(int code, int alphabet, int k) {
  std::vector<std::uint8_t> out(static_cast<std::size_t>(k));
  for (int i = k - 1; i >= 0; --i) {
    out[i] = static_cast<std::uint8_t>(code % alphabet);
    code /= alphabet;
  }
  return out;
}

}  // namespace subpress
