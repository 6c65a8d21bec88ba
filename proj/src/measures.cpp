#include "subpress/measures.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "subpress/ext_real.hpp"
#include "subpress/pressure.hpp"
#include "subpress/rng.hpp"
#include "subpress/summation.hpp"
#include "subpress/threading.hpp"

namespace subpress {

namespace {

constexpr double kStochasticTol = 1e-10;

// Shape-checks the kernels and replaces the rows of non-live symbols by
// uniform ones (those rows are never read, the normalization only makes
// equal measures compare equal).
std::vector<Mat> sanitize_kernels(const RandomSFT& sys, std::vector<Mat> kernels) {
  const int m = sys.base().size();
  const int a = sys.alphabet();
  if (static_cast<int>(kernels.size()) != m)
    throw std::invalid_argument("markov measure: one kernel per fiber required");
  for (int f = 0; f < m; ++f) {
    Mat& k = kernels[static_cast<std::size_t>(f)];
    if (k.rows() != a || k.cols() != a)
      throw std::invalid_argument("markov measure: kernel must be alphabet by alphabet");
    const int next = sys.base().step(f);
    for (int s = 0; s < a; ++s) {
      if (!sys.live(f, s)) {
        for (int t = 0; t < a; ++t) k(s, t) = 1.0 / a;
        continue;
      }
      double row = 0.0;
      for (int t = 0; t < a; ++t) {
        const double v = k(s, t);
        if (!std::isfinite(v) || v < 0.0)
          throw std::invalid_argument("markov measure: kernel entries must be finite and nonnegative");
        if (v > 0.0 && (!sys.transition(f, s, t) || !sys.live(next, t)))
          throw std::invalid_argument("markov measure: kernel support escapes the transitions");
        row += v;
      }
      if (std::abs(row - 1.0) > kStochasticTol)
        throw std::invalid_argument("markov measure: kernel rows must be stochastic");
    }
  }
  return kernels;
}

// Depth-first mass walk: calls leaf(mass, walker_value_supplier) for every
// admissible length-len word with its cylinder mass, in lexicographic order.
template <class Leaf>
struct MassHooks {
  const RandomMarkovMeasure* mu;
  std::vector<int> fibs;   // fiber of each position
  std::vector<double> mass;  // mass of each prefix
  std::vector<std::uint8_t> syms;
  Leaf leaf_fn;

  void push(std::uint8_t s) {
    const std::size_t depth = syms.size();
    double next;
    if (depth == 0) {
      next = mu->initial(fibs[0])[s];
    } else {
      next = mass.back() * mu->kernel(fibs[depth - 1])(syms.back(), s);
    }
    syms.push_back(s);
    mass.push_back(next);
  }
  void pop() {
    syms.pop_back();
    mass.pop_back();
  }
  void leaf(std::span<const std::uint8_t> word) { leaf_fn(word, mass.back()); }
};

template <class Leaf>
void walk_with_mass(const RandomMarkovMeasure& mu, int fiber, int len, Leaf&& leaf_fn) {
  const RandomSFT& sys = mu.system();
  std::vector<int> fibs(static_cast<std::size_t>(std::max(len, 1)));
  fibs[0] = fiber;
  for (int i = 1; i < len; ++i)
    fibs[static_cast<std::size_t>(i)] = sys.base().step(fibs[static_cast<std::size_t>(i - 1)]);
  MassHooks<Leaf> hooks{&mu, std::move(fibs), {}, {}, std::forward<Leaf>(leaf_fn)};
  sys.walk_words(fiber, len, hooks);
}

}  // namespace

RandomMarkovMeasure::RandomMarkovMeasure(std::shared_ptr<const RandomSFT> sys,
                                         std::vector<std::vector<double>> initials,
                                         std::vector<Mat> kernels)
    : sys_(std::move(sys)) {
  if (!sys_) throw std::invalid_argument("markov measure: null system");
  const int m = sys_->base().size();
  const int a = sys_->alphabet();
  kernels_ = sanitize_kernels(*sys_, std::move(kernels));
  if (static_cast<int>(initials.size()) != m)
    throw std::invalid_argument("markov measure: one initial law per fiber required");
  for (int f = 0; f < m; ++f) {
    const auto& p = initials[static_cast<std::size_t>(f)];
    if (static_cast<int>(p.size()) != a)
      throw std::invalid_argument("markov measure: initial law needs one entry per symbol");
    double sum = 0.0;
    for (int s = 0; s < a; ++s) {
      const double v = p[static_cast<std::size_t>(s)];
      if (!std::isfinite(v) || v < 0.0)
        throw std::invalid_argument("markov measure: initial entries must be finite and nonnegative");
      if (v > 0.0 && !sys_->live(f, s))
        throw std::invalid_argument("markov measure: initial mass on a non-live symbol");
      sum += v;
    }
    if (std::abs(sum - 1.0) > kStochasticTol)
      throw std::invalid_argument("markov measure: initial law must sum to 1");
  }
  initials_ = std::move(initials);

  // Invariance: the kernel transports each initial law to the next fiber's.
  for (int f = 0; f < m; ++f) {
    const int next = sys_->base().step(f);
    const auto& p = initials_[static_cast<std::size_t>(f)];
    const Mat& k = kernels_[static_cast<std::size_t>(f)];
    for (int t = 0; t < a; ++t) {
      double q = 0.0;
      for (int s = 0; s < a; ++s)
        q += weighted_term(p[static_cast<std::size_t>(s)], k(s, t));
      if (std::abs(q - initials_[static_cast<std::size_t>(next)][static_cast<std::size_t>(t)]) >
          kStochasticTol)
        throw std::invalid_argument(
            "markov measure: initial laws are not transported by the kernels");
    }
  }
}

RandomMarkovMeasure RandomMarkovMeasure::from_kernels(std::shared_ptr<const RandomSFT> sys,
                                                      std::vector<Mat> kernels) {
  if (!sys) throw std::invalid_argument("markov measure: null system");
  const int m = sys->base().size();
  const int a = sys->alphabet();
  kernels = sanitize_kernels(*sys, std::move(kernels));
  std::vector<std::vector<double>> initials(static_cast<std::size_t>(m),
                                            std::vector<double>(static_cast<std::size_t>(a), 0.0));

  for (const auto& cycle : sys->base().cycles()) {
    // Stationary law of the cycle product, by damped power iteration from
    // the uniform law on live symbols.
    const int start = cycle.front();
    std::vector<double> x(static_cast<std::size_t>(a), 0.0);
    int live_count = 0;
    for (int s = 0; s < a; ++s)
      if (sys->live(start, s)) ++live_count;
    if (live_count == 0) throw std::logic_error("markov measure: fiber without live symbols");
    for (int s = 0; s < a; ++s)
      if (sys->live(start, s)) x[static_cast<std::size_t>(s)] = 1.0 / live_count;

    auto around_cycle = [&](const std::vector<double>& v) {
      std::vector<double> cur = v;
      for (int f : cycle) {
        const Mat& k = kernels[static_cast<std::size_t>(f)];
        std::vector<double> nxt(static_cast<std::size_t>(a), 0.0);
        for (int s = 0; s < a; ++s) {
          const double c = cur[static_cast<std::size_t>(s)];
          if (c == 0.0) continue;
          for (int t = 0; t < a; ++t) nxt[static_cast<std::size_t>(t)] += c * k(s, t);
        }
        cur = std::move(nxt);
      }
      return cur;
    };

    bool converged = false;
    for (int iter = 0; iter < 100000; ++iter) {
      std::vector<double> y = around_cycle(x);
      double resid = 0.0, total = 0.0;
      for (int s = 0; s < a; ++s) {
        resid += std::abs(y[static_cast<std::size_t>(s)] - x[static_cast<std::size_t>(s)]);
        total += y[static_cast<std::size_t>(s)];
      }
      if (resid <= 1e-12) {
        for (int s = 0; s < a; ++s) x[static_cast<std::size_t>(s)] = y[static_cast<std::size_t>(s)] / total;
        converged = true;
        break;
      }
      // Damping kills rotation between stochastic eigenvalues on the unit
      // circle; normalization keeps the drift out of the residual.
      total = 0.0;
      for (int s = 0; s < a; ++s) {
        x[static_cast<std::size_t>(s)] = 0.5 * (x[static_cast<std::size_t>(s)] + y[static_cast<std::size_t>(s)]);
        total += x[static_cast<std::size_t>(s)];
      }
      for (int s = 0; s < a; ++s) x[static_cast<std::size_t>(s)] /= total;
    }
    if (!converged)
      throw ResourceError("markov measure: stationary initial iteration did not converge");

    initials[static_cast<std::size_t>(start)] = x;
    for (std::size_t j = 1; j < cycle.size(); ++j) {
      const int prev = cycle[j - 1];
      const Mat& k = kernels[static_cast<std::size_t>(prev)];
      auto& out = initials[static_cast<std::size_t>(cycle[j])];
      const auto& in = initials[static_cast<std::size_t>(prev)];
      for (int t = 0; t < a; ++t) {
        double q = 0.0;
        for (int s = 0; s < a; ++s) q += in[static_cast<std::size_t>(s)] * k(s, t);
        out[static_cast<std::size_t>(t)] = q;
      }
    }
  }
  return RandomMarkovMeasure(std::move(sys), std::move(initials), std::move(kernels));
}

const std::vector<double>& RandomMarkovMeasure::initial(int fiber) const {
  sys_->base().step(fiber);  // validates the index
  return initials_[static_cast<std::size_t>(fiber)];
}

const Mat& RandomMarkovMeasure::kernel(int fiber) const {
  sys_->base().step(fiber);
  return kernels_[static_cast<std::size_t>(fiber)];
}

double RandomMarkovMeasure::word_mass(const Word& w) const {
  const int a = sys_->alphabet();
  sys_->base().step(w.fiber);
  if (w.symbols.empty()) return 1.0;
  for (auto s : w.symbols)
    if (s >= a) throw std::invalid_argument("word_mass: symbol outside the alphabet");
  double mass = initials_[static_cast<std::size_t>(w.fiber)][w.symbols[0]];
  int fib = w.fiber;
  for (std::size_t i = 0; i + 1 < w.symbols.size(); ++i) {
    if (mass == 0.0) return 0.0;
    mass *= kernels_[static_cast<std::size_t>(fib)](w.symbols[i], w.symbols[i + 1]);
    fib = sys_->base().step(fib);
  }
  return mass;
}

double RandomMarkovMeasure::initial_entropy() const {
  CompensatedSum total;
  for (int f = 0; f < sys_->base().size(); ++f) {
    double ent = 0.0;
    for (double v : initials_[static_cast<std::size_t>(f)]) ent -= xlogx(v);
    total.add(weighted_term(sys_->base().weight(f), ent));
  }
  return total.value();
}

double fiber_entropy(const RandomMarkovMeasure& mu) {
  const RandomSFT& sys = mu.system();
  const int a = sys.alphabet();
  CompensatedSum total;
  for (int f = 0; f < sys.base().size(); ++f) {
    const auto& p = mu.initial(f);
    const Mat& k = mu.kernel(f);
    double ent = 0.0;
    for (int s = 0; s < a; ++s) {
      double row = 0.0;
      for (int t = 0; t < a; ++t) row -= xlogx(k(s, t));
      ent += weighted_term(p[static_cast<std::size_t>(s)], row);
    }
    total.add(weighted_term(sys.base().weight(f), ent));
  }
  return total.value();
}

double cylinder_entropy_avg(const RandomMarkovMeasure& mu, int n, double node_budget) {
  if (n < 1) throw std::invalid_argument("cylinder_entropy_avg: n must be >= 1");
  const RandomSFT& sys = mu.system();
  if (sys.node_budget_estimate(n) > node_budget)
    throw ResourceError("cylinder_entropy_avg: enumeration exceeds the node budget");
  CompensatedSum total;
  for (int f = 0; f < sys.base().size(); ++f) {
    CompensatedSum ent;
    walk_with_mass(mu, f, n,
                   [&](std::span<const std::uint8_t>, double mass) { ent.add(-xlogx(mass)); });
    total.add(weighted_term(sys.base().weight(f), ent.value()));
  }
  return total.value();
}

double entropy_rate_at(const RandomMarkovMeasure& mu, int n) {
  if (n < 1) throw std::invalid_argument("entropy_rate_at: n must be >= 1");
  return (mu.initial_entropy() + (n - 1) * fiber_entropy(mu)) / n;
}

PhiStarEstimate phi_star(const RandomMarkovMeasure& mu, const Potential& pot,
                         const PhiStarOptions& opts) {
  const int n = opts.horizon;
  if (n < 1) throw std::invalid_argument("phi_star: horizon must be >= 1");
  if (opts.samples < 1) throw std::invalid_argument("phi_star: sample count must be >= 1");
  const RandomSFT& sys = mu.system();
  const int m = sys.base().size();
  const int loc = pot.locality(n);

  PhiStarEstimate est;
  est.horizon = n;
  est.per_fiber.assign(static_cast<std::size_t>(m), 0.0);

  const double nodes = static_cast<double>(m) * sys.node_budget_estimate(loc);
  if (nodes <= opts.exact_budget) {
    est.exact = true;
    run_indexed(static_cast<std::size_t>(m), opts.threads, [&](std::size_t task) {
      const int f = static_cast<int>(task);
      if (loc == 0) {
        est.per_fiber[task] = pot.make_walker(f, n)->value();
        return;
      }
      auto walker = pot.make_walker(f, n);
      CompensatedSum acc;
      bool bottom = false;
      // One combined walk: the mass hooks carry the cylinder weights while
      // the potential walker tracks f_n of the same prefix.
      std::vector<int> fibs(static_cast<std::size_t>(loc));
      fibs[0] = f;
      for (int i = 1; i < loc; ++i)
        fibs[static_cast<std::size_t>(i)] = sys.base().step(fibs[static_cast<std::size_t>(i - 1)]);
      struct Combined {
        CylinderWalker* walker;
        const RandomMarkovMeasure* mu;
        std::vector<int> fibs;
        std::vector<double> mass;
        std::vector<std::uint8_t> syms;
        CompensatedSum* acc;
        bool* bottom;
        void push(std::uint8_t s) {
          const std::size_t depth = syms.size();
          const double next = depth == 0
                                  ? mu->initial(fibs[0])[s]
                                  : mass.back() * mu->kernel(fibs[depth - 1])(syms.back(), s);
          syms.push_back(s);
          mass.push_back(next);
          walker->push(s);
        }
        void pop() {
          syms.pop_back();
          mass.pop_back();
          walker->pop();
        }
        void leaf(std::span<const std::uint8_t>) {
          const double w = mass.back();
          if (w == 0.0) return;
          const double v = walker->value();
          if (is_neg_inf(v)) {
            *bottom = true;
          } else {
            acc->add(w * v);
          }
        }
      };
      Combined hooks{walker.get(), &mu, std::move(fibs), {}, {}, &acc, &bottom};
      sys.walk_words(f, loc, hooks);
      est.per_fiber[task] = bottom ? kNegInf : acc.value();
    });
    est.std_error = 0.0;
  } else {
    est.exact = false;
    const long long samples = opts.samples;
    const long long block = 8192;
    const long long blocks = (samples + block - 1) / block;
    std::vector<double> block_sum(static_cast<std::size_t>(m * blocks), 0.0);
    std::vector<double> block_sq(static_cast<std::size_t>(m * blocks), 0.0);
    std::vector<std::uint8_t> block_bottom(static_cast<std::size_t>(m * blocks), 0);

    run_indexed(static_cast<std::size_t>(m * blocks), opts.threads, [&](std::size_t task) {
      const int f = static_cast<int>(task / static_cast<std::size_t>(blocks));
      const long long b = static_cast<long long>(task % static_cast<std::size_t>(blocks));
      std::vector<int> fibs(static_cast<std::size_t>(loc));
      fibs[0] = f;
      for (int i = 1; i < loc; ++i)
        fibs[static_cast<std::size_t>(i)] = sys.base().step(fibs[static_cast<std::size_t>(i - 1)]);
      auto walker = pot.make_walker(f, n);
      CompensatedSum sum, sq;
      bool bottom = false;
      std::vector<std::uint8_t> path(static_cast<std::size_t>(loc));
      const long long hi = std::min(samples, (b + 1) * block);
      for (long long j = b * block; j < hi; ++j) {
        // One stream per (fiber, sample): the estimate cannot depend on how
        // blocks land on workers.
        SplitMix64 rng = stream_for(opts.seed, static_cast<std::uint64_t>(f) * static_cast<std::uint64_t>(samples) + static_cast<std::uint64_t>(j));
        for (int i = 0; i < loc; ++i) {
          const double u = rng.next_double();
          double cum = 0.0;
          int chosen = -1;
          for (int s = 0; s < sys.alphabet(); ++s) {
            const double p = i == 0 ? mu.initial(f)[static_cast<std::size_t>(s)]
                                    : mu.kernel(fibs[static_cast<std::size_t>(i - 1)])(
                                          path[static_cast<std::size_t>(i - 1)], s);
            if (p <= 0.0) continue;
            cum += p;
            chosen = s;
            if (u < cum) break;
          }
          if (chosen < 0) throw std::logic_error("phi_star: sampled row carries no mass");
          path[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(chosen);
        }
        for (int i = 0; i < loc; ++i) walker->push(path[static_cast<std::size_t>(i)]);
        const double v = walker->value();
        for (int i = 0; i < loc; ++i) walker->pop();
        if (is_neg_inf(v)) {
          bottom = true;
          break;
        }
        sum.add(v);
        sq.add(v * v);
      }
      block_sum[task] = sum.value();
      block_sq[task] = sq.value();
      block_bottom[task] = bottom ? 1 : 0;
    });

    double se_sq = 0.0;
    for (int f = 0; f < m; ++f) {
      CompensatedSum sum, sq;
      bool bottom = false;
      for (long long b = 0; b < blocks; ++b) {
        const std::size_t idx = static_cast<std::size_t>(f) * static_cast<std::size_t>(blocks) +
                                static_cast<std::size_t>(b);
        if (block_bottom[idx]) bottom = true;
        sum.add(block_sum[idx]);
        sq.add(block_sq[idx]);
      }
      if (bottom) {
        est.per_fiber[static_cast<std::size_t>(f)] = kNegInf;
        continue;
      }
      const double mean = sum.value() / samples;
      est.per_fiber[static_cast<std::size_t>(f)] = mean;
      if (samples > 1) {
        const double var =
            std::max(0.0, (sq.value() - samples * mean * mean) / (samples - 1.0));
        const double w = sys.base().weight(f);
        se_sq += (w * w) * var / samples;
      }
    }
    est.std_error = std::sqrt(se_sq) / n;
  }

  bool bottom = false;
  CompensatedSum total;
  for (int f = 0; f < m; ++f) {
    const double w = sys.base().weight(f);
    if (w == 0.0) continue;
    const double v = est.per_fiber[static_cast<std::size_t>(f)];
    if (is_neg_inf(v)) {
      bottom = true;
      break;
    }
    total.add(w * v);
  }
  est.value = bottom ? kNegInf : total.value() / n;
  if (bottom) est.std_error = 0.0;
  return est;
}

AtomicFiberMeasure gibbs_atomic(const RandomSFT& sys, const Potential& pot, int n, int t,
                                int rep_len, double node_budget) {
  if (n < 1) throw std::invalid_argument("gibbs_atomic: horizon must be >= 1");
  if (t < min_depth(pot, n))
    throw std::invalid_argument("gibbs_atomic: separation depth below the locality excess");
  if (rep_len < 0) rep_len = n + t;
  if (rep_len < n + t)
    throw std::invalid_argument("gibbs_atomic: representatives need at least n + t symbols");
  if (sys.node_budget_estimate(n + t) > node_budget)
    throw ResourceError("gibbs_atomic: enumeration exceeds the node budget");

  AtomicFiberMeasure nu;
  nu.atoms.resize(static_cast<std::size_t>(sys.base().size()));
  for (int f = 0; f < sys.base().size(); ++f) {
    const auto words = sys.enumerate_words(f, n + t);
    std::vector<double> values(words.size());
    CompensatedSum expsum;
    for (std::size_t i = 0; i < words.size(); ++i) {
      values[i] = eval_potential(pot, n, words[i]);
      expsum.add(std::exp(values[i]));
    }
    const double z = expsum.value();
    if (!(z > 0.0))
      throw std::domain_error("gibbs_atomic: partition function vanishes on a fiber");
    auto& out = nu.atoms[static_cast<std::size_t>(f)];
    out.reserve(words.size());
    for (std::size_t i = 0; i < words.size(); ++i) {
      const double mass = std::exp(values[i]) / z;
      Word rep = rep_len > n + t ? sys.extend_lex_min(words[i], rep_len) : words[i];
      out.push_back(AtomicFiberMeasure::Atom{std::move(rep.symbols), mass});
    }
  }
  return nu;
}

double atomic_integral(const RandomSFT& sys, const Potential& pot, const AtomicFiberMeasure& nu,
                       int n) {
  if (static_cast<int>(nu.atoms.size()) != sys.base().size())
    throw std::invalid_argument("atomic_integral: one atom list per fiber required");
  CompensatedSum total;
  for (int f = 0; f < sys.base().size(); ++f) {
    const double w = sys.base().weight(f);
    if (w == 0.0) continue;
    CompensatedSum acc;
    bool bottom = false;
    for (const auto& atom : nu.atoms[static_cast<std::size_t>(f)]) {
      if (atom.mass < 0.0) throw std::invalid_argument("atomic_integral: negative atom mass");
      if (atom.mass == 0.0) continue;
      const double v = eval_potential(pot, n, Word{f, atom.symbols});
      if (is_neg_inf(v)) {
        bottom = true;
        break;
      }
      acc.add(atom.mass * v);
    }
    if (bottom) return kNegInf;
    total.add(w * acc.value());
  }
  return total.value();
}

double atomic_prefix_entropy(const RandomSFT& sys, const AtomicFiberMeasure& nu, int prefix_len) {
  if (prefix_len < 1) throw std::invalid_argument("atomic_prefix_entropy: prefix must be >= 1");
  if (static_cast<int>(nu.atoms.size()) != sys.base().size())
    throw std::invalid_argument("atomic_prefix_entropy: one atom list per fiber required");
  CompensatedSum total;
  for (int f = 0; f < sys.base().size(); ++f) {
    std::map<std::vector<std::uint8_t>, double> cells;
    for (const auto& atom : nu.atoms[static_cast<std::size_t>(f)]) {
      if (static_cast<int>(atom.symbols.size()) < prefix_len)
        throw std::invalid_argument("atomic_prefix_entropy: atom shorter than the prefix");
      std::vector<std::uint8_t> key(atom.symbols.begin(), atom.symbols.begin() + prefix_len);
      cells[key] += atom.mass;
    }
    CompensatedSum ent;
    for (const auto& [key, mass] : cells) ent.add(-xlogx(mass));
    total.add(weighted_term(sys.base().weight(f), ent.value()));
  }
  return total.value();
}

AtomicFiberMeasure cesaro_partial(const RandomSFT& sys, const AtomicFiberMeasure& nu, int shifts) {
  if (shifts < 1) throw std::invalid_argument("cesaro_partial: shift count must be >= 1");
  if (static_cast<int>(nu.atoms.size()) != sys.base().size())
    throw std::invalid_argument("cesaro_partial: one atom list per fiber required");
  const int m = sys.base().size();
  std::vector<std::map<std::vector<std::uint8_t>, double>> cells(static_cast<std::size_t>(m));
  for (int f = 0; f < m; ++f) {
    for (const auto& atom : nu.atoms[static_cast<std::size_t>(f)]) {
      if (static_cast<int>(atom.symbols.size()) < shifts)
        throw std::invalid_argument("cesaro_partial: atom shorter than the shift count");
      const double part = atom.mass / shifts;
      for (int i = 0; i < shifts; ++i) {
        const int target = sys.base().step_n(f, i);
        std::vector<std::uint8_t> suffix(atom.symbols.begin() + i, atom.symbols.end());
        cells[static_cast<std::size_t>(target)][std::move(suffix)] += part;
      }
    }
  }
  AtomicFiberMeasure out;
  out.atoms.resize(static_cast<std::size_t>(m));
  for (int f = 0; f < m; ++f) {
    auto& list = out.atoms[static_cast<std::size_t>(f)];
    list.reserve(cells[static_cast<std::size_t>(f)].size());
    for (auto& [word, mass] : cells[static_cast<std::size_t>(f)])
      list.push_back(AtomicFiberMeasure::Atom{word, mass});
  }
  return out;
}

GibbsIdentityReport gibbs_identity_check(const RandomSFT& sys, const Potential& pot, int n,
                                         int t) {
  const AtomicFiberMeasure nu = gibbs_atomic(sys, pot, n, t);
  GibbsIdentityReport report;
  report.entropy = atomic_prefix_entropy(sys, nu, n + t);
  report.integral = atomic_integral(sys, pot, nu, n);
  CompensatedSum lz;
  for (int f = 0; f < sys.base().size(); ++f)
    lz.add(weighted_term(sys.base().weight(f), partition_function(sys, pot, f, n, t)));
  report.log_partition = lz.value();
  report.residual = std::abs(report.entropy + report.integral - report.log_partition);
  return report;
}

BlockChainReport block_chain_check(const RandomSFT& sys, const Potential& pot,
                                   const AtomicFiberMeasure& nu, int n, int k) {
  if (k < 1 || 2 * k > n)
    throw std::invalid_argument("block_chain_check: need 1 <= k and 2k <= n");
  BlockChainReport report;
  report.n = n;
  report.k = k;
  report.lhs = atomic_integral(sys, pot, nu, n);
  if (is_neg_inf(report.lhs)) {
    report.rhs = kPosInf;
    report.margin = kPosInf;
    return report;
  }
  const double f1 = f1_norm(sys, pot);
  if (std::isinf(f1)) {
    report.rhs = kPosInf;
    report.margin = kPosInf;
    return report;
  }
  const AtomicFiberMeasure shifted = cesaro_partial(sys, nu, n - k + 1);
  const double ik = atomic_integral(sys, pot, shifted, k);
  if (is_neg_inf(ik)) {
    // A vanished f_k with positive mass forces f_n there to vanish too, so
    // this branch marks a genuine violation.
    report.rhs = kNegInf;
    report.margin = kNegInf;
    return report;
  }
  report.rhs = (static_cast<double>(n - k + 1) / k) * ik + 2.0 * k * f1;
  report.margin = report.rhs - report.lhs;
  return report;
}

ChunkingReport chunking_check(const RandomSFT& sys, const Potential& pot, int n, int q, int t) {
  if (q <= 1 || q >= n) throw std::invalid_argument("chunking_check: need 1 < q < n");
  ChunkingReport report;
  report.n = n;
  report.q = q;
  const AtomicFiberMeasure nu = gibbs_atomic(sys, pot, n, t, n + t + q);
  report.lhs = q * atomic_prefix_entropy(sys, nu, n + t);
  const AtomicFiberMeasure mu = cesaro_partial(sys, nu, n);
  report.rhs = n * atomic_prefix_entropy(sys, mu, q + t) +
               2.0 * q * q * (t + 1) * std::log(static_cast<double>(sys.alphabet()));
  report.margin = report.rhs - report.lhs;
  return report;
}

RandomMarkovMeasure sample_markov_measure(const std::shared_ptr<const RandomSFT>& sys,
                                          std::uint64_t seed) {
  if (!sys) throw std::invalid_argument("sample_markov_measure: null system");
  const int m = sys->base().size();
  const int a = sys->alphabet();
  std::vector<Mat> kernels(static_cast<std::size_t>(m), Mat(a, a));
  for (int f = 0; f < m; ++f) {
    const int next = sys->base().step(f);
    Mat& k = kernels[static_cast<std::size_t>(f)];
    for (int s = 0; s < a; ++s) {
      if (!sys->live(f, s)) {
        for (int t = 0; t < a; ++t) k(s, t) = 1.0 / a;
        continue;
      }
      // Flat Dirichlet over the allowed targets, one stream per row.
      SplitMix64 rng = stream_for(seed, static_cast<std::uint64_t>(f) * static_cast<std::uint64_t>(a) +
                                            static_cast<std::uint64_t>(s));
      double total = 0.0;
      for (int t = 0; t < a; ++t) {
        if (sys->transition(f, s, t) && sys->live(next, t)) {
          k(s, t) = -std::log(rng.next_positive_double());
          total += k(s, t);
        }
      }
      if (total == 0.0)
        throw std::logic_error("sample_markov_measure: live row with no allowed target");
      for (int t = 0; t < a; ++t) k(s, t) /= total;
    }
  }
  return RandomMarkovMeasure::from_kernels(sys, std::move(kernels));
}

RandomMarkovMeasure lift_measure_power(const RandomMarkovMeasure& mu, int k) {
  if (k < 1) throw std::invalid_argument("lift_measure_power: k must be >= 1");
  if (k == 1) return mu;
  const auto& sys = mu.system_ptr();
  const auto power = RandomSFT::power_system(*sys, k);
  const int m = sys->base().size();
  const int a = sys->alphabet();
  const int sa = power->alphabet();

  std::vector<std::vector<double>> initials(static_cast<std::size_t>(m),
                                            std::vector<double>(static_cast<std::size_t>(sa), 0.0));
  std::vector<Mat> kernels(static_cast<std::size_t>(m), Mat(sa, sa));
  std::vector<std::vector<std::uint8_t>> blocks(static_cast<std::size_t>(sa));
  for (int u = 0; u < sa; ++u) blocks[static_cast<std::size_t>(u)] = decode_block(u, a, k);

  for (int f = 0; f < m; ++f) {
    for (int u = 0; u < sa; ++u) {
      if (!power->live(f, u)) continue;
      initials[static_cast<std::size_t>(f)][static_cast<std::size_t>(u)] =
          mu.word_mass(Word{f, blocks[static_cast<std::size_t>(u)]});
    }
    Mat& kk = kernels[static_cast<std::size_t>(f)];
    const int junction = sys->base().step_n(f, k - 1);
    for (int u = 0; u < sa; ++u) {
      if (!power->live(f, u)) continue;
      const auto& ub = blocks[static_cast<std::size_t>(u)];
      for (int v = 0; v < sa; ++v) {
        if (!power->transition(f, u, v)) continue;
        const auto& vb = blocks[static_cast<std::size_t>(v)];
        double p = mu.kernel(junction)(ub.back(), vb.front());
        int fib = sys->base().step(junction);
        for (int j = 0; j + 1 < k; ++j) {
          p *= mu.kernel(fib)(vb[static_cast<std::size_t>(j)], vb[static_cast<std::size_t>(j + 1)]);
          fib = sys->base().step(fib);
        }
        kk(u, v) = p;
      }
    }
  }
  return RandomMarkovMeasure(power, std::move(initials), std::move(kernels));
}

}  // namespace subpress
