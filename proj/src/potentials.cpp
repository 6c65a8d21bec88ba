#include "subpress/potentials.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "subpress/ext_real.hpp"

namespace subpress {

namespace {

void check_n(int n) {
  if (n < 1) throw std::invalid_argument("potential: sequence index n must be >= 1");
}

// ---------------------------------------------------------------- constant

class ConstantWalker final : public CylinderWalker {
 public:
  explicit ConstantWalker(double value) : value_(value) {}
  void push(std::uint8_t) override {}
  void pop() override {}
  double value() const override { return value_; }

 private:
  double value_;
};

class ConstantPotential final : public Potential {
 public:
  explicit ConstantPotential(double c) : c_(c) {
    if (!std::isfinite(c)) throw std::invalid_argument("constant potential: c must be finite");
  }
  int locality(int n) const override {
    check_n(n);
    return 0;
  }
  std::unique_ptr<CylinderWalker> make_walker(int, int n) const override {
    check_n(n);
    return std::make_unique<ConstantWalker>(n * c_);
  }
  bool has_exact_averages() const override { return true; }

 private:
  double c_;
};

// ---------------------------------------------------------------- additive

class AdditivePotential;

class AdditiveWalker final : public CylinderWalker {
 public:
  AdditiveWalker(const AdditivePotential* pot, int fiber, int n);
  void push(std::uint8_t symbol) override;
  void pop() override;
  double value() const override { return sum_.empty() ? 0.0 : sum_.back(); }

 private:
  const AdditivePotential* pot_;
  int n_;
  std::vector<std::uint8_t> syms_;
  std::vector<int> fibs_;     // fibs_[i] = theta^i omega, grown on demand
  std::vector<double> sum_;   // running f_n after each push (for O(1) pop)
};

class AdditivePotential final : public Potential {
 public:
  AdditivePotential(std::shared_ptr<const BaseSystem> base, int alphabet, int depth,
                    std::vector<std::vector<double>> table)
      : base_(std::move(base)), alphabet_(alphabet), depth_(depth), table_(std::move(table)) {
    if (!base_) throw std::invalid_argument("additive potential: null base");
    if (alphabet_ < 1) throw std::invalid_argument("additive potential: bad alphabet");
    if (depth_ < 1) throw std::invalid_argument("additive potential: depth must be >= 1");
    std::size_t block_count = 1;
    for (int i = 0; i < depth_; ++i) {
      block_count *= static_cast<std::size_t>(alphabet_);
      if (block_count > (1u << 20))
        throw std::invalid_argument("additive potential: table too large");
    }
    if (static_cast<int>(table_.size()) != base_->size())
      throw std::invalid_argument("additive potential: one table per fiber required");
    for (const auto& tab : table_) {
      if (tab.size() != block_count)
        throw std::invalid_argument("additive potential: table must have alphabet^depth entries");
      for (double v : tab) {
        if (!std::isfinite(v))
          throw std::invalid_argument("additive potential: table entries must be finite");
      }
    }
  }

  int locality(int n) const override {
    check_n(n);
    return n + depth_ - 1;
  }
  std::unique_ptr<CylinderWalker> make_walker(int fiber, int n) const override {
    check_n(n);
    return std::make_unique<AdditiveWalker>(this, fiber, n);
  }
  bool has_exact_averages() const override { return true; }

  const BaseSystem& base() const { return *base_; }
  int alphabet() const { return alphabet_; }
  int depth() const { return depth_; }
  double site_value(int fiber, std::size_t block_index) const {
    return table_[fiber][block_index];
  }

 private:
  std::shared_ptr<const BaseSystem> base_;
  int alphabet_;
  int depth_;
  std::vector<std::vector<double>> table_;
};

AdditiveWalker::AdditiveWalker(const AdditivePotential* pot, int fiber, int n)
    : pot_(pot), n_(n) {
  fibs_.push_back(fiber);
  pot_->base().step(fiber);  // validates
}

void AdditiveWalker::push(std::uint8_t symbol) {
  const int depth = static_cast<int>(syms_.size());
  syms_.push_back(symbol);
  if (static_cast<int>(fibs_.size()) == depth + 1 &&
      depth + 1 < n_ + pot_->depth())  // no need to track fibers past locality
    fibs_.push_back(pot_->base().step(fibs_.back()));
  double s = sum_.empty() ? 0.0 : sum_.back();
  // Pushing symbol index `depth` completes the window starting at
  // j = depth - d + 1; only windows with 0 <= j < n contribute to f_n.
  const int d = pot_->depth();
  const int j = depth - d + 1;
  if (j >= 0 && j < n_) {
    std::size_t idx = 0;
    for (int i = 0; i < d; ++i)
      idx = idx * static_cast<std::size_t>(pot_->alphabet()) + syms_[static_cast<std::size_t>(j + i)];
    s += pot_->site_value(fibs_[static_cast<std::size_t>(j)], idx);
  }
  sum_.push_back(s);
}

void AdditiveWalker::pop() {
  syms_.pop_back();
  sum_.pop_back();
}

// ----------------------------------------------------------- matrix cocycle

class MatrixCocyclePotential;

class MatrixCocycleWalker final : public CylinderWalker {
 public:
  MatrixCocycleWalker(const MatrixCocyclePotential* pot, int fiber, int n);
  void push(std::uint8_t symbol) override;
  void pop() override;
  double value() const override;

 private:
  const MatrixCocyclePotential* pot_;
  int n_;
  int depth_ = 0;
  std::vector<int> fibs_;
  std::vector<Mat> prods_;  // prods_[i] = M(x_{i-1}) ... M(x_0), up to i = n
};

class MatrixCocyclePotential final : public Potential {
 public:
  MatrixCocyclePotential(std::shared_ptr<const BaseSystem> base, int alphabet,
                         std::vector<std::vector<Mat>> matrices, MatrixNorm norm)
      : base_(std::move(base)), alphabet_(alphabet), mats_(std::move(matrices)), norm_(norm) {
    if (!base_) throw std::invalid_argument("matrix cocycle: null base");
    if (alphabet_ < 1) throw std::invalid_argument("matrix cocycle: bad alphabet");
    if (static_cast<int>(mats_.size()) != base_->size())
      throw std::invalid_argument("matrix cocycle: one matrix family per fiber required");
    dim_ = -1;
    for (const auto& per_fiber : mats_) {
      if (static_cast<int>(per_fiber.size()) != alphabet_)
        throw std::invalid_argument("matrix cocycle: one matrix per symbol required");
      for (const auto& mat : per_fiber) {
        if (mat.rows() != mat.cols()) throw std::invalid_argument("matrix cocycle: square matrices required");
        if (dim_ < 0) dim_ = mat.rows();
        if (mat.rows() != dim_)
          throw std::invalid_argument("matrix cocycle: all matrices must share one size");
        for (double v : mat.data()) {
          if (!(v >= 0.0) || !std::isfinite(v))
            throw std::invalid_argument("matrix cocycle: entries must be finite and nonnegative");
        }
      }
    }
  }

  int locality(int n) const override {
    check_n(n);
    return n;
  }
  std::unique_ptr<CylinderWalker> make_walker(int fiber, int n) const override {
    check_n(n);
    return std::make_unique<MatrixCocycleWalker>(this, fiber, n);
  }
  bool has_exact_averages() const override { return false; }

  const BaseSystem& base() const { return *base_; }
  const Mat& matrix(int fiber, int symbol) const { return mats_[fiber][symbol]; }
  int dim() const { return dim_; }
  double norm_of(const Mat& m) const {
    return norm_ == MatrixNorm::Infinity ? inf_norm(m) : two_norm(m);
  }

 private:
  std::shared_ptr<const BaseSystem> base_;
  int alphabet_;
  std::vector<std::vector<Mat>> mats_;
  MatrixNorm norm_;
  int dim_ = 0;
};

MatrixCocycleWalker::MatrixCocycleWalker(const MatrixCocyclePotential* pot, int fiber, int n)
    : pot_(pot), n_(n) {
  fibs_.push_back(fiber);
  pot_->base().step(fiber);  // validates
  prods_.push_back(Mat::identity(pot_->dim()));
}

void MatrixCocycleWalker::push(std::uint8_t symbol) {
  if (depth_ < n_) {
    if (static_cast<int>(fibs_.size()) == depth_ + 1 && depth_ + 1 < n_)
      fibs_.push_back(pot_->base().step(fibs_.back()));
    prods_.push_back(pot_->matrix(fibs_[static_cast<std::size_t>(depth_)], symbol) * prods_.back());
  }
  ++depth_;
}

void MatrixCocycleWalker::pop() {
  --depth_;
  if (depth_ < n_) prods_.pop_back();
}

double MatrixCocycleWalker::value() const {
  // log of norm; a vanished product yields log(0) = -infinity.
  return std::log(pot_->norm_of(prods_.back()));
}

}  // namespace

// -------------------------------------------------------------------- zero

PotentialPtr zero_potential() { return std::make_shared<ConstantPotential>(0.0); }
PotentialPtr constant_potential(double c) { return std::make_shared<ConstantPotential>(c); }

// ------------------------------------------------------------------- power

namespace {

class PowerPotential final : public Potential {
 public:
  PowerPotential(PotentialPtr inner, int k) : inner_(std::move(inner)), k_(k) {
    if (!inner_) throw std::invalid_argument("power potential: null inner sequence");
    if (k_ < 1) throw std::invalid_argument("power potential: k must be >= 1");
  }
  int locality(int n) const override {
    check_n(n);
    return inner_->locality(k_ * n);
  }
  std::unique_ptr<CylinderWalker> make_walker(int fiber, int n) const override {
    check_n(n);
    return inner_->make_walker(fiber, k_ * n);
  }
  bool has_exact_averages() const override { return inner_->has_exact_averages(); }

 private:
  PotentialPtr inner_;
  int k_;
};

}  // namespace

PotentialPtr power_potential(PotentialPtr inner, int k) {
  if (k == 1) return inner;
  return std::make_shared<PowerPotential>(std::move(inner), k);
}

// -------------------------------------------------------------- block lift

namespace {

class BlockLiftWalker final : public CylinderWalker {
 public:
  BlockLiftWalker(std::unique_ptr<CylinderWalker> inner, int k, int alphabet)
      : inner_(std::move(inner)), k_(k), alphabet_(alphabet) {}
  void push(std::uint8_t super_symbol) override {
    const auto block = decode_block(super_symbol, alphabet_, k_);
    for (auto s : block) inner_->push(s);
  }
  void pop() override {
    for (int i = 0; i < k_; ++i) inner_->pop();
  }
  double value() const override { return inner_->value(); }

 private:
  std::unique_ptr<CylinderWalker> inner_;
  int k_;
  int alphabet_;
};

class BlockLiftPotential final : public Potential {
 public:
  BlockLiftPotential(PotentialPtr inner, int k, int alphabet)
      : inner_(std::move(inner)), k_(k), alphabet_(alphabet) {
    if (!inner_) throw std::invalid_argument("block lift: null inner sequence");
    if (k_ < 1) throw std::invalid_argument("block lift: k must be >= 1");
    if (alphabet_ < 1 || alphabet_ > 255) throw std::invalid_argument("block lift: bad alphabet");
  }
  int locality(int n) const override {
    check_n(n);
    const int orig = inner_->locality(k_ * n);
    return (orig + k_ - 1) / k_;  // ceil in super-symbols
  }
  std::unique_ptr<CylinderWalker> make_walker(int fiber, int n) const override {
    check_n(n);
    return std::make_unique<BlockLiftWalker>(inner_->make_walker(fiber, k_ * n), k_, alphabet_);
  }
  bool has_exact_averages() const override { return inner_->has_exact_averages(); }

 private:
  PotentialPtr inner_;
  int k_;
  int alphabet_;
};

}  // namespace

PotentialPtr additive_potential(std::shared_ptr<const BaseSystem> base, int alphabet, int depth,
                                std::vector<std::vector<double>> table) {
  return std::make_shared<AdditivePotential>(std::move(base), alphabet, depth, std::move(table));
}

PotentialPtr matrix_cocycle_potential(std::shared_ptr<const BaseSystem> base, int alphabet,
                                      std::vector<std::vector<Mat>> matrices, MatrixNorm norm) {
  return std::make_shared<MatrixCocyclePotential>(std::move(base), alphabet, std::move(matrices),
                                                  norm);
}

PotentialPtr lift_to_blocks(PotentialPtr inner, int k, int original_alphabet) {
  if (k == 1) return inner;
  return std::make_shared<BlockLiftPotential>(std::move(inner), k, original_alphabet);
}

double eval_potential(const Potential& pot, int n, const Word& w) {
  check_n(n);
  const int need = pot.locality(n);
  if (static_cast<int>(w.symbols.size()) < need)
    throw std::invalid_argument("eval_potential: word carries fewer than locality(n) symbols");
  auto walker = pot.make_walker(w.fiber, n);
  for (int i = 0; i < need; ++i) walker->push(w.symbols[static_cast<std::size_t>(i)]);
  return walker->value();
}

double sup_abs_f1(const RandomSFT& sys, const Potential& pot, int fiber) {
  const int len = pot.locality(1);
  if (len == 0) {
    auto walker = pot.make_walker(fiber, 1);
    return std::abs(walker->value());
  }
  struct MaxHooks {
    CylinderWalker* walker;
    double best = 0.0;
    void push(std::uint8_t s) { walker->push(s); }
    void pop() { walker->pop(); }
    void leaf(std::span<const std::uint8_t>) {
      const double v = std::abs(walker->value());
      if (v > best) best = v;
    }
  };
  auto walker = pot.make_walker(fiber, 1);
  MaxHooks hooks{walker.get()};
  sys.walk_words(fiber, len, hooks);
  return hooks.best;
}

double f1_norm(const RandomSFT& sys, const Potential& pot) {
  double total = 0.0;
  for (int f = 0; f < sys.base().size(); ++f) {
    const double w = sys.base().weight(f);
    if (w == 0.0) continue;
    const double s = sup_abs_f1(sys, pot, f);
    if (std::isinf(s)) return kPosInf;
    total += w * s;
  }
  return total;
}

SubadditivityReport check_subadditive(const Potential& pot, const RandomSFT& sys, int n_max) {
  if (n_max < 2) throw std::invalid_argument("check_subadditive: n_max must be >= 2");
  SubadditivityReport report;
  report.worst_margin = kPosInf;
  for (int total = 2; total <= n_max; ++total) {
    const int len = pot.locality(total);
    for (int fiber = 0; fiber < sys.base().size(); ++fiber) {
      // Locality 0 still gets one check per fiber, through the empty word.
      const std::vector<Word> words =
          len > 0 ? sys.enumerate_words(fiber, len) : std::vector<Word>{Word{fiber, {}}};
      for (const Word& w : words) {
        const double f_total = eval_potential(pot, total, w);
        for (int n = 1; n < total; ++n) {
          const int m = total - n;
          const double f_n = eval_potential(pot, n, w);
          const Word tail = len > 0 ? skew_step_n(sys, w, n)
                                    : Word{sys.base().step_n(w.fiber, n), {}};
          const double f_m = eval_potential(pot, m, tail);
          ++report.checks;
          // f_{n+m} = -inf satisfies the inequality no matter the split.
          double margin;
          if (is_neg_inf(f_total)) {
            margin = kPosInf;
          } else if (is_neg_inf(f_n) || is_neg_inf(f_m)) {
            margin = kNegInf;  // finite f_{n+m} from a vanished factor: violation
          } else {
            margin = f_n + f_m - f_total;
          }
          if (margin < report.worst_margin) {
            report.worst_margin = margin;
            report.fiber = fiber;
            report.split_n = n;
            report.split_m = m;
            report.word = w.symbols;
          }
        }
      }
    }
  }
  return report;
}

}  // namespace subpress
