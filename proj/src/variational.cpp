#include "subpress/variational.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "subpress/ext_real.hpp"
#include "subpress/rng.hpp"
#include "subpress/threading.hpp"

namespace subpress {

namespace {

// Kernel rows with a single allowed target are forced; rows with more get
// softmax coordinates, one per target.  Initial laws always come from the
// stationary construction, so the search space is exactly the invariant
// Markov family on the live transitions.
struct ParamRow {
  int fiber = 0;
  int symbol = 0;
  std::vector<int> targets;
  std::size_t offset = 0;
};

struct KernelSpace {
  std::shared_ptr<const RandomSFT> sys;
  std::vector<ParamRow> rows;
  std::vector<Mat> fixed;
  std::size_t dim = 0;
};

KernelSpace build_space(const std::shared_ptr<const RandomSFT>& sys) {
  KernelSpace space;
  space.sys = sys;
  const int m = sys->base().size();
  const int a = sys->alphabet();
  space.fixed.assign(static_cast<std::size_t>(m), Mat(a, a));
  for (int f = 0; f < m; ++f) {
    const int next = sys->base().step(f);
    for (int s = 0; s < a; ++s) {
      if (!sys->live(f, s)) continue;
      std::vector<int> targets;
      for (int t = 0; t < a; ++t)
        if (sys->transition(f, s, t) && sys->live(next, t)) targets.push_back(t);
      if (targets.empty())
        throw std::logic_error("search space: live row without allowed target");
      if (targets.size() == 1) {
        space.fixed[static_cast<std::size_t>(f)](s, targets[0]) = 1.0;
        continue;
      }
      ParamRow row;
      row.fiber = f;
      row.symbol = s;
      row.targets = std::move(targets);
      row.offset = space.dim;
      space.dim += row.targets.size();
      space.rows.push_back(std::move(row));
    }
  }
  return space;
}

RandomMarkovMeasure realize(const KernelSpace& space, const std::vector<double>& x) {
  std::vector<Mat> kernels = space.fixed;
  for (const ParamRow& row : space.rows) {
    double peak = x[row.offset];
    for (std::size_t i = 1; i < row.targets.size(); ++i)
      peak = std::max(peak, x[row.offset + i]);
    double total = 0.0;
    Mat& k = kernels[static_cast<std::size_t>(row.fiber)];
    for (std::size_t i = 0; i < row.targets.size(); ++i) {
      const double w = std::exp(x[row.offset + i] - peak);
      k(row.symbol, row.targets[static_cast<std::size_t>(i)]) = w;
      total += w;
    }
    for (int t : row.targets) k(row.symbol, t) /= total;
  }
  return RandomMarkovMeasure::from_kernels(space.sys, std::move(kernels));
}

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  long long evals = 0;
  std::vector<TraceRow> trace;
};

bool point_less(const std::vector<double>& a, const std::vector<double>& b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// Nelder-Mead descent with deterministic tie handling.  Values may be
// +infinity (objective at the bottom); NaN never enters.
template <class F>
SimplexResult simplex_minimize(std::vector<double> x0, double step, int max_evals, double tol,
                               F&& func) {
  const std::size_t dim = x0.size();
  SimplexResult out;
  out.x = x0;
  out.value = func(x0);
  out.evals = 1;
  if (dim == 0) {
    out.trace.push_back(TraceRow{0, -out.value, 0.0});
    return out;
  }

  std::vector<std::vector<double>> pts(dim + 1, x0);
  std::vector<double> vals(dim + 1, out.value);
  for (std::size_t i = 1; i <= dim; ++i) {
    pts[i][i - 1] += step;
    vals[i] = func(pts[i]);
    ++out.evals;
  }

  std::vector<std::size_t> idx(dim + 1);
  long long iteration = 0;
  while (out.evals < max_evals) {
    for (std::size_t i = 0; i <= dim; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      if (vals[a] != vals[b]) return vals[a] < vals[b];
      return point_less(pts[a], pts[b]);
    });
    const std::size_t best = idx[0], second = idx[dim - 1], worst = idx[dim];
    double diameter = 0.0;
    for (std::size_t i = 1; i <= dim; ++i)
      for (std::size_t j = 0; j < dim; ++j)
        diameter = std::max(diameter, std::abs(pts[idx[i]][j] - pts[best][j]));
    out.trace.push_back(TraceRow{iteration++, -vals[best], diameter});
    if (std::isinf(vals[best])) break;  // flat bottom landscape
    if (diameter < tol) break;
    if (vals[worst] - vals[best] <= 1e-14) break;  // numerically flat

    std::vector<double> centroid(dim, 0.0);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = 0; j < dim; ++j) centroid[j] += pts[idx[i]][j];
    for (double& c : centroid) c /= static_cast<double>(dim);

    auto blend = [&](double coeff) {
      std::vector<double> p(dim);
      for (std::size_t j = 0; j < dim; ++j)
        p[j] = centroid[j] + coeff * (pts[worst][j] - centroid[j]);
      return p;
    };

    const std::vector<double> xr = blend(-1.0);
    const double fr = func(xr);
    ++out.evals;
    if (fr < vals[best]) {
      const std::vector<double> xe = blend(-2.0);
      const double fe = func(xe);
      ++out.evals;
      if (fe < fr) {
        pts[worst] = xe;
        vals[worst] = fe;
      } else {
        pts[worst] = xr;
        vals[worst] = fr;
      }
    } else if (fr < vals[second]) {
      pts[worst] = xr;
      vals[worst] = fr;
    } else {
      const std::vector<double> xc = blend(fr < vals[worst] ? -0.5 : 0.5);
      const double fc = func(xc);
      ++out.evals;
      if (fc < std::min(fr, vals[worst])) {
        pts[worst] = xc;
        vals[worst] = fc;
      } else {
        for (std::size_t i = 1; i <= dim; ++i) {
          const std::size_t k = idx[i];
          for (std::size_t j = 0; j < dim; ++j)
            pts[k][j] = pts[idx[0]][j] + 0.5 * (pts[k][j] - pts[idx[0]][j]);
          vals[k] = func(pts[k]);
          ++out.evals;
        }
      }
    }
  }

  std::size_t pick = 0;
  for (std::size_t i = 1; i <= dim; ++i) {
    if (vals[i] < vals[pick] || (vals[i] == vals[pick] && point_less(pts[i], pts[pick])))
      pick = i;
  }
  out.x = pts[pick];
  out.value = vals[pick];
  return out;
}

}  // namespace

double objective_value(const RandomMarkovMeasure& mu, const Potential& pot,
                       const PhiStarOptions& opts) {
  PhiStarOptions eff = opts;
  if (pot.has_exact_averages()) eff.horizon = 1;
  const PhiStarEstimate phi = phi_star(mu, pot, eff);
  if (is_neg_inf(phi.value)) return kNegInf;
  return fiber_entropy(mu) + phi.value;
}

VariationalReport search_variational(const std::shared_ptr<const RandomSFT>& sys,
                                     const Potential& pot, int t,
                                     const std::vector<int>& schedule,
                                     const OptimizerOptions& opts) {
  if (!sys) throw std::invalid_argument("search_variational: null system");
  if (opts.starts < 1) throw std::invalid_argument("search_variational: need at least one start");
  if (opts.horizon < 1) throw std::invalid_argument("search_variational: horizon must be >= 1");
  if (opts.max_evals < 2) throw std::invalid_argument("search_variational: eval budget too small");

  const PressureEstimate pe = estimate_pressure(*sys, pot, t, schedule, opts.threads);
  const KernelSpace space = build_space(sys);

  PhiStarOptions pho;
  pho.horizon = opts.horizon;
  pho.exact_budget = opts.exact_budget;
  pho.samples = opts.samples;
  pho.seed = opts.seed;
  pho.threads = 1;

  auto cost = [&](const std::vector<double>& x) {
    const double obj = objective_value(realize(space, x), pot, pho);
    return -obj;  // -infinity objective becomes +infinity cost
  };

  const int starts = space.dim == 0 ? 1 : opts.starts;
  std::vector<SimplexResult> results(static_cast<std::size_t>(starts));
  run_indexed(static_cast<std::size_t>(starts), opts.threads, [&](std::size_t i) {
    std::vector<double> x0(space.dim, 0.0);
    if (i > 0) {
      SplitMix64 rng = stream_for(opts.seed, i);
      for (double& v : x0) v = -2.0 + 4.0 * rng.next_double();
    }
    results[i] = simplex_minimize(std::move(x0), opts.step, opts.max_evals, opts.tol, cost);
  });

  std::size_t best = 0;
  long long evals = results[0].evals;
  for (std::size_t i = 1; i < results.size(); ++i) {
    evals += results[i].evals;
    if (results[i].value < results[best].value ||
        (results[i].value == results[best].value && point_less(results[i].x, results[best].x)))
      best = i;
  }

  RandomMarkovMeasure measure = realize(space, results[best].x);
  const double best_objective = std::isinf(results[best].value) ? kNegInf : -results[best].value;
  const bool bottom = is_neg_inf(pe.reported);

  double allowance = 0.0;
  if (!bottom && !pot.has_exact_averages()) {
    const int h = opts.horizon;
    const int tphi = std::max(t, min_depth(pot, h));
    double a_phi = 0.0;
    for (int f = 0; f < sys->base().size(); ++f)
      a_phi += weighted_term(sys->base().weight(f), partition_function(*sys, pot, f, h, tphi));
    allowance = std::max(0.0, a_phi / h - pe.upper_envelope);
  }

  const double gap = bottom ? 0.0 : pe.reported - best_objective;

  return VariationalReport{std::move(measure),        best_objective,
                           pe.reported,               pe.upper_envelope,
                           gap,                       allowance,
                           bottom,                    static_cast<int>(best),
                           evals,                     std::move(results[best].trace)};
}

double power_objective(const RandomMarkovMeasure& mu, const PotentialPtr& pot, int k,
                       int horizon) {
  if (!pot) throw std::invalid_argument("power_objective: null potential");
  if (k < 1) throw std::invalid_argument("power_objective: k must be >= 1");
  const RandomMarkovMeasure lifted = lift_measure_power(mu, k);
  const PotentialPtr lifted_pot = lift_to_blocks(pot, k, mu.system().alphabet());
  PhiStarOptions opts;
  opts.horizon = horizon;
  return objective_value(lifted, *lifted_pot, opts);
}

}  // namespace subpress
