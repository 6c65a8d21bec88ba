#include "subpress/metric.hpp"

namespace subpress {

int separation_depth(double lambda, double epsilon) {
  if (!(lambda > 0.0) || !(lambda < 1.0))
    throw std::invalid_argument("metric: lambda must lie in (0, 1)");
  if (!(epsilon > 0.0) || !(epsilon <= 1.0))
    throw std::invalid_argument("metric: epsilon must lie in (0, 1]");
  int t = 0;
  double p = lambda;  // lambda^{t+1}
  while (p >= epsilon) {
    ++t;
    p *= lambda;
    if (t > 4096) throw std::invalid_argument("metric: epsilon too small for this lambda");
  }
  return t;
}

MetricParams::MetricParams(double lambda_, double epsilon_)
    : lambda(lambda_), epsilon(epsilon_), depth(separation_depth(lambda_, epsilon_)) {}

MetricParams MetricParams::from_depth(double lambda_, int depth_) {
  if (depth_ < 0) throw std::invalid_argument("metric: depth must be >= 0");
  if (!(lambda_ > 0.0) || !(lambda_ < 1.0))
    throw std::invalid_argument("metric: lambda must lie in (0, 1)");
  // Representative epsilon = lambda^depth, the upper edge of the class; it
  // maps back to the same depth under separation_depth.
  double eps = 1.0;
  for (int i = 0; i < depth_; ++i) eps *= lambda_;
  MetricParams mp(lambda_, eps);
  if (mp.depth != depth_) throw std::logic_error("metric: depth representative failed to round-trip");
  return mp;
}

bool bowen_separated(const MetricParams& mp, const Word& u, const Word& v, int horizon) {
  if (horizon < 1) throw std::invalid_argument("bowen_separated: horizon must be >= 1");
  if (u.fiber != v.fiber)
    throw std::invalid_argument("bowen_separated: words live on different fibers");
  const int need = horizon + mp.depth;
  if (static_cast<int>(u.symbols.size()) < need || static_cast<int>(v.symbols.size()) < need)
    throw std::invalid_argument("bowen_separated: words must carry horizon + depth symbols");
  for (int j = 0; j < need; ++j) {
    if (u.symbols[j] != v.symbols[j]) return true;
  }
  return false;
}

}  // namespace subpress
