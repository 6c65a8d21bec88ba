#pragma once

// Bowen metric bookkeeping.  The fiber metric is d(x, y) = lambda^j with j
// the first index where x and y disagree, and the n-step Bowen distance is
// max_{0<=i<n} d(shift^i x, shift^i y) = lambda^{max(j-n+1, 0)}.  Every
// epsilon in (0, 1] falls into a unique depth class t with
// lambda^{t+1} < epsilon <= lambda^t, and within one class separation is the
// purely combinatorial criterion j < n + t; all epsilon in a class behave
// identically, so the class depth is resolved once and reused.

#include <stdexcept>

#include "subpress/system.hpp"

namespace subpress {

// The unique integer t with lambda^{t+1} < epsilon <= lambda^t.  Boundary
// values epsilon == lambda^t are resolved by the same running product that
// defines the classes, so the mapping is deterministic.
int separation_depth(double lambda, double epsilon);

struct MetricParams {
  double lambda;
  double epsilon;
  int depth;  // separation_depth(lambda, epsilon)

  MetricParams(double lambda_, double epsilon_);
  static MetricParams from_depth(double lambda_, int depth_);
};

// True iff points extending u and v are (epsilon, horizon)-separated under
// the Bowen distance, i.e. their first disagreement lies before
// horizon + depth.  Both words must sit on the same fiber and carry at least
// horizon + depth symbols.
bool bowen_separated(const MetricParams& mp, const Word& u, const Word& v, int horizon);

}  // namespace subpress
