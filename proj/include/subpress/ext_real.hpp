#pragma once

// Extended reals: plain doubles where -infinity is a first-class value.
// Conventions relied on throughout the library:
//   exp(-inf) == 0,  log(0) == -inf,  (-inf) + r == -inf,  comparisons total.
// The only case IEEE arithmetic gets wrong for us is 0 * (-inf) == NaN, which
// shows up when integrating against a weight that happens to be zero; use
// weighted_term for every mass-times-value product.

#include <cmath>
#include <limits>

namespace subpress {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

inline bool is_neg_inf(double x) { return std::isinf(x) && x < 0.0; }

// mass * value with the measure-theoretic convention 0 * anything == 0.
inline double weighted_term(double mass, double value) {
  return mass == 0.0 ? 0.0 : mass * value;
}

// p * log(p) with the entropy convention 0 * log 0 == 0.
inline double xlogx(double p) { return p <= 0.0 ? 0.0 : p * std::log(p); }

}  // namespace subpress
