#pragma once

// Neumaier-compensated summation.  Every reduction whose result lands in an
// output file goes through this class, always in a fixed (lexicographic or
// index) order, so results do not depend on the worker count.

#include <cmath>

namespace subpress {

class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace subpress
