#pragma once

// Dense square matrices of the sizes this project actually meets (cocycle
// blocks and Markov kernels, a handful of rows).  Row-major storage.

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace subpress {

class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols, double fill = 0.0)
      : rows_(rows), cols_(cols), d_(static_cast<std::size_t>(rows) * cols, fill) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("Mat: dimensions must be positive");
  }

  static Mat identity(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return d_[static_cast<std::size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return d_[static_cast<std::size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return d_; }

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> d_;
};

Mat operator*(const Mat& a, const Mat& b);

// Operator infinity-norm: max over rows of the absolute row sum.
double inf_norm(const Mat& m);

// Operator 2-norm (largest singular value) by power iteration on M^T M.
// Deterministic: fixed all-ones start, fixed iteration/tolerance policy.
double two_norm(const Mat& m);

}  // namespace subpress
