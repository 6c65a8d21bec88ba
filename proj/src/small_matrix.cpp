#include "subpress/small_matrix.hpp"

#include <cmath>

namespace subpress {

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("Mat multiply: shape mismatch");
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

double inf_norm(const Mat& m) {
  double best = 0.0;
  for (int i = 0; i < m.rows(); ++i) {
    double row = 0.0;
    for (int j = 0; j < m.cols(); ++j) row += std::abs(m(i, j));
    if (row > best) best = row;
  }
  return best;
}

double two_norm(const Mat& m) {
  // Power iteration on M^T M with an all-ones start.  The matrices this
  // library feeds in are entrywise nonnegative, so the start has a nonzero
  // component along the dominant singular direction.
  const int n = m.cols();
  std::vector<double> v(static_cast<std::size_t>(n), 1.0 / std::sqrt(static_cast<double>(n)));
  double sigma2 = 0.0;
  for (int iter = 0; iter < 500; ++iter) {
    // w = M v, u = M^T w
    std::vector<double> w(static_cast<std::size_t>(m.rows()), 0.0);
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < n; ++j) w[i] += m(i, j) * v[j];
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < n; ++j) u[j] += m(i, j) * w[i];
    double norm = 0.0;
    for (double x : u) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    double next = 0.0;  // Rayleigh quotient: v.u = |Mv|^2
    for (int j = 0; j < n; ++j) next += v[j] * u[j];
    for (int j = 0; j < n; ++j) v[j] = u[j] / norm;
    if (iter > 0 && std::abs(next - sigma2) <= 1e-15 * std::max(1.0, std::abs(next))) {
      sigma2 = next;
      break;
    }
    sigma2 = next;
  }
  return std::sqrt(std::max(0.0, sigma2));
}

}  // namespace subpress
