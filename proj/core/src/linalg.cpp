#include "colent/linalg.hpp"

#include <cmath>
#include <random>

namespace colent {

double operator_norm(const Eigen::MatrixXcd& m, double tol) {
  if (m.size() == 0) return 0.0;
  const Eigen::Index n = m.cols();
  std::mt19937_64 rng(0x5eedu);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  Eigen::VectorXcd x(n);
  for (Eigen::Index i = 0; i < n; ++i) x[i] = {1.0 + 0.25 * unit(rng), 0.25 * unit(rng)};
  x.normalize();
  double estimate = 0.0;
  for (int iter = 0; iter < 10'000; ++iter) {
    Eigen::VectorXcd y = m.adjoint() * (m * x);
    const double norm = y.norm();
    if (norm == 0.0) return 0.0;
    x = y / norm;
    // norm approaches sigma_max^2
    const double next = std::sqrt(norm);
    if (std::abs(next - estimate) <= tol * next) return next;
    estimate = next;
  }
  return estimate;
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Eigen::MatrixXcd kron_all(const std::vector<Eigen::MatrixXcd>& factors) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
  for (const auto& f : factors) out = kron(out, f);
  return out;
}

}  // namespace colent
