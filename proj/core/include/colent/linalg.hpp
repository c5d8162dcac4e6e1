#pragma once

#include <Eigen/Dense>
#include <vector>

namespace colent {

/// Largest singular value by power iteration on M*M, stopped when two
/// successive estimates agree to `tol` relative. The start vector is a fixed
/// pseudo-random one, so repeated calls give identical results.
double operator_norm(const Eigen::MatrixXcd& m, double tol = 1e-10);

/// Kronecker product a (x) b.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// a_0 (x) a_1 (x) ... ; the empty product is the 1x1 identity.
Eigen::MatrixXcd kron_all(const std::vector<Eigen::MatrixXcd>& factors);

}  // namespace colent
