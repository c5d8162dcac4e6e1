#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "colent/cellspace.hpp"
#include "colent/cpapprox.hpp"

namespace colent {

enum class NormKind { sup, op };

/// Unit vectors whose l1-equivalence constant is measured: real functions
/// on cells under the sup norm, or square matrices under the operator norm.
struct VectorFamily {
  NormKind kind = NormKind::sup;
  std::vector<FunctionSample> functions;
  std::vector<Eigen::MatrixXcd> matrices;

  std::size_t size() const noexcept {
    return kind == NormKind::sup ? functions.size() : matrices.size();
  }
  /// Throws StructuralError for an empty or ragged family and
  /// NormalizationError when some norm differs from 1 by more than 1e-9.
  void check() const;
};

struct EquivalenceReport {
  /// 1 / min ||sum c_i v_i|| over the l1 unit sphere; infinity when the
  /// minimum is below 1e-9.
  double K = 1.0;
  bool infinite = false;
  double min_norm = 1.0;
  std::vector<double> coefficients;  ///< a minimizer, ||c||_1 = 1
  /// True when every sign orthant was solved to optimality.
  bool exact = false;
  /// m / K^2, the lower bound of the entropy estimate up to its universal constant.
  double kerr_bound_factor = 0.0;
  /// Bound on the constant over complex coefficients: at most 2 K.
  double complex_K_bound = 2.0;
};

struct L1Options {
  /// Largest family size for which all 2^(m-1) orthants are enumerated.
  std::size_t cap = 16;
  /// Beyond the cap, fall back to sampled orthants instead of throwing.
  bool heuristic = false;
  std::uint64_t seed = 0;
  /// Projected subgradient restarts and steps (operator norm, heuristic mode).
  std::size_t restarts = 64;
  std::size_t iterations = 300;
};

/// Computes the constant orthant by orthant: with signs s fixed the
/// coefficients range over a simplex. Sup norms are minimized exactly by a
/// cutting-plane linear program over the cell rows; operator norms by
/// projected subgradient descent (reported with exact = false).
EquivalenceReport l1_equivalence_constant(const VectorFamily& family,
                                          const L1Options& options = {});

/// Family followed by its n-1 dynamical translates, grouped by time:
/// v_0..v_{m-1}, v_0 o T, ..., v_{m-1} o T^{n-1}. A translate is defined only
/// where the function is constant on every image set; otherwise the
/// translate reaches past the model's truncation and DepthExhaustedError is
/// raised.
VectorFamily shifted_family(const VectorFamily& base, const CellMap& map, std::size_t n);

/// Matrix version on M_k^{(x) N}: the one-sided shift sends B (x) 1_k to
/// 1_k (x) B. A matrix whose last tensor factor is not the identity cannot be
/// shifted inside the truncation (DepthExhaustedError).
VectorFamily shifted_family(const VectorFamily& base, std::size_t k, std::size_t n);

/// Coordinate functions on the full 2^m-shift truncated at `depth`:
/// v_{t,j}(w) = 2 * bit_j(w_t) - 1 for t < depth, j < m, i.e. the base family
/// v_j(w) = 2 * bit_j(w_0) - 1 and its shifts. Throws SizeError when the
/// space would exceed `max_cells`.
VectorFamily kerr_witness(std::size_t m, std::size_t depth,
                          std::size_t max_cells = std::size_t{1} << 24);

}  // namespace colent
