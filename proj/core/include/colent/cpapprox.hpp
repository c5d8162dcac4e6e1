#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "colent/cellspace.hpp"
#include "colent/refinement.hpp"

namespace colent {

/// Real function on the cells of a space.
struct FunctionSample {
  std::string name;
  std::vector<double> values;

  static FunctionSample constant(std::size_t cells, double value, std::string name = "1");
  /// Indicator of a cell set.
  static FunctionSample indicator(std::size_t cells, std::span<const CellId> set,
                                  std::string name);
  /// Throws StructuralError on non-finite values or a size mismatch.
  void check(std::size_t cells) const;
  double sup_norm() const;
};

/// Probability vector on cells.
struct TraceVector {
  std::vector<double> mass;

  static TraceVector uniform(std::size_t cells);
  /// Throws NormalizationError unless mass >= 0 and sums to 1 within 1e-12.
  void check(std::size_t cells) const;
  double operator()(const FunctionSample& f) const;
};

/// Finite approximation system built from a coloured refinement: the
/// commutative algebra C^rank with psi(f)_j = f(x_j) and phi(e_j) = h_j.
/// Weights are stored sparsely, aligned with the members of each piece.
struct CpcSystem {
  SpacePtr space;
  SetFamily pieces;
  std::vector<double> weights;  ///< h_j(c) for c in piece j, flattened like pieces
  std::vector<CellId> sample_points;
  std::vector<std::size_t> blocks;  ///< matrix block sizes of F; all 1 here
  std::vector<std::uint32_t> colour_of;
  std::uint32_t colours = 1;

  std::size_t rank() const noexcept { return pieces.size(); }
  std::span<const double> weights_of(std::size_t piece) const noexcept {
    const auto& off = pieces.offsets();
    return {weights.data() + off[piece], weights.data() + off[piece + 1]};
  }
  /// phi(psi(f)) as a function on cells.
  std::vector<double> reconstruct(const FunctionSample& f) const;
  /// Throws BoundViolation on a broken invariant: column sums 1 within
  /// 1e-12, nonnegative weights, sample points inside their pieces, and
  /// same-colour pieces disjoint and non-adjacent.
  void audit() const;
};

/// Lemma 5.2 construction: x_j = least cell of piece j and
/// h_j(c) = [c in piece j] / #{pieces containing c}.
CpcSystem build_pou_system(const ColouredRefinement& refinement);

/// max_f max_c |f(c) - phi(psi(f))(c)|; 0 for an empty list.
double approx_error(const CpcSystem& system, const std::vector<FunctionSample>& functions);

/// Block-diagonal sum living on the disjoint union of the two spaces
/// (b's cells shifted past a's). Colour classes are merged index-wise.
CpcSystem direct_sum_systems(const CpcSystem& a, const CpcSystem& b);

struct QdSystem {
  std::size_t rank = 0;
  std::vector<CellId> sample_points;
  std::vector<double> trace_on_F;  ///< sigma / ||sigma||
  double epsilon = 0.0;
  double approx_error = 0.0;  ///< measured on functions and the unit
  double mult_defect = 0.0;
  double trace_defect = 0.0;
  /// 2 eps / (3 - eps), the guaranteed ceiling for trace_defect.
  double trace_bound = 0.0;
};

/// Turns a decomposable system into a quasidiagonal one of the same rank:
/// psi(f)_j = f(x_j) and trace_on_F_j proportional to sum_c tau(c) h_j(c).
///
/// Requires 0 < eps < 1, every function of sup norm at most 1, and an
/// approximation error of at most eps/3 on the functions together with the
/// unit; otherwise throws PreconditionError carrying the measured value.
/// Defects are evaluated over all pairs of functions (unit included).
QdSystem qd_from_decomposable(const CpcSystem& system, const TraceVector& trace,
                              const std::vector<FunctionSample>& functions, double epsilon);

/// Elementary tensor a_0 (x) a_1 (x) ... in the first factors of the
/// infinite tensor power of M_k.
struct ElementaryTensor {
  std::vector<Eigen::MatrixXcd> factors;

  std::size_t degree() const noexcept { return factors.size(); }
  /// Factorwise product; the shorter operand is padded with identities.
  ElementaryTensor operator*(const ElementaryTensor& other) const;
  /// 1 (x) a, the one-sided Bernoulli shift applied j times.
  ElementaryTensor shifted(std::size_t j) const;
  /// Product of the normalized traces of the factors.
  std::complex<double> trace() const;
};

/// Random elementary tensors of the given degree with factors scaled to
/// operator norm 1; reproducible from the seed.
std::vector<ElementaryTensor> random_monomials(std::size_t k, std::size_t degree,
                                               std::size_t count, std::uint64_t seed);

struct MatrixShiftReport {
  std::size_t k = 0;
  std::size_t n = 0;
  std::size_t rank = 0;  ///< k^n
  std::size_t audited = 0;
  double mult_defect = 0.0;
  double trace_defect = 0.0;
};

/// Truncation model of the one-sided tensor shift: psi_n keeps the first n
/// factors as an explicit k^n x k^n matrix. Audits every operand and each of
/// its shifts that still fits in n factors, over all ordered pairs.
/// Throws DepthExhaustedError when an operand has degree above n.
MatrixShiftReport matrix_shift_qd(std::size_t k, std::size_t n,
                                  const std::vector<ElementaryTensor>& operands);

/// psi_n(a) as a dense matrix.
Eigen::MatrixXcd truncate(const ElementaryTensor& a, std::size_t k, std::size_t n);

}  // namespace colent
