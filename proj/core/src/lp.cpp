#include "colent/lp.hpp"

#include <cmath>
#include <limits>

#include "colent/errors.hpp"

namespace colent {

namespace {

constexpr double kEps = 1e-11;

/// Tableau with the objective kept as the last row; column `cols` is the rhs.
class Tableau {
 public:
  Tableau(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), a_((rows + 1) * (cols + 1), 0.0), basis_(rows, 0) {}

  double& at(std::size_t r, std::size_t c) { return a_[r * (cols_ + 1) + c]; }
  double& rhs(std::size_t r) { return at(r, cols_); }
  double& cost(std::size_t c) { return at(rows_, c); }
  std::size_t& basis(std::size_t r) { return basis_[r]; }

  void pivot(std::size_t pr, std::size_t pc) {
    const double p = at(pr, pc);
    for (std::size_t c = 0; c <= cols_; ++c) at(pr, c) /= p;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == pr) continue;
      const double f = at(r, pc);
      if (f == 0.0) continue;
      for (std::size_t c = 0; c <= cols_; ++c) at(r, c) -= f * at(pr, c);
      at(r, pc) = 0.0;
    }
    basis_[pr] = pc;
  }

  /// Minimizes the cost row over columns allowed by `usable`. Returns false
  /// when unbounded.
  template <typename Usable>
  bool optimize(Usable usable) {
    for (;;) {
      // Bland: entering column = least index with negative reduced cost.
      std::size_t enter = cols_;
      for (std::size_t c = 0; c < cols_; ++c) {
        if (usable(c) && cost(c) < -kEps) {
          enter = c;
          break;
        }
      }
      if (enter == cols_) return true;
      std::size_t leave = rows_;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        const double v = at(r, enter);
        if (v <= kEps) continue;
        const double ratio = rhs(r) / v;
        if (ratio < best - kEps) {
          best = ratio;
          leave = r;
        } else if (ratio <= best + kEps && basis_[r] < basis_[leave]) {
          leave = r;
        }
      }
      if (leave == rows_) return false;
      pivot(leave, enter);
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const LinearProgram& lp) {
  const std::size_t n = lp.variables;
  const std::size_t nle = lp.le_rows.size();
  const std::size_t neq = lp.eq_rows.size();
  const std::size_t m = nle + neq;
  if (lp.objective.size() != n || lp.le_rhs.size() != nle || lp.eq_rhs.size() != neq) {
    throw StructuralError("linear program dimensions are inconsistent");
  }
  // Columns: originals, one slack per <= row, one artificial per row that needs it.
  std::vector<int> sign(m, 1);
  std::vector<char> needs_artificial(m, 0);
  std::size_t artificials = 0;
  for (std::size_t r = 0; r < m; ++r) {
    const double b = r < nle ? lp.le_rhs[r] : lp.eq_rhs[r - nle];
    if (b < 0) sign[r] = -1;
    // A <= row with nonnegative rhs starts with its slack basic.
    needs_artificial[r] = !(r < nle && b >= 0);
    artificials += needs_artificial[r];
  }
  const std::size_t slack0 = n;
  const std::size_t art0 = n + nle;
  const std::size_t cols = n + nle + artificials;
  Tableau t(m, cols);
  std::size_t next_art = art0;
  for (std::size_t r = 0; r < m; ++r) {
    const auto& row = r < nle ? lp.le_rows[r] : lp.eq_rows[r - nle];
    if (row.size() != n) throw StructuralError("linear program row has the wrong width");
    for (std::size_t c = 0; c < n; ++c) t.at(r, c) = sign[r] * row[c];
    if (r < nle) t.at(r, slack0 + r) = sign[r];
    t.rhs(r) = sign[r] * (r < nle ? lp.le_rhs[r] : lp.eq_rhs[r - nle]);
    if (needs_artificial[r]) {
      t.at(r, next_art) = 1.0;
      t.basis(r) = next_art++;
    } else {
      t.basis(r) = slack0 + r;
    }
  }

  LpSolution out;
  if (artificials > 0) {
    // Phase one: minimize the sum of artificials, expressed in nonbasic terms.
    for (std::size_t r = 0; r < m; ++r) {
      if (!needs_artificial[r]) continue;
      for (std::size_t c = 0; c <= cols; ++c) {
        if (c < art0 || c == cols) t.at(m, c) -= t.at(r, c);
      }
    }
    t.optimize([](std::size_t) { return true; });
    if (-t.at(m, cols) > 1e-9) {
      out.status = LpSolution::Status::infeasible;
      return out;
    }
    // Drive remaining artificials out of the basis where possible.
    for (std::size_t r = 0; r < m; ++r) {
      if (t.basis(r) < art0) continue;
      for (std::size_t c = 0; c < art0; ++c) {
        if (std::abs(t.at(r, c)) > 1e-9) {
          t.pivot(r, c);
          break;
        }
      }
    }
  }
  // Phase two cost row.
  for (std::size_t c = 0; c <= cols; ++c) t.at(m, c) = 0.0;
  for (std::size_t c = 0; c < n; ++c) t.at(m, c) = lp.objective[c];
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t b = t.basis(r);
    const double f = t.at(m, b);
    if (f == 0.0) continue;
    for (std::size_t c = 0; c <= cols; ++c) t.at(m, c) -= f * t.at(r, c);
  }
  if (!t.optimize([art0](std::size_t c) { return c < art0; })) {
    out.status = LpSolution::Status::unbounded;
    return out;
  }
  out.status = LpSolution::Status::optimal;
  out.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    if (t.basis(r) < n) out.x[t.basis(r)] = t.rhs(r);
  }
  out.value = 0.0;
  for (std::size_t c = 0; c < n; ++c) out.value += lp.objective[c] * out.x[c];
  return out;
}

}  // namespace colent
