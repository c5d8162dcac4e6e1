#pragma once

#include <cstddef>
#include <vector>

namespace colent {

/// minimize objective . x  subject to  le_rows x <= le_rhs,
/// eq_rows x = eq_rhs,  x >= 0.
struct LinearProgram {
  std::size_t variables = 0;
  std::vector<double> objective;
  std::vector<std::vector<double>> le_rows;
  std::vector<double> le_rhs;
  std::vector<std::vector<double>> eq_rows;
  std::vector<double> eq_rhs;
};

struct LpSolution {
  enum class Status { optimal, infeasible, unbounded };
  Status status = Status::infeasible;
  double value = 0.0;
  std::vector<double> x;
};

/// Dense two-phase simplex with Bland's rule; meant for the small programs
/// of the l1 lower bound (tens of variables, hundreds of rows).
LpSolution solve_lp(const LinearProgram& lp);

}  // namespace colent
