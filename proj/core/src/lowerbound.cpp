#include "colent/lowerbound.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "colent/errors.hpp"
#include "colent/linalg.hpp"
#include "colent/lp.hpp"
#include "colent/symbolic.hpp"

namespace colent {

void VectorFamily::check() const {
  if (size() == 0) throw StructuralError("vector family is empty");
  if (kind == NormKind::sup) {
    const std::size_t cells = functions.front().values.size();
    for (const auto& f : functions) {
      f.check(cells);
      if (std::abs(f.sup_norm() - 1.0) > 1e-9) {
        throw NormalizationError("vector '" + f.name + "' has sup norm " +
                                 std::to_string(f.sup_norm()));
      }
    }
  } else {
    const auto dim = matrices.front().rows();
    for (std::size_t i = 0; i < matrices.size(); ++i) {
      const auto& m = matrices[i];
      if (m.rows() != dim || m.cols() != dim) {
        throw StructuralError("matrix " + std::to_string(i) + " has the wrong shape");
      }
      const double norm = operator_norm(m);
      if (std::abs(norm - 1.0) > 1e-9) {
        throw NormalizationError("matrix " + std::to_string(i) + " has operator norm " +
                                 std::to_string(norm));
      }
    }
  }
}

namespace {

using Rows = std::vector<std::vector<double>>;

/// Distinct cell rows (v_1(c), ..., v_m(c)) up to an overall sign.
Rows distinct_rows(const VectorFamily& family) {
  const std::size_t m = family.size();
  const std::size_t cells = family.functions.front().values.size();
  Rows rows(cells, std::vector<double>(m));
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t i = 0; i < m; ++i) rows[c][i] = family.functions[i].values[c];
    auto lead = std::find_if(rows[c].begin(), rows[c].end(), [](double v) { return v != 0.0; });
    if (lead != rows[c].end() && *lead < 0) {
      for (auto& v : rows[c]) v = -v;
    }
  }
  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  return rows;
}

struct OrthantResult {
  double value;
  std::vector<double> t;  // magnitudes on the simplex
};

/// min over the simplex of max_r |sum_i s_i t_i row_r[i]|, by cutting planes.
OrthantResult solve_sup_orthant(const Rows& rows, const std::vector<double>& signs) {
  const std::size_t m = signs.size();
  auto value_at = [&](const std::vector<double>& t, std::size_t r) {
    double s = 0.0;
    for (std::size_t i = 0; i < m; ++i) s += signs[i] * t[i] * rows[r][i];
    return std::abs(s);
  };
  auto worst_row = [&](const std::vector<double>& t) {
    std::size_t arg = 0;
    double best = -1.0;
    for (std::size_t r = 0; r < rows.size(); ++r) {
      const double v = value_at(t, r);
      if (v > best) {
        best = v;
        arg = r;
      }
    }
    return std::pair{arg, best};
  };

  LinearProgram lp;
  lp.variables = m + 1;  // t_0..t_{m-1}, u
  lp.objective.assign(m + 1, 0.0);
  lp.objective[m] = 1.0;
  std::vector<double> simplex(m + 1, 1.0);
  simplex[m] = 0.0;
  lp.eq_rows.push_back(simplex);
  lp.eq_rhs.push_back(1.0);
  auto add_row = [&](std::size_t r) {
    std::vector<double> plus(m + 1), minus(m + 1);
    for (std::size_t i = 0; i < m; ++i) {
      plus[i] = signs[i] * rows[r][i];
      minus[i] = -plus[i];
    }
    plus[m] = minus[m] = -1.0;
    lp.le_rows.push_back(std::move(plus));
    lp.le_rows.push_back(std::move(minus));
    lp.le_rhs.push_back(0.0);
    lp.le_rhs.push_back(0.0);
  };

  std::vector<double> t(m, 1.0 / static_cast<double>(m));
  add_row(worst_row(t).first);
  std::vector<char> active(rows.size(), 0);
  for (;;) {
    LpSolution sol = solve_lp(lp);
    if (sol.status != LpSolution::Status::optimal) {
      throw BoundViolation("orthant linear program did not reach an optimum");
    }
    t.assign(sol.x.begin(), sol.x.begin() + static_cast<std::ptrdiff_t>(m));
    const double u = sol.x[m];
    auto [r, v] = worst_row(t);
    if (v <= u + 1e-12 || active[r]) return {v, t};
    active[r] = 1;
    add_row(r);
  }
}

void project_to_simplex(std::vector<double>& x) {
  std::vector<double> s = x;
  std::sort(s.begin(), s.end(), std::greater<>());
  double cumulative = 0.0, theta = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    cumulative += s[i];
    const double candidate = (cumulative - 1.0) / static_cast<double>(i + 1);
    if (s[i] - candidate > 0) theta = candidate;
  }
  for (auto& v : x) v = std::max(0.0, v - theta);
}

OrthantResult solve_op_orthant(const std::vector<Eigen::MatrixXcd>& mats,
                               const std::vector<double>& signs, const L1Options& options,
                               std::mt19937_64& rng) {
  const std::size_t m = signs.size();
  auto combine = [&](const std::vector<double>& t) {
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(mats[0].rows(), mats[0].cols());
    for (std::size_t i = 0; i < m; ++i) s += (signs[i] * t[i]) * mats[i];
    return s;
  };
  std::exponential_distribution<double> expo(1.0);
  OrthantResult best{std::numeric_limits<double>::infinity(), {}};
  for (std::size_t restart = 0; restart < options.restarts; ++restart) {
    std::vector<double> t(m, 1.0 / static_cast<double>(m));
    if (restart > 0) {
      double total = 0.0;
      for (auto& v : t) total += (v = expo(rng));
      for (auto& v : t) v /= total;
    }
    for (std::size_t step = 0; step < options.iterations; ++step) {
      const Eigen::MatrixXcd s = combine(t);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(s, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const double value = svd.singularValues()(0);
      if (value < best.value) best = {value, t};
      const Eigen::VectorXcd u = svd.matrixU().col(0);
      const Eigen::VectorXcd v = svd.matrixV().col(0);
      const double eta = 0.5 / std::sqrt(static_cast<double>(step + 1));
      for (std::size_t i = 0; i < m; ++i) {
        const double g = signs[i] * (u.adjoint() * mats[i] * v)(0).real();
        t[i] -= eta * g;
      }
      project_to_simplex(t);
    }
  }
  best.value = operator_norm(combine(best.t));
  return best;
}

}  // namespace

EquivalenceReport l1_equivalence_constant(const VectorFamily& family, const L1Options& options) {
  family.check();
  const std::size_t m = family.size();
  const bool enumerate = m <= options.cap;
  if (!enumerate && !options.heuristic) {
    throw CapError("family of " + std::to_string(m) + " vectors exceeds the orthant cap of " +
                   std::to_string(options.cap) + "; enable the heuristic mode");
  }
  // Negating every sign gives the same norm, so fix s_0 = +1.
  std::vector<std::uint64_t> orthants;
  if (enumerate) {
    const std::uint64_t count = std::uint64_t{1} << (m - 1);
    orthants.resize(count);
    for (std::uint64_t o = 0; o < count; ++o) orthants[o] = o;
  } else {
    std::mt19937_64 pick(options.seed);
    for (std::size_t i = 0; i < options.restarts; ++i) orthants.push_back(pick());
  }

  Rows rows;
  if (family.kind == NormKind::sup) rows = distinct_rows(family);
  std::mt19937_64 rng(options.seed);

  EquivalenceReport report;
  report.min_norm = std::numeric_limits<double>::infinity();
  std::vector<double> signs(m);
  for (std::uint64_t o : orthants) {
    signs[0] = 1.0;
    if (enumerate) {
      for (std::size_t i = 1; i < m; ++i) signs[i] = (o >> (i - 1)) & 1 ? -1.0 : 1.0;
    } else {
      std::mt19937_64 bits(o);
      for (std::size_t i = 1; i < m; ++i) signs[i] = bits() & 1 ? -1.0 : 1.0;
    }
    OrthantResult r = family.kind == NormKind::sup
                          ? solve_sup_orthant(rows, signs)
                          : solve_op_orthant(family.matrices, signs, options, rng);
    if (r.value < report.min_norm) {
      report.min_norm = r.value;
      report.coefficients.resize(m);
      for (std::size_t i = 0; i < m; ++i) report.coefficients[i] = signs[i] * r.t[i];
    }
    if (report.min_norm < 1e-9) break;  // already dependent
  }
  report.exact = enumerate && family.kind == NormKind::sup;
  const double mass = [&] {
    double s = 0.0;
    for (double c : report.coefficients) s += std::abs(c);
    return s;
  }();
  for (auto& c : report.coefficients) c /= mass;
  if (report.min_norm < 1e-9) {
    report.infinite = true;
    report.K = std::numeric_limits<double>::infinity();
    report.kerr_bound_factor = 0.0;
  } else {
    report.K = 1.0 / report.min_norm;
    report.kerr_bound_factor = static_cast<double>(m) / (report.K * report.K);
  }
  report.complex_K_bound = 2.0 * report.K;
  return report;
}

// ---------------------------------------------------------------------------

VectorFamily shifted_family(const VectorFamily& base, const CellMap& map, std::size_t n) {
  if (n == 0) throw StructuralError("shifted_family needs n >= 1");
  if (base.kind != NormKind::sup) {
    throw StructuralError("cell maps translate functions; use the matrix shift for matrices");
  }
  const std::size_t cells = map.space()->size();
  VectorFamily out;
  out.kind = NormKind::sup;
  std::vector<FunctionSample> current = base.functions;
  for (const auto& f : current) f.check(cells);
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) {
      for (auto& f : current) {
        FunctionSample g{f.name + "oT", std::vector<double>(cells)};
        for (CellId c = 0; c < cells; ++c) {
          auto img = map.images(static_cast<CellId>(c));
          const double v = f.values[img[0]];
          for (CellId d : img) {
            if (f.values[d] != v) {
              throw DepthExhaustedError("translate " + std::to_string(j) + " of '" + f.name +
                                        "' is not determined at cell " +
                                        std::to_string(c) + "; the model is too shallow");
            }
          }
          g.values[c] = v;
        }
        f = std::move(g);
      }
    }
    for (std::size_t i = 0; i < current.size(); ++i) {
      FunctionSample f = current[i];
      f.name = base.functions[i].name + "@" + std::to_string(j);
      out.functions.push_back(std::move(f));
    }
  }
  return out;
}

VectorFamily shifted_family(const VectorFamily& base, std::size_t k, std::size_t n) {
  if (n == 0) throw StructuralError("shifted_family needs n >= 1");
  if (base.kind != NormKind::op) {
    throw StructuralError("the matrix shift translates matrices only");
  }
  const auto kk = static_cast<Eigen::Index>(k);
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(kk, kk);
  auto shift = [&](const Eigen::MatrixXcd& a) -> Eigen::MatrixXcd {
    if (a.rows() % kk != 0) throw StructuralError("matrix size is not a multiple of k");
    const Eigen::Index d = a.rows() / kk;
    Eigen::MatrixXcd b(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
      for (Eigen::Index j = 0; j < d; ++j) b(i, j) = a(i * kk, j * kk);
    }
    if ((kron(b, id) - a).cwiseAbs().maxCoeff() > 1e-12) {
      throw DepthExhaustedError("shifted matrix would leave the truncated tensor product");
    }
    return kron(id, b);
  };
  VectorFamily out;
  out.kind = NormKind::op;
  std::vector<Eigen::MatrixXcd> current = base.matrices;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0) {
      for (auto& a : current) a = shift(a);
    }
    out.matrices.insert(out.matrices.end(), current.begin(), current.end());
  }
  return out;
}

VectorFamily kerr_witness(std::size_t m, std::size_t depth, std::size_t max_cells) {
  if (m == 0 || depth == 0) throw StructuralError("kerr_witness needs m >= 1 and depth >= 1");
  if (m * depth >= 63 || (std::size_t{1} << (m * depth)) > max_cells) {
    throw SizeError("witness space 2^" + std::to_string(m * depth) +
                    " cells exceeds the cap of " + std::to_string(max_cells));
  }
  const WordSpace words(TransferMatrix::full_shift(std::size_t{1} << m), depth);
  const ModelBundle model = words.bundle();
  const std::size_t cells = model.space->size();
  VectorFamily base;
  base.kind = NormKind::sup;
  for (std::size_t j = 0; j < m; ++j) {
    FunctionSample f{"x" + std::to_string(j), std::vector<double>(cells)};
    for (std::size_t c = 0; c < cells; ++c) {
      f.values[c] = ((words.symbol(c, 0) >> j) & 1) ? 1.0 : -1.0;
    }
    base.functions.push_back(std::move(f));
  }
  return shifted_family(base, model.map, depth);
}

}  // namespace colent
