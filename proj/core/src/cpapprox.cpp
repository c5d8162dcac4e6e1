#include "colent/cpapprox.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "colent/errors.hpp"
#include "colent/linalg.hpp"

namespace colent {

FunctionSample FunctionSample::constant(std::size_t cells, double value, std::string name) {
  return {std::move(name), std::vector<double>(cells, value)};
}

FunctionSample FunctionSample::indicator(std::size_t cells, std::span<const CellId> set,
                                         std::string name) {
  FunctionSample f{std::move(name), std::vector<double>(cells, 0.0)};
  for (CellId c : set) f.values.at(c) = 1.0;
  return f;
}

void FunctionSample::check(std::size_t cells) const {
  if (values.size() != cells) {
    throw StructuralError("function '" + name + "' has " + std::to_string(values.size()) +
                          " values for " + std::to_string(cells) + " cells");
  }
  for (std::size_t c = 0; c < cells; ++c) {
    if (!std::isfinite(values[c])) {
      throw StructuralError("function '" + name + "' is not finite at cell " +
                            std::to_string(c));
    }
  }
}

double FunctionSample::sup_norm() const {
  double s = 0.0;
  for (double v : values) s = std::max(s, std::abs(v));
  return s;
}

TraceVector TraceVector::uniform(std::size_t cells) {
  return {std::vector<double>(cells, 1.0 / static_cast<double>(cells))};
}

void TraceVector::check(std::size_t cells) const {
  if (mass.size() != cells) {
    throw NormalizationError("trace has " + std::to_string(mass.size()) + " weights for " +
                             std::to_string(cells) + " cells");
  }
  double total = 0.0;
  for (std::size_t c = 0; c < cells; ++c) {
    if (!(mass[c] >= 0.0) || !std::isfinite(mass[c])) {
      throw NormalizationError("trace weight at cell " + std::to_string(c) +
                               " is negative or not finite");
    }
    total += mass[c];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw NormalizationError("trace weights sum to " + std::to_string(total) + ", not 1");
  }
}

double TraceVector::operator()(const FunctionSample& f) const {
  double s = 0.0;
  for (std::size_t c = 0; c < mass.size(); ++c) s += mass[c] * f.values[c];
  return s;
}

// ---------------------------------------------------------------------------

std::vector<double> CpcSystem::reconstruct(const FunctionSample& f) const {
  f.check(space->size());
  std::vector<double> out(space->size(), 0.0);
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    const double v = f.values[sample_points[j]];
    auto cells = pieces[j];
    auto h = weights_of(j);
    for (std::size_t i = 0; i < cells.size(); ++i) out[cells[i]] += v * h[i];
  }
  return out;
}

void CpcSystem::audit() const {
  const std::size_t n = space->size();
  if (sample_points.size() != pieces.size() || colour_of.size() != pieces.size() ||
      weights.size() != pieces.total_members()) {
    throw BoundViolation("approximation system bookkeeping does not match its pieces");
  }
  std::vector<double> column(n, 0.0);
  for (std::size_t j = 0; j < pieces.size(); ++j) {
    auto cells = pieces[j];
    if (!std::binary_search(cells.begin(), cells.end(), sample_points[j])) {
      throw BoundViolation("sample point of piece " + std::to_string(j) + " lies outside it");
    }
    auto h = weights_of(j);
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!(h[i] >= 0.0)) throw BoundViolation("negative weight in piece " + std::to_string(j));
      column[cells[i]] += h[i];
    }
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (std::abs(column[c] - 1.0) > 1e-12) {
      throw BoundViolation("weights at cell " + std::to_string(c) + " sum to " +
                           std::to_string(column[c]));
    }
  }
  constexpr std::uint32_t kFree = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> owner(n);
  for (std::uint32_t colour = 0; colour < colours; ++colour) {
    std::fill(owner.begin(), owner.end(), kFree);
    for (std::size_t j = 0; j < pieces.size(); ++j) {
      if (colour_of[j] != colour) continue;
      for (CellId c : pieces[j]) {
        if (owner[c] != kFree) {
          throw BoundViolation("same-colour weights overlap at cell " + std::to_string(c));
        }
        owner[c] = static_cast<std::uint32_t>(j);
      }
    }
    for (CellId c = 0; c < n; ++c) {
      if (owner[c] == kFree) continue;
      for (CellId nb : space->neighbours(c)) {
        if (owner[nb] != kFree && owner[nb] != owner[c]) {
          throw BoundViolation("same-colour weights touch at cells " + std::to_string(c) + "," +
                               std::to_string(nb));
        }
      }
    }
  }
}

CpcSystem build_pou_system(const ColouredRefinement& refinement) {
  CpcSystem s;
  s.space = refinement.space;
  s.pieces = refinement.pieces;
  s.colour_of = refinement.colour_of;
  s.colours = refinement.colours;
  const std::size_t n = s.space->size();
  std::vector<std::uint32_t> multiplicity(n, 0);
  for (CellId c : s.pieces.members()) ++multiplicity[c];
  s.weights.reserve(s.pieces.total_members());
  for (CellId c : s.pieces.members()) s.weights.push_back(1.0 / multiplicity[c]);
  s.sample_points.reserve(s.pieces.size());
  for (std::size_t j = 0; j < s.pieces.size(); ++j) s.sample_points.push_back(s.pieces[j][0]);
  s.blocks.assign(s.pieces.size(), 1);
  return s;
}

double approx_error(const CpcSystem& system, const std::vector<FunctionSample>& functions) {
  double worst = 0.0;
  for (const auto& f : functions) {
    const auto back = system.reconstruct(f);
    for (std::size_t c = 0; c < back.size(); ++c) {
      worst = std::max(worst, std::abs(f.values[c] - back[c]));
    }
  }
  return worst;
}

CpcSystem direct_sum_systems(const CpcSystem& a, const CpcSystem& b) {
  const std::size_t na = a.space->size();
  auto edges = a.space->edges();
  for (auto [i, j] : b.space->edges()) {
    edges.emplace_back(static_cast<CellId>(i + na), static_cast<CellId>(j + na));
  }
  CpcSystem s;
  s.space = std::make_shared<const CellSpace>(
      na + b.space->size(), std::move(edges),
      std::max(a.space->dimension(), b.space->dimension()));
  s.pieces.reserve(a.rank() + b.rank(), a.pieces.total_members() + b.pieces.total_members());
  for (std::size_t j = 0; j < a.rank(); ++j) s.pieces.push_back(a.pieces[j]);
  std::vector<CellId> shifted;
  for (std::size_t j = 0; j < b.rank(); ++j) {
    shifted.assign(b.pieces[j].begin(), b.pieces[j].end());
    for (auto& c : shifted) c += static_cast<CellId>(na);
    s.pieces.push_back(shifted);
  }
  s.weights = a.weights;
  s.weights.insert(s.weights.end(), b.weights.begin(), b.weights.end());
  s.sample_points = a.sample_points;
  for (CellId x : b.sample_points) s.sample_points.push_back(static_cast<CellId>(x + na));
  s.blocks = a.blocks;
  s.blocks.insert(s.blocks.end(), b.blocks.begin(), b.blocks.end());
  s.colour_of = a.colour_of;
  s.colour_of.insert(s.colour_of.end(), b.colour_of.begin(), b.colour_of.end());
  s.colours = std::max(a.colours, b.colours);
  return s;
}

QdSystem qd_from_decomposable(const CpcSystem& system, const TraceVector& trace,
                              const std::vector<FunctionSample>& functions, double epsilon) {
  const std::size_t n = system.space->size();
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw PreconditionError("epsilon must lie in (0, 1)", epsilon);
  }
  trace.check(n);
  std::vector<FunctionSample> audited = functions;
  audited.push_back(FunctionSample::constant(n, 1.0));
  for (const auto& f : audited) {
    f.check(n);
    if (f.sup_norm() > 1.0 + 1e-12) {
      throw PreconditionError("function '" + f.name + "' is not a contraction", f.sup_norm());
    }
  }
  QdSystem q;
  q.rank = system.rank();
  q.sample_points = system.sample_points;
  q.epsilon = epsilon;
  q.approx_error = approx_error(system, audited);
  if (q.approx_error > epsilon / 3.0) {
    throw PreconditionError("approximation error " + std::to_string(q.approx_error) +
                                " exceeds epsilon/3 = " + std::to_string(epsilon / 3.0),
                            q.approx_error);
  }
  // sigma_j = tau(phi(e_j)); normalized it is a trace on F = C^rank.
  std::vector<double> sigma(q.rank, 0.0);
  double total = 0.0;
  for (std::size_t j = 0; j < q.rank; ++j) {
    auto cells = system.pieces[j];
    auto h = system.weights_of(j);
    for (std::size_t i = 0; i < cells.size(); ++i) sigma[j] += trace.mass[cells[i]] * h[i];
    total += sigma[j];
  }
  q.trace_on_F.resize(q.rank);
  for (std::size_t j = 0; j < q.rank; ++j) q.trace_on_F[j] = sigma[j] / total;

  for (const auto& f : audited) {
    double tf = 0.0;
    for (std::size_t j = 0; j < q.rank; ++j) tf += q.trace_on_F[j] * f.values[q.sample_points[j]];
    q.trace_defect = std::max(q.trace_defect, std::abs(tf - trace(f)));
    for (const auto& g : audited) {
      std::vector<double> fg(n);
      for (std::size_t c = 0; c < n; ++c) fg[c] = f.values[c] * g.values[c];
      // Point evaluation is multiplicative, so this stays 0 up to rounding.
      for (CellId x : q.sample_points) {
        q.mult_defect = std::max(q.mult_defect, std::abs(fg[x] - f.values[x] * g.values[x]));
      }
    }
  }
  q.trace_bound = 2.0 * epsilon / (3.0 - epsilon);
  return q;
}

// ---------------------------------------------------------------------------

ElementaryTensor ElementaryTensor::operator*(const ElementaryTensor& other) const {
  ElementaryTensor out;
  const std::size_t len = std::max(degree(), other.degree());
  for (std::size_t i = 0; i < len; ++i) {
    if (i >= degree()) {
      out.factors.push_back(other.factors[i]);
    } else if (i >= other.degree()) {
      out.factors.push_back(factors[i]);
    } else {
      out.factors.push_back(factors[i] * other.factors[i]);
    }
  }
  return out;
}

ElementaryTensor ElementaryTensor::shifted(std::size_t j) const {
  if (factors.empty()) return *this;
  const auto k = factors.front().rows();
  ElementaryTensor out;
  out.factors.assign(j, Eigen::MatrixXcd::Identity(k, k));
  out.factors.insert(out.factors.end(), factors.begin(), factors.end());
  return out;
}

std::complex<double> ElementaryTensor::trace() const {
  std::complex<double> t = 1.0;
  for (const auto& f : factors) t *= f.trace() / static_cast<double>(f.rows());
  return t;
}

std::vector<ElementaryTensor> random_monomials(std::size_t k, std::size_t degree,
                                               std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  std::vector<ElementaryTensor> out(count);
  for (auto& t : out) {
    for (std::size_t i = 0; i < degree; ++i) {
      Eigen::MatrixXcd m(k, k);
      for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
          const double re = gauss(rng);
          const double im = gauss(rng);
          m(r, c) = {re, im};
        }
      }
      t.factors.push_back(m / operator_norm(m));
    }
  }
  return out;
}

Eigen::MatrixXcd truncate(const ElementaryTensor& a, std::size_t k, std::size_t n) {
  if (a.degree() > n) {
    throw DepthExhaustedError("operand of degree " + std::to_string(a.degree()) +
                              " does not fit in " + std::to_string(n) + " tensor factors");
  }
  std::vector<Eigen::MatrixXcd> factors = a.factors;
  for (const auto& f : factors) {
    if (f.rows() != static_cast<Eigen::Index>(k) || f.cols() != static_cast<Eigen::Index>(k)) {
      throw StructuralError("tensor factor is not " + std::to_string(k) + "x" +
                            std::to_string(k));
    }
  }
  const auto id = Eigen::MatrixXcd::Identity(static_cast<Eigen::Index>(k),
                                             static_cast<Eigen::Index>(k));
  while (factors.size() < n) factors.push_back(id);
  return kron_all(factors);
}

MatrixShiftReport matrix_shift_qd(std::size_t k, std::size_t n,
                                  const std::vector<ElementaryTensor>& operands) {
  if (k < 2) throw StructuralError("matrix shift needs k >= 2");
  if (n == 0) throw StructuralError("matrix shift needs n >= 1");
  MatrixShiftReport r;
  r.k = k;
  r.n = n;
  r.rank = 1;
  for (std::size_t i = 0; i < n; ++i) r.rank *= k;

  std::vector<ElementaryTensor> audited;
  for (const auto& a : operands) {
    if (a.degree() > n) {
      throw DepthExhaustedError("operand of degree " + std::to_string(a.degree()) +
                                " exceeds the truncation n = " + std::to_string(n));
    }
    for (std::size_t j = 0; j + a.degree() <= n; ++j) audited.push_back(a.shifted(j));
  }
  r.audited = audited.size();
  std::vector<Eigen::MatrixXcd> images;
  images.reserve(audited.size());
  for (const auto& a : audited) images.push_back(truncate(a, k, n));
  const double dim = static_cast<double>(r.rank);
  for (std::size_t x = 0; x < audited.size(); ++x) {
    const std::complex<double> tf = images[x].trace() / dim;
    r.trace_defect = std::max(r.trace_defect, std::abs(tf - audited[x].trace()));
    for (std::size_t y = 0; y < audited.size(); ++y) {
      const Eigen::MatrixXcd diff = truncate(audited[x] * audited[y], k, n) - images[x] * images[y];
      r.mult_defect = std::max(r.mult_defect, operator_norm(diff));
    }
  }
  return r;
}

}  // namespace colent
