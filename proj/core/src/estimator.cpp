#include "colent/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "colent/cpapprox.hpp"
#include "colent/errors.hpp"
#include "colent/lowerbound.hpp"

namespace colent {

void GrowthSeries::add(std::size_t n, std::uint64_t count, bool exact) {
  if (!points.empty() && n <= points.back().n) {
    throw StructuralError("growth series times must increase strictly");
  }
  if (count == 0) throw StructuralError("growth series counts must be positive");
  points.push_back({n, count, exact});
}

bool GrowthSeries::all_exact() const {
  return std::all_of(points.begin(), points.end(), [](const GrowthPoint& p) { return p.exact; });
}

RateEstimate growth_rate(const GrowthSeries& series, RateMethod method) {
  const std::size_t p = series.points.size();
  if (p < 3) {
    throw StructuralError("growth rate needs at least 3 points, series '" + series.label +
                          "' has " + std::to_string(p));
  }
  RateEstimate r;
  r.method = method;
  r.tail_window = std::max<std::size_t>(2, (p + 2) / 3);
  r.upper_bound_only = !series.all_exact();
  const auto first = series.points.end() - static_cast<std::ptrdiff_t>(r.tail_window);
  std::vector<double> xs, ys;
  for (auto it = first; it != series.points.end(); ++it) {
    xs.push_back(static_cast<double>(it->n));
    ys.push_back(std::log(static_cast<double>(it->count)));
  }
  if (method == RateMethod::tail_max) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double rate = ys[i] / xs[i];
      hi = std::max(hi, rate);
      lo = std::min(lo, rate);
    }
    r.slope = hi;
    r.residual = hi - lo;
    return r;
  }
  const double w = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / w;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / w;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  r.slope = sxy / sxx;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double e = ys[i] - (my + r.slope * (xs[i] - mx));
    ss += e * e;
  }
  r.residual = std::sqrt(ss / w);
  return r;
}

const char* mode_name(Mode mode) {
  switch (mode) {
    case Mode::plain: return "plain";
    case Mode::coloured: return "coloured";
    case Mode::cpc: return "cpc";
    case Mode::qd: return "qd";
  }
  return "?";
}

Mode parse_mode(const std::string& text) {
  if (text == "plain" || text == "N") return Mode::plain;
  if (text == "coloured" || text == "colored" || text == "Nc") return Mode::coloured;
  if (text == "cpc") return Mode::cpc;
  if (text == "qd") return Mode::qd;
  throw StructuralError("unknown mode '" + text + "' (expected plain, coloured, cpc or qd)");
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::ok: return "OK";
    case Verdict::violated: return "VIOLATED";
    case Verdict::withheld: return "WITHHELD";
  }
  return "?";
}

// ---------------------------------------------------------------------------

namespace {

/// Indicators of the cover elements followed by their translates up to time n-1.
std::vector<FunctionSample> audited_functions(const ModelBundle& model, std::size_t n) {
  VectorFamily base;
  const std::size_t cells = model.space->size();
  for (std::size_t e = 0; e < model.cover.size(); ++e) {
    base.functions.push_back(
        FunctionSample::indicator(cells, model.cover[e], "U" + std::to_string(e)));
  }
  return shifted_family(base, model.map, n).functions;
}

void record(ExperimentResult& out, std::size_t n, const Cover& joined, const ModelBundle& model,
            const ExperimentOptions& options) {
  if (out.mode == Mode::plain) {
    const auto r = minimal_subcover(joined, options.solver);
    out.series.add(n, r.count, r.exact);
    return;
  }
  const auto r = minimal_coloured_refinement(joined, options.colours, options.solver);
  if (out.mode == Mode::coloured) {
    out.series.add(n, r.count, r.exact);
    return;
  }
  const CpcSystem system = build_pou_system(r.witness);
  const auto functions = audited_functions(model, n);
  AuditRow row;
  row.n = n;
  row.rank = system.rank();
  if (out.mode == Mode::cpc) {
    auto with_unit = functions;
    with_unit.push_back(FunctionSample::constant(model.space->size(), 1.0));
    row.approx_error = approx_error(system, with_unit);
  } else {
    const QdSystem q = qd_from_decomposable(system, TraceVector::uniform(model.space->size()),
                                            functions, options.epsilon);
    row.rank = q.rank;
    row.approx_error = q.approx_error;
    row.mult_defect = q.mult_defect;
    row.trace_defect = q.trace_defect;
  }
  out.audit.push_back(row);
  out.series.add(n, row.rank, r.exact);
}

}  // namespace

ExperimentResult entropy_experiment(const ModelBundle& model, std::size_t n_max, Mode mode,
                                    const ExperimentOptions& options) {
  ExperimentResult out;
  out.mode = mode;
  out.series.label = mode_name(mode);
  Cover joined = model.cover;
  Cover translate = model.cover;
  for (std::size_t n = 1; n <= n_max; ++n) {
    try {
      if (model.truncation_depth && n > *model.truncation_depth) {
        throw DepthExhaustedError("n = " + std::to_string(n) + " exceeds the truncation depth " +
                                  std::to_string(*model.truncation_depth));
      }
      if (n > 1) {
        translate = pullback(translate, model.map);
        joined = join(joined, translate);
      }
      record(out, n, joined, model, options);
    } catch (const Error& e) {
      out.series.truncated = true;
      out.series.truncation_reason = e.what();
      break;
    }
  }
  return out;
}

ExperimentResult entropy_experiment(const TransferMatrix& matrix, std::size_t n_max, Mode mode,
                                    const ExperimentOptions& options) {
  ExperimentResult out;
  out.mode = mode;
  out.series.label = mode_name(mode);
  for (std::size_t n = 1; n <= n_max; ++n) {
    try {
      const ModelBundle model = cylinder_cover(matrix, n);
      record(out, n, dynamical_join(model, n), model, options);
    } catch (const Error& e) {
      out.series.truncated = true;
      out.series.truncation_reason = e.what();
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------

SandwichReport sandwich_verdict(const ModelBundle& model, std::size_t n,
                                const SolverOptions& options) {
  SandwichReport rep;
  rep.n = n;
  rep.colours = model.space->colours();
  Cover joined = model.cover;
  try {
    joined = dynamical_join(model, n);
  } catch (const Error& e) {
    rep.reason = e.what();
    return rep;
  }
  const auto sub = minimal_subcover(joined, options);
  rep.subcover = sub.count;
  rep.subcover_exact = sub.exact;
  rep.bound = rep.colours * sub.count;
  RefinementResult col;
  try {
    col = solve_coloured_refinement(joined, rep.colours, options);
  } catch (const InfeasibleError& e) {
    rep.reason = e.what();
    rep.verdict = e.proven() && sub.exact ? Verdict::violated : Verdict::withheld;
    return rep;
  }
  rep.coloured = col.count;
  rep.coloured_exact = col.exact;
  try {
    col.witness.validate(joined);
  } catch (const BoundViolation& e) {
    rep.verdict = Verdict::violated;
    rep.reason = std::string("invalid witness: ") + e.what();
    return rep;
  }
  if (!(sub.exact && col.exact)) {
    rep.verdict = Verdict::withheld;
    rep.reason = "heuristic count";
    return rep;
  }
  const bool ok = rep.subcover <= rep.coloured && rep.coloured <= rep.bound;
  rep.verdict = ok ? Verdict::ok : Verdict::violated;
  if (!ok) rep.reason = "N <= Nc <= (d+1)N fails";
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<std::uint64_t> join_counts(const ModelBundle& model, std::size_t n_max, Mode mode,
                                       const SolverOptions& solver) {
  ExperimentOptions opts;
  opts.solver = solver;
  const auto r = entropy_experiment(model, n_max, mode, opts);
  if (r.series.truncated) {
    throw Error("series stopped early: " + r.series.truncation_reason);
  }
  std::vector<std::uint64_t> counts;
  for (const auto& p : r.series.points) counts.push_back(p.count);
  return counts;
}

std::size_t affordable_depth(const TransferMatrix& m, std::size_t wanted) {
  std::size_t d = 1;
  while (d < wanted && cylinder_count(m, d + 1) <= (std::uint64_t{1} << 16)) ++d;
  return d;
}

}  // namespace

std::vector<PermanenceCheck> permanence_suite(const std::vector<TransferMatrix>& models,
                                              const std::vector<std::string>& labels,
                                              const PermanenceOptions& options) {
  if (labels.size() != models.size()) {
    throw StructuralError("permanence suite needs one label per model");
  }
  std::vector<PermanenceCheck> checks;
  auto run = [&](PermanenceCheck c, auto&& body) {
    try {
      body(c);
    } catch (const std::exception& e) {
      c.passed = false;
      c.detail = std::string("error: ") + e.what();
    }
    checks.push_back(std::move(c));
  };

  // Power law: h(A^k) = k h(A).
  for (std::size_t i = 0; i < models.size(); ++i) {
    PermanenceCheck c;
    c.law = "power";
    c.label = labels[i];
    c.tolerance = 1e-9;
    run(c, [&](PermanenceCheck& c) {
      const double h = sft_entropy(models[i]).value;
      for (std::size_t k = 1; k <= options.max_power; ++k) {
        const double hk = sft_entropy(power_system(models[i], k)).value;
        c.deviation = std::max(c.deviation, std::abs(hk - static_cast<double>(k) * h));
      }
      c.passed = c.deviation <= c.tolerance;
      c.detail = "k <= " + std::to_string(options.max_power);
    });
  }

  // Direct sums: cell-model counts add up, and the growth slope is the max.
  for (std::size_t i = 0; i + 1 < models.size(); ++i) {
    PermanenceCheck c;
    c.law = "direct_sum";
    c.label = labels[i] + "+" + labels[i + 1];
    c.tolerance = 1e-3;
    run(c, [&](PermanenceCheck& c) {
      const TransferMatrix& a = models[i];
      const TransferMatrix& b = models[i + 1];
      const std::size_t depth =
          std::min(affordable_depth(a, options.cell_depth), affordable_depth(b, options.cell_depth));
      const ModelBundle both = disjoint_union(cylinder_cover(a, depth), cylinder_cover(b, depth));
      const auto counts = join_counts(both, depth, Mode::coloured, options.solver);
      std::uint64_t count_gap = 0;
      for (std::size_t n = 1; n <= depth; ++n) {
        const std::uint64_t expect = cylinder_count(a, n) + cylinder_count(b, n);
        const std::uint64_t got = counts[n - 1];
        count_gap = std::max(count_gap, got > expect ? got - expect : expect - got);
      }
      const TransferMatrix sum = disjoint_sum(a, b);
      GrowthSeries series;
      for (std::size_t n = 1; n <= options.slope_horizon; ++n) {
        try {
          series.add(n, cylinder_count(sum, n));
        } catch (const OverflowError&) {
          break;
        }
      }
      const double slope = growth_rate(series, RateMethod::tail_max).slope;
      const double target = std::max(sft_entropy(a).value, sft_entropy(b).value);
      c.deviation = std::abs(slope - target);
      c.passed = count_gap == 0 && c.deviation <= c.tolerance;
      c.detail = "cell counts exact to n=" + std::to_string(depth) +
                 (count_gap == 0 ? "" : " (mismatch " + std::to_string(count_gap) + ")") +
                 ", slope over n<=" + std::to_string(series.points.size());
    });
  }

  // Conjugacy: relabelled cells and relabelled symbols change nothing.
  std::mt19937_64 rng(options.seed);
  for (std::size_t i = 0; i < models.size(); ++i) {
    PermanenceCheck c;
    c.law = "conjugacy";
    c.label = labels[i];
    c.tolerance = 0.0;
    run(c, [&](PermanenceCheck& c) {
      const TransferMatrix& a = models[i];
      const std::size_t depth = affordable_depth(a, options.cell_depth);
      const ModelBundle model = cylinder_cover(a, depth);
      std::vector<CellId> perm(model.space->size());
      std::iota(perm.begin(), perm.end(), 0u);
      std::shuffle(perm.begin(), perm.end(), rng);
      const ModelBundle moved = relabel(model, perm);
      double gap = 0.0;
      for (Mode mode : {Mode::plain, Mode::coloured}) {
        const auto before = join_counts(model, depth, mode, options.solver);
        const auto after = join_counts(moved, depth, mode, options.solver);
        for (std::size_t n = 0; n < before.size(); ++n) {
          gap = std::max(gap, std::abs(static_cast<double>(before[n]) -
                                       static_cast<double>(after[n])));
        }
      }
      std::vector<std::size_t> symbols(a.alphabet());
      std::iota(symbols.begin(), symbols.end(), std::size_t{0});
      std::shuffle(symbols.begin(), symbols.end(), rng);
      const TransferMatrix b = relabel(a, symbols);
      for (std::size_t n = 1; n <= options.cell_depth; ++n) {
        gap = std::max(gap, std::abs(static_cast<double>(cylinder_count(a, n)) -
                                     static_cast<double>(cylinder_count(b, n))));
      }
      c.deviation = gap;
      c.passed = gap == 0.0;
      c.detail = "cells relabelled at depth " + std::to_string(depth) + ", symbols permuted";
    });
  }
  return checks;
}

}  // namespace colent
