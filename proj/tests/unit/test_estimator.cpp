#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "colent/errors.hpp"
#include "colent/estimator.hpp"
#include "support/fixtures.hpp"

using namespace colent;

namespace {

GrowthSeries series_of(const std::vector<std::uint64_t>& counts) {
  GrowthSeries s;
  for (std::size_t i = 0; i < counts.size(); ++i) s.add(i + 1, counts[i]);
  return s;
}

std::vector<std::uint64_t> fibonacci_counts(std::size_t n_max) {
  std::vector<std::uint64_t> out;
  for (std::size_t n = 1; n <= n_max; ++n) {
    out.push_back(oracle::count_words({{1, 1}, {1, 0}}, n));
  }
  return out;
}

}  // namespace

TEST_CASE("geometric counts give their ratio") {
  std::vector<std::uint64_t> pow2;
  for (std::size_t n = 1; n <= 30; ++n) pow2.push_back(std::uint64_t{1} << n);
  for (auto method : {RateMethod::tail_max, RateMethod::regression}) {
    const auto r = growth_rate(series_of(pow2), method);
    CHECK(std::abs(r.slope - std::log(2.0)) < 1e-12);
    CHECK(r.tail_window == 10);
    CHECK(r.residual >= 0.0);
    CHECK_FALSE(r.upper_bound_only);
  }
}

TEST_CASE("pure powers agree across methods") {
  for (std::uint64_t lambda : {2u, 3u, 5u}) {
    std::vector<std::uint64_t> c;
    std::uint64_t v = 1;
    for (std::size_t n = 1; n <= 12; ++n) c.push_back(v *= lambda);
    const auto a = growth_rate(series_of(c), RateMethod::tail_max);
    const auto b = growth_rate(series_of(c), RateMethod::regression);
    CHECK(std::abs(a.slope - b.slope) < 1e-9);
  }
}

TEST_CASE("polynomial growth has vanishing slope") {
  const std::size_t n_max = 40;
  std::vector<std::uint64_t> sq;
  for (std::size_t n = 1; n <= n_max; ++n) sq.push_back(n * n);
  const auto reg = growth_rate(series_of(sq), RateMethod::regression);
  CHECK(reg.slope <= 2.0 * std::log(static_cast<double>(n_max)) / n_max);
  // The tail maximum is attained at the first point of its window.
  const auto tail = growth_rate(series_of(sq), RateMethod::tail_max);
  const double first = static_cast<double>(n_max - tail.tail_window + 1);
  CHECK(tail.slope == doctest::Approx(2.0 * std::log(first) / first));
}

TEST_CASE("golden-mean counts recover log phi by regression") {
  const auto counts = fibonacci_counts(20);
  const auto reg = growth_rate(series_of(counts), RateMethod::regression);
  CHECK(std::abs(reg.slope - oracle::log_golden()) < 1e-3);
  // Fitting the same window independently gives the same slope.
  std::vector<double> x, y;
  for (std::size_t n = 14; n <= 20; ++n) {
    x.push_back(static_cast<double>(n));
    y.push_back(std::log(static_cast<double>(counts[n - 1])));
  }
  CHECK(reg.slope == doctest::Approx(oracle::ls_slope(x, y)).epsilon(1e-12));
  // The tail maximum overshoots: counts are phi^(n+2)/sqrt(5), so (1/n) log
  // count sits above log phi for every n.
  const auto tail = growth_rate(series_of(counts), RateMethod::tail_max);
  CHECK(tail.slope > oracle::log_golden());
}

TEST_CASE("estimator preconditions and flags") {
  CHECK_THROWS_AS(growth_rate(series_of({2, 4})), StructuralError);
  GrowthSeries s;
  s.add(1, 2);
  CHECK_THROWS_AS(s.add(1, 4), StructuralError);
  CHECK_THROWS_AS(s.add(2, 0), StructuralError);
  s.add(2, 4, false);
  s.add(3, 8);
  CHECK_FALSE(s.all_exact());
  CHECK(growth_rate(s).upper_bound_only);
  CHECK(growth_rate(s, RateMethod::regression).upper_bound_only);
}

TEST_CASE("modes parse by name and symbol") {
  CHECK(parse_mode("plain") == Mode::plain);
  CHECK(parse_mode("N") == Mode::plain);
  CHECK(parse_mode("Nc") == Mode::coloured);
  CHECK(parse_mode("qd") == Mode::qd);
  CHECK(std::string(mode_name(Mode::cpc)) == "cpc");
  CHECK_THROWS_AS(parse_mode("colored-ish"), StructuralError);
}

TEST_CASE("full shifts count every cylinder") {
  for (std::size_t k = 2; k <= 3; ++k) {
    const auto r = entropy_experiment(TransferMatrix::full_shift(k), 8, Mode::coloured);
    REQUIRE(r.series.points.size() == 8);
    std::uint64_t v = 1;
    for (const auto& p : r.series.points) {
      CHECK(p.count == (v *= k));
      CHECK(p.exact);
    }
  }
}

TEST_CASE("a rotation has bounded coloured counts") {
  auto space = std::make_shared<const CellSpace>(CellSpace::discrete(4));
  const ModelBundle rot{space, Cover(space, std::vector<std::vector<CellId>>{{0, 1}, {2, 3}}),
                        CellMap::from_function(space, {1, 2, 3, 0}), std::nullopt};
  const auto r = entropy_experiment(rot, 10, Mode::coloured);
  REQUIRE(r.series.points.size() == 10);
  // Oracle: join by explicit intersection, minimal subcover by search (d = 0
  // makes the coloured number equal the subcover number).
  std::set<std::vector<std::size_t>> joined{{0, 1}, {2, 3}}, translate = joined;
  for (const auto& p : r.series.points) {
    oracle::Sets sets(joined.begin(), joined.end());
    CHECK(p.count == oracle::min_subcover(4, sets).size());
    CHECK(p.count <= 4);
    std::set<std::vector<std::size_t>> pulled, next;
    for (const auto& u : translate) {
      std::vector<std::size_t> pre;
      for (std::size_t c = 0; c < 4; ++c) {
        if (std::count(u.begin(), u.end(), (c + 1) % 4)) pre.push_back(c);
      }
      pulled.insert(pre);
    }
    translate = pulled;
    for (const auto& a : joined) {
      for (const auto& b : translate) {
        std::vector<std::size_t> both;
        std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(both));
        if (!both.empty()) next.insert(both);
      }
    }
    joined = next;
  }
}

TEST_CASE("golden mean ranks grow like phi in every mode") {
  for (Mode mode : {Mode::coloured, Mode::cpc, Mode::qd}) {
    const auto r = entropy_experiment(TransferMatrix::golden_mean(), 18, mode);
    REQUIRE(r.series.points.size() == 18);
    CHECK(std::abs(growth_rate(r.series, RateMethod::regression).slope - oracle::log_golden()) <
          1e-3);
    if (mode != Mode::coloured) {
      REQUIRE(r.audit.size() == 18);
      for (const auto& a : r.audit) CHECK(a.approx_error <= 1e-12);
    }
  }
}

TEST_CASE("experiments stop at the truncation depth and keep their points") {
  const ModelBundle shallow = cylinder_cover(TransferMatrix::full_shift(2), 4);
  const auto r = entropy_experiment(shallow, 6, Mode::plain);
  CHECK(r.series.points.size() == 4);
  CHECK(r.series.truncated);
  CHECK(r.series.truncation_reason.find("truncation") != std::string::npos);
}

TEST_CASE("sandwich verdicts") {
  auto path = std::make_shared<const CellSpace>(CellSpace::path(4));
  const ModelBundle p4{path, Cover(path, std::vector<std::vector<CellId>>{{0, 1}, {1, 2}, {2, 3}}),
                       CellMap::identity(path), std::nullopt};
  const auto r = sandwich_verdict(p4, 1);
  CHECK(r.subcover == 2);
  CHECK(r.coloured == oracle::min_coloured(4, {{0, 1}, {1, 2}, {2, 3}},
                                           {{0, 1}, {1, 2}, {2, 3}}, 2));
  CHECK(r.bound == 4);
  CHECK(r.verdict == Verdict::ok);

  // d = 0 gives equality.
  const auto d0 = sandwich_verdict(cylinder_cover(TransferMatrix::golden_mean(), 5), 5);
  CHECK(d0.subcover == d0.coloured);
  CHECK(d0.verdict == Verdict::ok);

  // Grid with three colours against the exhaustive oracle.
  std::mt19937_64 rng(14);
  for (int trial = 0; trial < 10; ++trial) {
    const auto rc = fixtures::grid_rectangles(2, 3, 2 + trial % 3, rng);
    const ModelBundle g{rc.space, rc.cover(), CellMap::identity(rc.space), std::nullopt};
    const auto v = sandwich_verdict(g, 1);
    oracle::Sets sets;
    for (std::size_t i = 0; i < g.cover.size(); ++i) sets.emplace_back(g.cover[i].begin(), g.cover[i].end());
    CHECK(v.coloured == oracle::min_coloured(6, rc.edges, sets, 3));
    CHECK(v.subcover <= v.coloured);
    CHECK(v.coloured <= 3 * v.subcover);
    CHECK(v.verdict == Verdict::ok);
  }
}

TEST_CASE("heuristic counts never certify a sandwich") {
  std::mt19937_64 rng(23);
  const auto rc = fixtures::path_intervals(24, 20, rng);
  const ModelBundle m{rc.space, rc.cover(), CellMap::identity(rc.space), std::nullopt};
  SolverOptions low;
  low.exact_threshold = 0;
  const auto v = sandwich_verdict(m, 1, low);
  if (!v.subcover_exact || !v.coloured_exact) {
    CHECK(v.verdict == Verdict::withheld);
    CHECK_FALSE(v.reason.empty());
  }
  CHECK(std::string(verdict_name(Verdict::withheld)) == "WITHHELD");
}

TEST_CASE("permanence laws hold on standard shifts") {
  const auto checks = permanence_suite(
      {TransferMatrix::full_shift(2), TransferMatrix::full_shift(3), TransferMatrix::golden_mean()},
      {"full2", "full3", "golden"});
  std::set<std::string> laws;
  for (const auto& c : checks) {
    CHECK_MESSAGE(c.passed, c.law << " " << c.label << " " << c.detail);
    CHECK(c.deviation <= c.tolerance);
    laws.insert(c.law);
  }
  CHECK(laws == std::set<std::string>{"power", "direct_sum", "conjugacy"});
  CHECK_THROWS_AS(permanence_suite({TransferMatrix::full_shift(2)}, {}), StructuralError);
}
