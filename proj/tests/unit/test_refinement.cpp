#include <doctest.h>

#include <random>

#include "colent/errors.hpp"
#include "colent/refinement.hpp"
#include "support/fixtures.hpp"

using namespace colent;

namespace {

oracle::Sets canonical_sets(const Cover& cover) {
  oracle::Sets out;
  for (std::size_t i = 0; i < cover.size(); ++i) out.emplace_back(cover[i].begin(), cover[i].end());
  return out;
}

}  // namespace

TEST_CASE("minimal subcover matches exhaustive search") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 120; ++trial) {
    const auto rc = trial % 2 == 0 ? fixtures::path_intervals(8 + trial % 7, 4 + trial % 6, rng)
                                   : fixtures::grid_rectangles(3, 3 + trial % 2, 5 + trial % 5, rng);
    const Cover cover = rc.cover();
    const auto sets = canonical_sets(cover);
    const auto expected = oracle::min_subcover(rc.space->size(), sets);
    const auto r = minimal_subcover(cover);
    REQUIRE(r.exact);
    CHECK(r.count == expected.size());
    CHECK(std::vector<std::size_t>(r.chosen.begin(), r.chosen.end()) == expected);
  }
}

TEST_CASE("partition covers are their own minimal subcover") {
  auto space = std::make_shared<const CellSpace>(CellSpace::discrete(5));
  const Cover c(space, std::vector<std::vector<CellId>>{{0, 3}, {1}, {2, 4}});
  const auto r = minimal_subcover(c);
  CHECK(r.count == 3);
  CHECK(r.exact);
  const auto col = minimal_coloured_refinement(c, 1);
  CHECK(col.count == 3);
  CHECK(col.exact);
}

TEST_CASE("large kernels fall back to greedy and say so") {
  std::mt19937_64 rng(9);
  const auto rc = fixtures::path_intervals(30, 25, rng);
  SolverOptions low;
  low.exact_threshold = 1;
  const auto r = minimal_subcover(rc.cover(), low);
  const auto exact = minimal_subcover(rc.cover());
  CHECK(r.count >= exact.count);
  // Greedy output still covers.
  CHECK(oracle::covers(rc.space->size(), canonical_sets(rc.cover()), r.chosen));
  CHECK((!r.exact || r.count == exact.count));
}

TEST_CASE("coloured refinements match exhaustive search on small instances") {
  std::mt19937_64 rng(21);
  int compared = 0;
  for (int trial = 0; trial < 200 && compared < 80; ++trial) {
    const auto rc = trial % 2 == 0 ? fixtures::path_intervals(5 + trial % 4, 2 + trial % 3, rng)
                                   : fixtures::grid_rectangles(2, 3 + trial % 2, 2 + trial % 3, rng);
    const Cover cover = rc.cover();
    const auto sets = canonical_sets(cover);
    if (oracle::atom_count(rc.space->size(), sets) > 6) continue;
    const std::size_t colours = rc.space->colours();
    const std::size_t expected =
        oracle::min_coloured(rc.space->size(), rc.edges, sets, colours);
    const auto r = minimal_coloured_refinement(cover);
    REQUIRE(r.exact);
    CHECK(r.count == expected);
    CHECK_NOTHROW(r.witness.validate(cover));
    CHECK(r.witness.size() == r.count);
    ++compared;
  }
  CHECK(compared >= 50);
}

TEST_CASE("path4 has two-coloured refinement number two") {
  auto space = std::make_shared<const CellSpace>(CellSpace::path(4));
  const Cover c(space, std::vector<std::vector<CellId>>{{0, 1}, {1, 2}, {2, 3}});
  const oracle::Sets sets{{0, 1}, {1, 2}, {2, 3}};
  const auto r = minimal_coloured_refinement(c);
  CHECK(r.count == oracle::min_coloured(4, {{0, 1}, {1, 2}, {2, 3}}, sets, 2));
  CHECK(r.count == 2);
  CHECK(r.subcover_count == 2);
}

TEST_CASE("too few colours is infeasible and names a cell") {
  // One colour on a connected path forces a single piece, which no element holds.
  auto space = std::make_shared<const CellSpace>(CellSpace::path(3));
  const Cover c(space, std::vector<std::vector<CellId>>{{0, 1}, {1, 2}});
  try {
    solve_coloured_refinement(c, 1, {});
    FAIL("expected infeasibility");
  } catch (const InfeasibleError& e) {
    CHECK(e.proven());
    CHECK(e.witness_cell() < 3);
  }
  CHECK(oracle::min_coloured(3, {{0, 1}, {1, 2}}, {{0, 1}, {1, 2}}, 1) ==
        std::numeric_limits<std::size_t>::max());
}

TEST_CASE("validate rejects broken refinements") {
  auto space = std::make_shared<const CellSpace>(CellSpace::path(3));
  const Cover c(space, std::vector<std::vector<CellId>>{{0, 1}, {1, 2}});
  ColouredRefinement bad;
  bad.space = space;
  bad.colours = 2;
  bad.pieces.push_back(std::vector<CellId>{0, 1});
  bad.pieces.push_back(std::vector<CellId>{2});
  bad.colour_of = {0, 0};
  bad.parent_of = {0, 1};
  CHECK_THROWS_AS(bad.validate(c), BoundViolation);  // same colour, adjacent
  bad.colour_of = {0, 1};
  CHECK_NOTHROW(bad.validate(c));
  bad.parent_of = {1, 1};
  CHECK_THROWS_AS(bad.validate(c), BoundViolation);  // piece outside parent
}

TEST_CASE("atoms group cells by membership") {
  auto space = std::make_shared<const CellSpace>(CellSpace::path(5));
  const Cover c(space, std::vector<std::vector<CellId>>{{0, 1, 2}, {2, 3, 4}});
  const auto a = atomize(c);
  CHECK(a.atoms.size() == 3);
  CHECK(a.atom_of[0] == a.atom_of[1]);
  CHECK(a.atom_of[2] != a.atom_of[1]);
  CHECK(a.atom_of[3] == a.atom_of[4]);
}

TEST_CASE("stride-one block covers past the exact threshold still refine") {
  // 25 atoms: one more than the default threshold, and greedy colouring gets stuck.
  auto space = std::make_shared<const CellSpace>(CellSpace::grid(5, 5));
  std::vector<std::vector<CellId>> blocks;
  for (CellId r = 0; r < 4; ++r) {
    for (CellId c = 0; c < 4; ++c) blocks.push_back({r * 5 + c, r * 5 + c + 1, (r + 1) * 5 + c, (r + 1) * 5 + c + 1});
  }
  const Cover cover(space, blocks);
  const auto r = minimal_coloured_refinement(cover);
  CHECK_NOTHROW(r.witness.validate(cover));
  CHECK(r.count >= r.subcover_count);
  CHECK(r.count <= 3 * r.subcover_count);
}
