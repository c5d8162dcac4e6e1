#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "colent/cellspace.hpp"
#include "colent/errors.hpp"
#include "support/fixtures.hpp"

using namespace colent;

namespace {

using Family = std::set<std::vector<CellId>>;

Family as_family(const Cover& c) {
  Family f;
  for (std::size_t i = 0; i < c.size(); ++i) f.emplace(c[i].begin(), c[i].end());
  return f;
}

// Pairwise intersections, empties dropped.
Family join_oracle(const Family& a, const Family& b) {
  Family out;
  for (const auto& x : a) {
    for (const auto& y : b) {
      std::vector<CellId> both;
      std::set_intersection(x.begin(), x.end(), y.begin(), y.end(), std::back_inserter(both));
      if (!both.empty()) out.insert(both);
    }
  }
  return out;
}

Family pullback_oracle(const Family& cover, const std::vector<std::vector<CellId>>& images) {
  Family out;
  for (const auto& u : cover) {
    std::vector<CellId> pre;
    for (CellId c = 0; c < images.size(); ++c) {
      for (CellId y : images[c]) {
        if (std::binary_search(u.begin(), u.end(), y)) {
          pre.push_back(c);
          break;
        }
      }
    }
    if (!pre.empty()) out.insert(pre);
  }
  return out;
}

std::vector<std::vector<CellId>> random_relation(std::size_t cells, std::size_t fan,
                                                 std::mt19937_64& rng) {
  std::uniform_int_distribution<CellId> pick(0, static_cast<CellId>(cells - 1));
  std::uniform_int_distribution<std::size_t> width(1, fan);
  std::vector<std::vector<CellId>> images(cells);
  for (auto& img : images) {
    const std::size_t w = width(rng);
    for (std::size_t i = 0; i < w; ++i) img.push_back(pick(rng));
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
  }
  return images;
}

}  // namespace

TEST_CASE("standard spaces") {
  const auto p = CellSpace::path(4);
  CHECK(p.dimension() == 1);
  CHECK(p.edges().size() == 3);
  CHECK(p.adjacent(1, 2));
  CHECK_FALSE(p.adjacent(0, 2));

  const auto g = CellSpace::grid(3, 3);
  CHECK(g.dimension() == 2);
  // King moves on 3x3: 12 orthogonal plus 8 diagonal.
  CHECK(g.edges().size() == 20);
  CHECK(g.adjacent(0, 4));

  const auto cyc = CellSpace::cycle(5);
  CHECK(cyc.adjacent(0, 4));
  CHECK_FALSE(CellSpace::discrete(3).has_adjacency());
}

TEST_CASE("malformed spaces are rejected") {
  CHECK_THROWS_AS(CellSpace(3, {{0, 0}}, 1), StructuralError);
  CHECK_THROWS_AS(CellSpace(3, {{0, 3}}, 1), StructuralError);
  CHECK_THROWS_AS(CellSpace(3, {{0, 1}}, 0), StructuralError);
}

TEST_CASE("covers are stored canonically") {
  auto space = std::make_shared<const CellSpace>(CellSpace::discrete(3));
  const Cover c(space, std::vector<std::vector<CellId>>{{2, 1}, {}, {0, 1}, {1, 2}});
  REQUIRE(c.size() == 2);
  CHECK(c.to_vectors() == std::vector<std::vector<CellId>>{{0, 1}, {1, 2}});
  CHECK_FALSE(c.is_partition());
  CHECK(Cover(space, std::vector<std::vector<CellId>>{{1}, {0, 2}}).is_partition());
}

TEST_CASE("a family with a hole is not a cover") {
  auto space = std::make_shared<const CellSpace>(CellSpace::discrete(4));
  try {
    Cover(space, std::vector<std::vector<CellId>>{{0, 1}, {3}});
    FAIL("expected a covering error");
  } catch (const CoveringError& e) {
    CHECK(e.cell() == 2);
  }
  CHECK_THROWS_AS(Cover(space, std::vector<std::vector<CellId>>{{0, 1, 2, 3, 4}}),
                  StructuralError);
}

TEST_CASE("covers on different spaces cannot be joined") {
  auto a = std::make_shared<const CellSpace>(CellSpace::discrete(2));
  auto b = std::make_shared<const CellSpace>(CellSpace::path(2));
  CHECK_THROWS_AS(join(Cover::trivial(a), Cover::trivial(b)), StructuralError);
}

TEST_CASE("join and pullback agree with the set definitions") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t cells = 6 + trial % 9;
    auto a = fixtures::path_intervals(cells, 3 + trial % 4, rng);
    auto b = fixtures::path_intervals(cells, 2 + trial % 5, rng);
    b.space = a.space;
    const Cover ca = a.cover(), cb = b.cover();
    CHECK(as_family(join(ca, cb)) == join_oracle(as_family(ca), as_family(cb)));

    const auto images = random_relation(cells, 1 + trial % 3, rng);
    const CellMap map(a.space, images, false);
    CHECK(as_family(pullback(ca, map)) == pullback_oracle(as_family(ca), images));
  }
}

TEST_CASE("dynamical join of a partition matches repeated pullback and join") {
  // Exercises the label-array path against the general one.
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t cells = 20 + trial;
    auto space = std::make_shared<const CellSpace>(CellSpace::discrete(cells));
    std::uniform_int_distribution<std::size_t> part(0, 2 + trial % 4);
    std::vector<std::vector<CellId>> blocks(3 + trial % 4);
    for (CellId c = 0; c < cells; ++c) blocks[part(rng) % blocks.size()].push_back(c);
    const Cover cover(space, blocks);
    const CellMap map(space, random_relation(cells, trial % 2 == 0 ? 1 : 2, rng), false);

    for (std::size_t n = 1; n <= 5; ++n) {
      Family expected = as_family(cover);
      Family translate = expected;
      std::vector<std::vector<CellId>> images(cells);
      for (CellId c = 0; c < cells; ++c) {
        images[c].assign(map.images(c).begin(), map.images(c).end());
      }
      for (std::size_t j = 1; j < n; ++j) {
        translate = pullback_oracle(translate, images);
        expected = join_oracle(expected, translate);
      }
      CHECK(as_family(dynamical_join(cover, map, n)) == expected);
    }
  }
}

TEST_CASE("dynamical join respects the truncation depth") {
  auto space = std::make_shared<const CellSpace>(CellSpace::discrete(2));
  ModelBundle b{space, Cover(space, std::vector<std::vector<CellId>>{{0}, {1}}),
                CellMap::identity(space), 3};
  CHECK_NOTHROW(dynamical_join(b, 3));
  CHECK_THROWS_AS(dynamical_join(b, 4), DepthExhaustedError);
  CHECK_THROWS_AS(dynamical_join(b.cover, b.map, 0), StructuralError);
}

TEST_CASE("relabelling moves cells and keeps structure") {
  auto space = std::make_shared<const CellSpace>(CellSpace::path(4));
  const ModelBundle b{space, Cover(space, std::vector<std::vector<CellId>>{{0, 1}, {1, 2}, {2, 3}}),
                      CellMap::from_function(space, {1, 2, 3, 3}), std::nullopt};
  const std::vector<CellId> perm{3, 2, 1, 0};
  const ModelBundle r = relabel(b, perm);
  CHECK(r.space->adjacent(3, 2));
  CHECK(as_family(r.cover) == Family{{2, 3}, {1, 2}, {0, 1}});
  // Old cell 0 -> 1 becomes new cell 3 -> 2.
  CHECK(std::vector<CellId>(r.map.images(3).begin(), r.map.images(3).end()) ==
        std::vector<CellId>{2});
  CHECK_THROWS(relabel(b, std::vector<CellId>{0, 0, 1, 2}));
}

TEST_CASE("disjoint union places the second model after the first") {
  auto s2 = std::make_shared<const CellSpace>(CellSpace::discrete(2));
  auto s3 = std::make_shared<const CellSpace>(CellSpace::path(3));
  const ModelBundle a{s2, Cover::trivial(s2), CellMap::identity(s2), std::nullopt};
  const ModelBundle b{s3, Cover(s3, std::vector<std::vector<CellId>>{{0, 1}, {1, 2}}),
                      CellMap::from_function(s3, {1, 2, 0}), std::nullopt};
  const ModelBundle u = disjoint_union(a, b);
  CHECK(u.space->size() == 5);
  CHECK(u.space->adjacent(2, 3));
  CHECK_FALSE(u.space->adjacent(1, 2));
  CHECK(as_family(u.cover) == Family{{0, 1}, {2, 3}, {3, 4}});
  CHECK(u.map.images(4)[0] == 2);
}

TEST_CASE("map powers compose the relation") {
  auto space = std::make_shared<const CellSpace>(CellSpace::discrete(4));
  const CellMap rot = CellMap::from_function(space, {1, 2, 3, 0});
  const CellMap sq = rot.power(2);
  for (CellId c = 0; c < 4; ++c) CHECK(sq.images(c)[0] == (c + 2) % 4);
  CHECK(rot.single_valued());
}
