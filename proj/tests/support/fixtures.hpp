#pragma once

#include <cstdint>
#include <memory>
#include <random>
#include <vector>

#include "colent/cellspace.hpp"
#include "oracles/oracles.hpp"

namespace fixtures {

using colent::CellId;

struct RandomCover {
  colent::SpacePtr space;
  oracle::Sets sets;
  oracle::Edges edges;

  colent::Cover cover() const {
    std::vector<std::vector<CellId>> v;
    for (const auto& s : sets) v.emplace_back(s.begin(), s.end());
    return colent::Cover(space, v);
  }
};

inline oracle::Edges plain_edges(const colent::CellSpace& space) {
  oracle::Edges out;
  for (auto [a, b] : space.edges()) out.emplace_back(a, b);
  return out;
}

/// Open cover of a path by random intervals. At cell resolution openness
/// means every edge lies inside one element, so missing edges are added.
inline RandomCover path_intervals(std::size_t cells, std::size_t count, std::mt19937_64& rng) {
  RandomCover r;
  r.space = std::make_shared<const colent::CellSpace>(colent::CellSpace::path(cells));
  r.edges = plain_edges(*r.space);
  std::uniform_int_distribution<std::size_t> pos(0, cells - 1), len(1, std::max<std::size_t>(2, cells / 2));
  auto add = [&](std::size_t lo, std::size_t hi) {
    std::vector<std::size_t> s;
    for (std::size_t c = lo; c <= hi; ++c) s.push_back(c);
    r.sets.push_back(s);
  };
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t lo = pos(rng);
    add(lo, std::min(cells - 1, lo + len(rng) - 1));
  }
  for (std::size_t c = 0; c + 1 < cells; ++c) {
    bool inside = false;
    for (const auto& e : r.sets) inside = inside || (e.front() <= c && c + 1 <= e.back());
    if (!inside) add(c, c + 1);
  }
  if (cells == 1 && r.sets.empty()) add(0, 0);
  return r;
}

/// Open cover of a rows x cols king-move grid by random rectangles. The
/// maximal cliques are the 2x2 blocks; each is added unless some rectangle
/// already holds it.
inline RandomCover grid_rectangles(std::size_t rows, std::size_t cols, std::size_t count,
                                   std::mt19937_64& rng) {
  RandomCover r;
  r.space = std::make_shared<const colent::CellSpace>(colent::CellSpace::grid(rows, cols));
  r.edges = plain_edges(*r.space);
  std::uniform_int_distribution<std::size_t> row(0, rows - 1), col(0, cols - 1), ext(0, 1);
  auto add = [&](std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) {
    std::vector<std::size_t> s;
    for (std::size_t a = r0; a <= r1; ++a) {
      for (std::size_t b = c0; b <= c1; ++b) s.push_back(a * cols + b);
    }
    r.sets.push_back(s);
  };
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t r0 = row(rng), c0 = col(rng);
    add(r0, c0, std::min(rows - 1, r0 + ext(rng)), std::min(cols - 1, c0 + ext(rng)));
  }
  auto holds = [&](std::size_t r0, std::size_t c0, std::size_t r1, std::size_t c1) {
    for (const auto& e : r.sets) {
      const std::size_t lo = e.front(), hi = e.back();
      if (lo / cols <= r0 && lo % cols <= c0 && hi / cols >= r1 && hi % cols >= c1) return true;
    }
    return false;
  };
  const std::size_t br = rows > 1 ? rows - 1 : 1, bc = cols > 1 ? cols - 1 : 1;
  for (std::size_t a = 0; a < br; ++a) {
    for (std::size_t b = 0; b < bc; ++b) {
      const std::size_t a1 = std::min(rows - 1, a + 1), b1 = std::min(cols - 1, b + 1);
      if (!holds(a, b, a1, b1)) add(a, b, a1, b1);
    }
  }
  return r;
}

inline std::vector<std::vector<int>> random_matrix(std::size_t k, double density,
                                                   std::mt19937_64& rng) {
  std::bernoulli_distribution bit(density);
  std::vector<std::vector<int>> a(k, std::vector<int>(k, 0));
  for (auto& row : a) {
    for (auto& x : row) x = bit(rng);
  }
  // Keep every symbol extendable so some words of every length exist.
  for (std::size_t i = 0; i < k; ++i) a[i][(i + 1) % k] = 1;
  return a;
}

}  // namespace fixtures
