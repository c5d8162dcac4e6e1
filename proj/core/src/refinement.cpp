#include "colent/refinement.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <numeric>
#include <queue>
#include <string>
#include <unordered_map>

#include "colent/errors.hpp"

namespace colent {

namespace {

using Mask = std::uint64_t;

struct SpanHash {
  const SetFamily* family;
  std::size_t operator()(std::uint32_t cell) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (CellId e : (*family)[cell]) {
      h ^= e + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

struct SpanEqual {
  const SetFamily* family;
  bool operator()(std::uint32_t a, std::uint32_t b) const noexcept {
    auto x = (*family)[a];
    auto y = (*family)[b];
    return std::equal(x.begin(), x.end(), y.begin(), y.end());
  }
};

}  // namespace

AtomDecomposition atomize(const Cover& cover) {
  const std::size_t n = cover.space()->size();
  const SetFamily membership = cover.elements().inverse(n);
  AtomDecomposition out;
  out.atom_of.assign(n, 0);

  if (cover.is_partition()) {
    // Each element is one atom; canonical order already sorts by least cell.
    out.atoms = cover.elements();
    for (CellId c = 0; c < n; ++c) out.atom_of[c] = membership[c][0];
    out.elements.reserve(cover.size(), cover.size());
    for (std::size_t e = 0; e < cover.size(); ++e) {
      CellId a = static_cast<CellId>(e);
      out.elements.push_back(std::span<const CellId>(&a, 1));
    }
    return out;
  }

  // Representative cell of each pattern -> atom index.
  std::unordered_map<std::uint32_t, std::uint32_t, SpanHash, SpanEqual> index(
      16, SpanHash{&membership}, SpanEqual{&membership});
  std::vector<std::uint32_t> representative;
  std::vector<std::vector<CellId>> cells_of;
  for (CellId c = 0; c < n; ++c) {
    auto [it, inserted] = index.try_emplace(c, static_cast<std::uint32_t>(representative.size()));
    if (inserted) {
      representative.push_back(c);
      cells_of.emplace_back();
    }
    out.atom_of[c] = it->second;
    cells_of[it->second].push_back(c);
  }
  out.atoms.reserve(cells_of.size(), n);
  for (auto& cells : cells_of) out.atoms.push_back(cells);

  SetFamily atom_membership;
  atom_membership.reserve(representative.size(), representative.size());
  for (auto rep : representative) atom_membership.push_back(membership[rep]);
  out.elements = atom_membership.inverse(cover.size());
  return out;
}

// ---------------------------------------------------------------------------
// Minimal subcover

namespace {

/// Exact min set cover on a kernel of at most 32 sets. `covers[u]` is the
/// mask of sets covering universe item u. Returns the lexicographically
/// least optimal set of indices, or nothing when the node budget runs out.
class KernelSetCover {
 public:
  KernelSetCover(std::vector<std::uint32_t> covers, std::size_t sets, std::uint64_t node_limit)
      : sets_(sets), node_limit_(node_limit) {
    // Only the distinct, inclusion-minimal covering masks constrain a solution.
    std::sort(covers.begin(), covers.end());
    covers.erase(std::unique(covers.begin(), covers.end()), covers.end());
    std::stable_sort(covers.begin(), covers.end(), [](std::uint32_t a, std::uint32_t b) {
      return std::popcount(a) < std::popcount(b);
    });
    for (auto m : covers) {
      bool dominated = std::any_of(items_.begin(), items_.end(),
                                   [m](std::uint32_t k) { return (k & m) == k; });
      if (!dominated) items_.push_back(m);
    }
  }

  std::optional<std::uint32_t> solve() {
    if (items_.empty()) return 0u;
    best_size_ = static_cast<int>(sets_) + 1;
    if (!branch(0u, 0)) return std::nullopt;
    // Lexicographically least among solutions of the optimal size.
    target_ = best_size_;
    if (!lex_search(0u, 0, 0)) return std::nullopt;
    return found_;
  }

 private:
  // Size-optimal search branching on the first uncovered item.
  bool branch(std::uint32_t chosen, int picked) {
    if (++nodes_ > node_limit_) return false;
    if (picked >= best_size_) return true;
    auto it = std::find_if(items_.begin(), items_.end(),
                           [chosen](std::uint32_t m) { return (m & chosen) == 0; });
    if (it == items_.end()) {
      best_size_ = picked;
      return true;
    }
    if (picked + 1 >= best_size_) return true;
    for (std::uint32_t opts = *it; opts; opts &= opts - 1) {
      int s = std::countr_zero(opts);
      if (!branch(chosen | (1u << s), picked + 1)) return false;
    }
    return true;
  }

  // Enumerates index sets of size target_ in lexicographic order.
  bool lex_search(std::uint32_t chosen, int picked, int next) {
    if (++nodes_ > node_limit_) return false;
    bool complete = std::all_of(items_.begin(), items_.end(),
                                [chosen](std::uint32_t m) { return (m & chosen) != 0; });
    if (complete) {
      found_ = chosen;
      done_ = true;
      return true;
    }
    if (picked == target_) return true;
    for (int s = next; s < static_cast<int>(sets_) && !done_; ++s) {
      // Some uncovered item must still be coverable from index s onward.
      std::uint32_t upper = ~((1u << s) - 1u);
      bool feasible = std::all_of(items_.begin(), items_.end(), [&](std::uint32_t m) {
        return (m & chosen) != 0 || (m & upper) != 0;
      });
      if (!feasible) break;
      if (!lex_search(chosen | (1u << s), picked + 1, s + 1)) return false;
    }
    return true;
  }

  std::vector<std::uint32_t> items_;
  std::size_t sets_;
  std::uint64_t node_limit_;
  std::uint64_t nodes_ = 0;
  int best_size_ = 0;
  int target_ = 0;
  std::uint32_t found_ = 0;
  bool done_ = false;
};

}  // namespace

SubcoverResult minimal_subcover(const Cover& cover, const SolverOptions& options) {
  if (cover.is_partition()) {
    SubcoverResult all;
    all.count = cover.size();
    all.chosen.resize(cover.size());
    std::iota(all.chosen.begin(), all.chosen.end(), std::size_t{0});
    all.exact = true;
    return all;
  }
  const AtomDecomposition atoms = atomize(cover);
  const std::size_t m = cover.size();
  const std::size_t a = atoms.atoms.size();
  // atom -> elements containing it
  const SetFamily containing = atoms.elements.inverse(a);

  std::vector<char> alive(m, 1), chosen(m, 0), covered(a, 0);
  std::vector<std::uint32_t> live_count(a);
  for (std::size_t x = 0; x < a; ++x) live_count[x] = static_cast<std::uint32_t>(containing[x].size());

  auto take = [&](std::size_t e) {
    chosen[e] = 1;
    alive[e] = 0;
    for (CellId x : atoms.elements[e]) {
      if (!covered[x]) {
        covered[x] = 1;
      }
    }
  };
  auto drop = [&](std::size_t e) {
    alive[e] = 0;
    for (CellId x : atoms.elements[e]) --live_count[x];
  };

  // Reduction loop: forced elements, then dominated elements.
  constexpr std::size_t kDominanceLimit = 2048;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::size_t x = 0; x < a; ++x) {
      if (covered[x] || live_count[x] != 1) continue;
      for (CellId e : containing[x]) {
        if (alive[e]) {
          for (CellId y : atoms.elements[e]) --live_count[y];
          take(e);
          changed = true;
          break;
        }
      }
    }
    std::vector<std::size_t> live;
    for (std::size_t e = 0; e < m; ++e) {
      if (!alive[e]) continue;
      bool useful = std::any_of(atoms.elements[e].begin(), atoms.elements[e].end(),
                                [&](CellId x) { return !covered[x]; });
      if (!useful) {
        drop(e);
        changed = true;
      } else {
        live.push_back(e);
      }
    }
    if (live.size() > kDominanceLimit) continue;
    std::vector<std::vector<CellId>> open(live.size());
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (CellId x : atoms.elements[live[i]]) {
        if (!covered[x]) open[i].push_back(x);
      }
    }
    for (std::size_t i = 0; i < live.size(); ++i) {
      for (std::size_t j = 0; j < live.size(); ++j) {
        if (i == j || !alive[live[j]]) continue;
        // Drop i if contained in an earlier j: swapping i for j in any optimal
        // subcover keeps it optimal and makes it lexicographically smaller.
        if (live[j] > live[i] || open[i].size() > open[j].size()) continue;
        if (std::includes(open[j].begin(), open[j].end(), open[i].begin(), open[i].end())) {
          drop(live[i]);
          changed = true;
          break;
        }
      }
    }
  }

  std::vector<std::size_t> kernel;
  for (std::size_t e = 0; e < m; ++e) {
    if (alive[e]) kernel.push_back(e);
  }
  SubcoverResult result;
  result.exact = true;

  if (!kernel.empty() && kernel.size() <= std::min<std::size_t>(options.exact_threshold, 32)) {
    std::vector<std::uint32_t> covers;
    for (std::size_t x = 0; x < a; ++x) {
      if (covered[x]) continue;
      std::uint32_t mask = 0;
      for (std::size_t k = 0; k < kernel.size(); ++k) {
        if (std::binary_search(containing[x].begin(), containing[x].end(),
                               static_cast<CellId>(kernel[k]))) {
          mask |= 1u << k;
        }
      }
      covers.push_back(mask);
    }
    KernelSetCover solver(std::move(covers), kernel.size(), options.node_limit);
    if (auto pick = solver.solve()) {
      for (std::size_t k = 0; k < kernel.size(); ++k) {
        if (*pick & (1u << k)) chosen[kernel[k]] = 1;
      }
      kernel.clear();
    }
  }

  if (!kernel.empty()) {
    // Greedy set cover with lazy gain updates, then a redundancy sweep.
    result.exact = false;
    using Entry = std::pair<std::size_t, std::size_t>;  // (gain, -index) ordering below
    auto cmp = [](const Entry& x, const Entry& y) {
      return x.first != y.first ? x.first < y.first : x.second > y.second;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(cmp)> heap(cmp);
    auto gain = [&](std::size_t e) {
      std::size_t g = 0;
      for (CellId x : atoms.elements[e]) g += !covered[x];
      return g;
    };
    for (auto e : kernel) heap.emplace(gain(e), e);
    std::vector<std::size_t> greedy;
    while (!heap.empty()) {
      auto [g, e] = heap.top();
      heap.pop();
      std::size_t fresh = gain(e);
      if (fresh == 0) continue;
      if (fresh != g) {
        heap.emplace(fresh, e);
        continue;
      }
      greedy.push_back(e);
      for (CellId x : atoms.elements[e]) covered[x] = 1;
    }
    for (auto e : greedy) chosen[e] = 1;
    // Reverse sweep: drop any chosen element whose atoms are all covered twice.
    std::vector<std::uint32_t> multiplicity(a, 0);
    for (std::size_t e = 0; e < m; ++e) {
      if (chosen[e]) {
        for (CellId x : atoms.elements[e]) ++multiplicity[x];
      }
    }
    for (std::size_t e = m; e-- > 0;) {
      if (!chosen[e]) continue;
      bool redundant = std::all_of(atoms.elements[e].begin(), atoms.elements[e].end(),
                                   [&](CellId x) { return multiplicity[x] > 1; });
      if (redundant) {
        chosen[e] = 0;
        for (CellId x : atoms.elements[e]) --multiplicity[x];
      }
    }
  }

  for (std::size_t e = 0; e < m; ++e) {
    if (chosen[e]) result.chosen.push_back(e);
  }
  result.count = result.chosen.size();
  return result;
}

// ---------------------------------------------------------------------------
// Coloured refinement

void ColouredRefinement::validate(const Cover& parent) const {
  require_same_space(space, parent.space());
  const std::size_t n = space->size();
  if (colour_of.size() != pieces.size() || parent_of.size() != pieces.size()) {
    throw BoundViolation("refinement bookkeeping does not match its pieces");
  }
  std::vector<char> seen(n, 0);
  for (std::size_t p = 0; p < pieces.size(); ++p) {
    if (pieces[p].empty()) throw BoundViolation("empty piece " + std::to_string(p));
    if (colour_of[p] >= colours) {
      throw BoundViolation("piece " + std::to_string(p) + " uses colour " +
                           std::to_string(colour_of[p]) + " beyond the budget");
    }
    if (parent_of[p] >= parent.size() || !is_subset(pieces[p], parent[parent_of[p]])) {
      throw BoundViolation("piece " + std::to_string(p) + " is not inside its parent");
    }
    for (CellId c : pieces[p]) seen[c] = 1;
  }
  auto hole = std::find(seen.begin(), seen.end(), 0);
  if (hole != seen.end()) {
    throw BoundViolation("refinement misses cell " + std::to_string(hole - seen.begin()));
  }
  constexpr std::uint32_t kFree = static_cast<std::uint32_t>(-1);
  std::vector<std::uint32_t> owner(n);
  for (std::uint32_t colour = 0; colour < colours; ++colour) {
    std::fill(owner.begin(), owner.end(), kFree);
    for (std::size_t p = 0; p < pieces.size(); ++p) {
      if (colour_of[p] != colour) continue;
      for (CellId c : pieces[p]) {
        if (owner[c] != kFree) {
          throw BoundViolation("pieces " + std::to_string(owner[c]) + " and " +
                               std::to_string(p) + " of colour " + std::to_string(colour) +
                               " overlap at cell " + std::to_string(c));
        }
        owner[c] = static_cast<std::uint32_t>(p);
      }
    }
    for (CellId c = 0; c < n; ++c) {
      if (owner[c] == kFree) continue;
      for (CellId nb : space->neighbours(c)) {
        if (owner[nb] != kFree && owner[nb] != owner[c]) {
          throw BoundViolation("pieces " + std::to_string(owner[c]) + " and " +
                               std::to_string(owner[nb]) + " of colour " +
                               std::to_string(colour) + " are adjacent at cells " +
                               std::to_string(c) + "," + std::to_string(nb));
        }
      }
    }
  }
}

namespace {

/// A solution at atom level: each atom carries a colour and the cover element
/// its piece is parented on. Pieces are the (colour, element) groups.
struct Assignment {
  std::vector<std::uint32_t> colour;
  std::vector<std::uint32_t> block;

  std::size_t piece_count() const {
    std::vector<std::uint64_t> keys(colour.size());
    for (std::size_t i = 0; i < colour.size(); ++i) {
      keys[i] = (std::uint64_t{colour[i]} << 32) | block[i];
    }
    std::sort(keys.begin(), keys.end());
    return static_cast<std::size_t>(std::unique(keys.begin(), keys.end()) - keys.begin());
  }
};

struct AtomGraph {
  AtomDecomposition atoms;
  SetFamily containing;  // atom -> elements containing it
  SetFamily adjacent;    // atom -> adjacent atoms (excluding itself)
};

AtomGraph build_atom_graph(const Cover& cover) {
  AtomGraph g;
  g.atoms = atomize(cover);
  const std::size_t a = g.atoms.atoms.size();
  g.containing = g.atoms.elements.inverse(a);
  const CellSpace& space = *cover.space();
  if (!space.has_adjacency()) {
    g.adjacent.reserve(a, 0);
    for (std::size_t x = 0; x < a; ++x) g.adjacent.push_back({});
    return g;
  }
  std::vector<std::uint32_t> mark(a, static_cast<std::uint32_t>(-1));
  std::vector<CellId> row;
  for (std::size_t x = 0; x < a; ++x) {
    row.clear();
    for (CellId c : g.atoms.atoms[x]) {
      for (CellId nb : space.neighbours(c)) {
        std::uint32_t y = g.atoms.atom_of[nb];
        if (y != x && mark[y] != x) {
          mark[y] = static_cast<std::uint32_t>(x);
          row.push_back(y);
        }
      }
    }
    g.adjacent.push_back_unsorted(row);
  }
  return g;
}

/// Breadth-first atom order, component by component, from the least atom.
std::vector<std::uint32_t> bfs_order(const AtomGraph& g) {
  const std::size_t a = g.atoms.atoms.size();
  std::vector<std::uint32_t> order;
  order.reserve(a);
  std::vector<char> seen(a, 0);
  for (std::size_t root = 0; root < a; ++root) {
    if (seen[root]) continue;
    seen[root] = 1;
    std::size_t head = order.size();
    order.push_back(static_cast<std::uint32_t>(root));
    while (head < order.size()) {
      auto x = order[head++];
      for (CellId y : g.adjacent[x]) {
        if (!seen[y]) {
          seen[y] = 1;
          order.push_back(y);
        }
      }
    }
  }
  return order;
}

/// Colour-by-colour disjointification of a subcover: each atom takes a
/// (colour, block) with blocks drawn from `blocks`; same-coloured neighbours
/// must share a block. Returns false (and the failing atom) when stuck.
bool greedy_assign(const AtomGraph& g, const std::vector<std::size_t>& blocks,
                   std::uint32_t colours, const std::vector<std::uint32_t>& order,
                   Assignment& out, std::uint32_t& failed_atom) {
  const std::size_t a = g.atoms.atoms.size();
  constexpr std::uint32_t kUnset = static_cast<std::uint32_t>(-1);
  out.colour.assign(a, kUnset);
  out.block.assign(a, kUnset);
  std::vector<char> in_blocks(g.atoms.elements.size(), 0);
  for (auto b : blocks) in_blocks[b] = 1;
  std::vector<std::size_t> rank(g.atoms.elements.size(), 0);
  for (std::size_t i = 0; i < blocks.size(); ++i) rank[blocks[i]] = i;

  // Pieces opened so far, indexed by colour * elements + block.
  const std::size_t width = g.atoms.elements.size();
  std::vector<char> open(static_cast<std::size_t>(colours) * width, 0);
  std::vector<CellId> options;
  for (auto x : order) {
    options.clear();
    for (CellId e : g.containing[x]) {
      if (in_blocks[e]) options.push_back(e);
    }
    std::sort(options.begin(), options.end(),
              [&](CellId p, CellId q) { return rank[p] < rank[q]; });
    bool placed = false;
    for (int pass = 0; pass < 2 && !placed; ++pass) {
      for (std::uint32_t col = 0; col < colours && !placed; ++col) {
        for (CellId e : options) {
          const std::size_t key = col * width + e;
          if (pass == 0 && !open[key]) continue;
          bool ok = true;
          for (CellId y : g.adjacent[x]) {
            if (out.colour[y] == col && out.block[y] != e) {
              ok = false;
              break;
            }
          }
          if (ok) {
            out.colour[x] = col;
            out.block[x] = e;
            open[key] = 1;
            placed = true;
            break;
          }
        }
      }
    }
    if (!placed) {
      failed_atom = x;
      return false;
    }
  }
  return true;
}

/// Merges same-coloured pieces whose union fits inside one element.
void merge_pieces(const AtomGraph& g, Assignment& s) {
  const std::size_t a = s.colour.size();
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint32_t>> pieces;
  for (std::size_t x = 0; x < a; ++x) {
    pieces[{s.colour[x], s.block[x]}].push_back(static_cast<std::uint32_t>(x));
  }
  if (pieces.size() > 4096) return;
  bool merged = true;
  while (merged) {
    merged = false;
    for (auto p = pieces.begin(); p != pieces.end() && !merged; ++p) {
      for (auto q = std::next(p); q != pieces.end() && !merged; ++q) {
        if (p->first.first != q->first.first) continue;
        // Elements containing every atom of both pieces.
        std::vector<CellId> common(g.containing[p->second[0]].begin(),
                                   g.containing[p->second[0]].end());
        for (const auto* group : {&p->second, &q->second}) {
          for (auto x : *group) {
            std::vector<CellId> next;
            std::set_intersection(common.begin(), common.end(), g.containing[x].begin(),
                                  g.containing[x].end(), std::back_inserter(next));
            common.swap(next);
            if (common.empty()) break;
          }
          if (common.empty()) break;
        }
        if (common.empty()) continue;
        std::uint32_t colour = p->first.first;
        std::vector<std::uint32_t> atoms = p->second;
        atoms.insert(atoms.end(), q->second.begin(), q->second.end());
        auto key_p = p->first;
        auto key_q = q->first;
        pieces.erase(key_p);
        pieces.erase(key_q);
        auto& dst = pieces[{colour, common.front()}];
        dst.insert(dst.end(), atoms.begin(), atoms.end());
        merged = true;
      }
    }
  }
  for (auto& [key, atoms] : pieces) {
    for (auto x : atoms) {
      s.colour[x] = key.first;
      s.block[x] = key.second;
    }
  }
}

/// Exact search over colour classes for instances with at most 64 atoms.
///
/// A colour class S costs the minimum number of elements needed so that each
/// connected component of S (in the atom adjacency graph) lies inside one of
/// them; a component fitting nowhere makes S infeasible. Adding atoms to a
/// class never lowers its cost, so partial sums bound the search.
class ExactColouring {
 public:
  ExactColouring(const AtomGraph& g, std::uint32_t colours, std::uint64_t node_limit)
      : colours_(colours), node_limit_(node_limit) {
    const std::size_t a = g.atoms.atoms.size();
    adj_.assign(a, 0);
    for (std::size_t x = 0; x < a; ++x) {
      for (CellId y : g.adjacent[x]) adj_[x] |= Mask{1} << y;
    }
    // Maximal element masks, each remembering the least cover index.
    std::vector<std::pair<Mask, std::uint32_t>> elems;
    for (std::size_t e = 0; e < g.atoms.elements.size(); ++e) {
      Mask m = 0;
      for (CellId x : g.atoms.elements[e]) m |= Mask{1} << x;
      elems.emplace_back(m, static_cast<std::uint32_t>(e));
    }
    std::stable_sort(elems.begin(), elems.end(), [](const auto& p, const auto& q) {
      return std::popcount(p.first) > std::popcount(q.first);
    });
    for (const auto& [m, idx] : elems) {
      bool dominated = std::any_of(elements_.begin(), elements_.end(),
                                   [m](Mask big) { return (m & big) == m; });
      if (!dominated) {
        elements_.push_back(m);
        element_index_.push_back(idx);
      }
    }
  }

  struct Outcome {
    bool found = false;
    bool complete = false;  // search finished within the node budget
    std::vector<std::uint32_t> colour;
    std::size_t cost = 0;
    std::size_t deepest = 0;
  };

  Outcome run(const std::vector<std::uint32_t>& order, std::size_t upper, std::size_t lower) {
    order_ = order;
    best_ = upper;
    lower_ = lower;
    classes_.assign(colours_, 0);
    class_cost_.assign(colours_, 0);
    current_.assign(order.size(), 0);
    aborted_ = false;
    search(0, 0, 0);
    Outcome o;
    o.found = !best_colour_.empty();
    o.complete = !aborted_;
    o.colour = best_colour_;
    o.cost = best_;
    o.deepest = deepest_;
    return o;
  }

  /// Cost of a class; -1 when some component fits no element.
  int class_cost(Mask s) {
    if (s == 0) return 0;
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    int v = solve_class(s, nullptr);
    memo_.emplace(s, v);
    return v;
  }

  /// Pieces of a class: (element cover index, atom mask) pairs.
  std::vector<std::pair<std::uint32_t, Mask>> class_pieces(Mask s) {
    std::vector<std::pair<std::uint32_t, Mask>> out;
    if (s != 0) solve_class(s, &out);
    return out;
  }

 private:
  std::vector<Mask> components(Mask s) const {
    std::vector<Mask> comps;
    while (s) {
      Mask frontier = s & (~s + 1);
      Mask comp = 0;
      while (frontier) {
        comp |= frontier;
        Mask grow = 0;
        for (Mask f = frontier; f; f &= f - 1) grow |= adj_[std::countr_zero(f)];
        frontier = grow & s & ~comp;
      }
      comps.push_back(comp);
      s &= ~comp;
    }
    return comps;
  }

  int solve_class(Mask s, std::vector<std::pair<std::uint32_t, Mask>>* pieces) {
    auto comps = components(s);
    const std::size_t r = comps.size();
    // fits[e]: components inside element e
    std::vector<Mask> fits(elements_.size(), 0);
    Mask coverable = 0;
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      for (std::size_t k = 0; k < r; ++k) {
        if ((comps[k] & elements_[e]) == comps[k]) fits[e] |= Mask{1} << k;
      }
      coverable |= fits[e];
    }
    const Mask all = r == 64 ? ~Mask{0} : (Mask{1} << r) - 1;
    if (coverable != all) return -1;
    std::vector<std::size_t> useful;
    for (std::size_t e = 0; e < elements_.size(); ++e) {
      if (fits[e]) useful.push_back(e);
    }
    int best = static_cast<int>(r) + 1;
    std::vector<std::size_t> pick, best_pick;
    auto rec = [&](auto&& self, Mask done) -> void {
      if (static_cast<int>(pick.size()) >= best) return;
      if (done == all) {
        best = static_cast<int>(pick.size());
        best_pick = pick;
        return;
      }
      std::size_t k = static_cast<std::size_t>(std::countr_zero(~done));
      for (auto e : useful) {
        if (!(fits[e] >> k & 1)) continue;
        pick.push_back(e);
        self(self, done | fits[e]);
        pick.pop_back();
      }
    };
    rec(rec, 0);
    if (pieces) {
      std::vector<Mask> piece_mask(best_pick.size(), 0);
      for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t i = 0; i < best_pick.size(); ++i) {
          if (fits[best_pick[i]] >> k & 1) {
            piece_mask[i] |= comps[k];
            break;
          }
        }
      }
      for (std::size_t i = 0; i < best_pick.size(); ++i) {
        if (piece_mask[i]) pieces->emplace_back(element_index_[best_pick[i]], piece_mask[i]);
      }
    }
    return best;
  }

  void search(std::size_t pos, std::size_t cost, std::uint32_t used) {
    if (aborted_ || best_ <= lower_) return;
    if (++nodes_ > node_limit_) {
      aborted_ = true;
      return;
    }
    if (pos == order_.size()) {
      if (cost < best_ || best_colour_.empty()) {
        best_ = cost;
        best_colour_.assign(order_.size(), 0);
        for (std::size_t i = 0; i < order_.size(); ++i) best_colour_[order_[i]] = current_[i];
      }
      return;
    }
    deepest_ = std::max(deepest_, pos);
    const Mask bit = Mask{1} << order_[pos];
    struct Option {
      std::uint32_t colour;
      int cost;
    };
    Option options[64];
    std::size_t count = 0;
    const std::uint32_t limit = std::min(colours_, used + 1);
    for (std::uint32_t c = 0; c < limit; ++c) {
      int v = class_cost(classes_[c] | bit);
      if (v < 0) continue;
      options[count++] = {c, v};
    }
    std::stable_sort(options, options + count, [&](const Option& p, const Option& q) {
      return p.cost - class_cost_[p.colour] < q.cost - class_cost_[q.colour];
    });
    for (std::size_t i = 0; i < count; ++i) {
      const auto [c, v] = options[i];
      const std::size_t next_cost = cost - class_cost_[c] + static_cast<std::size_t>(v);
      if (next_cost >= best_ && !best_colour_.empty()) continue;
      const Mask saved = classes_[c];
      const int saved_cost = class_cost_[c];
      classes_[c] |= bit;
      class_cost_[c] = v;
      current_[pos] = c;
      search(pos + 1, next_cost, std::max(used, c + 1));
      classes_[c] = saved;
      class_cost_[c] = saved_cost;
      if (aborted_ || best_ <= lower_) return;
    }
  }

  std::uint32_t colours_;
  std::uint64_t node_limit_;
  std::vector<Mask> adj_;
  std::vector<Mask> elements_;
  std::vector<std::uint32_t> element_index_;
  std::unordered_map<Mask, int> memo_;

  std::vector<std::uint32_t> order_;
  std::vector<Mask> classes_;
  std::vector<int> class_cost_;
  std::vector<std::uint32_t> current_;
  std::vector<std::uint32_t> best_colour_;
  std::size_t best_ = 0;
  std::size_t lower_ = 0;
  std::size_t deepest_ = 0;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
};

ColouredRefinement build_witness(const Cover& cover, const AtomGraph& g, const Assignment& s,
                                 std::uint32_t colours) {
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<CellId>> groups;
  for (std::size_t x = 0; x < s.colour.size(); ++x) {
    auto& cells = groups[{s.colour[x], s.block[x]}];
    auto atom = g.atoms.atoms[x];
    cells.insert(cells.end(), atom.begin(), atom.end());
  }
  struct Piece {
    std::uint32_t colour;
    std::uint32_t parent;
    std::vector<CellId> cells;
  };
  std::vector<Piece> list;
  list.reserve(groups.size());
  for (auto& [key, cells] : groups) {
    std::sort(cells.begin(), cells.end());
    list.push_back({key.first, key.second, std::move(cells)});
  }
  std::sort(list.begin(), list.end(), [](const Piece& p, const Piece& q) {
    if (p.colour != q.colour) return p.colour < q.colour;
    return p.cells < q.cells;
  });
  ColouredRefinement r;
  r.space = cover.space();
  r.colours = colours;
  r.pieces.reserve(list.size(), cover.space()->size());
  for (auto& p : list) {
    r.pieces.push_back(p.cells);
    r.colour_of.push_back(p.colour);
    r.parent_of.push_back(p.parent);
  }
  return r;
}

}  // namespace

RefinementResult solve_coloured_refinement(const Cover& cover, std::size_t colours,
                                           const SolverOptions& options) {
  if (colours == 0) colours = cover.space()->colours();
  const auto budget = static_cast<std::uint32_t>(colours);
  if (cover.is_partition() && !cover.space()->has_adjacency()) {
    // Every element is forced and one colour suffices for disjoint pieces.
    RefinementResult result;
    result.count = result.subcover_count = cover.size();
    result.exact = result.subcover_exact = true;
    result.witness.space = cover.space();
    result.witness.pieces = cover.elements();
    result.witness.colour_of.assign(cover.size(), 0);
    result.witness.parent_of.resize(cover.size());
    std::iota(result.witness.parent_of.begin(), result.witness.parent_of.end(), 0u);
    result.witness.colours = budget;
    return result;
  }
  const AtomGraph g = build_atom_graph(cover);
  const std::size_t a = g.atoms.atoms.size();
  const auto order = bfs_order(g);

  const SubcoverResult sub = minimal_subcover(cover, options);
  RefinementResult result;
  result.subcover_count = sub.count;
  result.subcover_exact = sub.exact;
  const std::size_t lower = sub.exact ? sub.count : 1;

  Assignment greedy;
  std::uint32_t failed_atom = 0;
  bool have_greedy = greedy_assign(g, sub.chosen, budget, order, greedy, failed_atom);
  if (!have_greedy) {
    std::vector<std::size_t> every(cover.size());
    std::iota(every.begin(), every.end(), std::size_t{0});
    have_greedy = greedy_assign(g, every, budget, order, greedy, failed_atom);
  }
  std::size_t greedy_count = 0;
  if (have_greedy) {
    greedy_count = greedy.piece_count();
    if (!(sub.exact && greedy_count == lower)) {
      merge_pieces(g, greedy);
      greedy_count = greedy.piece_count();
    }
  }

  if (have_greedy && sub.exact && greedy_count == lower) {
    result.count = greedy_count;
    result.exact = true;
    result.witness = build_witness(cover, g, greedy, budget);
    return result;
  }

  // Past the threshold the search still runs when greedy is stuck; it is
  // node-limited and claims exactness only when it completes.
  if (a <= std::min<std::size_t>(options.exact_threshold, 64) || (!have_greedy && a <= 64)) {
    ExactColouring exact(g, budget, options.node_limit);
    const std::size_t upper = have_greedy ? greedy_count : budget * a + 1;
    auto outcome = exact.run(order, upper, lower);
    if (outcome.found) {
      Assignment s;
      s.colour.assign(a, 0);
      s.block.assign(a, 0);
      for (std::uint32_t c = 0; c < budget; ++c) {
        Mask cls = 0;
        for (std::size_t x = 0; x < a; ++x) {
          if (outcome.colour[x] == c) cls |= Mask{1} << x;
        }
        for (auto [element, mask] : exact.class_pieces(cls)) {
          for (Mask m = mask; m; m &= m - 1) {
            auto x = static_cast<std::size_t>(std::countr_zero(m));
            s.colour[x] = c;
            s.block[x] = element;
          }
        }
      }
      result.count = s.piece_count();
      result.exact = outcome.complete || result.count == lower;
      result.witness = build_witness(cover, g, s, budget);
      return result;
    }
    if (have_greedy) {
      // The search gave up before matching the greedy bound.
      result.count = greedy_count;
      result.exact = outcome.complete && sub.exact && greedy_count == lower;
      result.witness = build_witness(cover, g, greedy, budget);
      if (outcome.complete) result.exact = true;
      return result;
    }
    const auto atom = order.empty() ? 0 : order[std::min(outcome.deepest, order.size() - 1)];
    const std::size_t cell = g.atoms.atoms[atom][0];
    const std::string what =
        outcome.complete
            ? "no " + std::to_string(budget) + "-coloured refinement exists; cell " +
                  std::to_string(cell) + " cannot be coloured consistently"
            : "search budget exhausted before finding a " + std::to_string(budget) +
                  "-coloured refinement; deepest conflict at cell " + std::to_string(cell);
    throw InfeasibleError(what, cell, outcome.complete);
  }

  if (!have_greedy) {
    const std::size_t cell = g.atoms.atoms[failed_atom][0];
    throw InfeasibleError("no " + std::to_string(budget) +
                              "-coloured refinement found (heuristic search); stuck at cell " +
                              std::to_string(cell),
                          cell, false);
  }
  result.count = greedy_count;
  result.exact = false;
  result.witness = build_witness(cover, g, greedy, budget);
  return result;
}

RefinementResult minimal_coloured_refinement(const Cover& cover, std::size_t colours,
                                             const SolverOptions& options) {
  if (colours == 0) colours = cover.space()->colours();
  RefinementResult r = solve_coloured_refinement(cover, colours, options);
  if (r.exact && r.subcover_exact && r.count < r.subcover_count) {
    throw BoundViolation("coloured refinement of size " + std::to_string(r.count) +
                         " undercuts the minimal subcover " + std::to_string(r.subcover_count));
  }
  if (r.count > colours * r.subcover_count) {
    throw BoundViolation("coloured refinement of size " + std::to_string(r.count) +
                         " exceeds " + std::to_string(colours) + " x " +
                         std::to_string(r.subcover_count));
  }
  return r;
}

}  // namespace colent
