#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "colent/cellspace.hpp"

namespace colent {

struct SolverOptions {
  /// Exact search runs when the reduced instance has at most this many
  /// elements (subcover) or atoms (coloured refinement).
  std::size_t exact_threshold = 24;
  /// Branch-and-bound node budget; exceeding it downgrades the result to
  /// a heuristic one (exact = false).
  std::uint64_t node_limit = 50'000'000;
};

struct SubcoverResult {
  std::size_t count = 0;
  /// Indices into the input cover, ascending.
  std::vector<std::size_t> chosen;
  bool exact = false;
};

/// Minimum-cardinality subcover N(cover).
///
/// Forced elements (sole cover of some atom) are taken first and dominated
/// elements dropped; the remaining kernel is solved exactly when it has at
/// most `exact_threshold` elements, otherwise by greedy set cover. Among
/// optimal subcovers the lexicographically least index set is returned.
SubcoverResult minimal_subcover(const Cover& cover, const SolverOptions& options = {});

/// Refinement whose pieces carry a colour in [0, colours) and a parent
/// element of the refined cover.
struct ColouredRefinement {
  SpacePtr space;
  SetFamily pieces;
  std::vector<std::uint32_t> colour_of;
  std::vector<std::uint32_t> parent_of;
  std::uint32_t colours = 1;

  std::size_t size() const noexcept { return pieces.size(); }

  /// Throws BoundViolation describing the first broken invariant: pieces
  /// must cover, sit inside their parents, and be pairwise disjoint and
  /// non-adjacent within each colour class.
  void validate(const Cover& parent) const;
};

struct RefinementResult {
  std::size_t count = 0;
  ColouredRefinement witness;
  bool exact = false;
  /// N(cover) used as the lower bound, and whether it is exact.
  std::size_t subcover_count = 0;
  bool subcover_exact = false;
};

/// Minimal (colours)-coloured refinement N_c(cover).
///
/// Candidate pieces are unions of cover atoms (cells grouped by membership
/// pattern) inside one parent element. Throws InfeasibleError when no
/// refinement fits the colour budget, and BoundViolation if the result
/// escapes N <= count <= colours * N. `colours == 0` means dimension + 1.
RefinementResult minimal_coloured_refinement(const Cover& cover, std::size_t colours = 0,
                                             const SolverOptions& options = {});

/// Same search without the sandwich enforcement; used by verdict code
/// that reports violations instead of raising them.
RefinementResult solve_coloured_refinement(const Cover& cover, std::size_t colours,
                                           const SolverOptions& options);

/// Cells grouped by identical membership pattern in `cover`. Atoms are
/// ordered by their least cell.
struct AtomDecomposition {
  SetFamily atoms;                 ///< cells of each atom
  std::vector<std::uint32_t> atom_of;  ///< atom index of each cell
  SetFamily elements;              ///< atoms inside each cover element
};
AtomDecomposition atomize(const Cover& cover);

}  // namespace colent
