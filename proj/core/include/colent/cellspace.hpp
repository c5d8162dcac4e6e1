#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "colent/set_family.hpp"

namespace colent {

/// Finite combinatorial model of a compact space: cells, a symmetric
/// irreflexive adjacency relation and a declared covering dimension.
///
/// Adjacency stands in for "these two cells cannot be separated by disjoint
/// open sets": two cell sets of the same colour class must be disjoint and
/// have no adjacency edge between them.
class CellSpace {
 public:
  /// Throws StructuralError on self-loops, out-of-range endpoints, or a
  /// nonempty adjacency with dimension 0.
  CellSpace(std::size_t cells, std::vector<std::pair<CellId, CellId>> edges,
            std::size_t dimension);

  /// Space without adjacency (totally disconnected model).
  static CellSpace discrete(std::size_t cells);
  /// Path 0 - 1 - ... - (n-1), dimension 1.
  static CellSpace path(std::size_t cells);
  /// Cycle of `cells` cells, dimension 1.
  static CellSpace cycle(std::size_t cells);
  /// rows x cols grid with king-move adjacency (strong product of two
  /// paths), dimension 2. Cell (r, c) has index r * cols + c.
  static CellSpace grid(std::size_t rows, std::size_t cols);

  std::size_t size() const noexcept { return cells_; }
  std::size_t dimension() const noexcept { return dimension_; }
  std::size_t colours() const noexcept { return dimension_ + 1; }
  bool has_adjacency() const noexcept { return !neighbours_.empty(); }

  std::span<const CellId> neighbours(CellId c) const noexcept {
    if (neighbours_.empty()) return {};
    return neighbours_[c];
  }
  bool adjacent(CellId a, CellId b) const noexcept;

  /// Undirected edges (i < j), sorted.
  std::vector<std::pair<CellId, CellId>> edges() const;

  bool operator==(const CellSpace& other) const;

 private:
  std::size_t cells_;
  std::size_t dimension_;
  SetFamily neighbours_;
};

using SpacePtr = std::shared_ptr<const CellSpace>;

/// Finite cover of a CellSpace. Elements are nonempty cell sets kept in
/// canonical order (lexicographic, deduplicated); their union is every cell.
class Cover {
 public:
  /// Canonicalizes `elements`; throws CoveringError naming the first
  /// uncovered cell, StructuralError on out-of-range cells.
  Cover(SpacePtr space, SetFamily elements);
  Cover(SpacePtr space, const std::vector<std::vector<CellId>>& elements);

  /// The single-element cover {X}.
  static Cover trivial(SpacePtr space);

  const SpacePtr& space() const noexcept { return space_; }
  std::size_t size() const noexcept { return elements_.size(); }
  std::span<const CellId> operator[](std::size_t i) const noexcept {
    return elements_[i];
  }
  const SetFamily& elements() const noexcept { return elements_; }

  /// Elements as plain vectors; convenient for small covers and tests.
  std::vector<std::vector<CellId>> to_vectors() const;

  bool is_partition() const;

  bool operator==(const Cover& other) const { return elements_ == other.elements_; }

 private:
  SpacePtr space_;
  SetFamily elements_;
};

/// Dynamics as a forward cell relation. Every cell has at least one image;
/// when flagged invertible the relation is a bijection.
class CellMap {
 public:
  CellMap(SpacePtr space, SetFamily images, bool invertible);
  CellMap(SpacePtr space, const std::vector<std::vector<CellId>>& images,
          bool invertible);

  static CellMap identity(SpacePtr space);
  /// Single-valued map c -> f[c]; invertible iff f is a permutation.
  static CellMap from_function(SpacePtr space, const std::vector<CellId>& f);

  const SpacePtr& space() const noexcept { return space_; }
  std::span<const CellId> images(CellId c) const noexcept { return images_[c]; }
  const SetFamily& relation() const noexcept { return images_; }
  bool invertible() const noexcept { return invertible_; }
  bool single_valued() const noexcept;

  /// Relation composed with itself k times (k >= 1).
  CellMap power(std::size_t k) const;

 private:
  SpacePtr space_;
  SetFamily images_;
  bool invertible_;
};

/// Space, cover and dynamics travelling together, optionally with the
/// truncation depth of the symbolic model it was cut from.
struct ModelBundle {
  SpacePtr space;
  Cover cover;
  CellMap map;
  std::optional<std::size_t> truncation_depth;
};

/// {T^{-1}(U) : U in cover} with T^{-1}(U) = {c : images(c) meets U}.
/// Empty preimages are dropped.
Cover pullback(const Cover& cover, const CellMap& map);

/// Least common refinement: all nonempty pairwise intersections.
Cover join(const Cover& a, const Cover& b);

/// cover v T^{-1}cover v ... v T^{-(n-1)}cover.
Cover dynamical_join(const Cover& cover, const CellMap& map, std::size_t n);

/// As above, refusing n beyond the bundle's truncation depth.
Cover dynamical_join(const ModelBundle& bundle, std::size_t n);

/// Relabels cell c as perm[c]. Throws StructuralError unless perm is a
/// bijection on the cells.
CellSpace relabel(const CellSpace& space, std::span<const CellId> perm);
Cover relabel(const Cover& cover, SpacePtr relabelled_space,
              std::span<const CellId> perm);
CellMap relabel(const CellMap& map, SpacePtr relabelled_space,
                std::span<const CellId> perm);
ModelBundle relabel(const ModelBundle& bundle, std::span<const CellId> perm);

/// Disjoint union: b's cells are shifted past a's, no cross adjacency,
/// dimension is the max of the two. The truncation depth is the smaller one.
ModelBundle disjoint_union(const ModelBundle& a, const ModelBundle& b);

/// Checks that both operands live on the same space (pointer or structure).
void require_same_space(const SpacePtr& a, const SpacePtr& b);

}  // namespace colent
