#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace colent {

using CellId = std::uint32_t;

/// Compressed list of cell sets. Each set is stored sorted and duplicate-free
/// in one flat array, addressed through an offset table.
class SetFamily {
 public:
  SetFamily() : offsets_{0} {}

  std::size_t size() const noexcept { return offsets_.size() - 1; }
  bool empty() const noexcept { return size() == 0; }
  std::size_t total_members() const noexcept { return members_.size(); }

  std::span<const CellId> operator[](std::size_t i) const noexcept {
    return {members_.data() + offsets_[i], members_.data() + offsets_[i + 1]};
  }

  /// Appends a set; `cells` must already be sorted and unique.
  void push_back(std::span<const CellId> cells);
  /// Appends a set given in arbitrary order.
  void push_back_unsorted(std::vector<CellId> cells);

  void reserve(std::size_t sets, std::size_t members) {
    offsets_.reserve(sets + 1);
    members_.reserve(members);
  }

  /// Sorts sets lexicographically and drops duplicates and empty sets.
  /// Returns, for each surviving set, the index it had before.
  std::vector<std::size_t> canonicalize();

  /// For every cell in [0, cell_count), the indices of sets containing it.
  SetFamily inverse(std::size_t cell_count) const;

  bool operator==(const SetFamily& other) const = default;

  const std::vector<std::uint32_t>& offsets() const noexcept { return offsets_; }
  const std::vector<CellId>& members() const noexcept { return members_; }

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<CellId> members_;
};

/// True when sorted ranges `a` and `b` share an element.
bool intersects(std::span<const CellId> a, std::span<const CellId> b);
/// True when sorted range `a` is contained in sorted range `b`.
bool is_subset(std::span<const CellId> a, std::span<const CellId> b);

}  // namespace colent
