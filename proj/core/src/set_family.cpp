#include "colent/set_family.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "colent/errors.hpp"

namespace colent {

void SetFamily::push_back(std::span<const CellId> cells) {
  if (members_.size() + cells.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw SizeError("set family exceeds 2^32 total members");
  }
  members_.insert(members_.end(), cells.begin(), cells.end());
  offsets_.push_back(static_cast<std::uint32_t>(members_.size()));
}

void SetFamily::push_back_unsorted(std::vector<CellId> cells) {
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  push_back(cells);
}

std::vector<std::size_t> SetFamily::canonicalize() {
  const std::size_t n = size();
  auto less = [this](std::size_t a, std::size_t b) {
    auto sa = (*this)[a];
    auto sb = (*this)[b];
    return std::lexicographical_compare(sa.begin(), sa.end(), sb.begin(), sb.end());
  };

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  // Families built cell-by-cell usually arrive sorted already.
  bool sorted = true;
  for (std::size_t i = 1; i < n && sorted; ++i) {
    if (!less(i - 1, i)) sorted = false;
  }
  if (!sorted) {
    std::stable_sort(order.begin(), order.end(), less);
  } else {
    bool has_empty = false;
    for (std::size_t i = 0; i < n && !has_empty; ++i) has_empty = offsets_[i] == offsets_[i + 1];
    if (!has_empty) return order;
  }

  SetFamily out;
  out.reserve(n, members_.size());
  std::vector<std::size_t> origin;
  origin.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    auto s = (*this)[order[k]];
    if (s.empty()) continue;
    if (!origin.empty()) {
      auto prev = out[out.size() - 1];
      if (std::equal(prev.begin(), prev.end(), s.begin(), s.end())) continue;
    }
    out.push_back(s);
    origin.push_back(order[k]);
  }
  *this = std::move(out);
  return origin;
}

SetFamily SetFamily::inverse(std::size_t cell_count) const {
  std::vector<std::uint32_t> counts(cell_count + 1, 0);
  for (CellId c : members_) ++counts[c + 1];
  std::partial_sum(counts.begin(), counts.end(), counts.begin());

  SetFamily inv;
  inv.offsets_ = counts;
  inv.members_.resize(members_.size());
  std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
  for (std::size_t i = 0; i < size(); ++i) {
    for (CellId c : (*this)[i]) inv.members_[cursor[c]++] = static_cast<CellId>(i);
  }
  return inv;
}

bool intersects(std::span<const CellId> a, std::span<const CellId> b) {
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      return true;
    }
  }
  return false;
}

bool is_subset(std::span<const CellId> a, std::span<const CellId> b) {
  return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace colent
