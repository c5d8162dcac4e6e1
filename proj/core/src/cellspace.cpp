#include "colent/cellspace.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <unordered_map>

#include "colent/errors.hpp"

namespace colent {

namespace {

void check_cells_in_range(const SetFamily& family, std::size_t cells, const char* what) {
  for (CellId c : family.members()) {
    if (c >= cells) {
      throw StructuralError(std::string(what) + " references cell " + std::to_string(c) +
                            " outside a space of " + std::to_string(cells) + " cells");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// CellSpace

CellSpace::CellSpace(std::size_t cells, std::vector<std::pair<CellId, CellId>> edges,
                     std::size_t dimension)
    : cells_(cells), dimension_(dimension) {
  if (cells == 0) throw StructuralError("a cell space needs at least one cell");
  if (edges.empty()) return;
  if (dimension == 0) {
    throw StructuralError("dimension 0 requires an empty adjacency relation");
  }
  std::vector<std::vector<CellId>> adj(cells);
  for (auto [a, b] : edges) {
    if (a >= cells || b >= cells) {
      throw StructuralError("adjacency edge (" + std::to_string(a) + "," + std::to_string(b) +
                            ") out of range");
    }
    if (a == b) throw StructuralError("adjacency contains self-pair at cell " + std::to_string(a));
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  neighbours_.reserve(cells, edges.size() * 2);
  for (auto& row : adj) neighbours_.push_back_unsorted(std::move(row));
}

CellSpace CellSpace::discrete(std::size_t cells) { return CellSpace(cells, {}, 0); }

CellSpace CellSpace::path(std::size_t cells) {
  std::vector<std::pair<CellId, CellId>> e;
  for (std::size_t i = 0; i + 1 < cells; ++i) {
    e.emplace_back(static_cast<CellId>(i), static_cast<CellId>(i + 1));
  }
  return CellSpace(cells, std::move(e), 1);
}

CellSpace CellSpace::cycle(std::size_t cells) {
  if (cells < 3) throw StructuralError("a cycle needs at least 3 cells");
  std::vector<std::pair<CellId, CellId>> e;
  for (std::size_t i = 0; i < cells; ++i) {
    e.emplace_back(static_cast<CellId>(i), static_cast<CellId>((i + 1) % cells));
  }
  return CellSpace(cells, std::move(e), 1);
}

CellSpace CellSpace::grid(std::size_t rows, std::size_t cols) {
  std::vector<std::pair<CellId, CellId>> e;
  auto id = [cols](std::size_t r, std::size_t c) { return static_cast<CellId>(r * cols + c); };
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
      if (r + 1 < rows && c + 1 < cols) e.emplace_back(id(r, c), id(r + 1, c + 1));
      if (r + 1 < rows && c > 0) e.emplace_back(id(r, c), id(r + 1, c - 1));
    }
  }
  return CellSpace(rows * cols, std::move(e), 2);
}

bool CellSpace::adjacent(CellId a, CellId b) const noexcept {
  auto n = neighbours(a);
  return std::binary_search(n.begin(), n.end(), b);
}

std::vector<std::pair<CellId, CellId>> CellSpace::edges() const {
  std::vector<std::pair<CellId, CellId>> out;
  for (CellId a = 0; a < cells_; ++a) {
    for (CellId b : neighbours(a)) {
      if (a < b) out.emplace_back(a, b);
    }
  }
  return out;
}

bool CellSpace::operator==(const CellSpace& other) const {
  return cells_ == other.cells_ && dimension_ == other.dimension_ &&
         neighbours_ == other.neighbours_;
}

void require_same_space(const SpacePtr& a, const SpacePtr& b) {
  if (!a || !b) throw StructuralError("missing ambient cell space");
  if (a == b || *a == *b) return;
  throw StructuralError("operands live on different cell spaces");
}

// ---------------------------------------------------------------------------
// Cover

Cover::Cover(SpacePtr space, SetFamily elements)
    : space_(std::move(space)), elements_(std::move(elements)) {
  if (!space_) throw StructuralError("cover without ambient space");
  check_cells_in_range(elements_, space_->size(), "cover element");
  elements_.canonicalize();
  std::vector<char> seen(space_->size(), 0);
  for (CellId c : elements_.members()) seen[c] = 1;
  auto hole = std::find(seen.begin(), seen.end(), 0);
  if (hole != seen.end()) {
    auto cell = static_cast<std::size_t>(hole - seen.begin());
    throw CoveringError("cell " + std::to_string(cell) + " is not covered", cell);
  }
}

Cover::Cover(SpacePtr space, const std::vector<std::vector<CellId>>& elements)
    : Cover(space, [&] {
        SetFamily f;
        for (const auto& e : elements) f.push_back_unsorted(e);
        return f;
      }()) {}

Cover Cover::trivial(SpacePtr space) {
  std::vector<CellId> all(space->size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<CellId>(i);
  SetFamily f;
  f.push_back(all);
  return Cover(std::move(space), std::move(f));
}

std::vector<std::vector<CellId>> Cover::to_vectors() const {
  std::vector<std::vector<CellId>> out;
  out.reserve(size());
  for (std::size_t i = 0; i < size(); ++i) out.emplace_back((*this)[i].begin(), (*this)[i].end());
  return out;
}

bool Cover::is_partition() const { return elements_.total_members() == space_->size(); }

// ---------------------------------------------------------------------------
// CellMap

CellMap::CellMap(SpacePtr space, SetFamily images, bool invertible)
    : space_(std::move(space)), images_(std::move(images)), invertible_(invertible) {
  if (!space_) throw StructuralError("cell map without ambient space");
  const std::size_t n = space_->size();
  if (images_.size() != n) {
    throw StructuralError("cell map lists " + std::to_string(images_.size()) +
                          " image sets for " + std::to_string(n) + " cells");
  }
  check_cells_in_range(images_, n, "cell map");
  for (std::size_t c = 0; c < n; ++c) {
    auto im = images_[c];
    if (im.empty()) throw StructuralError("cell " + std::to_string(c) + " has no image");
    for (std::size_t k = 1; k < im.size(); ++k) {
      if (im[k - 1] >= im[k]) throw StructuralError("image list of cell " + std::to_string(c) +
                                                    " is not sorted and unique");
    }
  }
  if (invertible_) {
    std::vector<char> hit(n, 0);
    for (std::size_t c = 0; c < n; ++c) {
      auto im = images_[c];
      if (im.size() != 1 || hit[im[0]]) {
        throw StructuralError("cell map flagged invertible is not a bijection (cell " +
                              std::to_string(c) + ")");
      }
      hit[im[0]] = 1;
    }
  }
}

CellMap::CellMap(SpacePtr space, const std::vector<std::vector<CellId>>& images, bool invertible)
    : CellMap(space, [&] {
        SetFamily f;
        for (const auto& im : images) f.push_back_unsorted(im);
        return f;
      }(), invertible) {}

CellMap CellMap::identity(SpacePtr space) {
  std::vector<CellId> f(space->size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = static_cast<CellId>(i);
  return from_function(std::move(space), f);
}

CellMap CellMap::from_function(SpacePtr space, const std::vector<CellId>& f) {
  SetFamily images;
  images.reserve(f.size(), f.size());
  std::vector<char> hit(f.size(), 0);
  bool bijective = true;
  for (CellId target : f) {
    images.push_back(std::span<const CellId>(&target, 1));
    if (target < hit.size()) {
      if (hit[target]) bijective = false;
      hit[target] = 1;
    }
  }
  return CellMap(std::move(space), std::move(images), bijective);
}

bool CellMap::single_valued() const noexcept {
  return images_.total_members() == images_.size();
}

CellMap CellMap::power(std::size_t k) const {
  if (k == 0) throw StructuralError("map power needs k >= 1");
  if (k == 1) return *this;
  const std::size_t n = space_->size();
  SetFamily current = images_;
  std::vector<std::uint32_t> mark(n, 0);
  std::uint32_t stamp = 0;
  for (std::size_t step = 1; step < k; ++step) {
    SetFamily next;
    next.reserve(n, current.total_members());
    std::vector<CellId> row;
    for (std::size_t c = 0; c < n; ++c) {
      ++stamp;
      row.clear();
      for (CellId mid : current[c]) {
        for (CellId img : images_[mid]) {
          if (mark[img] != stamp) {
            mark[img] = stamp;
            row.push_back(img);
          }
        }
      }
      std::sort(row.begin(), row.end());
      next.push_back(row);
    }
    current = std::move(next);
  }
  return CellMap(space_, std::move(current), invertible_);
}

// ---------------------------------------------------------------------------
// Cover algebra

Cover pullback(const Cover& cover, const CellMap& map) {
  require_same_space(cover.space(), map.space());
  const std::size_t n = cover.space()->size();
  const std::size_t m = cover.size();
  const SetFamily membership = cover.elements().inverse(n);

  // Two passes over (cell, image, element) triples: count, then fill. Cells
  // are visited in increasing order, so last[e] == c detects repeats.
  constexpr CellId kNone = static_cast<CellId>(-1);
  std::vector<CellId> last(m, kNone);
  std::vector<std::uint32_t> sizes(m, 0);
  for (CellId c = 0; c < n; ++c) {
    for (CellId img : map.images(c)) {
      for (CellId e : membership[img]) {
        if (last[e] != c) {
          last[e] = c;
          ++sizes[e];
        }
      }
    }
  }
  std::vector<std::uint32_t> start(m + 1, 0);
  for (std::size_t e = 0; e < m; ++e) start[e + 1] = start[e] + sizes[e];
  std::vector<CellId> flat(start[m]);
  std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
  std::fill(last.begin(), last.end(), kNone);
  for (CellId c = 0; c < n; ++c) {
    for (CellId img : map.images(c)) {
      for (CellId e : membership[img]) {
        if (last[e] != c) {
          last[e] = c;
          flat[cursor[e]++] = c;
        }
      }
    }
  }
  SetFamily out;
  out.reserve(m, flat.size());
  for (std::size_t e = 0; e < m; ++e) {
    if (sizes[e] == 0) continue;
    out.push_back(std::span<const CellId>(flat.data() + start[e], sizes[e]));
  }
  return Cover(cover.space(), std::move(out));
}

Cover join(const Cover& a, const Cover& b) {
  require_same_space(a.space(), b.space());
  const std::size_t n = a.space()->size();
  const SetFamily mem_a = a.elements().inverse(n);
  const SetFamily mem_b = b.elements().inverse(n);
  const std::uint64_t width = b.size();
  const std::uint64_t key_space = static_cast<std::uint64_t>(a.size()) * width;

  // Pair (i, j) -> result index, assigned in order of first appearance.
  constexpr std::uint32_t kUnset = static_cast<std::uint32_t>(-1);
  constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 25;
  std::vector<std::uint32_t> dense;
  std::unordered_map<std::uint64_t, std::uint32_t> sparse;
  if (key_space <= kDenseLimit) dense.assign(key_space, kUnset);

  std::vector<std::uint32_t> pair_ids;
  std::vector<std::uint32_t> sizes;
  pair_ids.reserve(n);
  for (CellId c = 0; c < n; ++c) {
    for (CellId i : mem_a[c]) {
      for (CellId j : mem_b[c]) {
        const std::uint64_t key = i * width + j;
        std::uint32_t id;
        if (!dense.empty()) {
          id = dense[key];
          if (id == kUnset) {
            id = dense[key] = static_cast<std::uint32_t>(sizes.size());
            sizes.push_back(0);
          }
        } else {
          auto [it, inserted] = sparse.try_emplace(key, static_cast<std::uint32_t>(sizes.size()));
          if (inserted) sizes.push_back(0);
          id = it->second;
        }
        ++sizes[id];
        pair_ids.push_back(id);
      }
    }
  }
  const std::size_t k = sizes.size();
  std::vector<std::uint32_t> start(k + 1, 0);
  for (std::size_t e = 0; e < k; ++e) start[e + 1] = start[e] + sizes[e];
  std::vector<CellId> flat(start[k]);
  std::vector<std::uint32_t> cursor(start.begin(), start.end() - 1);
  std::size_t p = 0;
  for (CellId c = 0; c < n; ++c) {
    const std::size_t pairs = mem_a[c].size() * mem_b[c].size();
    for (std::size_t q = 0; q < pairs; ++q) flat[cursor[pair_ids[p++]]++] = c;
  }
  SetFamily out;
  out.reserve(k, flat.size());
  for (std::size_t e = 0; e < k; ++e) {
    out.push_back(std::span<const CellId>(flat.data() + start[e], sizes[e]));
  }
  return Cover(a.space(), std::move(out));
}

namespace {

// Joins of partitions stay partitions as long as every cell's images lie in
// one element, so the whole computation can run on one label per cell.
// Returns nothing when some pullback stops being a partition.
std::optional<Cover> partition_dynamical_join(const Cover& cover, const CellMap& map,
                                              std::size_t n) {
  const std::size_t cells = cover.space()->size();
  const std::size_t m = cover.size();
  std::vector<std::uint32_t> translate(cells);
  for (std::size_t e = 0; e < m; ++e) {
    for (CellId c : cover[e]) translate[c] = static_cast<std::uint32_t>(e);
  }
  std::vector<std::uint32_t> joined = translate;
  std::vector<std::uint32_t> next(cells);
  std::size_t classes = m;

  constexpr std::uint32_t kUnset = static_cast<std::uint32_t>(-1);
  constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 26;
  std::vector<std::uint32_t> dense;
  std::unordered_map<std::uint64_t, std::uint32_t> sparse;
  for (std::size_t j = 1; j < n; ++j) {
    for (CellId c = 0; c < cells; ++c) {
      const auto img = map.images(c);
      if (img.empty()) return std::nullopt;
      const std::uint32_t label = translate[img[0]];
      for (std::size_t q = 1; q < img.size(); ++q) {
        if (translate[img[q]] != label) return std::nullopt;
      }
      next[c] = label;
    }
    translate.swap(next);

    const std::uint64_t key_space = static_cast<std::uint64_t>(classes) * m;
    std::uint32_t fresh = 0;
    if (key_space <= kDenseLimit) {
      dense.assign(key_space, kUnset);
      for (CellId c = 0; c < cells; ++c) {
        auto& id = dense[static_cast<std::uint64_t>(joined[c]) * m + translate[c]];
        if (id == kUnset) id = fresh++;
        joined[c] = id;
      }
    } else {
      sparse.clear();
      for (CellId c = 0; c < cells; ++c) {
        const std::uint64_t key = static_cast<std::uint64_t>(joined[c]) * m + translate[c];
        joined[c] = sparse.try_emplace(key, fresh).first->second;
        if (joined[c] == fresh) ++fresh;
      }
    }
    classes = fresh;
  }

  // Labels in order of first appearance give the lexicographic order of
  // disjoint sets directly.
  std::vector<std::uint32_t> sizes(classes, 0);
  for (CellId c = 0; c < cells; ++c) ++sizes[joined[c]];
  std::vector<std::uint32_t> start(classes + 1, 0);
  for (std::size_t e = 0; e < classes; ++e) start[e + 1] = start[e] + sizes[e];
  std::vector<CellId> flat(cells);
  for (CellId c = 0; c < cells; ++c) flat[start[joined[c]]++] = c;
  SetFamily out;
  out.reserve(classes, cells);
  std::size_t begin = 0;
  for (std::size_t e = 0; e < classes; ++e) {
    out.push_back(std::span<const CellId>(flat.data() + begin, sizes[e]));
    begin += sizes[e];
  }
  return Cover(cover.space(), std::move(out));
}

}  // namespace

Cover dynamical_join(const Cover& cover, const CellMap& map, std::size_t n) {
  if (n == 0) throw StructuralError("dynamical join needs n >= 1");
  require_same_space(cover.space(), map.space());
  if (n > 1 && cover.is_partition()) {
    if (auto fast = partition_dynamical_join(cover, map, n)) return std::move(*fast);
  }
  Cover result = cover;
  Cover translate = cover;
  for (std::size_t j = 1; j < n; ++j) {
    translate = pullback(translate, map);
    result = join(result, translate);
  }
  return result;
}

Cover dynamical_join(const ModelBundle& bundle, std::size_t n) {
  if (bundle.truncation_depth && n > *bundle.truncation_depth) {
    throw DepthExhaustedError("dynamical join of length " + std::to_string(n) +
                              " exceeds truncation depth " +
                              std::to_string(*bundle.truncation_depth) +
                              "; rebuild the model deeper");
  }
  return dynamical_join(bundle.cover, bundle.map, n);
}

// ---------------------------------------------------------------------------
// Relabelling and disjoint unions

namespace {

void check_permutation(std::span<const CellId> perm, std::size_t cells) {
  if (perm.size() != cells) {
    throw StructuralError("permutation has " + std::to_string(perm.size()) +
                          " entries for " + std::to_string(cells) + " cells");
  }
  std::vector<char> hit(cells, 0);
  for (CellId p : perm) {
    if (p >= cells || hit[p]) throw StructuralError("relabelling map is not a bijection");
    hit[p] = 1;
  }
}

SetFamily map_family(const SetFamily& f, std::span<const CellId> perm) {
  SetFamily out;
  out.reserve(f.size(), f.total_members());
  std::vector<CellId> row;
  for (std::size_t i = 0; i < f.size(); ++i) {
    row.clear();
    for (CellId c : f[i]) row.push_back(perm[c]);
    out.push_back_unsorted(row);
  }
  return out;
}

}  // namespace

CellSpace relabel(const CellSpace& space, std::span<const CellId> perm) {
  check_permutation(perm, space.size());
  auto edges = space.edges();
  for (auto& [a, b] : edges) {
    a = perm[a];
    b = perm[b];
  }
  return CellSpace(space.size(), std::move(edges), space.dimension());
}

Cover relabel(const Cover& cover, SpacePtr relabelled_space, std::span<const CellId> perm) {
  check_permutation(perm, cover.space()->size());
  return Cover(std::move(relabelled_space), map_family(cover.elements(), perm));
}

CellMap relabel(const CellMap& map, SpacePtr relabelled_space, std::span<const CellId> perm) {
  const std::size_t n = map.space()->size();
  check_permutation(perm, n);
  // images'(perm[c]) = perm(images(c))
  std::vector<std::vector<CellId>> rows(n);
  for (std::size_t c = 0; c < n; ++c) {
    auto& row = rows[perm[c]];
    for (CellId img : map.images(static_cast<CellId>(c))) row.push_back(perm[img]);
  }
  return CellMap(std::move(relabelled_space), rows, map.invertible());
}

ModelBundle relabel(const ModelBundle& bundle, std::span<const CellId> perm) {
  auto space = std::make_shared<const CellSpace>(relabel(*bundle.space, perm));
  return ModelBundle{space, relabel(bundle.cover, space, perm), relabel(bundle.map, space, perm),
                     bundle.truncation_depth};
}

ModelBundle disjoint_union(const ModelBundle& a, const ModelBundle& b) {
  require_same_space(a.space, a.cover.space());
  require_same_space(b.space, b.cover.space());
  const auto offset = static_cast<CellId>(a.space->size());
  auto edges = a.space->edges();
  for (auto [x, y] : b.space->edges()) edges.emplace_back(x + offset, y + offset);
  std::size_t dim = std::max(a.space->dimension(), b.space->dimension());
  auto space = std::make_shared<const CellSpace>(a.space->size() + b.space->size(),
                                                 std::move(edges), dim);

  auto shifted = [offset](const SetFamily& f, SetFamily& out) {
    std::vector<CellId> row;
    for (std::size_t i = 0; i < f.size(); ++i) {
      row.assign(f[i].begin(), f[i].end());
      for (auto& c : row) c += offset;
      out.push_back(row);
    }
  };
  SetFamily cover = a.cover.elements();
  shifted(b.cover.elements(), cover);
  SetFamily images = a.map.relation();
  shifted(b.map.relation(), images);

  std::optional<std::size_t> depth;
  if (a.truncation_depth && b.truncation_depth) {
    depth = std::min(*a.truncation_depth, *b.truncation_depth);
  } else {
    depth = a.truncation_depth ? a.truncation_depth : b.truncation_depth;
  }
  return ModelBundle{space, Cover(space, std::move(cover)),
                     CellMap(space, std::move(images), a.map.invertible() && b.map.invertible()),
                     depth};
}

}  // namespace colent
