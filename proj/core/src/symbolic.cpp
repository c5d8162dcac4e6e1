#include "colent/symbolic.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "colent/errors.hpp"

namespace colent {

TransferMatrix::TransferMatrix(const std::vector<std::vector<int>>& rows) : k_(rows.size()) {
  if (k_ == 0) throw StructuralError("transfer matrix needs at least one symbol");
  bits_.assign(k_ * k_, 0);
  std::vector<char> column_hit(k_, 0);
  for (std::size_t i = 0; i < k_; ++i) {
    if (rows[i].size() != k_) {
      throw StructuralError("transfer matrix row " + std::to_string(i) + " has " +
                            std::to_string(rows[i].size()) + " entries, expected " +
                            std::to_string(k_));
    }
    bool row_hit = false;
    for (std::size_t j = 0; j < k_; ++j) {
      int v = rows[i][j];
      if (v != 0 && v != 1) {
        throw StructuralError("transfer matrix entry (" + std::to_string(i) + "," +
                              std::to_string(j) + ") is " + std::to_string(v) +
                              ", expected 0 or 1");
      }
      bits_[i * k_ + j] = static_cast<std::uint8_t>(v);
      if (v) {
        row_hit = true;
        column_hit[j] = 1;
      }
    }
    if (!row_hit) throw StructuralError("symbol " + std::to_string(i) + " has no successor");
  }
  for (std::size_t j = 0; j < k_; ++j) {
    if (!column_hit[j]) {
      throw StructuralError("symbol " + std::to_string(j) + " has no predecessor");
    }
  }
}

TransferMatrix TransferMatrix::full_shift(std::size_t k) {
  return TransferMatrix(std::vector<std::vector<int>>(k, std::vector<int>(k, 1)));
}

TransferMatrix TransferMatrix::golden_mean() { return TransferMatrix({{1, 1}, {1, 0}}); }

TransferMatrix TransferMatrix::permutation(const std::vector<std::size_t>& perm) {
  std::vector<std::vector<int>> rows(perm.size(), std::vector<int>(perm.size(), 0));
  for (std::size_t i = 0; i < perm.size(); ++i) {
    if (perm[i] >= perm.size()) throw StructuralError("permutation entry out of range");
    rows[i][perm[i]] = 1;
  }
  return TransferMatrix(rows);
}

std::vector<std::vector<int>> TransferMatrix::rows() const {
  std::vector<std::vector<int>> out(k_, std::vector<int>(k_));
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) out[i][j] = bits_[i * k_ + j];
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

/// Strongly connected components (Tarjan), each as a list of symbols.
std::vector<std::vector<std::size_t>> components(const TransferMatrix& a) {
  const std::size_t k = a.alphabet();
  std::vector<int> index(k, -1), low(k, 0);
  std::vector<char> on_stack(k, 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> out;
  int counter = 0;
  std::function<void(std::size_t)> visit = [&](std::size_t v) {
    index[v] = low[v] = counter++;
    stack.push_back(v);
    on_stack[v] = 1;
    for (std::size_t w = 0; w < k; ++w) {
      if (!a(v, w)) continue;
      if (index[w] < 0) {
        visit(w);
        low[v] = std::min(low[v], low[w]);
      } else if (on_stack[w]) {
        low[v] = std::min(low[v], index[w]);
      }
    }
    if (low[v] == index[v]) {
      std::vector<std::size_t> comp;
      std::size_t w;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[w] = 0;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      out.push_back(std::move(comp));
    }
  };
  for (std::size_t v = 0; v < k; ++v) {
    if (index[v] < 0) visit(v);
  }
  return out;
}

/// Perron root of the irreducible block of `a` on `comp`.
double perron_root(const TransferMatrix& a, const std::vector<std::size_t>& comp) {
  const std::size_t m = comp.size();
  std::vector<std::size_t> out_degree(m, 0);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) out_degree[i] += a(comp[i], comp[j]);
  }
  if (m == 1) return static_cast<double>(out_degree[0]);  // 0 or a self-loop
  // A strongly connected block where every symbol has one successor is a cycle.
  if (std::all_of(out_degree.begin(), out_degree.end(), [](std::size_t d) { return d == 1; })) {
    return 1.0;
  }
  // Power iteration on I + B: primitive, same Perron vector, root shifted by 1.
  std::vector<double> x(m, 1.0), y(m);
  double lo = 0.0, hi = 0.0;
  for (int iter = 0; iter < 1'000'000; ++iter) {
    for (std::size_t i = 0; i < m; ++i) {
      double s = x[i];
      for (std::size_t j = 0; j < m; ++j) {
        if (a(comp[i], comp[j])) s += x[j];
      }
      y[i] = s;
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    double norm = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      const double r = y[i] / x[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
      norm = std::max(norm, y[i]);
    }
    for (std::size_t i = 0; i < m; ++i) x[i] = y[i] / norm;
    if (hi - lo <= 1e-13 * lo) break;
  }
  return 0.5 * (lo + hi) - 1.0;
}

}  // namespace

SftEntropy sft_entropy(const TransferMatrix& matrix) {
  const auto comps = components(matrix);
  SftEntropy out;
  out.reducible = comps.size() > 1;
  double rho = 0.0;
  for (const auto& comp : comps) rho = std::max(rho, perron_root(matrix, comp));
  out.spectral_radius = rho;
  out.value = rho == 1.0 ? 0.0 : std::log(rho);
  return out;
}

std::uint64_t cylinder_count(const TransferMatrix& matrix, std::size_t n) {
  if (n == 0) throw StructuralError("cylinder_count needs n >= 1");
  const std::size_t k = matrix.alphabet();
  // v[i] = number of admissible words of the current length starting at i
  std::vector<std::uint64_t> v(k, 1), next(k);
  for (std::size_t step = 1; step < n; ++step) {
    for (std::size_t i = 0; i < k; ++i) {
      std::uint64_t s = 0;
      for (std::size_t j = 0; j < k; ++j) {
        if (matrix(i, j) && __builtin_add_overflow(s, v[j], &s)) {
          throw OverflowError("cylinder count at length " + std::to_string(n) +
                              " exceeds 64 bits");
        }
      }
      next[i] = s;
    }
    v.swap(next);
  }
  std::uint64_t total = 0;
  for (auto x : v) {
    if (__builtin_add_overflow(total, x, &total)) {
      throw OverflowError("cylinder count at length " + std::to_string(n) + " exceeds 64 bits");
    }
  }
  return total;
}

// ---------------------------------------------------------------------------

WordSpace::WordSpace(const TransferMatrix& matrix, std::size_t depth, std::size_t max_cells)
    : k_(matrix.alphabet()), depth_(depth) {
  if (depth == 0) throw StructuralError("word space depth must be >= 1");
  double code_bits = static_cast<double>(depth) * std::log2(static_cast<double>(k_));
  if (code_bits > 63.0) {
    throw SizeError("words of length " + std::to_string(depth) + " over " +
                    std::to_string(k_) + " symbols do not fit the code range");
  }
  std::uint64_t count = 0;
  try {
    count = cylinder_count(matrix, depth);
  } catch (const OverflowError&) {
    count = std::numeric_limits<std::uint64_t>::max();
  }
  if (count > max_cells) {
    throw SizeError("word space of depth " + std::to_string(depth) + " has " +
                    std::to_string(count) + " words, above the cap of " +
                    std::to_string(max_cells));
  }
  bits_.resize(k_ * k_);
  for (std::size_t i = 0; i < k_; ++i) {
    for (std::size_t j = 0; j < k_; ++j) bits_[i * k_ + j] = matrix(i, j);
  }
  // Extend level by level; appending symbols in order keeps lexicographic order.
  codes_.reserve(count);
  std::vector<std::uint64_t> level;
  level.reserve(count);
  for (std::size_t s = 0; s < k_; ++s) level.push_back(s);
  for (std::size_t len = 1; len < depth; ++len) {
    std::vector<std::uint64_t> longer;
    longer.reserve(count);
    for (auto w : level) {
      const std::size_t last = w % k_;
      for (std::size_t b = 0; b < k_; ++b) {
        if (bits_[last * k_ + b]) longer.push_back(w * k_ + b);
      }
    }
    level.swap(longer);
  }
  codes_ = std::move(level);
}

std::size_t WordSpace::symbol(std::size_t i, std::size_t position) const {
  std::uint64_t w = codes_[i];
  for (std::size_t p = position + 1; p < depth_; ++p) w /= k_;
  return static_cast<std::size_t>(w % k_);
}

std::vector<std::size_t> WordSpace::word(std::size_t i) const {
  std::vector<std::size_t> out(depth_);
  std::uint64_t w = codes_[i];
  for (std::size_t p = depth_; p-- > 0;) {
    out[p] = static_cast<std::size_t>(w % k_);
    w /= k_;
  }
  return out;
}

ModelBundle WordSpace::bundle() const {
  const std::size_t n = codes_.size();
  std::uint64_t top = 1;  // k^(depth-1)
  for (std::size_t p = 1; p < depth_; ++p) top *= k_;
  const std::uint64_t full = top * k_;

  // Word code -> cell index.
  constexpr std::uint64_t kDenseLimit = std::uint64_t{1} << 27;
  std::vector<std::uint32_t> dense;
  if (full <= kDenseLimit) {
    dense.assign(full, 0);
    for (std::size_t i = 0; i < n; ++i) dense[codes_[i]] = static_cast<std::uint32_t>(i);
  }
  auto index_of = [&](std::uint64_t code) -> CellId {
    if (!dense.empty()) return dense[code];
    return static_cast<CellId>(std::lower_bound(codes_.begin(), codes_.end(), code) -
                               codes_.begin());
  };

  auto space = std::make_shared<const CellSpace>(CellSpace::discrete(n));

  SetFamily first;
  first.reserve(k_, n);
  std::vector<CellId> block;
  std::size_t i = 0;
  for (std::size_t s = 0; s < k_; ++s) {
    block.clear();
    while (i < n && codes_[i] / top == s) block.push_back(static_cast<CellId>(i++));
    if (!block.empty()) first.push_back(block);
  }

  SetFamily images;
  images.reserve(n, n * k_);
  std::vector<CellId> row;
  bool bijective = true;
  std::vector<char> hit(n, 0);
  for (std::size_t c = 0; c < n; ++c) {
    row.clear();
    const std::uint64_t tail = (codes_[c] % top) * k_;
    const std::size_t last = codes_[c] % k_;
    for (std::size_t b = 0; b < k_; ++b) {
      if (bits_[last * k_ + b]) row.push_back(index_of(tail + b));
    }
    if (row.size() != 1 || hit[row[0]]) bijective = false;
    if (row.size() == 1) hit[row[0]] = 1;
    images.push_back(row);
  }

  Cover cover(space, std::move(first));
  CellMap map(space, std::move(images), bijective);
  return ModelBundle{space, std::move(cover), std::move(map), depth_};
}

ModelBundle cylinder_cover(const TransferMatrix& matrix, std::size_t depth) {
  return WordSpace(matrix, depth).bundle();
}

// ---------------------------------------------------------------------------

TransferMatrix power_system(const TransferMatrix& matrix, std::size_t k,
                            std::size_t max_alphabet) {
  if (k == 0) throw StructuralError("power_system needs k >= 1");
  if (k == 1) return matrix;
  const std::uint64_t blocks = cylinder_count(matrix, k);
  if (blocks > max_alphabet) {
    throw SizeError("power system would have " + std::to_string(blocks) +
                    " block symbols, above the cap of " + std::to_string(max_alphabet));
  }
  WordSpace words(matrix, k, max_alphabet);
  const std::size_t m = words.size();
  std::vector<std::vector<int>> rows(m, std::vector<int>(m, 0));
  for (std::size_t u = 0; u < m; ++u) {
    const std::size_t last = words.symbol(u, k - 1);
    for (std::size_t v = 0; v < m; ++v) rows[u][v] = matrix(last, words.symbol(v, 0)) ? 1 : 0;
  }
  return TransferMatrix(rows);
}

TransferMatrix disjoint_sum(const TransferMatrix& a, const TransferMatrix& b) {
  const std::size_t ka = a.alphabet(), kb = b.alphabet();
  std::vector<std::vector<int>> rows(ka + kb, std::vector<int>(ka + kb, 0));
  for (std::size_t i = 0; i < ka; ++i) {
    for (std::size_t j = 0; j < ka; ++j) rows[i][j] = a(i, j);
  }
  for (std::size_t i = 0; i < kb; ++i) {
    for (std::size_t j = 0; j < kb; ++j) rows[ka + i][ka + j] = b(i, j);
  }
  return TransferMatrix(rows);
}

TransferMatrix relabel(const TransferMatrix& matrix, const std::vector<std::size_t>& perm) {
  const std::size_t k = matrix.alphabet();
  if (perm.size() != k) throw StructuralError("symbol permutation has the wrong length");
  std::vector<char> seen(k, 0);
  for (auto p : perm) {
    if (p >= k || seen[p]) throw StructuralError("symbol relabelling is not a bijection");
    seen[p] = 1;
  }
  std::vector<std::vector<int>> rows(k, std::vector<int>(k, 0));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) rows[perm[i]][perm[j]] = matrix(i, j);
  }
  return TransferMatrix(rows);
}

}  // namespace colent
