#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "colent/cellspace.hpp"

namespace colent {

/// Square 0/1 matrix defining a subshift of finite type. Every row and every
/// column holds at least one 1, so each symbol can be both left and entered.
class TransferMatrix {
 public:
  /// Throws StructuralError on a non-square matrix, entries outside {0, 1},
  /// an empty alphabet, or a stranded symbol.
  explicit TransferMatrix(const std::vector<std::vector<int>>& rows);

  static TransferMatrix full_shift(std::size_t k);
  /// [[1,1],[1,0]]: binary words without two consecutive 1s.
  static TransferMatrix golden_mean();
  /// Matrix of the permutation i -> perm[i].
  static TransferMatrix permutation(const std::vector<std::size_t>& perm);

  std::size_t alphabet() const noexcept { return k_; }
  bool operator()(std::size_t i, std::size_t j) const noexcept { return bits_[i * k_ + j] != 0; }
  std::vector<std::vector<int>> rows() const;

  bool operator==(const TransferMatrix& other) const = default;

 private:
  std::size_t k_ = 0;
  std::vector<std::uint8_t> bits_;
};

struct SftEntropy {
  double value = 0.0;            ///< log of the spectral radius
  double spectral_radius = 1.0;
  /// Set when the matrix is reducible; the value is then the largest
  /// Perron root over the irreducible components.
  bool reducible = false;
};

/// Entropy log rho(A) by power iteration on I + A per strongly connected
/// component, stopped once the Collatz-Wielandt bounds agree to 1e-12
/// relative. Components that are plain cycles (permutations included)
/// contribute exactly 1.
SftEntropy sft_entropy(const TransferMatrix& matrix);

/// Number of admissible words of length n (n >= 1). Throws OverflowError
/// when the count does not fit in 64 bits.
std::uint64_t cylinder_count(const TransferMatrix& matrix, std::size_t n);

/// Admissible words of one length, in lexicographic order.
class WordSpace {
 public:
  /// Throws SizeError when there would be more than `max_cells` words.
  WordSpace(const TransferMatrix& matrix, std::size_t depth,
            std::size_t max_cells = std::size_t{1} << 26);

  std::size_t depth() const noexcept { return depth_; }
  std::size_t alphabet() const noexcept { return k_; }
  std::size_t size() const noexcept { return codes_.size(); }
  /// Word i as its symbols.
  std::vector<std::size_t> word(std::size_t i) const;
  std::size_t symbol(std::size_t i, std::size_t position) const;

  /// Discrete space with one cell per word, the first-symbol cylinder
  /// partition, and the shift relation w -> w[1..] b over admissible b.
  /// The truncation depth is recorded so longer joins are refused.
  ModelBundle bundle() const;

 private:
  std::size_t k_;
  std::size_t depth_;
  std::vector<std::uint64_t> codes_;  // base-k, first symbol most significant
  std::vector<std::uint8_t> bits_;
};

/// Bundle of the cylinder model at `depth`; equivalent to WordSpace(...).bundle().
ModelBundle cylinder_cover(const TransferMatrix& matrix, std::size_t depth);

/// Transfer matrix of T^k recoded on admissible k-blocks: blocks u -> v
/// whenever u's last symbol may be followed by v's first. Its entropy is
/// exactly k times the original. k = 1 returns the matrix unchanged.
TransferMatrix power_system(const TransferMatrix& matrix, std::size_t k,
                            std::size_t max_alphabet = 4096);

/// Block-diagonal matrix: the disjoint union of the two shifts.
TransferMatrix disjoint_sum(const TransferMatrix& a, const TransferMatrix& b);

/// Renames symbol i as perm[i].
TransferMatrix relabel(const TransferMatrix& matrix, const std::vector<std::size_t>& perm);

}  // namespace colent
