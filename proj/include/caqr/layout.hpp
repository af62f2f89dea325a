#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace caqr {

/// Pr x Pc processor grid holding b x b blocks round-robin.
struct BlockCyclicLayout {
  std::size_t pr = 1;
  std::size_t pc = 1;
  std::size_t b = 1;

  std::size_t procs() const noexcept { return pr * pc; }

  // processor ids are column-major over the grid
  std::size_t proc_id(std::size_t prow, std::size_t pcol) const noexcept { return prow + pcol * pr; }

  /// Rejects layouts that leave some processor without a block of an m x n matrix.
  void validate(std::size_t m, std::size_t n) const {
    if (pr == 0 || pc == 0) throw std::invalid_argument("layout: grid dimensions must be >= 1");
    if (b == 0) throw std::invalid_argument("layout: block size must be >= 1");
    if (b > (m + pr - 1) / pr || b > (n + pc - 1) / pc)
      throw std::invalid_argument("layout: block size exceeds m/Pr or n/Pc");
  }
};

struct BlockOwner {
  std::size_t proc_row = 0;
  std::size_t proc_col = 0;
  std::size_t local_i = 0;
  std::size_t local_j = 0;

  friend bool operator==(const BlockOwner&, const BlockOwner&) = default;
};

inline BlockOwner block_owner(std::size_t i, std::size_t j, const BlockCyclicLayout& layout) {
  return {i % layout.pr, j % layout.pc, i / layout.pr, j / layout.pc};
}

/// Global indices of the blocks in [first, count) owned by grid coordinate `owner` along one axis.
inline std::vector<std::size_t> owned_blocks(std::size_t first, std::size_t count, std::size_t procs,
                                             std::size_t owner) {
  std::vector<std::size_t> out;
  for (std::size_t k = first; k < count; ++k)
    if (k % procs == owner) out.push_back(k);
  return out;
}

}  // namespace caqr
