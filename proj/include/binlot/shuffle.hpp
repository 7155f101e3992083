#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace binlot {

// Fisher-Yates core shared by the equal-bin sampler and the lottery draw.
// draw(j) must return a uniform integer in [0, j).  Iterates from the back,
// so the draw sequence for a given length is fixed: j = n, n-1, ..., 2.
template <typename T, typename DrawFn>
void fisher_yates(std::vector<T>& items, DrawFn&& draw) {
  using std::swap;
  for (std::size_t i = items.size(); i > 1; --i) {
    const auto u = static_cast<std::size_t>(draw(static_cast<std::uint64_t>(i)));
    swap(items[i - 1], items[u]);
  }
}

inline std::vector<std::uint32_t> identity_permutation(std::size_t n) {
  std::vector<std::uint32_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = static_cast<std::uint32_t>(i);
  return p;
}

}  // namespace binlot
