#include "dwm/combinatorics.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>
#include <string>

namespace dwm {

double binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double value = 1.0;
  for (int j = 1; j <= k; ++j) value = value * (n - k + j) / j;
  return value;
}

std::uint64_t binomial_exact(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 value = 1;
  for (int j = 1; j <= k; ++j) {
    // value * (n-k+j) / j stays integral at every step
    value = value * static_cast<unsigned>(n - k + j) / static_cast<unsigned>(j);
    if (value > std::numeric_limits<std::uint64_t>::max()) {
      throw std::overflow_error("C(" + std::to_string(n) + ", " + std::to_string(k) +
                                ") does not fit in 64 bits");
    }
  }
  return static_cast<std::uint64_t>(value);
}

}  // namespace dwm
