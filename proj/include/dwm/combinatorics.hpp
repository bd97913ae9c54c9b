#pragma once

#include <cstdint>

namespace dwm {

/// C(n, k) in double precision by the multiplicative recurrence; relative
/// error grows like k ulps. Zero outside 0 <= k <= n.
double binomial(int n, int k);

/// Exact C(n, k); throws std::overflow_error when it does not fit in 64 bits.
std::uint64_t binomial_exact(int n, int k);

}  // namespace dwm
