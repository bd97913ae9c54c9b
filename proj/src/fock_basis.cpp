#include "dwm/fock_basis.hpp"

#include <cmath>
#include <limits>

namespace dwm {

std::string to_string(ModeId mode) {
  return std::string(mode.side == Side::Left ? "l" : "r") + std::to_string(mode.well);
}

std::uint64_t stars_and_bars(int modes, int particles) {
  if (modes <= 0 || particles < 0) return 0;
  // C(particles + modes - 1, modes - 1) built up as C(p + k, k), k = 1..modes-1
  unsigned __int128 value = 1;
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  for (int k = 1; k < modes; ++k) {
    value = value * static_cast<unsigned>(particles + k) / static_cast<unsigned>(k);
    if (value > kMax) return kMax;
  }
  return static_cast<std::uint64_t>(value);
}

FockBasis::FockBasis(int wells, int particles, BasisLimits limits)
    : wells_(wells), particles_(particles), size_(0) {
  if (wells < 1) throw std::invalid_argument("FockBasis: need at least one double well");
  if (particles < 0) throw std::invalid_argument("FockBasis: negative particle number");

  const int K = modes();
  const std::uint64_t dim = stars_and_bars(K, particles);
  if (dim > limits.max_dimension) {
    throw std::length_error("basis too large: dimension " + std::to_string(dim) +
                            " exceeds cap " + std::to_string(limits.max_dimension));
  }
  size_ = static_cast<std::size_t>(dim);

  // Pascal table up to top = particles + K.
  const int rows = particles + K + 1;
  binomials_.assign(static_cast<std::size_t>(rows) * K, 0);
  for (int top = 0; top < rows; ++top) {
    for (int bottom = 0; bottom < K && bottom <= top; ++bottom) {
      std::uint64_t v = 1;
      if (bottom > 0 && bottom < top) v = binom(top - 1, bottom - 1) + binom(top - 1, bottom);
      binomials_[static_cast<std::size_t>(top) * K + bottom] = v;
    }
  }

  states_.reserve(size_ * K);
  Occupation current(K, 0);
  // Reverse-lexicographic: each leading mode takes its largest value first.
  auto fill = [&](auto&& self, int mode, int remaining) -> void {
    if (mode == K - 1) {
      current[mode] = remaining;
      states_.insert(states_.end(), current.begin(), current.end());
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      current[mode] = v;
      self(self, mode + 1, remaining - v);
    }
  };
  fill(fill, 0, particles);
}

std::uint64_t FockBasis::binom(int top, int bottom) const {
  if (bottom < 0 || top < 0 || bottom > top) return 0;
  return binomials_[static_cast<std::size_t>(top) * modes() + bottom];
}

Occupation FockBasis::unrank(std::size_t index) const {
  if (index >= size_) throw std::out_of_range("FockBasis::unrank: index out of range");
  auto s = state(index);
  return Occupation(s.begin(), s.end());
}

std::size_t FockBasis::rank_unchecked(std::span<const int> occ) const {
  const int K = modes();
  std::size_t index = 0;
  int remaining = particles_;
  for (int k = 0; k < K - 1; ++k) {
    const int parts_after = K - k - 1;
    // states whose mode k holds more than occ[k] come first
    if (occ[k] < remaining) index += binom(remaining - occ[k] - 1 + parts_after, parts_after);
    remaining -= occ[k];
  }
  return index;
}

std::optional<std::size_t> FockBasis::find(std::span<const int> occ) const {
  if (static_cast<int>(occ.size()) != modes()) return std::nullopt;
  int total = 0;
  for (int v : occ) {
    if (v < 0) return std::nullopt;
    total += v;
  }
  if (total != particles_) return std::nullopt;
  return rank_unchecked(occ);
}

std::size_t FockBasis::rank(std::span<const int> occ) const {
  auto index = find(occ);
  if (!index) throw std::out_of_range("FockBasis::rank: occupation not in basis");
  return *index;
}

BasisPtr build_basis(int wells, int particles, BasisLimits limits) {
  return std::make_shared<const FockBasis>(wells, particles, limits);
}

std::optional<Hop> hop(std::span<const int> occ, ModeId from, ModeId to) {
  const int f = from.flat();
  const int t = to.flat();
  if (f < 0 || t < 0 || f >= static_cast<int>(occ.size()) || t >= static_cast<int>(occ.size())) {
    throw std::out_of_range("hop: mode outside occupation vector");
  }
  if (occ[f] == 0) return std::nullopt;
  Occupation out(occ.begin(), occ.end());
  if (f == t) return Hop{std::move(out), static_cast<double>(occ[f])};
  const double amplitude = std::sqrt(static_cast<double>(occ[f]) * (occ[t] + 1));
  --out[f];
  ++out[t];
  return Hop{std::move(out), amplitude};
}

}  // namespace dwm
