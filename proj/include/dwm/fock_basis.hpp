#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dwm {

enum class Side : std::uint8_t { Left = 0, Right = 1 };

/// A single bosonic mode: the left or right site of double well `well` (1-based).
///
/// Modes are laid out as (l1, r1, l2, r2, ..., lM, rM); flat() is the position
/// of the mode in that list and in every Occupation vector.
struct ModeId {
  int well = 1;
  Side side = Side::Left;

  constexpr int flat() const { return 2 * (well - 1) + static_cast<int>(side); }
  static constexpr ModeId from_flat(int index) {
    return ModeId{index / 2 + 1, index % 2 == 0 ? Side::Left : Side::Right};
  }
  friend constexpr bool operator==(ModeId, ModeId) = default;
};

constexpr ModeId left(int well) { return {well, Side::Left}; }
constexpr ModeId right(int well) { return {well, Side::Right}; }

std::string to_string(ModeId mode);

/// Particle count per mode, in flat mode order.
using Occupation = std::vector<int>;

struct BasisLimits {
  std::size_t max_dimension = 200000;
};

/// Number of occupation vectors of `modes` modes holding `particles` bosons,
/// C(particles + modes - 1, modes - 1). Saturates at UINT64_MAX.
std::uint64_t stars_and_bars(int modes, int particles);

/// Fixed-N Fock basis of M double wells (2M modes).
///
/// States are enumerated in reverse-lexicographic order of the occupation
/// vector, so (N,0,...,0) comes first and (0,...,0,N) last. rank() uses the
/// combinatorial number system over a precomputed binomial table and costs
/// O(2M) with no hashing.
class FockBasis {
 public:
  FockBasis(int wells, int particles, BasisLimits limits = {});

  int wells() const { return wells_; }
  int modes() const { return 2 * wells_; }
  int particles() const { return particles_; }
  std::size_t size() const { return size_; }

  std::span<const int> state(std::size_t index) const {
    return {states_.data() + index * static_cast<std::size_t>(modes()),
            static_cast<std::size_t>(modes())};
  }
  Occupation unrank(std::size_t index) const;

  /// Index of `occ`; throws std::out_of_range when occ is not in this basis.
  std::size_t rank(std::span<const int> occ) const;
  /// Index of `occ`, or nullopt when the length, sign or total do not match.
  std::optional<std::size_t> find(std::span<const int> occ) const;

  bool contains(ModeId mode) const { return mode.well >= 1 && mode.well <= wells_; }
  bool same_space(const FockBasis& other) const {
    return wells_ == other.wells_ && particles_ == other.particles_;
  }

 private:
  std::uint64_t binom(int top, int bottom) const;
  std::size_t rank_unchecked(std::span<const int> occ) const;

  int wells_;
  int particles_;
  std::size_t size_;
  std::vector<int> states_;
  std::vector<std::uint64_t> binomials_;  // (top, bottom) row-major, bottom < modes
};

using BasisPtr = std::shared_ptr<const FockBasis>;

BasisPtr build_basis(int wells, int particles, BasisLimits limits = {});

/// Result of a single hop a_to^dagger a_from on a Fock state.
struct Hop {
  Occupation occupation;
  double amplitude;
};

/// Applies a_to^dagger a_from to |occ>. Returns nullopt when the source mode
/// is empty. from == to acts as the number operator.
std::optional<Hop> hop(std::span<const int> occ, ModeId from, ModeId to);

}  // namespace dwm
