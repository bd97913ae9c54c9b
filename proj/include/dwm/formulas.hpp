#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace dwm {

/// Reference QFI values: standard quantum limit Mn, Heisenberg scaling in n
/// per well Mn^2, and global Heisenberg scaling M^2 n^2.
struct ScalingBounds {
  double sql;
  double hl_local;
  double hl_global;
};

ScalingBounds bounds(int M, int n);

/// Every well loaded with |0, n>, mixed, then the interferometer: M (n^2 + 2n) / 2.
double qfi_fock_css(int M, int n);

/// Symmetric coherent states, two algebraically equivalent closed forms.
struct SymmetricCssQfi {
  double value;     // M n (7 + n)/8 - n^2/sqrt2 + (n/2)(n + 1/2)
  double expanded;  // M n^2/8 + (1 - sqrt2) n^2/2 + (7M/2 + 1) n/4
};

SymmetricCssQfi qfi_symmetric_css(int M, int n);

/// Phase convention of the one-axis-twisting moments.
///   StateConsistent: phases read off the twisted state itself,
///     g exponent (2k - 1) alpha, f exponent 4 (k - 1) alpha, k = left occupation.
///   Printed: g exponent (2m + 1) alpha and f exponent (2m^2 + 4m + 4) alpha
///     with the half-integer index m = k - n/2 (shifted by 2 for f).
enum class OatConvention { StateConsistent, Printed };

struct OatMoments {
  std::complex<double> g;  // <a_r^dag a_l>
  std::complex<double> f;  // <(a_r^dag a_l)^2>
};

OatMoments oat_moments(int n, double alpha, OatConvention convention = OatConvention::StateConsistent);

/// n^2 + 3n/2 + (M-2)(n/2)(n + 3/2) - ((M+2)/2) Re f - (M - 3 + 4/sqrt2) |g|^2
double oat_qfi(int M, int n, double alpha, OatConvention convention = OatConvention::StateConsistent);

/// M n^2 / 2, the plateau away from alpha in (pi/2) Z.
double oat_asymptote(int M, int n);

/// Uniform number fluctuations: (n^2 + 2n)(3M - 2)/8.
double sigma_inf_qfi(int M, int n);

/// sum_{m,m'} |d[m,m']|^2 of the single-well hop elements
/// d[m,m'] = sqrt((n-m)(m+1)) delta_{m',m+1} - sqrt((n-m+1)m) delta_{m',m-1},
/// summed term by term in exact integer arithmetic (n <= 300).
std::uint64_t hop_weight_sum(int n);
/// (n^3 + 3n^2 + 2n) / 3
std::uint64_t hop_weight_sum_closed(int n);

/// Comparison of oat_qfi against the exact QFI of the simulated protocol.
struct OatGateReport {
  std::vector<std::pair<int, int>> cases;  // (M, n)
  int points = 0;
  double tolerance = 0.0;
  double deviation_state_consistent = 0.0;
  double deviation_printed = 0.0;
  std::optional<OatConvention> accepted;
};

/// Evaluates both conventions on `points` values of alpha in [0, pi] against
/// a brute-force QFI on the full Fock basis and accepts the first convention
/// whose worst absolute deviation is below `tolerance`.
OatGateReport oat_convention_gate(std::vector<std::pair<int, int>> cases = {{3, 2}, {3, 3}},
                                  int points = 21, double tolerance = 1e-8);

}  // namespace dwm
