#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dwm/state_vector.hpp"

namespace dwm {

// Single-well amplitudes are indexed by the left occupation m = 0..n of
// |m, n - m>.

/// Coherent spin state sum_m sqrt(C(n,m)) sin^m(theta/2) cos^{n-m}(theta/2) e^{i m phi}.
/// theta = 0 puts every boson on the right, theta = pi/2 with phi = 0 gives
/// the symmetric binomial state.
Eigen::VectorXcd css_local(double theta, double phi, int n);

/// Symmetric CSS after one-axis twisting: e^{-i chi_t m^2} sqrt(C(n,m) / 2^n).
Eigen::VectorXcd oat_local(int n, double chi_t);

/// Extreme eigenvectors of the single-well J_y:
/// |n,0>_y = ((a_r^dag + i a_l^dag)/sqrt2)^n |0> / sqrt(n!), |0,n>_y with -i.
Eigen::VectorXcd jy_extreme_local(int n, bool upper);

/// (|n,0>_y + |0,n>_y) / sqrt2
Eigen::VectorXcd noon_local_y(int n);

/// Fock load |m_left, n - m_left>.
Eigen::VectorXcd fock_local(int n, int m_left = 0);

enum class PureFamily { FockLoad, Css, Oat, NoonLocalY };

struct DwPureSpec {
  PureFamily family = PureFamily::FockLoad;
  int n = 0;
  int m_left = 0;
  double theta = 0.0;
  double phi = 0.0;
  double chi_t = 0.0;

  static DwPureSpec fock(int n, int m_left = 0) { return {PureFamily::FockLoad, n, m_left}; }
  static DwPureSpec css(int n, double theta, double phi) {
    return {PureFamily::Css, n, 0, theta, phi};
  }
  static DwPureSpec oat(int n, double chi_t) { return {PureFamily::Oat, n, 0, 0.0, 0.0, chi_t}; }
  static DwPureSpec noon(int n) { return {PureFamily::NoonLocalY, n}; }
};

/// Range checks of DwPureSpec; throws std::invalid_argument.
void validate(const DwPureSpec& spec);
Eigen::VectorXcd well_amplitudes(const DwPureSpec& spec);

/// Tensor product of single-well states, placed by the basis rank map.
StateVector product_state(std::span<const Eigen::VectorXcd> wells, BasisPtr basis);
StateVector product_state(std::span<const DwPureSpec> specs, BasisPtr basis);

/// (prod_i |n,0>_y + prod_i |0,n>_y) / sqrt2 on M wells.
StateVector noon_global(int n, int wells, BasisPtr basis);

/// Diagonal single-well mixture: probability of left occupation m.
struct DwDiagonalSpec {
  Eigen::VectorXd weights;
  int n() const { return static_cast<int>(weights.size()) - 1; }
};

/// p(m) proportional to exp(-m^2 / 2 sigma^2), m = 0..n. The uniform flag
/// selects the sigma -> infinity limit p(m) = 1/(n+1) exactly.
DwDiagonalSpec gaussian_weights(int n, double sigma, bool uniform = false);

void validate(const DwDiagonalSpec& spec, double tol = 1e-12);

/// Product of per-well diagonal mixtures. Never expanded over the global basis
/// unless materialize_density is called.
class DiagonalProductState {
 public:
  explicit DiagonalProductState(std::vector<DwDiagonalSpec> wells);
  static DiagonalProductState identical(const DwDiagonalSpec& well, int wells);

  int wells() const { return static_cast<int>(wells_.size()); }
  int total_particles() const;
  const DwDiagonalSpec& well(int i) const { return wells_.at(static_cast<std::size_t>(i - 1)); }
  const std::vector<DwDiagonalSpec>& per_well() const { return wells_; }

 private:
  std::vector<DwDiagonalSpec> wells_;
};

/// Density matrix that is diagonal in the Fock basis.
struct DiagonalDensity {
  BasisPtr basis;
  Eigen::VectorXd diagonal;

  double trace() const { return diagonal.sum(); }
  Eigen::MatrixXcd dense() const;
};

/// Expands a diagonal product over `basis`. The basis itself enforces the
/// dimension cap; this throws when the particle numbers do not match.
DiagonalDensity materialize_density(const DiagonalProductState& state, BasisPtr basis);

}  // namespace dwm
