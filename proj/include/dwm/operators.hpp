#pragma once

#include <numbers>
#include <string>

#include "dwm/sparse_operator.hpp"
#include "dwm/state_vector.hpp"

namespace dwm {

inline constexpr double kMixingAngle = std::numbers::pi / 2;

enum class GeneratorTag { JyLocal, JyTotal, SxLocal, SxTotal, L, R, Y, SyLocal, SyTotal };

/// A named generator. `index` is the well index for the local kinds and is
/// ignored for the collective ones. Valid ranges on M wells:
/// JyLocal/SyLocal 1..M, SxLocal 1..M-1, L and R 2..M, Y 2..M-1.
struct GeneratorKind {
  GeneratorTag tag = GeneratorTag::JyTotal;
  int index = 0;
};

std::string to_string(GeneratorKind kind);

/// Throws std::out_of_range (or std::invalid_argument for collective S_x with
/// M = 1) when `kind` does not exist on `wells` double wells.
void validate(GeneratorKind kind, int wells);

enum class Boundary { Open, Periodic };

// Single-particle matrices (2M x 2M) of the generators.
SingleParticleMatrix jy_single(int wells, int i);
SingleParticleMatrix jy_single(int wells);
SingleParticleMatrix sx_single(int wells, int i);
SingleParticleMatrix sx_single(int wells, Boundary boundary = Boundary::Open);

/// One-particle propagator exp(-i angle s_x) of the mixing step.
Eigen::MatrixXcd mixing_single(int wells, double angle = kMixingAngle);

/// Heisenberg transform u^dagger h u with u = exp(-i angle s_x).
SingleParticleMatrix heisenberg_single(const SingleParticleMatrix& h, double angle = kMixingAngle);

SingleParticleMatrix single_particle(GeneratorKind kind, int wells, double angle = kMixingAngle);

SparseOperator build_generator(GeneratorKind kind, BasisPtr basis);

SparseOperator jy_local(int i, BasisPtr basis);
SparseOperator jy_total(BasisPtr basis);
SparseOperator sx_local(int i, BasisPtr basis);
SparseOperator sx_total(BasisPtr basis, Boundary boundary = Boundary::Open);

enum class Lry { L, R, Y };

/// L couples l_{i-1} and l_i, R couples r_{i-1} and r_i, both with weight 1/2.
/// Y = (a_l^{(i+1)dagger} a_r^{(i-1)} - h.c.) / 2i.
SparseOperator lry(int i, Lry kind, BasisPtr basis);

/// Heisenberg-picture generator built from its single-particle matrix.
SparseOperator sy_local(int i, BasisPtr basis, double angle = kMixingAngle);
SparseOperator sy_total(BasisPtr basis, double angle = kMixingAngle);

struct UnitaryOptions {
  std::size_t dense_threshold = 2000;
  double tolerance = 1e-12;
};

/// Dense eigendecomposition of a Hermitian operator, reusable for any angle.
class SpectralPropagator {
 public:
  explicit SpectralPropagator(const SparseOperator& g);

  Eigen::VectorXcd apply(double angle, const Eigen::VectorXcd& v) const;
  Eigen::MatrixXcd unitary(double angle) const;
  const Eigen::VectorXd& eigenvalues() const { return values_; }
  const Eigen::MatrixXcd& eigenvectors() const { return vectors_; }

 private:
  Eigen::VectorXd values_;
  Eigen::MatrixXcd vectors_;
};

/// exp(-i angle G) v by a Chebyshev expansion; stops once the Bessel
/// coefficients fall below `tolerance`.
Eigen::VectorXcd chebyshev_apply(const SparseOperator& g, double angle, const Eigen::VectorXcd& v,
                                 double tolerance = 1e-12);

/// exp(-i angle G) psi. Dense spectral route up to options.dense_threshold,
/// Chebyshev above it.
StateVector apply_unitary(const SparseOperator& g, double angle, const StateVector& psi,
                          const UnitaryOptions& options = {});

/// exp(i angle H) G exp(-i angle H), materialized densely and re-sparsified.
SparseOperator conjugate(const SparseOperator& g, const SparseOperator& h, double angle);

/// Applies the mixing step exp(-i pi/2 S_x) to psi. Throws for M = 1.
StateVector mix(const StateVector& psi, const UnitaryOptions& options = {});

}  // namespace dwm
