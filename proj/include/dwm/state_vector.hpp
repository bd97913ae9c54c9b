#pragma once

#include <Eigen/Dense>

#include "dwm/sparse_operator.hpp"

namespace dwm {

/// Pure state over a FockBasis; amplitudes follow the basis order.
struct StateVector {
  BasisPtr basis;
  Eigen::VectorXcd amplitudes;

  std::size_t dimension() const { return static_cast<std::size_t>(amplitudes.size()); }
  double norm() const { return amplitudes.norm(); }
  cd operator[](const Occupation& occ) const { return amplitudes(basis->rank(occ)); }
};

/// Checks the shape and the norm (within `tol`) of a state.
void check_state(const StateVector& psi, double tol = 1e-12);

/// <psi|G|psi>
cd expectation(const StateVector& psi, const SparseOperator& g);

/// <psi|G^2|psi> - <psi|G|psi>^2 for Hermitian G.
double variance(const StateVector& psi, const SparseOperator& g);

double max_imag(const StateVector& psi);

}  // namespace dwm
