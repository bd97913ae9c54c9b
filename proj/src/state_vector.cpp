#include "dwm/state_vector.hpp"

#include <cmath>
#include <stdexcept>

namespace dwm {

void check_state(const StateVector& psi, double tol) {
  if (!psi.basis) throw std::invalid_argument("state has no basis");
  if (psi.dimension() != psi.basis->size()) {
    throw std::invalid_argument("state length " + std::to_string(psi.dimension()) +
                                " does not match basis dimension " +
                                std::to_string(psi.basis->size()));
  }
  if (std::abs(psi.norm() - 1.0) > tol) {
    throw std::invalid_argument("state is not normalized (norm " + std::to_string(psi.norm()) +
                                ")");
  }
}

namespace {

void check_pair(const StateVector& psi, const SparseOperator& g) {
  if (!psi.basis || !psi.basis->same_space(g.basis()) || psi.dimension() != g.dimension()) {
    throw std::invalid_argument("operator and state live on different bases");
  }
}

}  // namespace

cd expectation(const StateVector& psi, const SparseOperator& g) {
  check_pair(psi, g);
  return psi.amplitudes.dot(g.apply(psi.amplitudes));
}

double variance(const StateVector& psi, const SparseOperator& g) {
  check_pair(psi, g);
  const Eigen::VectorXcd gpsi = g.apply(psi.amplitudes);
  const cd mean = psi.amplitudes.dot(gpsi);
  return gpsi.squaredNorm() - std::norm(mean);
}

double max_imag(const StateVector& psi) {
  return psi.amplitudes.size() == 0 ? 0.0 : psi.amplitudes.imag().cwiseAbs().maxCoeff();
}

}  // namespace dwm
