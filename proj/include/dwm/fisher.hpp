#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dwm/operators.hpp"
#include "dwm/sparse_operator.hpp"
#include "dwm/state_vector.hpp"
#include "dwm/states.hpp"

namespace dwm {

enum class QfiMethod { PureVariance, Spectral, ZeroSplit, DiagonalProduct, FastProduct, FormulaRef };

std::string to_string(QfiMethod method);

/// I = I1 + I2 + I3 with I1 the QFI restricted to the support of rho,
/// I2 = 4 Tr[rho G^2] and I3 = -4 sum_{n,m in support} p_n |<n|G|m>|^2.
struct QfiParts {
  double i1 = 0.0;
  double i2 = 0.0;
  double i3 = 0.0;
  double sum() const { return i1 + i2 + i3; }
};

struct QfiReport {
  double value = 0.0;
  QfiMethod method = QfiMethod::PureVariance;
  std::optional<QfiParts> parts;
};

/// 4 (<G^2> - <G>^2)
QfiReport qfi_pure(const StateVector& psi, const SparseOperator& g);

struct SpectralOptions {
  double floor = 1e-12;               // eigenvalues / pair sums below this count as zero
  double negative_tolerance = 1e-10;  // eigenvalues below -tol reject rho
};

/// 2 sum_{ij} (p_i - p_j)^2 / (p_i + p_j) |<i|G|j>|^2 over the eigenbasis of rho.
QfiReport qfi_spectral(const DenseHermitian& rho, const SparseOperator& g,
                       const SpectralOptions& options = {});
/// Same kernel for a density that is already diagonal in the Fock basis.
QfiReport qfi_spectral(const DiagonalDensity& rho, const SparseOperator& g,
                       const SpectralOptions& options = {});

/// QFI split into the support part and the zero-eigenvalue remainder.
QfiReport qfi_zero_split(const DenseHermitian& rho, const SparseOperator& g,
                         const SpectralOptions& options = {});
QfiReport qfi_zero_split(const DiagonalDensity& rho, const SparseOperator& g,
                         const SpectralOptions& options = {});

/// QFI of a diagonal product state for the one-body generator with
/// single-particle matrix `h`, reduced to single-well sums. Cost O(M^2 + M n).
/// Requires a zero diagonal in `h`.
QfiReport qfi_diagonal_product(const DiagonalProductState& state, const SingleParticleMatrix& h);
/// Generator S_y (mixing on) or J_y (mixing off).
QfiReport qfi_diagonal_product(const DiagonalProductState& state, bool mixing);

/// QFI of a pure product of single-well states (amplitudes over m = 0..n)
/// from per-well expectations of at most four ladder operators. Only term
/// pairs that share a well contribute to the covariance.
QfiReport qfi_product_pure_fast(std::span<const Eigen::VectorXcd> wells,
                                const SingleParticleMatrix& h);
QfiReport qfi_product_pure_fast(std::span<const Eigen::VectorXcd> wells, int M, int n,
                                bool mixing);

struct MeasurementRecord {
  Occupation outcome;
  double probability;
};

/// Number-resolved outcome distribution of exp(-i theta J_y) psi.
std::vector<MeasurementRecord> measurement_distribution(const StateVector& psi, double theta);

enum class CfiMode { AnalyticAtZero, FiniteDifference };

struct CfiOptions {
  double step = 1e-5;
  double zero_probability = 1e-14;
  double derivative_threshold = 1e-7;
  UnitaryOptions unitary;
};

struct CfiReport {
  double value = 0.0;
  CfiMode mode = CfiMode::FiniteDifference;
  std::vector<std::string> warnings;
};

/// Classical Fisher information of the number measurement after
/// exp(-i theta J_y). FiniteDifference uses central differences; outcomes with
/// p below options.zero_probability contribute the exact limit
/// 4 |<n|J_y psi(theta0)>|^2. AnalyticAtZero needs theta0 = 0 and real psi.
CfiReport cfi_number(const StateVector& psi_in, double theta0, CfiMode mode,
                     const CfiOptions& options = {});

}  // namespace dwm
