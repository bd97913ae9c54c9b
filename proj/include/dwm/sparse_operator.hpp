#pragma once

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "dwm/fock_basis.hpp"

namespace dwm {

using cd = std::complex<double>;

/// One term c * a_to^dagger a_from of a one-body operator.
struct HopTerm {
  cd coefficient;
  ModeId from;
  ModeId to;
};

/// Single-particle matrix h of a one-body operator G = sum_{q,p} h(q,p) a_q^dagger a_p,
/// indexed by flat mode number. Conjugating G with a one-body unitary
/// exp(-i t K) maps h to u^dagger h u with u = exp(-i t k).
using SingleParticleMatrix = Eigen::MatrixXcd;

SingleParticleMatrix single_particle_matrix(std::span<const HopTerm> terms, int wells);
std::vector<HopTerm> hop_terms(const SingleParticleMatrix& h, double drop_below = 0.0);

/// Many-body operator over a FockBasis, stored row-major and compressed.
/// Entries are unique and sorted by (row, col); the object is immutable.
class SparseOperator {
 public:
  using Matrix = Eigen::SparseMatrix<cd, Eigen::RowMajor>;

  struct Entry {
    std::size_t row;
    std::size_t col;
    cd value;
  };

  SparseOperator(BasisPtr basis, Matrix matrix, bool hermitian);

  const FockBasis& basis() const { return *basis_; }
  const BasisPtr& basis_ptr() const { return basis_; }
  const Matrix& matrix() const { return matrix_; }
  bool hermitian() const { return hermitian_; }
  std::size_t dimension() const { return basis_->size(); }
  std::size_t nonzeros() const { return static_cast<std::size_t>(matrix_.nonZeros()); }

  std::vector<Entry> entries() const;
  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const { return matrix_ * v; }

  friend SparseOperator operator+(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator-(const SparseOperator& a, const SparseOperator& b);
  friend SparseOperator operator*(cd scale, const SparseOperator& a);
  friend SparseOperator operator*(const SparseOperator& a, const SparseOperator& b);

 private:
  BasisPtr basis_;
  Matrix matrix_;
  bool hermitian_;
};

/// Builds sum_t c_t a_to^dagger a_from over `basis`. The Hermitian flag is set
/// when the term list is closed under conjugation.
SparseOperator assemble(std::span<const HopTerm> terms, BasisPtr basis);
SparseOperator assemble(const SingleParticleMatrix& h, BasisPtr basis);

SparseOperator zero_operator(BasisPtr basis);
SparseOperator number_operator(BasisPtr basis);
SparseOperator commutator(const SparseOperator& a, const SparseOperator& b);

double max_abs(const SparseOperator& a);
double max_abs_difference(const SparseOperator& a, const SparseOperator& b);
bool is_conjugate_symmetric(const SparseOperator& a, double tol = 1e-14);

/// Re-sparsifies a dense matrix, dropping entries with magnitude below `drop_below`.
SparseOperator from_dense(BasisPtr basis, const Eigen::MatrixXcd& dense, bool hermitian,
                          double drop_below = 1e-14);

/// Dense complex matrix with a checked Hermiticity flag.
struct DenseHermitian {
  Eigen::MatrixXcd matrix;
  bool hermitian = false;

  std::ptrdiff_t dimension() const { return matrix.rows(); }

  /// Flags the matrix Hermitian when max|A - A^dagger| < tol.
  static DenseHermitian checked(Eigen::MatrixXcd m, double tol = 1e-12);
};

template <typename Derived>
double hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace dwm
