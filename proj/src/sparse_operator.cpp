#include "dwm/sparse_operator.hpp"

#include <stdexcept>

namespace dwm {

namespace {

void check_same_basis(const SparseOperator& a, const SparseOperator& b, const char* what) {
  if (!a.basis().same_space(b.basis())) {
    throw std::invalid_argument(std::string(what) + ": operators live on different bases");
  }
}

}  // namespace

SingleParticleMatrix single_particle_matrix(std::span<const HopTerm> terms, int wells) {
  SingleParticleMatrix h = SingleParticleMatrix::Zero(2 * wells, 2 * wells);
  for (const auto& t : terms) {
    if (t.from.well < 1 || t.from.well > wells || t.to.well < 1 || t.to.well > wells) {
      throw std::out_of_range("hop term references well outside [1, " + std::to_string(wells) +
                              "]: " + to_string(t.from) + " -> " + to_string(t.to));
    }
    h(t.to.flat(), t.from.flat()) += t.coefficient;
  }
  return h;
}

std::vector<HopTerm> hop_terms(const SingleParticleMatrix& h, double drop_below) {
  std::vector<HopTerm> terms;
  for (Eigen::Index p = 0; p < h.cols(); ++p) {
    for (Eigen::Index q = 0; q < h.rows(); ++q) {
      if (std::abs(h(q, p)) > drop_below) {
        terms.push_back({h(q, p), ModeId::from_flat(static_cast<int>(p)),
                         ModeId::from_flat(static_cast<int>(q))});
      }
    }
  }
  return terms;
}

SparseOperator::SparseOperator(BasisPtr basis, Matrix matrix, bool hermitian)
    : basis_(std::move(basis)), matrix_(std::move(matrix)), hermitian_(hermitian) {
  if (!basis_) throw std::invalid_argument("SparseOperator: null basis");
  const auto d = static_cast<Eigen::Index>(basis_->size());
  if (matrix_.rows() != d || matrix_.cols() != d) {
    throw std::invalid_argument("SparseOperator: matrix does not match basis dimension");
  }
  matrix_.makeCompressed();
}

std::vector<SparseOperator::Entry> SparseOperator::entries() const {
  std::vector<Entry> out;
  out.reserve(nonzeros());
  for (Eigen::Index r = 0; r < matrix_.outerSize(); ++r) {
    for (Matrix::InnerIterator it(matrix_, r); it; ++it) {
      out.push_back({static_cast<std::size_t>(it.row()), static_cast<std::size_t>(it.col()),
                     it.value()});
    }
  }
  return out;
}

SparseOperator operator+(const SparseOperator& a, const SparseOperator& b) {
  check_same_basis(a, b, "operator+");
  return {a.basis_, SparseOperator::Matrix(a.matrix_ + b.matrix_), a.hermitian_ && b.hermitian_};
}

SparseOperator operator-(const SparseOperator& a, const SparseOperator& b) {
  check_same_basis(a, b, "operator-");
  return {a.basis_, SparseOperator::Matrix(a.matrix_ - b.matrix_), a.hermitian_ && b.hermitian_};
}

SparseOperator operator*(cd scale, const SparseOperator& a) {
  return {a.basis_, SparseOperator::Matrix(scale * a.matrix_),
          a.hermitian_ && scale.imag() == 0.0};
}

SparseOperator operator*(const SparseOperator& a, const SparseOperator& b) {
  check_same_basis(a, b, "operator*");
  return {a.basis_, SparseOperator::Matrix(a.matrix_ * b.matrix_), false};
}

SparseOperator assemble(std::span<const HopTerm> terms, BasisPtr basis) {
  if (!basis) throw std::invalid_argument("assemble: null basis");
  const auto h = single_particle_matrix(terms, basis->wells());
  const bool hermitian = terms.empty() || hermiticity_defect(h) < 1e-14;

  std::vector<Eigen::Triplet<cd>> triplets;
  triplets.reserve(basis->size() * terms.size());
  for (std::size_t col = 0; col < basis->size(); ++col) {
    const auto occ = basis->state(col);
    for (const auto& t : terms) {
      auto image = hop(occ, t.from, t.to);
      if (!image) continue;
      const auto row = basis->rank(image->occupation);
      triplets.emplace_back(static_cast<int>(row), static_cast<int>(col),
                            t.coefficient * image->amplitude);
    }
  }
  const auto d = static_cast<Eigen::Index>(basis->size());
  SparseOperator::Matrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.prune(cd(0.0, 0.0), 0.0);
  return {std::move(basis), std::move(m), hermitian};
}

SparseOperator assemble(const SingleParticleMatrix& h, BasisPtr basis) {
  if (!basis) throw std::invalid_argument("assemble: null basis");
  if (h.rows() != basis->modes() || h.cols() != basis->modes()) {
    throw std::invalid_argument("assemble: single-particle matrix size does not match basis");
  }
  const auto terms = hop_terms(h);
  auto op = assemble(std::span<const HopTerm>(terms), basis);
  return op;
}

SparseOperator zero_operator(BasisPtr basis) {
  const auto d = static_cast<Eigen::Index>(basis->size());
  return {std::move(basis), SparseOperator::Matrix(d, d), true};
}

SparseOperator number_operator(BasisPtr basis) {
  std::vector<HopTerm> terms;
  for (int k = 0; k < basis->modes(); ++k) {
    terms.push_back({1.0, ModeId::from_flat(k), ModeId::from_flat(k)});
  }
  return assemble(std::span<const HopTerm>(terms), std::move(basis));
}

SparseOperator commutator(const SparseOperator& a, const SparseOperator& b) {
  check_same_basis(a, b, "commutator");
  SparseOperator::Matrix c = a.matrix() * b.matrix() - b.matrix() * a.matrix();
  c.prune(cd(0.0, 0.0), 0.0);
  return {a.basis_ptr(), std::move(c), false};
}

double max_abs(const SparseOperator& a) {
  double m = 0.0;
  for (Eigen::Index k = 0; k < a.matrix().nonZeros(); ++k) {
    m = std::max(m, std::abs(a.matrix().valuePtr()[k]));
  }
  return m;
}

double max_abs_difference(const SparseOperator& a, const SparseOperator& b) {
  return max_abs(a - b);
}

bool is_conjugate_symmetric(const SparseOperator& a, double tol) {
  SparseOperator::Matrix adj = a.matrix().adjoint();
  SparseOperator::Matrix diff = a.matrix() - adj;
  for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) {
    if (std::abs(diff.valuePtr()[k]) > tol) return false;
  }
  return true;
}

SparseOperator from_dense(BasisPtr basis, const Eigen::MatrixXcd& dense, bool hermitian,
                          double drop_below) {
  const auto d = static_cast<Eigen::Index>(basis->size());
  if (dense.rows() != d || dense.cols() != d) {
    throw std::invalid_argument("from_dense: matrix does not match basis dimension");
  }
  std::vector<Eigen::Triplet<cd>> triplets;
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = 0; c < d; ++c) {
      if (std::abs(dense(r, c)) >= drop_below) triplets.emplace_back(r, c, dense(r, c));
    }
  }
  SparseOperator::Matrix m(d, d);
  m.setFromTriplets(triplets.begin(), triplets.end());
  return {std::move(basis), std::move(m), hermitian};
}

DenseHermitian DenseHermitian::checked(Eigen::MatrixXcd m, double tol) {
  if (m.rows() != m.cols()) throw std::invalid_argument("DenseHermitian: matrix is not square");
  const bool herm = m.size() == 0 || hermiticity_defect(m) < tol;
  return {std::move(m), herm};
}

}  // namespace dwm
