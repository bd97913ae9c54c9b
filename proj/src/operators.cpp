#include "dwm/operators.hpp"

#include <cmath>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

namespace dwm {

namespace {

const cd kHalfOverI{0.0, -0.5};  // 1/(2i)

void require_range(int value, int lo, int hi, const char* what) {
  if (value < lo || value > hi) {
    throw std::out_of_range(std::string(what) + " index " + std::to_string(value) +
                            " outside [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
}

SingleParticleMatrix zero_single(int wells) {
  return SingleParticleMatrix::Zero(2 * wells, 2 * wells);
}

// h += c a_to^dagger a_from + conj(c) a_from^dagger a_to
void add_hermitian_pair(SingleParticleMatrix& h, cd c, ModeId from, ModeId to) {
  h(to.flat(), from.flat()) += c;
  h(from.flat(), to.flat()) += std::conj(c);
}

}  // namespace

std::string to_string(GeneratorKind kind) {
  const std::string i = std::to_string(kind.index);
  switch (kind.tag) {
    case GeneratorTag::JyLocal: return "Jy(" + i + ")";
    case GeneratorTag::JyTotal: return "Jy";
    case GeneratorTag::SxLocal: return "Sx(" + i + ")";
    case GeneratorTag::SxTotal: return "Sx";
    case GeneratorTag::L: return "L(" + i + ")";
    case GeneratorTag::R: return "R(" + i + ")";
    case GeneratorTag::Y: return "Y(" + i + ")";
    case GeneratorTag::SyLocal: return "Sy(" + i + ")";
    case GeneratorTag::SyTotal: return "Sy";
  }
  return "?";
}

void validate(GeneratorKind kind, int wells) {
  if (wells < 1) throw std::invalid_argument("need at least one double well");
  switch (kind.tag) {
    case GeneratorTag::JyLocal:
    case GeneratorTag::SyLocal: require_range(kind.index, 1, wells, "local generator"); break;
    case GeneratorTag::SxLocal: require_range(kind.index, 1, wells - 1, "S_x"); break;
    case GeneratorTag::L: require_range(kind.index, 2, wells, "L"); break;
    case GeneratorTag::R: require_range(kind.index, 2, wells, "R"); break;
    case GeneratorTag::Y: require_range(kind.index, 2, wells - 1, "Y"); break;
    case GeneratorTag::SxTotal:
    case GeneratorTag::SyTotal:
      if (wells < 2) throw std::invalid_argument("no mixing possible with a single double well");
      break;
    case GeneratorTag::JyTotal: break;
  }
}

SingleParticleMatrix jy_single(int wells, int i) {
  validate({GeneratorTag::JyLocal, i}, wells);
  auto h = zero_single(wells);
  add_hermitian_pair(h, kHalfOverI, left(i), right(i));
  return h;
}

SingleParticleMatrix jy_single(int wells) {
  auto h = zero_single(wells);
  for (int i = 1; i <= wells; ++i) h += jy_single(wells, i);
  return h;
}

SingleParticleMatrix sx_single(int wells, int i) {
  validate({GeneratorTag::SxLocal, i}, wells);
  auto h = zero_single(wells);
  add_hermitian_pair(h, 0.5, right(i), left(i + 1));
  return h;
}

SingleParticleMatrix sx_single(int wells, Boundary boundary) {
  if (boundary == Boundary::Periodic) {
    throw std::invalid_argument("periodic boundaries are not supported; mixing chain is open");
  }
  validate({GeneratorTag::SxTotal, 0}, wells);
  auto h = zero_single(wells);
  for (int i = 1; i < wells; ++i) h += sx_single(wells, i);
  return h;
}

Eigen::MatrixXcd mixing_single(int wells, double angle) {
  const Eigen::MatrixXcd k = cd(0.0, -angle) * sx_single(wells);
  return k.exp();
}

SingleParticleMatrix heisenberg_single(const SingleParticleMatrix& h, double angle) {
  const int wells = static_cast<int>(h.rows() / 2);
  const Eigen::MatrixXcd u = mixing_single(wells, angle);
  return u.adjoint() * h * u;
}

SingleParticleMatrix single_particle(GeneratorKind kind, int wells, double angle) {
  validate(kind, wells);
  auto h = zero_single(wells);
  const int i = kind.index;
  switch (kind.tag) {
    case GeneratorTag::JyLocal: return jy_single(wells, i);
    case GeneratorTag::JyTotal: return jy_single(wells);
    case GeneratorTag::SxLocal: return sx_single(wells, i);
    case GeneratorTag::SxTotal: return sx_single(wells);
    case GeneratorTag::L: add_hermitian_pair(h, 0.5, left(i - 1), left(i)); return h;
    case GeneratorTag::R: add_hermitian_pair(h, 0.5, right(i - 1), right(i)); return h;
    case GeneratorTag::Y: add_hermitian_pair(h, kHalfOverI, right(i - 1), left(i + 1)); return h;
    case GeneratorTag::SyLocal:
      if (wells < 2) throw std::invalid_argument("no mixing possible with a single double well");
      return heisenberg_single(jy_single(wells, i), angle);
    case GeneratorTag::SyTotal: return heisenberg_single(jy_single(wells), angle);
  }
  return h;
}

namespace {

SparseOperator assemble_clean(SingleParticleMatrix h, BasisPtr basis) {
  // clear rounding dust left by the matrix exponential
  h = h.unaryExpr([](cd z) {
    return cd(std::abs(z.real()) < 1e-15 ? 0.0 : z.real(),
              std::abs(z.imag()) < 1e-15 ? 0.0 : z.imag());
  });
  return assemble(h, std::move(basis));
}

}  // namespace

SparseOperator build_generator(GeneratorKind kind, BasisPtr basis) {
  if (!basis) throw std::invalid_argument("build_generator: null basis");
  auto h = single_particle(kind, basis->wells());
  return assemble_clean(std::move(h), std::move(basis));
}

SparseOperator jy_local(int i, BasisPtr basis) {
  return build_generator({GeneratorTag::JyLocal, i}, std::move(basis));
}
SparseOperator jy_total(BasisPtr basis) {
  return build_generator({GeneratorTag::JyTotal, 0}, std::move(basis));
}
SparseOperator sx_local(int i, BasisPtr basis) {
  return build_generator({GeneratorTag::SxLocal, i}, std::move(basis));
}
SparseOperator sx_total(BasisPtr basis, Boundary boundary) {
  if (!basis) throw std::invalid_argument("sx_total: null basis");
  auto h = sx_single(basis->wells(), boundary);
  return assemble(h, std::move(basis));
}

SparseOperator lry(int i, Lry kind, BasisPtr basis) {
  const GeneratorTag tag =
      kind == Lry::L ? GeneratorTag::L : kind == Lry::R ? GeneratorTag::R : GeneratorTag::Y;
  return build_generator({tag, i}, std::move(basis));
}

SparseOperator sy_local(int i, BasisPtr basis, double angle) {
  if (!basis) throw std::invalid_argument("sy_local: null basis");
  auto h = single_particle({GeneratorTag::SyLocal, i}, basis->wells(), angle);
  return assemble_clean(std::move(h), std::move(basis));
}

SparseOperator sy_total(BasisPtr basis, double angle) {
  if (!basis) throw std::invalid_argument("sy_total: null basis");
  auto h = single_particle({GeneratorTag::SyTotal, 0}, basis->wells(), angle);
  return assemble_clean(std::move(h), std::move(basis));
}

SpectralPropagator::SpectralPropagator(const SparseOperator& g) {
  if (!g.hermitian()) throw std::invalid_argument("propagator: generator is not Hermitian");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(g.dense());
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
  values_ = solver.eigenvalues();
  vectors_ = solver.eigenvectors();
}

Eigen::VectorXcd SpectralPropagator::apply(double angle, const Eigen::VectorXcd& v) const {
  Eigen::VectorXcd coeffs = vectors_.adjoint() * v;
  for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
    coeffs(k) *= std::exp(cd(0.0, -angle * values_(k)));
  }
  return vectors_ * coeffs;
}

Eigen::MatrixXcd SpectralPropagator::unitary(double angle) const {
  Eigen::VectorXcd phases(values_.size());
  for (Eigen::Index k = 0; k < values_.size(); ++k) {
    phases(k) = std::exp(cd(0.0, -angle * values_(k)));
  }
  return vectors_ * phases.asDiagonal() * vectors_.adjoint();
}

Eigen::VectorXcd chebyshev_apply(const SparseOperator& g, double angle, const Eigen::VectorXcd& v,
                                 double tolerance) {
  const auto& a = g.matrix();
  // Gershgorin bounds on the spectrum
  double lo = 0.0, hi = 0.0;
  bool first = true;
  for (Eigen::Index r = 0; r < a.outerSize(); ++r) {
    double centre = 0.0, radius = 0.0;
    for (SparseOperator::Matrix::InnerIterator it(a, r); it; ++it) {
      if (it.col() == r) centre = it.value().real();
      else radius += std::abs(it.value());
    }
    if (first || centre - radius < lo) lo = centre - radius;
    if (first || centre + radius > hi) hi = centre + radius;
    first = false;
  }
  const double half_width = 0.5 * (hi - lo) + 1e-12;
  const double mid = 0.5 * (hi + lo);
  const double z = angle * half_width;
  const double sign = z < 0 ? -1.0 : 1.0;
  const double az = std::abs(z);

  auto scaled = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
    return (a * x - mid * x) / half_width;
  };
  // exp(-i z x) = J0(z) + 2 sum_k (-i)^k J_k(z) T_k(x)
  Eigen::VectorXcd t_prev = v;
  Eigen::VectorXcd result = std::cyl_bessel_j(0.0, az) * v;
  if (az == 0.0) return std::exp(cd(0.0, -angle * mid)) * v;
  Eigen::VectorXcd t_curr = scaled(v);
  cd phase(0.0, -1.0);
  int small_run = 0;
  for (int k = 1; k < 100000; ++k) {
    const double bessel = std::cyl_bessel_j(static_cast<double>(k), az) * (k % 2 ? sign : 1.0);
    result += 2.0 * phase * bessel * t_curr;
    if (k > az && std::abs(bessel) < tolerance * 1e-3) {
      if (++small_run >= 2) break;
    } else {
      small_run = 0;
    }
    Eigen::VectorXcd t_next = 2.0 * scaled(t_curr) - t_prev;
    t_prev = std::move(t_curr);
    t_curr = std::move(t_next);
    phase *= cd(0.0, -1.0);
  }
  return std::exp(cd(0.0, -angle * mid)) * result;
}

StateVector apply_unitary(const SparseOperator& g, double angle, const StateVector& psi,
                          const UnitaryOptions& options) {
  if (!g.hermitian()) throw std::invalid_argument("apply_unitary: generator is not Hermitian");
  if (!psi.basis || !psi.basis->same_space(g.basis()) || psi.dimension() != g.dimension()) {
    throw std::invalid_argument("apply_unitary: dimension mismatch between generator and state");
  }
  if (angle == 0.0) return psi;
  if (g.dimension() <= options.dense_threshold) {
    return {psi.basis, SpectralPropagator(g).apply(angle, psi.amplitudes)};
  }
  return {psi.basis, chebyshev_apply(g, angle, psi.amplitudes, options.tolerance)};
}

SparseOperator conjugate(const SparseOperator& g, const SparseOperator& h, double angle) {
  if (!g.basis().same_space(h.basis())) {
    throw std::invalid_argument("conjugate: operators live on different bases");
  }
  if (angle == 0.0) return g;
  const Eigen::MatrixXcd u = SpectralPropagator(h).unitary(angle);
  const Eigen::MatrixXcd out = u.adjoint() * g.dense() * u;
  return from_dense(g.basis_ptr(), out, g.hermitian(), 1e-14);
}

StateVector mix(const StateVector& psi, const UnitaryOptions& options) {
  return apply_unitary(sx_total(psi.basis), kMixingAngle, psi, options);
}

}  // namespace dwm
