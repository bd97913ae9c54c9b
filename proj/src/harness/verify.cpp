#include "dwm/harness/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>

#include "dwm/combinatorics.hpp"
#include "dwm/fisher.hpp"
#include "dwm/formulas.hpp"
#include "dwm/harness/scenario.hpp"
#include "dwm/operators.hpp"
#include "dwm/states.hpp"

namespace dwm::harness {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
constexpr double kPi = std::numbers::pi;

class Recorder {
 public:
  Recorder(std::string suite, std::vector<Check>& out, std::size_t cap)
      : suite_(std::move(suite)), out_(out), cap_(cap) {}

  void add(const std::string& name, double deviation, double tolerance) {
    out_.push_back({suite_, name, deviation, tolerance,
                    std::isfinite(deviation) && deviation <= tolerance});
  }

  BasisPtr basis(int M, int n) const { return build_basis(M, M * n, BasisLimits{cap_}); }

 private:
  std::string suite_;
  std::vector<Check>& out_;
  std::size_t cap_;
};

std::string label(const char* what, int M, int n) {
  return std::string(what) + " (M=" + std::to_string(M) + ",n=" + std::to_string(n) + ")";
}

StateVector random_state(const BasisPtr& basis, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  VectorXcd v(static_cast<Eigen::Index>(basis->size()));
  for (auto& x : v) x = cd(normal(rng), normal(rng));
  return {basis, v / v.norm()};
}

StateVector product(const BasisPtr& basis, const DwPureSpec& spec) {
  const std::vector<DwPureSpec> specs(static_cast<std::size_t>(basis->wells()), spec);
  return product_state(std::span<const DwPureSpec>(specs), basis);
}

double relative(double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); }

void operators_suite(Recorder& r) {
  // Local interferometer generators commute.
  for (auto [M, n] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const auto basis = r.basis(M, n);
    double worst = 0.0;
    for (int i = 1; i <= M; ++i) {
      for (int j = 1; j <= M; ++j) {
        worst = std::max(worst, max_abs(commutator(jy_local(i, basis), jy_local(j, basis))));
      }
    }
    r.add(label("[Jy(i), Jy(j)] = 0", M, n), worst, 0.0);
  }

  // Every generator conserves the total number.
  {
    const auto basis = r.basis(3, 2);
    const auto N = number_operator(basis);
    double worst = 0.0;
    for (const auto& g : {jy_total(basis), sx_total(basis), sy_total(basis), lry(2, Lry::L, basis),
                          lry(3, Lry::R, basis), lry(2, Lry::Y, basis), sx_local(1, basis)}) {
      worst = std::max(worst, max_abs(commutator(g, N)));
    }
    r.add("generators commute with total number (M=3,N=6)", worst, 0.0);
  }

  // Heisenberg-picture identities on (M=3, N=2).
  {
    const auto basis = build_basis(3, 2);
    const auto sx = sx_total(basis);
    const double s = 1.0 / std::numbers::sqrt2;
    auto L = [&](int i) { return lry(i, Lry::L, basis); };
    auto R = [&](int i) { return lry(i, Lry::R, basis); };
    auto Y = [&](int i) { return lry(i, Lry::Y, basis); };
    auto J = [&](int i) { return jy_local(i, basis); };
    const auto fwd = [&](int i) { return conjugate(J(i), sx, kMixingAngle); };
    const auto rev = [&](int i) { return conjugate(J(i), sx, -kMixingAngle); };
    r.add("S_y(2) = (J + Y + R - L)/2, reverse sense (M=3,N=2)",
          max_abs_difference(rev(2), cd(0.5) * (J(2) + Y(2) + R(2) - L(3))), 1e-12);
    r.add("S_y(1) = (J - L)/sqrt2, reverse sense (M=3,N=2)",
          max_abs_difference(rev(1), cd(s) * (J(1) - L(2))), 1e-12);
    r.add("S_y(3) = (J + R)/sqrt2, reverse sense (M=3,N=2)",
          max_abs_difference(rev(3), cd(s) * (J(3) + R(3))), 1e-12);
    r.add("S_y(2) = (J - R + L + Y)/2, forward sense (M=3,N=2)",
          max_abs_difference(fwd(2), cd(0.5) * (J(2) - R(2) + L(3) + Y(2))), 1e-12);
    r.add("S_y(1) = (J + L)/sqrt2, forward sense (M=3,N=2)",
          max_abs_difference(fwd(1), cd(s) * (J(1) + L(2))), 1e-12);
    r.add("S_y(3) = (J - R)/sqrt2, forward sense (M=3,N=2)",
          max_abs_difference(fwd(3), cd(s) * (J(3) - R(3))), 1e-12);
    double worst = 0.0;
    for (int i = 1; i <= 3; ++i) worst = std::max(worst, max_abs_difference(fwd(i), sy_local(i, basis)));
    r.add("single-particle S_y(i) = dense conjugation (M=3,N=2)", worst, 1e-12);
  }

  // 50:50 beam splitter on the pairs (r_i, l_{i+1}).
  for (int M : {2, 3, 4}) {
    MatrixXcd expected = MatrixXcd::Identity(2 * M, 2 * M);
    const cd a(1.0 / std::numbers::sqrt2, 0.0), b(0.0, -1.0 / std::numbers::sqrt2);
    for (int i = 1; i < M; ++i) {
      const int r_i = right(i).flat(), l_next = left(i + 1).flat();
      expected(r_i, r_i) = a;
      expected(l_next, l_next) = a;
      expected(r_i, l_next) = b;
      expected(l_next, r_i) = b;
    }
    r.add("single-particle beam splitter matrix (M=" + std::to_string(M) + ")",
          (mixing_single(M) - expected).cwiseAbs().maxCoeff(), 1e-14);
  }
  {
    const auto basis = build_basis(2, 1);
    StateVector psi{basis, VectorXcd::Zero(4)};
    psi.amplitudes(basis->rank(Occupation{0, 1, 0, 0})) = 1.0;
    const auto out = mix(psi);
    VectorXcd expected = VectorXcd::Zero(4);
    expected(basis->rank(Occupation{0, 1, 0, 0})) = 1.0 / std::numbers::sqrt2;
    expected(basis->rank(Occupation{0, 0, 1, 0})) = cd(0.0, -1.0 / std::numbers::sqrt2);
    r.add("one boson in r1 -> (|r1> - i|l2>)/sqrt2 (M=2,N=1)",
          (out.amplitudes - expected).cwiseAbs().maxCoeff(), 1e-12);
  }

  // Schrodinger and Heisenberg pictures give the same variance.
  for (auto [M, n] : {std::pair{2, 2}, std::pair{3, 2}}) {
    const auto basis = r.basis(M, n);
    const auto jy = jy_total(basis);
    const auto sy = sy_total(basis);
    double worst = 0.0;
    for (const auto& psi : {random_state(basis, 11), random_state(basis, 12),
                            product(basis, DwPureSpec::css(n, kPi / 2, 0.0)),
                            product(basis, DwPureSpec::oat(n, 0.3))}) {
      worst = std::max(worst, std::abs(4.0 * variance(mix(psi), jy) - 4.0 * variance(psi, sy)));
    }
    r.add(label("4 Var_J(mixed psi) = 4 Var_Sy(psi)", M, n), worst, 1e-10);
  }

  // Unitaries preserve inner products; Chebyshev agrees with the dense route.
  {
    const auto basis = r.basis(3, 2);
    const auto phi = random_state(basis, 21), psi = random_state(basis, 22);
    const auto sx = sx_total(basis);
    const auto uphi = apply_unitary(sx, 0.7, phi), upsi = apply_unitary(sx, 0.7, psi);
    r.add("|<U phi, U psi> - <phi, psi>| (M=3,N=6)",
          std::abs(uphi.amplitudes.dot(upsi.amplitudes) - phi.amplitudes.dot(psi.amplitudes)), 1e-12);
    const auto half = apply_unitary(sx, 0.35, apply_unitary(sx, 0.35, psi));
    r.add("U(t/2) U(t/2) = U(t) (M=3,N=6)", (half.amplitudes - upsi.amplitudes).cwiseAbs().maxCoeff(),
          1e-12);
    r.add("Chebyshev = dense propagation (M=3,N=6)",
          (chebyshev_apply(sx, 0.7, psi.amplitudes) - upsi.amplitudes).cwiseAbs().maxCoeff(), 1e-10);
  }

  // Hermitian-flagged generators are conjugate symmetric.
  {
    const auto basis = r.basis(3, 2);
    double worst = 0.0;
    for (const auto& g : {jy_total(basis), sx_total(basis), sy_total(basis), lry(2, Lry::Y, basis)}) {
      const auto m = g.dense();
      worst = std::max(worst, g.hermitian() ? hermiticity_defect(m) : 1.0);
    }
    r.add("Hermitian generators are conjugate symmetric (M=3,N=6)", worst, 1e-14);
  }
}

void fisher_suite(Recorder& r) {
  // Pure states: variance, spectral and zero-split routes agree.
  {
    const auto basis = r.basis(2, 2);
    const auto sy = sy_total(basis);
    double worst = 0.0;
    for (const auto& psi : {product(basis, DwPureSpec::fock(2)), product(basis, DwPureSpec::css(2, kPi / 2, 0.0)),
                            product(basis, DwPureSpec::oat(2, 0.3)), random_state(basis, 31)}) {
      const double pure = qfi_pure(psi, sy).value;
      const auto rho = DenseHermitian::checked(psi.amplitudes * psi.amplitudes.adjoint());
      worst = std::max({worst, std::abs(qfi_spectral(rho, sy).value - pure),
                        std::abs(qfi_zero_split(rho, sy).value - pure)});
    }
    r.add("PureVariance = Spectral = ZeroSplit on projectors (M=2,n=2)", worst, 1e-10);
  }

  // DiagonalProduct against the materialized spectral route.
  for (auto [M, n] : {std::pair{2, 1}, std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 4}, std::pair{3, 4}}) {
    const auto basis = r.basis(M, n);
    const auto sy = sy_total(basis);
    const auto jy = jy_total(basis);
    double worst = 0.0;
    for (double sigma : {0.3, 1.0, 2.5, -1.0}) {
      const auto state = DiagonalProductState::identical(gaussian_weights(n, sigma < 0 ? 1.0 : sigma, sigma < 0), M);
      const auto rho = materialize_density(state, basis);
      worst = std::max({worst, std::abs(qfi_diagonal_product(state, true).value - qfi_spectral(rho, sy).value),
                        std::abs(qfi_diagonal_product(state, false).value - qfi_spectral(rho, jy).value)});
    }
    r.add(label("DiagonalProduct = Spectral", M, n), worst, 1e-8);
  }
  {
    const auto basis = r.basis(2, 2);
    const auto sy = sy_total(basis);
    const auto state = DiagonalProductState::identical(gaussian_weights(2, 1.0), 2);
    const auto rho = materialize_density(state, basis);
    const auto dense = DenseHermitian::checked(rho.dense());
    const double spectral = qfi_spectral(dense, sy).value;
    r.add("Spectral = ZeroSplit = DiagonalProduct, Gaussian sigma=1 (M=2,n=2)",
          std::max({std::abs(qfi_zero_split(dense, sy).value - spectral),
                    std::abs(qfi_spectral(rho, sy).value - spectral),
                    std::abs(qfi_diagonal_product(state, true).value - spectral)}),
          1e-8);
  }

  // Fast product route against brute force.
  for (auto [M, n] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    const auto basis = r.basis(M, n);
    const auto sy = sy_total(basis);
    double worst = 0.0;
    for (const auto& spec : {DwPureSpec::fock(n), DwPureSpec::fock(n, 1), DwPureSpec::css(n, kPi / 2, 0.0),
                             DwPureSpec::css(n, 1.1, 0.4), DwPureSpec::oat(n, 0.3), DwPureSpec::noon(n)}) {
      const std::vector<VectorXcd> wells(static_cast<std::size_t>(M), well_amplitudes(spec));
      const double fast = qfi_product_pure_fast(std::span<const VectorXcd>(wells), M, n, true).value;
      worst = std::max(worst, std::abs(fast - qfi_pure(product(basis, spec), sy).value));
    }
    r.add(label("FastProduct = brute force", M, n), worst, 1e-8);
  }

  // QFI is invariant under the interferometer itself.
  {
    const auto basis = r.basis(2, 1);
    const auto jy = jy_total(basis);
    const SpectralPropagator prop(jy);
    const auto rho = materialize_density(
        DiagonalProductState::identical(gaussian_weights(1, 0.8), 2), basis);
    // A coherent admixture makes the test nontrivial for J_y.
    const auto psi = product(basis, DwPureSpec::css(1, 1.0, 0.2));
    const MatrixXcd base = 0.5 * rho.dense() + 0.5 * psi.amplitudes * psi.amplitudes.adjoint();
    double lo = 1e300, hi = -1e300;
    for (int k = 0; k <= 8; ++k) {
      const MatrixXcd u = prop.unitary(kPi * k / 8);
      const double q = qfi_spectral(DenseHermitian::checked(u * base * u.adjoint()), jy).value;
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    r.add("QFI invariant under exp(-i theta J_y) (M=2,n=1)", hi - lo, 1e-9);
  }

  // Degenerate spectra: tiny perturbations leave the QFI in place.
  {
    const auto basis = r.basis(2, 2);
    const auto sy = sy_total(basis);
    const auto rho = materialize_density(
        DiagonalProductState::identical(gaussian_weights(2, 1.0, true), 2), basis);
    const MatrixXcd base = rho.dense();
    MatrixXcd bumped = base;
    for (Eigen::Index i = 0; i < bumped.rows(); ++i) {
      if (std::abs(bumped(i, i)) > 0) bumped(i, i) += 5e-14 * ((i % 3) - 1.0);
    }
    r.add("degenerate spectrum perturbed by 5e-14 (M=2,n=2)",
          std::abs(qfi_spectral(DenseHermitian::checked(bumped), sy).value -
                   qfi_spectral(DenseHermitian::checked(base), sy).value),
          1e-8);
  }

  // Number measurement is optimal for real states; CFI never exceeds QFI.
  {
    const auto basis = r.basis(2, 2);
    const auto jy = jy_total(basis);
    const auto sy = sy_total(basis);
    double worst = 0.0;
    for (const auto& psi : {product(basis, DwPureSpec::fock(2)), product(basis, DwPureSpec::css(2, kPi / 2, 0.0)),
                            product(basis, DwPureSpec::noon(2)), noon_global(2, 2, basis)}) {
      const double cfi = cfi_number(psi, 0.0, CfiMode::AnalyticAtZero).value;
      worst = std::max(worst, relative(cfi, qfi_pure(psi, jy).value));
    }
    for (const auto& spec : {DwPureSpec::fock(2), DwPureSpec::css(2, kPi / 2, 0.0)}) {
      const auto psi = product(basis, spec);
      const double cfi = cfi_number(mix(psi), 0.0, CfiMode::FiniteDifference).value;
      worst = std::max(worst, relative(cfi, qfi_pure(psi, sy).value));
    }
    r.add("CFI(theta=0) = QFI for real and mixed real inputs (M=2,n=2)", worst, 1e-8);
    double excess = 0.0;
    const auto oat = product(basis, DwPureSpec::oat(2, 0.3));
    for (double theta : {0.0, 0.4, 1.3}) {
      const double cfi = cfi_number(mix(oat), theta, CfiMode::FiniteDifference).value;
      excess = std::max(excess, cfi - qfi_pure(oat, sy).value);
    }
    r.add("CFI <= QFI for mixed OAT input (M=2,n=2)", std::max(0.0, excess), 1e-8);
  }

  // Decomposition bookkeeping.
  {
    double i1 = 0.0, split = 0.0;
    for (auto [M, n] : {std::pair{2, 2}, std::pair{3, 4}, std::pair{10, 20}}) {
      const auto uniform = qfi_diagonal_product(DiagonalProductState::identical(gaussian_weights(n, 1.0, true), M), true);
      i1 = std::max(i1, std::abs(uniform.parts->i1));
      const auto g = qfi_diagonal_product(DiagonalProductState::identical(gaussian_weights(n, 1.3), M), true);
      split = std::max(split, std::abs(g.parts->sum() - g.value));
    }
    r.add("I1 = 0 for uniform weights", i1, 1e-12);
    r.add("value = I1 + I2 + I3", split, 1e-10);
  }
}

void formulas_suite(Recorder& r) {
  for (auto [M, n] : {std::pair{2, 2}, std::pair{3, 2}, std::pair{2, 3}}) {
    const auto basis = r.basis(M, n);
    const double exact = qfi_pure(product(basis, DwPureSpec::fock(n)), sy_total(basis)).value;
    r.add(label("Fock load: brute force = M(n^2+2n)/2", M, n), std::abs(exact - qfi_fock_css(M, n)), 1e-8);
  }
  {
    const auto basis = r.basis(2, 2);
    const double exact = qfi_pure(product(basis, DwPureSpec::css(2, kPi / 2, 0.0)), sy_total(basis)).value;
    r.add("symmetric CSS: brute force = closed form 4.17157288 (M=2,n=2)", std::abs(exact - 4.17157288), 1e-7);
  }
  {
    double worst = 0.0;
    for (int M = 1; M <= 20; ++M) {
      for (int n = 1; n <= 200; ++n) {
        const auto q = qfi_symmetric_css(M, n);
        worst = std::max(worst, std::abs(q.value - q.expanded) / std::abs(q.value));
      }
    }
    r.add("symmetric CSS: factored = expanded form, M<=20, n<=200 (relative)", worst, 1e-9);
  }
  {
    double worst = 0.0;
    for (int M = 2; M <= 20; ++M) {
      for (int n = 2; n <= 60; ++n) {
        worst = std::max(worst, relative(oat_qfi(M, n, 0.0), qfi_symmetric_css(M, n).value));
      }
    }
    r.add("oat_qfi(alpha=0) = symmetric CSS closed form (relative)", worst, 1e-9);
  }
  {
    const auto gate = oat_convention_gate({{3, 2}}, 21, 1e-8);
    r.add("OAT closed form = brute force, 21 points (M=3,n=2)",
          std::min(gate.deviation_state_consistent, gate.deviation_printed), 1e-8);
  }
  {
    double worst = 0.0;
    for (int k = 0; k <= 20; ++k) {
      if (k % 10 == 0) continue;  // alpha in {0, pi/2, pi}
      worst = std::max(worst, std::abs(oat_qfi(10, 100, kPi * k / 20) / 50000.0 - 1.0));
    }
    r.add("OAT plateau within 5% of 50000 away from alpha in {0, pi/2, pi} (M=10,n=100)", worst, 0.05);
  }
  {
    double worst = 0.0;
    for (int k = 0; k <= 20; ++k) {
      const double a = kPi * k / 20;
      worst = std::max(worst, std::abs(oat_qfi(4, 7, a) - oat_qfi(4, 7, a + 2 * kPi)));
    }
    r.add("oat_qfi periodic in alpha with period 2 pi", worst, 1e-9);
  }
  {
    double delta = 0.0, uniform = 0.0;
    for (auto [M, n] : {std::pair{2, 2}, std::pair{3, 4}, std::pair{10, 20}}) {
      const auto narrow = DiagonalProductState::identical(gaussian_weights(n, 1e-6), M);
      const auto flat = DiagonalProductState::identical(gaussian_weights(n, 1.0, true), M);
      delta = std::max(delta, relative(qfi_diagonal_product(narrow, true).value, qfi_fock_css(M, n)));
      uniform = std::max(uniform, std::abs(qfi_diagonal_product(flat, true).value - sigma_inf_qfi(M, n)));
    }
    r.add("DiagonalProduct sigma=1e-6 = Fock closed form (relative)", delta, 1e-6);
    r.add("DiagonalProduct uniform = (n^2+2n)(3M-2)/8", uniform, 1e-10);
    r.add("sigma_inf_qfi(10,20) = 1540", std::abs(sigma_inf_qfi(10, 20) - 1540.0), 0.0);
    r.add("sigma_inf_qfi(10,20) within 10% of 3Mn^2/8",
          std::abs(sigma_inf_qfi(10, 20) / (3.0 * 10 * 400 / 8) - 1.0), 0.1);
  }
  {
    std::uint64_t mismatches = 0;
    for (int n = 0; n <= 300; ++n) mismatches += hop_weight_sum(n) != hop_weight_sum_closed(n);
    r.add("hop weight sum = (n^3+3n^2+2n)/3 exactly, n<=300", double(mismatches), 0.0);
  }
  {
    double violations = 0.0;
    for (int M = 1; M <= 12; ++M) {
      for (int n = 1; n <= 60; ++n) {
        const auto b = bounds(M, n);
        violations += !(b.sql <= b.hl_local && b.hl_local <= b.hl_global);
        violations += !(b.sql <= qfi_fock_css(M, n));
        violations += !(sigma_inf_qfi(M, n) < qfi_fock_css(M, n));
        if (n >= 2) violations += !(qfi_symmetric_css(M, n).value <= qfi_fock_css(M, n));
      }
    }
    r.add("bound ordering sql <= fock_css, sigma_inf < fock_css, css <= fock_css", violations, 0.0);
  }
}

}  // namespace

std::size_t VerifyReport::failures() const {
  return static_cast<std::size_t>(
      std::count_if(checks.begin(), checks.end(), [](const Check& c) { return !c.passed; }));
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"operators", "fisher-cross", "formulas-vs-oracle", "all"};
  return names;
}

VerifyReport verify(const std::string& suite, std::size_t cap) {
  const std::vector<std::pair<std::string, std::function<void(Recorder&)>>> suites{
      {"operators", operators_suite}, {"fisher-cross", fisher_suite}, {"formulas-vs-oracle", formulas_suite}};
  if (std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end()) {
    throw UsageError("unknown verify suite '" + suite +
                     "' (expected operators, fisher-cross, formulas-vs-oracle or all)");
  }
  VerifyReport report;
  const auto start = std::chrono::steady_clock::now();
  for (const auto& [name, body] : suites) {
    if (suite != "all" && suite != name) continue;
    Recorder recorder(name, report.checks, cap);
    body(recorder);
  }
  report.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

void print_report(std::ostream& out, const VerifyReport& report) {
  char buf[64];
  for (const auto& c : report.checks) {
    std::snprintf(buf, sizeof buf, "deviation=%.3e tol=%.1e", c.deviation, c.tolerance);
    out << (c.passed ? "PASS " : "FAIL ") << '[' << c.suite << "] " << c.name << "  " << buf << '\n';
  }
  std::snprintf(buf, sizeof buf, "%.2f", report.seconds);
  out << report.checks.size() - report.failures() << " passed, " << report.failures() << " failed in "
      << buf << " s\n";
}

}  // namespace dwm::harness
