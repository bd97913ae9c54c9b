#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dwm/fisher.hpp"
#include "dwm/formulas.hpp"

using namespace dwm;

namespace {

constexpr double kPi = std::numbers::pi;

StateVector product(const BasisPtr& basis, const DwPureSpec& spec) {
  const std::vector<DwPureSpec> specs(static_cast<std::size_t>(basis->wells()), spec);
  return product_state(std::span<const DwPureSpec>(specs), basis);
}

DenseHermitian projector(const StateVector& psi) {
  return DenseHermitian::checked(psi.amplitudes * psi.amplitudes.adjoint());
}

double fast(int M, int n, const DwPureSpec& spec, bool mixing = true) {
  const std::vector<Eigen::VectorXcd> wells(static_cast<std::size_t>(M), well_amplitudes(spec));
  return qfi_product_pure_fast(std::span<const Eigen::VectorXcd>(wells), M, n, mixing).value;
}

DiagonalProductState delta_load(int M, int n) {
  DwDiagonalSpec delta{Eigen::VectorXd::Zero(n + 1)};
  delta.weights(0) = 1.0;
  return DiagonalProductState::identical(delta, M);
}

}  // namespace

TEST_CASE("pure-state QFI of reference inputs") {
  SUBCASE("Fock load without mixing is additive") {
    const auto basis = build_basis(3, 6);
    const auto r = qfi_pure(product(basis, DwPureSpec::fock(2)), jy_total(basis));
    CHECK(r.value == doctest::Approx(6.0).epsilon(1e-13));
    CHECK(r.method == QfiMethod::PureVariance);
  }
  SUBCASE("Fock load with mixing") {
    const auto basis = build_basis(2, 4);
    CHECK(qfi_pure(product(basis, DwPureSpec::fock(2)), sy_total(basis)).value == doctest::Approx(8.0).epsilon(1e-13));
  }
  SUBCASE("local NOON product") {
    const auto basis = build_basis(2, 4);
    CHECK(qfi_pure(product(basis, DwPureSpec::noon(2)), jy_total(basis)).value == doctest::Approx(8.0).epsilon(1e-13));
  }
  SUBCASE("symmetric CSS with mixing, two wells of two") {
    // Exact value from the full 35-dimensional space; see the README on the
    // closed-form discrepancy.
    const auto basis = build_basis(2, 4);
    CHECK(qfi_pure(product(basis, DwPureSpec::css(2, kPi / 2, 0.0)), sy_total(basis)).value ==
          doctest::Approx(4.0).epsilon(1e-13));
  }
  SUBCASE("generator must live on the state's basis") {
    const auto basis = build_basis(2, 4);
    CHECK_THROWS_AS(qfi_pure(product(basis, DwPureSpec::fock(2)), jy_total(build_basis(2, 3))), std::invalid_argument);
  }
}

TEST_CASE("spectral QFI") {
  const auto basis = build_basis(2, 4);
  const auto sy = sy_total(basis);
  SUBCASE("pure projector matches the variance route") {
    for (const auto& spec : {DwPureSpec::fock(2), DwPureSpec::css(2, 1.0, 0.5), DwPureSpec::oat(2, 0.9)}) {
      const auto psi = product(basis, spec);
      CHECK(std::abs(qfi_spectral(projector(psi), sy).value - qfi_pure(psi, sy).value) < 1e-10);
    }
  }
  SUBCASE("maximally mixed state carries no information") {
    const auto d = static_cast<Eigen::Index>(basis->size());
    const auto rho = DenseHermitian::checked(Eigen::MatrixXcd::Identity(d, d) / double(d));
    CHECK(std::abs(qfi_spectral(rho, sy).value) < 1e-12);
    CHECK(std::abs(qfi_zero_split(rho, sy).value) < 1e-12);
  }
  SUBCASE("uniform number fluctuations") {
    const auto rho = materialize_density(DiagonalProductState::identical(gaussian_weights(2, 1.0, true), 2), basis);
    CHECK(qfi_spectral(rho, sy).value == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(qfi_spectral(DenseHermitian::checked(rho.dense()), sy).value == doctest::Approx(4.0).epsilon(1e-12));
  }
  SUBCASE("rejections") {
    Eigen::MatrixXcd bad = Eigen::MatrixXcd::Zero(35, 35);
    bad(0, 0) = 1.5;
    bad(1, 1) = -0.5;
    CHECK_THROWS_AS(qfi_spectral(DenseHermitian::checked(bad), sy), std::invalid_argument);
    bad(0, 1) = 1.0;
    CHECK_THROWS_AS(qfi_spectral(DenseHermitian::checked(bad), sy), std::invalid_argument);
  }
}

TEST_CASE("zero-split decomposition") {
  SUBCASE("pure states have no support term") {
    const auto basis = build_basis(2, 4);
    const auto sy = sy_total(basis);
    const auto psi = product(basis, DwPureSpec::css(2, 0.8, 0.1));
    const auto r = qfi_zero_split(projector(psi), sy);
    REQUIRE(r.parts);
    CHECK(std::abs(r.parts->i1) < 1e-12);
    CHECK(std::abs(r.value - qfi_pure(psi, sy).value) < 1e-10);
    CHECK(std::abs(r.value - r.parts->sum()) < 1e-10);
  }
  SUBCASE("rank-two mixture of Fock states in one well") {
    const auto basis = build_basis(1, 2);
    Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(3, 3);
    rho(basis->rank(Occupation{0, 2}), basis->rank(Occupation{0, 2})) = 0.5;
    rho(basis->rank(Occupation{1, 1}), basis->rank(Occupation{1, 1})) = 0.5;
    const auto checked = DenseHermitian::checked(rho);
    const auto jy = jy_total(basis);
    const double spectral = qfi_spectral(checked, jy).value;
    CHECK(std::abs(qfi_zero_split(checked, jy).value - spectral) < 1e-12);
    // Only the pair (|1,1>, |2,0>) contributes: 2 * 2 * (0.5^2 / 0.5) * |sqrt2/2|^2 = 1.
    CHECK(spectral == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("Gaussian mixture") {
    const auto basis = build_basis(2, 4);
    const auto sy = sy_total(basis);
    const auto rho = materialize_density(DiagonalProductState::identical(gaussian_weights(2, 1.0), 2), basis);
    CHECK(std::abs(qfi_zero_split(rho, sy).value - qfi_spectral(rho, sy).value) < 1e-10);
    const auto dense = DenseHermitian::checked(rho.dense());
    CHECK(std::abs(qfi_zero_split(dense, sy).value - qfi_spectral(dense, sy).value) < 1e-10);
  }
}

TEST_CASE("diagonal product route") {
  SUBCASE("narrow fluctuations recover the Fock load") {
    const auto r = qfi_diagonal_product(DiagonalProductState::identical(gaussian_weights(2, 1e-6), 2), true);
    CHECK(r.value == doctest::Approx(8.0).epsilon(1e-10));
    CHECK(r.method == QfiMethod::DiagonalProduct);
    CHECK(qfi_diagonal_product(delta_load(2, 2), true).value == doctest::Approx(8.0).epsilon(1e-14));
  }
  SUBCASE("uniform fluctuations") {
    CHECK(qfi_diagonal_product(DiagonalProductState::identical(gaussian_weights(2, 1.0, true), 2), true).value ==
          doctest::Approx(4.0).epsilon(1e-13));
    CHECK(qfi_diagonal_product(DiagonalProductState::identical(gaussian_weights(4, 1.0, true), 3), true).value ==
          doctest::Approx(21.0).epsilon(1e-13));
  }
  SUBCASE("parts add up and the support term vanishes for uniform weights") {
    const auto r = qfi_diagonal_product(DiagonalProductState::identical(gaussian_weights(5, 1.0, true), 4), true);
    REQUIRE(r.parts);
    CHECK(r.parts->i1 == 0.0);
    CHECK(std::abs(r.value - r.parts->sum()) < 1e-10);
    const auto g = qfi_diagonal_product(DiagonalProductState::identical(gaussian_weights(5, 1.2), 4), true);
    CHECK(g.parts->i1 > 0.0);
    CHECK(std::abs(g.value - g.parts->sum()) < 1e-10);
  }
  SUBCASE("unequal wells") {
    const auto basis = build_basis(2, 5);
    const DiagonalProductState state({gaussian_weights(2, 0.7), gaussian_weights(3, 1.9)});
    const auto rho = materialize_density(state, basis);
    CHECK(std::abs(qfi_diagonal_product(state, true).value - qfi_spectral(rho, sy_total(basis)).value) < 1e-10);
    CHECK(std::abs(qfi_diagonal_product(state, false).value - qfi_spectral(rho, jy_total(basis)).value) < 1e-10);
  }
  SUBCASE("generators with number terms are rejected") {
    Eigen::MatrixXcd h = jy_single(2);
    h(0, 0) = 1.0;
    CHECK_THROWS_AS(qfi_diagonal_product(delta_load(2, 2), h), std::invalid_argument);
  }
}

TEST_CASE("fast product route") {
  CHECK(fast(2, 2, DwPureSpec::fock(2)) == doctest::Approx(8.0).epsilon(1e-13));
  CHECK(fast(2, 2, DwPureSpec::css(2, kPi / 2, 0.0)) == doctest::Approx(4.0).epsilon(1e-13));
  CHECK(fast(3, 2, DwPureSpec::fock(2), false) == doctest::Approx(6.0).epsilon(1e-13));
  CHECK(fast(10, 100, DwPureSpec::fock(100)) == doctest::Approx(qfi_fock_css(10, 100)).epsilon(1e-12));

  const auto basis = build_basis(3, 6);
  const auto sy = sy_total(basis);
  for (int k = 0; k <= 20; ++k) {
    const double alpha = kPi * k / 20;
    CHECK(std::abs(fast(3, 2, DwPureSpec::oat(2, alpha)) - qfi_pure(product(basis, DwPureSpec::oat(2, alpha)), sy).value) < 1e-10);
  }
  const std::vector<Eigen::VectorXcd> wrong{fock_local(2), fock_local(3)};
  CHECK_THROWS_AS(qfi_product_pure_fast(std::span<const Eigen::VectorXcd>(wrong), 2, 2, true), std::invalid_argument);
}

TEST_CASE("number-resolved measurement") {
  const auto basis = build_basis(2, 4);
  const auto psi = mix(product(basis, DwPureSpec::css(2, 1.1, 0.3)));
  for (double theta : {0.0, 0.4, 2.0}) {
    double total = 0.0;
    for (const auto& rec : measurement_distribution(psi, theta)) total += rec.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("classical Fisher information of the number measurement") {
  const auto basis = build_basis(2, 4);
  const auto sy = sy_total(basis);
  const auto jy = jy_total(basis);

  SUBCASE("mixed Fock load is read out optimally") {
    const auto r = cfi_number(mix(product(basis, DwPureSpec::fock(2))), 0.0, CfiMode::FiniteDifference);
    CHECK(r.value == doctest::Approx(8.0).epsilon(1e-8));
    CHECK(r.warnings.empty());
  }
  SUBCASE("mixed symmetric CSS is read out optimally") {
    const auto psi = product(basis, DwPureSpec::css(2, kPi / 2, 0.0));
    const auto r = cfi_number(mix(psi), 0.0, CfiMode::FiniteDifference);
    CHECK(r.value == doctest::Approx(qfi_pure(psi, sy).value).epsilon(1e-8));
  }
  SUBCASE("analytic route on real inputs") {
    for (const auto& psi : {product(basis, DwPureSpec::fock(2)), product(basis, DwPureSpec::noon(2)),
                            product(basis, DwPureSpec::css(2, kPi / 2, 0.0)), noon_global(2, 2, basis)}) {
      const auto r = cfi_number(psi, 0.0, CfiMode::AnalyticAtZero);
      CHECK(r.mode == CfiMode::AnalyticAtZero);
      CHECK(r.value == doctest::Approx(4.0 * expectation(psi, jy * jy).real()).epsilon(1e-10));
      CHECK(r.value == doctest::Approx(qfi_pure(psi, jy).value).epsilon(1e-10));
    }
  }
  SUBCASE("never above the QFI") {
    for (double chi : {0.3, 1.1}) {
      const auto psi = product(basis, DwPureSpec::oat(2, chi));
      const double q = qfi_pure(psi, sy).value;
      for (double theta : {0.0, 0.2, 0.9, 2.4}) CHECK(cfi_number(mix(psi), theta, CfiMode::FiniteDifference).value <= q + 1e-8);
    }
  }
  SUBCASE("analytic route preconditions") {
    const auto real = product(basis, DwPureSpec::fock(2));
    CHECK_THROWS_AS(cfi_number(real, 0.1, CfiMode::AnalyticAtZero), std::invalid_argument);
    CHECK_THROWS_AS(cfi_number(mix(real), 0.0, CfiMode::AnalyticAtZero), std::invalid_argument);
  }
}
