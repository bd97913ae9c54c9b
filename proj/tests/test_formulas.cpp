#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dwm/formulas.hpp"
#include "dwm/states.hpp"

using namespace dwm;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("scaling bounds") {
  const auto big = bounds(10, 100);
  CHECK(big.sql == 1000.0);
  CHECK(big.hl_local == 100000.0);
  CHECK(big.hl_global == 1e6);
  const auto unit = bounds(1, 1);
  CHECK(unit.sql == 1.0);
  CHECK(unit.hl_local == 1.0);
  CHECK(unit.hl_global == 1.0);
  const auto small = bounds(2, 2);
  CHECK(small.sql == 4.0);
  CHECK(small.hl_local == 8.0);
  CHECK(small.hl_global == 16.0);
  CHECK_THROWS_AS(bounds(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(bounds(1, 0), std::invalid_argument);
}

TEST_CASE("Fock load closed form") {
  CHECK(qfi_fock_css(2, 2) == 8.0);
  CHECK(qfi_fock_css(1, 0) == 0.0);
  CHECK(qfi_fock_css(3, 2) == 12.0);
  CHECK(qfi_fock_css(2, 3) == 15.0);
}

TEST_CASE("symmetric CSS closed forms") {
  CHECK(qfi_symmetric_css(2, 2).value == doctest::Approx(4.17157288).epsilon(1e-9));
  double worst = 0.0;
  for (int M = 1; M <= 20; ++M) {
    for (int n = 1; n <= 200; ++n) {
      const auto q = qfi_symmetric_css(M, n);
      worst = std::max(worst, std::abs(q.value - q.expanded) / std::abs(q.value));
    }
  }
  CHECK(worst < 1e-9);
  // M n^2 / 8 dominates once both M and n are large; (10, 100) is 12500 + O(n^2 + Mn).
  CHECK(bounds(10, 100).hl_local / 8.0 == 12500.0);
  const double M = 1e7, n = 1e4;
  CHECK(qfi_symmetric_css(int(M), int(n)).value / (M * n * n / 8.0) == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("twisting moments") {
  const auto m2 = oat_moments(2, 0.0);
  CHECK(std::abs(m2.g - 1.0) < 1e-14);
  CHECK(std::abs(m2.f - 0.5) < 1e-14);
  for (int n = 2; n <= 60; n += 7) {
    CHECK(std::abs(oat_moments(n, 0.0).g - n / 2.0) < 1e-12 * n);
    for (double alpha : {0.1, 0.7, 2.0, 5.5}) {
      const auto sc = oat_moments(n, alpha, OatConvention::StateConsistent);
      const auto pr = oat_moments(n, alpha, OatConvention::Printed);
      CHECK(std::abs(sc.g) <= n / 2.0 + 1e-12);
      CHECK(std::abs(std::abs(sc.g) - std::abs(pr.g)) < 1e-10 * n);
    }
  }
}

TEST_CASE("moments match expectations in the twisted state") {
  for (int n : {2, 3, 6}) {
    for (double alpha : {0.0, 0.3, 1.2}) {
      const auto a = oat_local(n, alpha);
      // a_r^dag a_l lowers the left occupation m by one.
      std::complex<double> g = 0.0, f = 0.0;
      for (int m = 1; m <= n; ++m) g += std::conj(a(m - 1)) * a(m) * std::sqrt(double(m) * (n - m + 1));
      for (int m = 2; m <= n; ++m) {
        f += std::conj(a(m - 2)) * a(m) * std::sqrt(double(m) * (m - 1) * (n - m + 1) * (n - m + 2));
      }
      const auto moments = oat_moments(n, alpha);
      CHECK(std::abs(moments.g - g) < 1e-12);
      CHECK(std::abs(moments.f - f) < 1e-12);
    }
  }
}

TEST_CASE("twisted-state closed form") {
  CHECK(oat_qfi(2, 2, 0.0) == doctest::Approx(4.17157288).epsilon(1e-9));
  for (int M = 2; M <= 20; ++M) {
    for (int n = 2; n <= 50; ++n) {
      CHECK(oat_qfi(M, n, 0.0) == doctest::Approx(qfi_symmetric_css(M, n).value).epsilon(1e-9));
    }
  }
  for (int k = 0; k <= 20; ++k) {
    const double alpha = kPi * k / 20;
    CHECK(oat_qfi(5, 9, alpha) == doctest::Approx(oat_qfi(5, 9, alpha + 2 * kPi)).epsilon(1e-10));
    if (k % 10 != 0) CHECK(std::abs(oat_qfi(10, 100, alpha) / 50000.0 - 1.0) < 0.05);
  }
  CHECK_THROWS_AS(oat_qfi(1, 2, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(oat_qfi(2, 1, 0.1), std::invalid_argument);
}

TEST_CASE("convention gate accepts only a convention within tolerance") {
  const auto gate = oat_convention_gate({{3, 2}}, 5, 1e-8);
  CHECK(std::isfinite(gate.deviation_state_consistent));
  CHECK(std::isfinite(gate.deviation_printed));
  CHECK(gate.points == 5);
  const bool any = gate.deviation_state_consistent < 1e-8 || gate.deviation_printed < 1e-8;
  CHECK(gate.accepted.has_value() == any);
  // A loose gate accepts the better convention first.
  const auto loose = oat_convention_gate({{3, 2}}, 5, 1e3);
  REQUIRE(loose.accepted);
  CHECK(*loose.accepted == OatConvention::StateConsistent);
}

TEST_CASE("asymptotes and fluctuation limit") {
  CHECK(oat_asymptote(10, 100) == 50000.0);
  CHECK(oat_asymptote(2, 2) == 4.0);
  for (int M = 1; M <= 10; ++M) {
    for (int n = 0; n <= 30; ++n) CHECK(oat_asymptote(M, n) == qfi_fock_css(M, n) - double(M) * n);
  }
  CHECK(sigma_inf_qfi(2, 2) == 4.0);
  CHECK(sigma_inf_qfi(3, 4) == 21.0);
  CHECK(sigma_inf_qfi(10, 20) == 1540.0);
  CHECK(std::abs(sigma_inf_qfi(10, 20) / (3.0 / 8.0 * 10 * 400) - 1.0) < 0.1);
}

TEST_CASE("hop weight sums") {
  CHECK(hop_weight_sum(0) == 0);
  CHECK(hop_weight_sum(1) == 2);
  CHECK(hop_weight_sum(2) == 8);
  for (int n = 0; n <= 300; ++n) CHECK(hop_weight_sum(n) == hop_weight_sum_closed(n));
  CHECK_THROWS_AS(hop_weight_sum(301), std::invalid_argument);
  CHECK_THROWS_AS(hop_weight_sum_closed(-1), std::invalid_argument);
}

TEST_CASE("ordering of the closed forms") {
  for (int M = 1; M <= 20; ++M) {
    for (int n = 1; n <= 100; ++n) {
      const auto b = bounds(M, n);
      CHECK(b.sql <= b.hl_local);
      CHECK(b.hl_local <= b.hl_global);
      CHECK(b.sql <= qfi_fock_css(M, n));
      CHECK(sigma_inf_qfi(M, n) < qfi_fock_css(M, n));
      if (n >= 2) CHECK(qfi_symmetric_css(M, n).value <= qfi_fock_css(M, n));
    }
  }
}
