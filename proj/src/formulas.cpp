#include "dwm/formulas.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dwm/combinatorics.hpp"
#include "dwm/fisher.hpp"
#include "dwm/operators.hpp"
#include "dwm/states.hpp"

namespace dwm {

namespace {

using cd = std::complex<double>;

void require_positive(int M, int n, int min_m, int min_n, const char* what) {
  if (M < min_m || n < min_n) {
    throw std::invalid_argument(std::string(what) + ": need M >= " + std::to_string(min_m) +
                                " and n >= " + std::to_string(min_n));
  }
}

}  // namespace

ScalingBounds bounds(int M, int n) {
  require_positive(M, n, 1, 1, "bounds");
  const double m = M, k = n;
  return {m * k, m * k * k, m * m * k * k};
}

double qfi_fock_css(int M, int n) {
  require_positive(M, n, 1, 0, "qfi_fock_css");
  return 0.5 * M * (double(n) * n + 2.0 * n);
}

SymmetricCssQfi qfi_symmetric_css(int M, int n) {
  require_positive(M, n, 1, 0, "qfi_symmetric_css");
  const double m = M, k = n;
  const double factored =
      m * k * (7.0 + k) / 8.0 - k * k / std::numbers::sqrt2 + 0.5 * k * (k + 0.5);
  const double expanded = m * k * k / 8.0 + 0.5 * (1.0 - std::numbers::sqrt2) * k * k +
                          0.25 * (3.5 * m + 1.0) * k;
  return {factored, expanded};
}

OatMoments oat_moments(int n, double alpha, OatConvention convention) {
  if (n < 0) throw std::invalid_argument("oat_moments: negative n");
  const double scale = std::pow(2.0, -n);
  const double half = 0.5 * n;
  cd g = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double exponent = convention == OatConvention::StateConsistent
                                ? 2.0 * k - 1.0
                                : 2.0 * (half - k) + 1.0;
    g += std::exp(cd(0.0, -alpha * exponent)) * binomial(n, k) * double(k);
  }
  cd f = 0.0;
  for (int k = 2; k <= n; ++k) {
    const double weight = std::sqrt(binomial(n, k) * binomial(n, k - 2) * k * (k - 1.0) *
                                    (n - k + 1.0) * (n - k + 2.0));
    double exponent;
    if (convention == OatConvention::StateConsistent) {
      exponent = 4.0 * (k - 1.0);
    } else {
      const double m = (k - 2) - half;
      exponent = 2.0 * m * m + 4.0 * m + 4.0;
    }
    f += std::exp(cd(0.0, -alpha * exponent)) * weight;
  }
  return {g * scale, f * scale};
}

double oat_qfi(int M, int n, double alpha, OatConvention convention) {
  require_positive(M, n, 2, 2, "oat_qfi");
  const auto [g, f] = oat_moments(n, alpha, convention);
  const double m = M, k = n;
  return k * k + 1.5 * k + (m - 2.0) * 0.5 * k * (k + 1.5) - 0.5 * (m + 2.0) * f.real() -
         (m - 3.0 + 4.0 / std::numbers::sqrt2) * std::norm(g);
}

double oat_asymptote(int M, int n) {
  require_positive(M, n, 1, 0, "oat_asymptote");
  return 0.5 * M * double(n) * n;
}

double sigma_inf_qfi(int M, int n) {
  require_positive(M, n, 1, 0, "sigma_inf_qfi");
  return (double(n) * n + 2.0 * n) * (3.0 * M - 2.0) / 8.0;
}

std::uint64_t hop_weight_sum(int n) {
  if (n < 0 || n > 300) throw std::invalid_argument("hop_weight_sum: n outside [0, 300]");
  const auto N = static_cast<std::uint64_t>(n);
  std::uint64_t total = 0;
  for (std::uint64_t m = 0; m <= N; ++m) {
    for (std::uint64_t mp = 0; mp <= N; ++mp) {
      if (mp == m + 1) total += (N - m) * (m + 1);
      if (mp + 1 == m) total += (N - m + 1) * m;
    }
  }
  return total;
}

std::uint64_t hop_weight_sum_closed(int n) {
  if (n < 0 || n > 300) throw std::invalid_argument("hop_weight_sum_closed: n outside [0, 300]");
  const auto N = static_cast<std::uint64_t>(n);
  return (N * N * N + 3 * N * N + 2 * N) / 3;
}

OatGateReport oat_convention_gate(std::vector<std::pair<int, int>> cases, int points,
                                  double tolerance) {
  if (points < 1) throw std::invalid_argument("oat_convention_gate: need at least one point");
  OatGateReport report;
  report.cases = cases;
  report.points = points;
  report.tolerance = tolerance;
  for (const auto& [M, n] : cases) {
    auto basis = build_basis(M, M * n);
    const auto sy = sy_total(basis);
    for (int k = 0; k < points; ++k) {
      const double alpha = points == 1 ? 0.0 : std::numbers::pi * k / (points - 1);
      const std::vector<DwPureSpec> specs(static_cast<std::size_t>(M), DwPureSpec::oat(n, alpha));
      const double exact = qfi_pure(product_state(std::span<const DwPureSpec>(specs), basis), sy).value;
      report.deviation_state_consistent =
          std::max(report.deviation_state_consistent,
                   std::abs(oat_qfi(M, n, alpha, OatConvention::StateConsistent) - exact));
      report.deviation_printed = std::max(
          report.deviation_printed, std::abs(oat_qfi(M, n, alpha, OatConvention::Printed) - exact));
    }
  }
  if (report.deviation_state_consistent < tolerance) {
    report.accepted = OatConvention::StateConsistent;
  } else if (report.deviation_printed < tolerance) {
    report.accepted = OatConvention::Printed;
  }
  return report;
}

}  // namespace dwm
