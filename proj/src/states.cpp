#include "dwm/states.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dwm/combinatorics.hpp"

namespace dwm {

namespace {

void require_n(int n, int min, const char* what) {
  if (n < min) {
    throw std::invalid_argument(std::string(what) + ": need n >= " + std::to_string(min) +
                                ", got " + std::to_string(n));
  }
}

// i^k for integer k
cd i_power(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

// Visits every per-well left occupation vector (m_1, ..., m_M).
template <typename F>
void for_each_product(const std::vector<int>& sizes, F&& visit) {
  std::vector<int> ms(sizes.size(), 0);
  if (sizes.empty()) return;
  while (true) {
    visit(ms);
    std::size_t k = 0;
    while (k < ms.size() && ++ms[k] > sizes[k]) ms[k++] = 0;
    if (k == ms.size()) return;
  }
}

}  // namespace

Eigen::VectorXcd css_local(double theta, double phi, int n) {
  require_n(n, 0, "css_local");
  const double s = std::sin(theta / 2), c = std::cos(theta / 2);
  Eigen::VectorXcd amps(n + 1);
  for (int m = 0; m <= n; ++m) {
    const double mag = std::sqrt(binomial(n, m)) * std::pow(s, m) * std::pow(c, n - m);
    amps(m) = mag * std::exp(cd(0.0, m * phi));
  }
  return amps;
}

Eigen::VectorXcd oat_local(int n, double chi_t) {
  require_n(n, 0, "oat_local");
  Eigen::VectorXcd amps(n + 1);
  const double scale = std::pow(2.0, -n);
  for (int m = 0; m <= n; ++m) {
    const double phase = -chi_t * static_cast<double>(m) * m;
    amps(m) = std::sqrt(binomial(n, m) * scale) * std::exp(cd(0.0, phase));
  }
  return amps;
}

Eigen::VectorXcd jy_extreme_local(int n, bool upper) {
  require_n(n, 0, "jy_extreme_local");
  Eigen::VectorXcd amps(n + 1);
  const double scale = std::pow(2.0, -n);
  for (int m = 0; m <= n; ++m) {
    amps(m) = i_power(upper ? m : -m) * std::sqrt(binomial(n, m) * scale);
  }
  return amps;
}

Eigen::VectorXcd noon_local_y(int n) {
  require_n(n, 1, "noon_local_y");
  return (jy_extreme_local(n, true) + jy_extreme_local(n, false)) / std::numbers::sqrt2;
}

Eigen::VectorXcd fock_local(int n, int m_left) {
  require_n(n, 0, "fock_local");
  if (m_left < 0 || m_left > n) throw std::invalid_argument("fock_local: m_left outside [0, n]");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(n + 1);
  amps(m_left) = 1.0;
  return amps;
}

void validate(const DwPureSpec& spec) {
  require_n(spec.n, spec.family == PureFamily::NoonLocalY ? 1 : 0, "well spec");
  switch (spec.family) {
    case PureFamily::FockLoad:
      if (spec.m_left < 0 || spec.m_left > spec.n) {
        throw std::invalid_argument("Fock load: m_left outside [0, n]");
      }
      break;
    case PureFamily::Css:
      if (!(spec.theta >= 0.0 && spec.theta < std::numbers::pi)) {
        throw std::invalid_argument("CSS: theta outside [0, pi)");
      }
      if (!(spec.phi >= 0.0 && spec.phi < 2 * std::numbers::pi)) {
        throw std::invalid_argument("CSS: phi outside [0, 2 pi)");
      }
      break;
    case PureFamily::Oat:
      if (!std::isfinite(spec.chi_t)) throw std::invalid_argument("OAT: chi_t is not finite");
      break;
    case PureFamily::NoonLocalY: break;
  }
}

Eigen::VectorXcd well_amplitudes(const DwPureSpec& spec) {
  validate(spec);
  switch (spec.family) {
    case PureFamily::FockLoad: return fock_local(spec.n, spec.m_left);
    case PureFamily::Css: return css_local(spec.theta, spec.phi, spec.n);
    case PureFamily::Oat: return oat_local(spec.n, spec.chi_t);
    case PureFamily::NoonLocalY: return noon_local_y(spec.n);
  }
  throw std::logic_error("unknown state family");
}

StateVector product_state(std::span<const Eigen::VectorXcd> wells, BasisPtr basis) {
  if (!basis) throw std::invalid_argument("product_state: null basis");
  if (static_cast<int>(wells.size()) != basis->wells()) {
    throw std::invalid_argument("product_state: " + std::to_string(wells.size()) +
                                " well states for " + std::to_string(basis->wells()) + " wells");
  }
  std::vector<int> ns;
  int total = 0;
  for (const auto& w : wells) {
    if (w.size() == 0) throw std::invalid_argument("product_state: empty well state");
    ns.push_back(static_cast<int>(w.size()) - 1);
    total += ns.back();
  }
  if (total != basis->particles()) {
    throw std::invalid_argument("product_state: wells hold " + std::to_string(total) +
                                " bosons, basis has " + std::to_string(basis->particles()));
  }
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis->size()));
  Occupation occ(static_cast<std::size_t>(basis->modes()));
  for_each_product(ns, [&](const std::vector<int>& ms) {
    cd a = 1.0;
    for (std::size_t w = 0; w < ms.size(); ++w) {
      a *= wells[w](ms[w]);
      occ[2 * w] = ms[w];
      occ[2 * w + 1] = ns[w] - ms[w];
    }
    if (a != cd(0.0, 0.0)) amps(static_cast<Eigen::Index>(basis->rank(occ))) = a;
  });
  return {std::move(basis), std::move(amps)};
}

StateVector product_state(std::span<const DwPureSpec> specs, BasisPtr basis) {
  std::vector<Eigen::VectorXcd> wells;
  wells.reserve(specs.size());
  for (const auto& s : specs) wells.push_back(well_amplitudes(s));
  return product_state(std::span<const Eigen::VectorXcd>(wells), std::move(basis));
}

StateVector noon_global(int n, int wells, BasisPtr basis) {
  require_n(n, 1, "noon_global");
  if (!basis || basis->wells() != wells || basis->particles() != n * wells) {
    throw std::invalid_argument("noon_global: basis must hold M = " + std::to_string(wells) +
                                " wells with N = n M bosons");
  }
  const std::vector<Eigen::VectorXcd> up(static_cast<std::size_t>(wells),
                                         jy_extreme_local(n, true));
  const std::vector<Eigen::VectorXcd> down(static_cast<std::size_t>(wells),
                                           jy_extreme_local(n, false));
  auto a = product_state(std::span<const Eigen::VectorXcd>(up), basis);
  auto b = product_state(std::span<const Eigen::VectorXcd>(down), basis);
  return {std::move(basis), (a.amplitudes + b.amplitudes) / std::numbers::sqrt2};
}

DwDiagonalSpec gaussian_weights(int n, double sigma, bool uniform) {
  require_n(n, 0, "gaussian_weights");
  Eigen::VectorXd p(n + 1);
  if (uniform) {
    p.setConstant(1.0 / (n + 1));
    return {p};
  }
  if (!(sigma > 0.0)) {
    throw std::invalid_argument("gaussian_weights: sigma must be positive (or use the uniform flag)");
  }
  for (int m = 0; m <= n; ++m) p(m) = std::exp(-0.5 * m * m / (sigma * sigma));
  p /= p.sum();
  return {p};
}

void validate(const DwDiagonalSpec& spec, double tol) {
  if (spec.weights.size() == 0) throw std::invalid_argument("diagonal well: no weights");
  if ((spec.weights.array() < 0.0).any() || !spec.weights.allFinite()) {
    throw std::invalid_argument("diagonal well: negative or non-finite weight");
  }
  if (std::abs(spec.weights.sum() - 1.0) > tol) {
    throw std::invalid_argument("diagonal well: weights do not sum to 1");
  }
}

DiagonalProductState::DiagonalProductState(std::vector<DwDiagonalSpec> wells)
    : wells_(std::move(wells)) {
  if (wells_.empty()) throw std::invalid_argument("diagonal product: need at least one well");
  for (const auto& w : wells_) validate(w);
}

DiagonalProductState DiagonalProductState::identical(const DwDiagonalSpec& well, int wells) {
  if (wells < 1) throw std::invalid_argument("diagonal product: need at least one well");
  return DiagonalProductState(std::vector<DwDiagonalSpec>(static_cast<std::size_t>(wells), well));
}

int DiagonalProductState::total_particles() const {
  int total = 0;
  for (const auto& w : wells_) total += w.n();
  return total;
}

Eigen::MatrixXcd DiagonalDensity::dense() const {
  return diagonal.cast<cd>().asDiagonal();
}

DiagonalDensity materialize_density(const DiagonalProductState& state, BasisPtr basis) {
  if (!basis) throw std::invalid_argument("materialize_density: null basis");
  if (basis->wells() != state.wells() || basis->particles() != state.total_particles()) {
    throw std::invalid_argument("materialize_density: basis does not match the product state");
  }
  std::vector<int> ns;
  for (const auto& w : state.per_well()) ns.push_back(w.n());
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(basis->size()));
  Occupation occ(static_cast<std::size_t>(basis->modes()));
  for_each_product(ns, [&](const std::vector<int>& ms) {
    double p = 1.0;
    for (std::size_t w = 0; w < ms.size(); ++w) {
      p *= state.per_well()[w].weights(ms[w]);
      occ[2 * w] = ms[w];
      occ[2 * w + 1] = ns[w] - ms[w];
    }
    diag(static_cast<Eigen::Index>(basis->rank(occ))) = p;
  });
  return {std::move(basis), std::move(diag)};
}

}  // namespace dwm
