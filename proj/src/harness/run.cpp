#include "dwm/harness/run.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "dwm/fisher.hpp"
#include "dwm/formulas.hpp"
#include "dwm/operators.hpp"
#include "dwm/states.hpp"

namespace dwm::harness {

namespace {

struct Point {
  double value = 0.0;
  StateSpec state;
  double theta = 0.0;
};

std::vector<Point> grid_points(const ScenarioConfig& c) {
  std::vector<Point> points;
  if (!c.sweep) {
    points.push_back({0.0, c.state, c.theta});
    return points;
  }
  for (double v : c.sweep->values) {
    Point p{v, c.state, c.theta};
    switch (c.sweep->param) {
      case SweepParam::ChiT: p.state.chi_t = v; break;
      case SweepParam::Sigma:
        p.state.sigma = v;
        p.state.uniform = false;
        break;
      case SweepParam::Theta: p.theta = v; break;
    }
    points.push_back(p);
  }
  if (c.sweep->uniform) {
    Point p{std::numeric_limits<double>::infinity(), c.state, c.theta};
    p.state.uniform = true;
    points.push_back(p);
  }
  return points;
}

bool is_pure_product(StateFamily f) {
  return f == StateFamily::FockLoad || f == StateFamily::Css || f == StateFamily::Oat ||
         f == StateFamily::NoonLocal;
}

std::uint64_t dimension(const ScenarioConfig& c) {
  return stars_and_bars(2 * c.M, c.M * c.n);
}

// Closed form covering this point, if any. `verified` closed forms agree with
// the brute-force QFI; the others are kept for comparison only.
struct FormulaChoice {
  double (*eval)(const ScenarioConfig&, const StateSpec&) = nullptr;
  bool verified = false;
};

FormulaChoice formula_for(const ScenarioConfig& c, const StateSpec& s) {
  switch (s.family) {
    case StateFamily::FockLoad:
      if (s.m_left != 0) return {};
      if (c.mixing) return {[](const ScenarioConfig& k, const StateSpec&) { return qfi_fock_css(k.M, k.n); }, true};
      return {[](const ScenarioConfig& k, const StateSpec&) { return double(k.M) * k.n; }, true};
    case StateFamily::Css:
      if (s.theta != std::numbers::pi / 2 || s.phi != 0.0) return {};
      if (c.mixing) {
        return {[](const ScenarioConfig& k, const StateSpec&) { return qfi_symmetric_css(k.M, k.n).value; }, false};
      }
      return {[](const ScenarioConfig& k, const StateSpec&) { return double(k.M) * k.n; }, true};
    case StateFamily::Oat:
      if (!c.mixing || c.M < 2 || c.n < 2) return {};
      return {[](const ScenarioConfig& k, const StateSpec& st) { return oat_qfi(k.M, k.n, st.chi_t); }, false};
    case StateFamily::NoonLocal:
      if (c.mixing) return {};
      return {[](const ScenarioConfig& k, const StateSpec&) { return bounds(k.M, k.n).hl_local; }, true};
    case StateFamily::NoonGlobal:
      if (c.mixing) return {};
      return {[](const ScenarioConfig& k, const StateSpec&) { return bounds(k.M, k.n).hl_global; }, true};
    case StateFamily::Gaussian:
      if (!c.mixing || !s.uniform) return {};
      return {[](const ScenarioConfig& k, const StateSpec&) { return sigma_inf_qfi(k.M, k.n); }, true};
  }
  return {};
}

// Empty string when `e` can evaluate point `s`, otherwise the reason.
std::string infeasibility(Engine e, const ScenarioConfig& c, const StateSpec& s) {
  switch (e) {
    case Engine::BruteForce:
      if (dimension(c) > c.cap) {
        return "basis dimension " + std::to_string(dimension(c)) + " exceeds cap " +
               std::to_string(c.cap);
      }
      return {};
    case Engine::FastProduct:
      if (!is_pure_product(s.family)) return "state is not a pure product of single-well states";
      return {};
    case Engine::DiagonalProduct:
      if (s.family != StateFamily::Gaussian && s.family != StateFamily::FockLoad) {
        return "state is not a product of number-diagonal single-well mixtures";
      }
      return {};
    case Engine::Formula:
      if (!formula_for(c, s).eval) return "no closed form covers this state";
      return {};
    case Engine::Auto: return {};
  }
  return "unknown engine";
}

std::string join(const std::vector<Engine>& engines) {
  std::string out;
  for (auto e : engines) out += (out.empty() ? "" : ", ") + to_string(e);
  return out.empty() ? "none" : out;
}

Engine resolve_point(const ScenarioConfig& c, const StateSpec& s) {
  if (infeasibility(Engine::BruteForce, c, s).empty()) return Engine::BruteForce;
  if (is_pure_product(s.family)) return Engine::FastProduct;
  if (s.family == StateFamily::Gaussian) return Engine::DiagonalProduct;
  const auto f = formula_for(c, s);
  if (f.eval && f.verified) return Engine::Formula;
  throw InfeasibleError("no engine can evaluate this scenario: basis dimension " +
                        std::to_string(dimension(c)) + " exceeds cap " + std::to_string(c.cap) +
                        " and no product-state or verified closed-form route applies");
}

void check_global(const ScenarioConfig& c) {
  if (c.mixing && c.M < 2) {
    throw InfeasibleError("no mixing possible with a single double well; set mixing to false");
  }
  if (c.cfi) {
    if (c.state.family == StateFamily::Gaussian) {
      throw InfeasibleError("CFI is only available for pure states");
    }
    if (dimension(c) > c.cap) {
      throw InfeasibleError("CFI needs the full state vector, but basis dimension " +
                            std::to_string(dimension(c)) + " exceeds cap " +
                            std::to_string(c.cap));
    }
  }
}

// Objects shared read-only by all grid points.
struct Workspace {
  BasisPtr basis;
  std::optional<SparseOperator> generator;   // S_y or J_y on the full basis
  std::optional<SpectralPropagator> mixer;   // exp(-i t S_x), dense route
  std::optional<SparseOperator> sx;          // Chebyshev route
  SingleParticleMatrix h;                    // single-particle generator
};

std::vector<Eigen::VectorXcd> well_states(const ScenarioConfig& c, const StateSpec& s) {
  DwPureSpec spec;
  switch (s.family) {
    case StateFamily::FockLoad: spec = DwPureSpec::fock(c.n, s.m_left); break;
    case StateFamily::Css: spec = DwPureSpec::css(c.n, s.theta, s.phi); break;
    case StateFamily::Oat: spec = DwPureSpec::oat(c.n, s.chi_t); break;
    case StateFamily::NoonLocal: spec = DwPureSpec::noon(c.n); break;
    default: throw std::logic_error("not a pure product family");
  }
  return std::vector<Eigen::VectorXcd>(static_cast<std::size_t>(c.M), well_amplitudes(spec));
}

DiagonalProductState diagonal_state(const ScenarioConfig& c, const StateSpec& s) {
  if (s.family == StateFamily::FockLoad) {
    DwDiagonalSpec delta{Eigen::VectorXd::Zero(c.n + 1)};
    delta.weights(s.m_left) = 1.0;
    return DiagonalProductState::identical(delta, c.M);
  }
  return DiagonalProductState::identical(gaussian_weights(c.n, s.sigma, s.uniform), c.M);
}

StateVector pure_state(const ScenarioConfig& c, const StateSpec& s, const Workspace& ws) {
  if (s.family == StateFamily::NoonGlobal) return noon_global(c.n, c.M, ws.basis);
  const auto wells = well_states(c, s);
  return product_state(std::span<const Eigen::VectorXcd>(wells), ws.basis);
}

StateVector mixed_input(const StateVector& psi, const Workspace& ws) {
  if (ws.mixer) return {psi.basis, ws.mixer->apply(kMixingAngle, psi.amplitudes)};
  return {psi.basis, chebyshev_apply(*ws.sx, kMixingAngle, psi.amplitudes)};
}

struct Evaluation {
  double qfi;
  std::string method;
};

Evaluation evaluate(Engine e, const ScenarioConfig& c, const StateSpec& s, const Workspace& ws) {
  switch (e) {
    case Engine::BruteForce: {
      if (s.family == StateFamily::Gaussian) {
        const auto rho = materialize_density(diagonal_state(c, s), ws.basis);
        const auto r = qfi_spectral(rho, *ws.generator);
        return {r.value, to_string(r.method)};
      }
      const auto r = qfi_pure(pure_state(c, s, ws), *ws.generator);
      return {r.value, to_string(r.method)};
    }
    case Engine::FastProduct: {
      const auto wells = well_states(c, s);
      const auto r = qfi_product_pure_fast(std::span<const Eigen::VectorXcd>(wells), c.M, c.n, c.mixing);
      return {r.value, to_string(r.method)};
    }
    case Engine::DiagonalProduct: {
      const auto r = qfi_diagonal_product(diagonal_state(c, s), c.mixing);
      return {r.value, to_string(r.method)};
    }
    case Engine::Formula: return {formula_for(c, s).eval(c, s), to_string(QfiMethod::FormulaRef)};
    case Engine::Auto: break;
  }
  throw std::logic_error("unresolved engine");
}

}  // namespace

std::vector<std::pair<std::string, double>> reference_lines(int M, int n) {
  std::vector<std::pair<std::string, double>> refs;
  if (M < 1 || n < 1) return refs;
  const auto b = bounds(M, n);
  refs = {{"sql", b.sql},
          {"hl_local", b.hl_local},
          {"hl_global", b.hl_global},
          {"fock_css", qfi_fock_css(M, n)},
          {"symmetric_css", qfi_symmetric_css(M, n).value},
          {"sigma_inf", sigma_inf_qfi(M, n)},
          {"oat_plateau", oat_asymptote(M, n)}};
  return refs;
}

std::vector<Engine> feasible_engines(const ScenarioConfig& config) {
  std::vector<Engine> out;
  const auto points = grid_points(config);
  for (Engine e : {Engine::BruteForce, Engine::DiagonalProduct, Engine::FastProduct,
                   Engine::Formula}) {
    bool ok = true;
    for (const auto& p : points) ok = ok && infeasibility(e, config, p.state).empty();
    if (ok) out.push_back(e);
  }
  return out;
}

Engine resolve_auto(const ScenarioConfig& config) {
  check_global(config);
  const auto points = grid_points(config);
  const Engine first = resolve_point(config, points.front().state);
  for (const auto& p : points) {
    if (resolve_point(config, p.state) != first) return Engine::Auto;  // mixed per point
  }
  return first;
}

RunResult run(const ScenarioConfig& config) {
  check_global(config);
  const auto points = grid_points(config);

  // Resolve engines for every (point, engine) pair up front.
  std::vector<std::vector<Engine>> plan(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (Engine e : config.engines) {
      Engine chosen = e;
      if (e == Engine::Auto) {
        chosen = resolve_point(config, points[k].state);
      } else if (auto why = infeasibility(e, config, points[k].state); !why.empty()) {
        throw InfeasibleError("engine " + to_string(e) + " cannot evaluate this scenario (" + why +
                              "); feasible engines: " + join(feasible_engines(config)));
      }
      plan[k].push_back(chosen);
    }
  }

  bool need_basis = config.cfi;
  for (const auto& engines : plan) {
    for (Engine e : engines) need_basis = need_basis || e == Engine::BruteForce;
  }

  Workspace ws;
  const int M = config.M;
  ws.h = config.mixing ? single_particle({GeneratorTag::SyTotal, 0}, M) : jy_single(M);
  if (need_basis) {
    ws.basis = build_basis(M, M * config.n, BasisLimits{config.cap});
    ws.generator = config.mixing ? sy_total(ws.basis) : jy_total(ws.basis);
    if (config.cfi && config.mixing) {
      auto sx = sx_total(ws.basis);
      if (ws.basis->size() <= UnitaryOptions{}.dense_threshold) ws.mixer.emplace(sx);
      else ws.sx.emplace(std::move(sx));
    }
  }

  const std::string param = config.sweep ? to_string(config.sweep->param) : "point";
  std::vector<std::vector<ResultRow>> rows(points.size());
  std::vector<std::vector<std::string>> warnings(points.size());

  auto work = [&](std::size_t k) {
    const auto& p = points[k];
    std::optional<double> cfi;
    if (config.cfi) {
      auto psi = pure_state(config, p.state, ws);
      if (config.mixing) psi = mixed_input(psi, ws);
      const bool analytic = p.theta == 0.0 && max_imag(psi) < 1e-12;
      const auto r = cfi_number(psi, p.theta,
                                analytic ? CfiMode::AnalyticAtZero : CfiMode::FiniteDifference);
      cfi = r.value;
      for (const auto& w : r.warnings) warnings[k].push_back(param + "=" + std::to_string(p.value) + ": " + w);
    }
    for (Engine e : plan[k]) {
      const auto start = std::chrono::steady_clock::now();
      const auto ev = evaluate(e, config, p.state, ws);
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rows[k].push_back({param, p.value, ev.qfi, cfi, ev.method, config.timing ? secs : 0.0});
    }
  };

  const std::size_t threads =
      std::min<std::size_t>(static_cast<std::size_t>(config.threads), points.size());
  if (threads <= 1) {
    for (std::size_t k = 0; k < points.size(); ++k) work(k);
  } else {
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t k = next++; k < points.size(); k = next++) {
          try {
            work(k);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  RunResult result;
  result.config = config;
  result.references = reference_lines(config.M, config.n);
  for (std::size_t k = 0; k < points.size(); ++k) {
    for (auto& r : rows[k]) result.rows.push_back(std::move(r));
    for (auto& w : warnings[k]) result.warnings.push_back(std::move(w));
  }
  return result;
}

}  // namespace dwm::harness
