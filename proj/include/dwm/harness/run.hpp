#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dwm/harness/scenario.hpp"

namespace dwm::harness {

struct ResultRow {
  std::string param;  // sweep parameter name, or "point" without a sweep
  double value = 0.0;
  double qfi = 0.0;
  std::optional<double> cfi;
  std::string method;
  double seconds = 0.0;
};

struct RunResult {
  ScenarioConfig config;
  std::vector<ResultRow> rows;
  std::vector<std::pair<std::string, double>> references;
  std::vector<std::string> warnings;
};

/// Engines able to evaluate every grid point of `config`, Auto excluded.
std::vector<Engine> feasible_engines(const ScenarioConfig& config);

/// Engine Auto resolves to for `config`; throws InfeasibleError.
Engine resolve_auto(const ScenarioConfig& config);

/// Evaluates every grid point with every configured engine. Rows come out in
/// grid order, engines in configured order, whatever the thread count.
/// Throws InfeasibleError naming the feasible engines.
RunResult run(const ScenarioConfig& config);

/// Closed-form reference lines for (M, n): sql, hl_local, hl_global,
/// fock_css, symmetric_css, sigma_inf, oat_plateau.
std::vector<std::pair<std::string, double>> reference_lines(int M, int n);

}  // namespace dwm::harness
