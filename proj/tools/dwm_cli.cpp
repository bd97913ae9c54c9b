#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "dwm/fock_basis.hpp"
#include "dwm/harness/output.hpp"
#include "dwm/harness/run.hpp"
#include "dwm/harness/scenario.hpp"
#include "dwm/harness/verify.hpp"

namespace {

using namespace dwm::harness;

// Flags shared by the commands that produce a result table.
struct Overrides {
  std::optional<std::string> out;
  std::optional<std::string> format;
  std::optional<int> threads;
  std::optional<std::size_t> cap;
  bool timing = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--out", out, "Output path, '-' for stdout")->envname("DWM_OUT");
    cmd.add_option("--format", format, "csv or json")->envname("DWM_FORMAT");
    cmd.add_option("--threads", threads, "Concurrent grid points")
        ->envname("DWM_THREADS")
        ->check(CLI::PositiveNumber);
    cmd.add_option("--cap", cap, "Largest basis dimension to materialize")
        ->envname("DWM_CAP")
        ->check(CLI::PositiveNumber);
    cmd.add_flag("--timing", timing, "Record wall time per row");
  }

  void apply(ScenarioConfig& c) const {
    if (out) c.output.path = *out;
    if (format) c.output.format = parse_format(*format);
    if (threads) c.threads = *threads;
    if (cap) c.cap = *cap;
    if (timing) c.timing = true;
  }
};

int run_scenario(ScenarioConfig config, const Overrides& overrides) {
  overrides.apply(config);
  const auto result = run(config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  write_result(result);
  return kSuccess;
}

int basis_info(int wells, int particles, std::size_t cap, const std::string& format) {
  if (wells < 1 || particles < 0) throw UsageError("need --wells >= 1 and --particles >= 0");
  const auto dimension = dwm::stars_and_bars(2 * wells, particles);
  const bool fits = dimension <= cap;
  nlohmann::json j = {{"wells", wells}, {"modes", 2 * wells}, {"particles", particles},
                      {"dimension", dimension}, {"cap", cap}, {"fits_cap", fits}};
  if (fits) {
    const auto basis = dwm::build_basis(wells, particles, dwm::BasisLimits{cap});
    j["first"] = basis->unrank(0);
    j["last"] = basis->unrank(basis->size() - 1);
  }
  if (parse_format(format) == OutputFormat::Json) {
    std::cout << j.dump(2) << '\n';
  } else {
    for (auto it = j.begin(); it != j.end(); ++it) std::cout << it.key() << ',' << it.value().dump() << '\n';
  }
  if (!fits) {
    std::cerr << "basis dimension " << dimension << " exceeds cap " << cap << '\n';
    return kInfeasible;
  }
  return kSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quantum Fisher information of M bosonic double wells", "dwm"};
  app.require_subcommand(1);

  auto* info = app.add_subcommand("basis-info", "Dimension and ordering of the Fock basis");
  int wells = 1, particles = 0;
  std::size_t info_cap = dwm::BasisLimits{}.max_dimension;
  std::string info_format = "csv";
  info->add_option("--wells,-M", wells, "Number of double wells")->required();
  info->add_option("--particles,-N", particles, "Total particle number")->required();
  info->add_option("--cap", info_cap, "Largest basis dimension")->envname("DWM_CAP");
  info->add_option("--format", info_format, "csv or json")->envname("DWM_FORMAT");

  auto* run_cmd = app.add_subcommand("run", "Evaluate a scenario config");
  std::string config_path;
  run_cmd->add_option("--config", config_path, "Scenario JSON file")->envname("DWM_CONFIG")->required();
  Overrides run_overrides;
  run_overrides.attach(*run_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Cross-check engines, operators and closed forms");
  std::string suite = "all";
  std::size_t verify_cap = dwm::BasisLimits{}.max_dimension;
  verify_cmd->add_option("suite", suite, "operators, fisher-cross, formulas-vs-oracle or all");
  verify_cmd->add_option("--cap", verify_cap, "Largest basis dimension")->envname("DWM_CAP");

  auto* fig3 = app.add_subcommand("figure3", "QFI against twisting strength, M=10, n=100");
  Overrides fig3_overrides;
  fig3_overrides.attach(*fig3);

  auto* fig4 = app.add_subcommand("figure4", "QFI against number fluctuations");
  Overrides fig4_overrides;
  bool full = false;
  fig4_overrides.attach(*fig4);
  fig4->add_flag("--full", full, "Use M=10, n=20 instead of M=3, n=4");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*info) return basis_info(wells, particles, info_cap, info_format);
    if (*run_cmd) return run_scenario(load_config(config_path), run_overrides);
    if (*fig3) return run_scenario(builtin_preset("figure3"), fig3_overrides);
    if (*fig4) return run_scenario(builtin_preset(full ? "figure4-full" : "figure4"), fig4_overrides);
    if (*verify_cmd) {
      const auto report = verify(suite, verify_cap);
      print_report(std::cout, report);
      return report.passed() ? kSuccess : kVerificationFailed;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const InfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::length_error& e) {
    std::cerr << "infeasible: " << e.what() << '\n';
    return kInfeasible;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }
  return kUsage;
}
