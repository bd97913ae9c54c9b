#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace dwm::harness {

enum ExitCode : int { kSuccess = 0, kUsage = 1, kVerificationFailed = 2, kInfeasible = 3 };

/// Malformed config or command line (exit code 1).
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Well-formed scenario that no engine can evaluate (exit code 3).
struct InfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Engine { Auto, BruteForce, DiagonalProduct, FastProduct, Formula };
enum class StateFamily { FockLoad, Css, Oat, NoonLocal, NoonGlobal, Gaussian };
enum class SweepParam { ChiT, Sigma, Theta };
enum class OutputFormat { Csv, Json };

std::string to_string(Engine e);
std::string to_string(StateFamily f);
std::string to_string(SweepParam p);
std::string to_string(OutputFormat f);
Engine parse_engine(const std::string& s);
OutputFormat parse_format(const std::string& s);

struct StateSpec {
  StateFamily family = StateFamily::FockLoad;
  int m_left = 0;
  double theta = 0.0;
  double phi = 0.0;
  double chi_t = 0.0;
  double sigma = 1.0;
  bool uniform = false;
};

struct SweepSpec {
  SweepParam param = SweepParam::ChiT;
  std::vector<double> values;
  bool uniform = false;  // sigma sweeps: append the sigma = infinity point
};

struct OutputSpec {
  std::string path = "-";  // "-" is stdout
  OutputFormat format = OutputFormat::Csv;
};

struct ScenarioConfig {
  std::string name = "scenario";
  int M = 1;
  int n = 1;
  StateSpec state;
  bool mixing = true;
  std::vector<Engine> engines{Engine::Auto};
  std::optional<SweepSpec> sweep;
  bool cfi = false;
  double theta = 0.0;  // CFI working point when theta is not swept
  OutputSpec output;
  std::size_t cap = 200000;
  int threads = 1;
  bool timing = false;
};

/// Parses the JSON scenario schema (see presets/); throws UsageError.
ScenarioConfig parse_config(const nlohmann::json& j);
ScenarioConfig load_config(const std::string& path);
nlohmann::json to_json(const ScenarioConfig& c);

/// Built-in presets: "figure3", "figure4", "figure4-full".
ScenarioConfig builtin_preset(const std::string& name);

/// Linear or logarithmic grid; throws UsageError when points < 1.
std::vector<double> make_grid(double start, double stop, int points, bool logarithmic);

}  // namespace dwm::harness
