#include "dwm/harness/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>
#include <set>

namespace dwm::harness {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  s.erase(std::remove(s.begin(), s.end(), '-'), s.end());
  s.erase(std::remove(s.begin(), s.end(), '_'), s.end());
  return s;
}

// Accepts a JSON number or a string such as "pi", "2*pi", "pi/2", "0.25".
double number(const nlohmann::json& j, const std::string& key) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw UsageError("config: '" + key + "' must be a number");
  std::string s = j.get<std::string>();
  s.erase(std::remove_if(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); }),
          s.end());
  try {
    const auto pos = s.find("pi");
    if (pos == std::string::npos) {
      std::size_t used = 0;
      const double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    }
    double factor = 1.0;
    std::string head = s.substr(0, pos), tail = s.substr(pos + 2);
    if (!head.empty()) {
      if (head.back() == '*') head.pop_back();
      factor = head == "-" ? -1.0 : std::stod(head);
    }
    if (!tail.empty()) {
      if (tail.front() != '/') throw std::invalid_argument(s);
      factor /= std::stod(tail.substr(1));
    }
    return factor * std::numbers::pi;
  } catch (const std::logic_error&) {
    throw UsageError("config: cannot read '" + key + "' value \"" + j.get<std::string>() + "\"");
  }
}

int integer(const nlohmann::json& j, const std::string& key) {
  if (!j.is_number_integer()) throw UsageError("config: '" + key + "' must be an integer");
  return j.get<int>();
}

bool boolean(const nlohmann::json& j, const std::string& key) {
  if (!j.is_boolean()) throw UsageError("config: '" + key + "' must be true or false");
  return j.get<bool>();
}

std::string text(const nlohmann::json& j, const std::string& key) {
  if (!j.is_string()) throw UsageError("config: '" + key + "' must be a string");
  return j.get<std::string>();
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known,
                    const std::string& where) {
  if (!j.is_object()) throw UsageError("config: " + where + " must be an object");
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw UsageError("config: unknown key '" + key + "' in " + where);
  }
}

StateFamily parse_family(const std::string& s) {
  const auto k = lower(s);
  if (k == "fock" || k == "fockload") return StateFamily::FockLoad;
  if (k == "css") return StateFamily::Css;
  if (k == "oat") return StateFamily::Oat;
  if (k == "noonlocal") return StateFamily::NoonLocal;
  if (k == "noonglobal") return StateFamily::NoonGlobal;
  if (k == "gaussian") return StateFamily::Gaussian;
  throw UsageError("config: unknown state family '" + s +
                   "' (fock, css, oat, noon-local, noon-global, gaussian)");
}

SweepParam parse_param(const std::string& s) {
  const auto k = lower(s);
  if (k == "chit") return SweepParam::ChiT;
  if (k == "sigma") return SweepParam::Sigma;
  if (k == "theta") return SweepParam::Theta;
  throw UsageError("config: unknown sweep parameter '" + s + "' (chi_t, sigma, theta)");
}

std::string family_key(StateFamily f) {
  switch (f) {
    case StateFamily::FockLoad: return "fock";
    case StateFamily::Css: return "css";
    case StateFamily::Oat: return "oat";
    case StateFamily::NoonLocal: return "noon-local";
    case StateFamily::NoonGlobal: return "noon-global";
    case StateFamily::Gaussian: return "gaussian";
  }
  return "?";
}

void check(const ScenarioConfig& c) {
  if (c.M < 1) throw UsageError("config: M must be >= 1");
  if (c.n < 0) throw UsageError("config: n must be >= 0");
  const bool noon = c.state.family == StateFamily::NoonLocal ||
                    c.state.family == StateFamily::NoonGlobal;
  if (noon && c.n < 1) throw UsageError("config: NOON states need n >= 1");
  if (c.engines.empty()) throw UsageError("config: no engine given");
  if (c.threads < 1) throw UsageError("config: threads must be >= 1");
  if (c.cap < 1) throw UsageError("config: cap must be >= 1");
  if (c.state.family == StateFamily::Gaussian && !c.state.uniform && !(c.state.sigma > 0.0)) {
    throw UsageError("config: sigma must be positive (or set uniform)");
  }
  if (c.state.family == StateFamily::Css) {
    if (!(c.state.theta >= 0.0 && c.state.theta < std::numbers::pi)) {
      throw UsageError("config: CSS theta outside [0, pi)");
    }
    if (!(c.state.phi >= 0.0 && c.state.phi < 2 * std::numbers::pi)) {
      throw UsageError("config: CSS phi outside [0, 2 pi)");
    }
  }
  if (c.state.family == StateFamily::FockLoad && (c.state.m_left < 0 || c.state.m_left > c.n)) {
    throw UsageError("config: m_left outside [0, n]");
  }
  if (c.sweep) {
    const auto& s = *c.sweep;
    if (s.values.empty() && !s.uniform) throw UsageError("config: sweep has no grid points");
    if (s.param == SweepParam::ChiT && c.state.family != StateFamily::Oat) {
      throw UsageError("config: chi_t sweeps need the oat state family");
    }
    if (s.param == SweepParam::Sigma && c.state.family != StateFamily::Gaussian) {
      throw UsageError("config: sigma sweeps need the gaussian state family");
    }
    if (s.param == SweepParam::Sigma) {
      for (double v : s.values) {
        if (!(v > 0.0)) throw UsageError("config: sigma grid values must be positive");
      }
    }
    if (s.uniform && s.param != SweepParam::Sigma) {
      throw UsageError("config: the uniform flag only applies to sigma sweeps");
    }
  }
}

}  // namespace

std::string to_string(Engine e) {
  switch (e) {
    case Engine::Auto: return "Auto";
    case Engine::BruteForce: return "BruteForce";
    case Engine::DiagonalProduct: return "DiagonalProduct";
    case Engine::FastProduct: return "FastProduct";
    case Engine::Formula: return "Formula";
  }
  return "?";
}

std::string to_string(StateFamily f) { return family_key(f); }

std::string to_string(SweepParam p) {
  switch (p) {
    case SweepParam::ChiT: return "chi_t";
    case SweepParam::Sigma: return "sigma";
    case SweepParam::Theta: return "theta";
  }
  return "?";
}

std::string to_string(OutputFormat f) { return f == OutputFormat::Csv ? "csv" : "json"; }

Engine parse_engine(const std::string& s) {
  const auto k = lower(s);
  if (k == "auto") return Engine::Auto;
  if (k == "bruteforce") return Engine::BruteForce;
  if (k == "diagonalproduct") return Engine::DiagonalProduct;
  if (k == "fastproduct") return Engine::FastProduct;
  if (k == "formula") return Engine::Formula;
  throw UsageError("unknown engine '" + s +
                   "' (Auto, BruteForce, DiagonalProduct, FastProduct, Formula)");
}

OutputFormat parse_format(const std::string& s) {
  const auto k = lower(s);
  if (k == "csv") return OutputFormat::Csv;
  if (k == "json") return OutputFormat::Json;
  throw UsageError("unknown output format '" + s + "' (csv, json)");
}

std::vector<double> make_grid(double start, double stop, int points, bool logarithmic) {
  if (points < 1) throw UsageError("grid: points must be >= 1");
  if (logarithmic && !(start > 0.0 && stop > 0.0)) {
    throw UsageError("grid: logarithmic grids need positive end points");
  }
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) {
    const double t = points == 1 ? 0.0 : double(k) / (points - 1);
    grid[static_cast<std::size_t>(k)] =
        logarithmic ? std::exp(std::log(start) + t * (std::log(stop) - std::log(start)))
                    : start + t * (stop - start);
  }
  if (points > 1) grid.back() = stop;
  return grid;
}

ScenarioConfig parse_config(const nlohmann::json& j) {
  reject_unknown(j,
                 {"name", "M", "n", "state", "mixing", "engine", "engines", "sweep", "cfi",
                  "theta", "output", "cap", "threads", "timing"},
                 "scenario");
  ScenarioConfig c;
  if (j.contains("name")) c.name = text(j["name"], "name");
  if (!j.contains("M") || !j.contains("n")) throw UsageError("config: 'M' and 'n' are required");
  c.M = integer(j["M"], "M");
  c.n = integer(j["n"], "n");

  if (!j.contains("state")) throw UsageError("config: 'state' is required");
  const auto& s = j["state"];
  reject_unknown(s, {"family", "m_left", "theta", "phi", "chi_t", "sigma", "uniform"}, "state");
  if (!s.contains("family")) throw UsageError("config: state.family is required");
  c.state.family = parse_family(text(s["family"], "state.family"));
  if (s.contains("m_left")) c.state.m_left = integer(s["m_left"], "state.m_left");
  if (s.contains("theta")) c.state.theta = number(s["theta"], "state.theta");
  if (s.contains("phi")) c.state.phi = number(s["phi"], "state.phi");
  if (s.contains("chi_t")) c.state.chi_t = number(s["chi_t"], "state.chi_t");
  if (s.contains("sigma")) c.state.sigma = number(s["sigma"], "state.sigma");
  if (s.contains("uniform")) c.state.uniform = boolean(s["uniform"], "state.uniform");

  if (j.contains("mixing")) c.mixing = boolean(j["mixing"], "mixing");
  if (j.contains("engine") && j.contains("engines")) {
    throw UsageError("config: give either 'engine' or 'engines', not both");
  }
  if (j.contains("engine")) c.engines = {parse_engine(text(j["engine"], "engine"))};
  if (j.contains("engines")) {
    if (!j["engines"].is_array()) throw UsageError("config: 'engines' must be a list");
    c.engines.clear();
    for (const auto& e : j["engines"]) c.engines.push_back(parse_engine(text(e, "engines")));
  }

  if (j.contains("sweep")) {
    const auto& w = j["sweep"];
    reject_unknown(w, {"param", "start", "stop", "points", "scale", "values", "uniform"}, "sweep");
    SweepSpec sweep;
    if (!w.contains("param")) throw UsageError("config: sweep.param is required");
    sweep.param = parse_param(text(w["param"], "sweep.param"));
    const bool ranged = w.contains("start") || w.contains("stop") || w.contains("points");
    if (ranged && w.contains("values")) {
      throw UsageError("config: sweep takes either start/stop/points or values");
    }
    if (ranged) {
      if (!w.contains("start") || !w.contains("stop") || !w.contains("points")) {
        throw UsageError("config: sweep needs start, stop and points");
      }
      bool logarithmic = false;
      if (w.contains("scale")) {
        const auto scale = lower(text(w["scale"], "sweep.scale"));
        if (scale != "linear" && scale != "log") {
          throw UsageError("config: sweep.scale must be linear or log");
        }
        logarithmic = scale == "log";
      }
      sweep.values = make_grid(number(w["start"], "sweep.start"), number(w["stop"], "sweep.stop"),
                               integer(w["points"], "sweep.points"), logarithmic);
    } else if (w.contains("values")) {
      if (!w["values"].is_array()) throw UsageError("config: sweep.values must be a list");
      for (const auto& v : w["values"]) sweep.values.push_back(number(v, "sweep.values"));
    }
    if (w.contains("uniform")) sweep.uniform = boolean(w["uniform"], "sweep.uniform");
    c.sweep = sweep;
  }

  if (j.contains("cfi")) c.cfi = boolean(j["cfi"], "cfi");
  if (j.contains("theta")) c.theta = number(j["theta"], "theta");
  if (c.sweep && c.sweep->param == SweepParam::Theta) c.cfi = true;
  if (j.contains("output")) {
    const auto& o = j["output"];
    reject_unknown(o, {"path", "format"}, "output");
    if (o.contains("path")) c.output.path = text(o["path"], "output.path");
    if (o.contains("format")) c.output.format = parse_format(text(o["format"], "output.format"));
  }
  if (j.contains("cap")) {
    const int cap = integer(j["cap"], "cap");
    if (cap < 1) throw UsageError("config: cap must be >= 1");
    c.cap = static_cast<std::size_t>(cap);
  }
  if (j.contains("threads")) c.threads = integer(j["threads"], "threads");
  if (j.contains("timing")) c.timing = boolean(j["timing"], "timing");
  check(c);
  return c;
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::parse_error& e) {
    throw UsageError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

nlohmann::json to_json(const ScenarioConfig& c) {
  nlohmann::json state = {{"family", family_key(c.state.family)}};
  switch (c.state.family) {
    case StateFamily::FockLoad: state["m_left"] = c.state.m_left; break;
    case StateFamily::Css:
      state["theta"] = c.state.theta;
      state["phi"] = c.state.phi;
      break;
    case StateFamily::Oat: state["chi_t"] = c.state.chi_t; break;
    case StateFamily::Gaussian:
      state["sigma"] = c.state.sigma;
      state["uniform"] = c.state.uniform;
      break;
    default: break;
  }
  nlohmann::json engines = nlohmann::json::array();
  for (auto e : c.engines) engines.push_back(to_string(e));
  nlohmann::json j = {{"name", c.name},
                      {"M", c.M},
                      {"n", c.n},
                      {"state", state},
                      {"mixing", c.mixing},
                      {"engines", engines},
                      {"cfi", c.cfi},
                      {"theta", c.theta},
                      {"output", {{"path", c.output.path}, {"format", to_string(c.output.format)}}},
                      {"cap", c.cap},
                      {"threads", c.threads}};
  if (c.sweep) {
    j["sweep"] = {{"param", to_string(c.sweep->param)},
                  {"values", c.sweep->values},
                  {"uniform", c.sweep->uniform}};
  }
  return j;
}

ScenarioConfig builtin_preset(const std::string& name) {
  ScenarioConfig c;
  c.name = name;
  c.mixing = true;
  if (name == "figure3") {
    c.M = 10;
    c.n = 100;
    c.state.family = StateFamily::Oat;
    c.engines = {Engine::FastProduct, Engine::Formula};
    c.sweep = SweepSpec{SweepParam::ChiT, make_grid(0.0, std::numbers::pi, 201, false), false};
  } else if (name == "figure4" || name == "figure4-full") {
    const bool full = name == "figure4-full";
    c.M = full ? 10 : 3;
    c.n = full ? 20 : 4;
    c.state.family = StateFamily::Gaussian;
    c.engines = {Engine::DiagonalProduct};
    c.sweep = SweepSpec{SweepParam::Sigma, make_grid(0.05, 50.0, 61, true), true};
  } else {
    throw UsageError("unknown preset '" + name + "' (figure3, figure4, figure4-full)");
  }
  check(c);
  return c;
}

}  // namespace dwm::harness
