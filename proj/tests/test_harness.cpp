#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <sstream>
#include <sys/wait.h>

#include "dwm/formulas.hpp"
#include "dwm/harness/output.hpp"
#include "dwm/harness/run.hpp"
#include "dwm/harness/scenario.hpp"
#include "dwm/harness/verify.hpp"

using namespace dwm::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

ScenarioConfig parse(const std::string& text) { return parse_config(json::parse(text)); }

std::string csv(const RunResult& r) {
  std::ostringstream out;
  write_csv(out, r);
  return out.str();
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> parts;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, sep)) parts.push_back(cell);
  if (!line.empty() && line.back() == sep) parts.emplace_back();
  return parts;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dwm-harness-test";
  fs::create_directories(dir);
  return dir / name;
}

int cli(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + DWM_CLI + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  SUBCASE("minimal single point") {
    const auto c = parse(R"({"M": 2, "n": 2, "state": {"family": "fock"}})");
    CHECK(c.M == 2);
    CHECK(c.mixing);
    CHECK(c.engines == std::vector<Engine>{Engine::Auto});
    CHECK_FALSE(c.sweep);
    CHECK(c.cap == 200000);
  }
  SUBCASE("symbolic angles and names") {
    const auto c = parse(R"({"M": 2, "n": 2, "state": {"family": "CSS", "theta": "pi/2", "phi": "0"},
                             "engine": "fast_product"})");
    CHECK(c.state.family == StateFamily::Css);
    CHECK(c.state.theta == std::numbers::pi / 2);
    CHECK(c.engines.front() == Engine::FastProduct);
  }
  SUBCASE("explicit sweep values and theta sweeps switch on the CFI") {
    const auto c = parse(R"({"M": 2, "n": 1, "state": {"family": "fock"},
                             "sweep": {"param": "theta", "values": [0, 0.5, "pi/4"]}})");
    REQUIRE(c.sweep);
    CHECK(c.sweep->values.size() == 3);
    CHECK(c.cfi);
  }
  SUBCASE("usage errors") {
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "fock"}, "bogus": 1})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "state": {"family": "fock"}})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "squeezed"}})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "fock", "m_left": 3}})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "css", "theta": "pi"}})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "fock"}, "engine": "magic"})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "fock"},
                              "sweep": {"param": "chi_t", "values": [0.1]}})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "gaussian"},
                              "sweep": {"param": "sigma", "start": 1, "stop": 2, "points": 0}})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "oat"},
                              "sweep": {"param": "chi_t", "values": [0.1], "uniform": true}})"), UsageError);
    CHECK_THROWS_AS(parse(R"({"M": 2, "n": 2, "state": {"family": "fock"}, "output": {"format": "xml"}})"), UsageError);
    CHECK_THROWS_AS(load_config("/nonexistent/config.json"), UsageError);
  }
}

TEST_CASE("grids") {
  const auto lin = make_grid(0.0, 1.0, 5, false);
  CHECK(lin == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  const auto log = make_grid(0.01, 100.0, 5, true);
  CHECK(log.front() == doctest::Approx(0.01));
  CHECK(log[2] == doctest::Approx(1.0));
  CHECK(log.back() == 100.0);
  CHECK(make_grid(3.0, 4.0, 1, false) == std::vector<double>{3.0});
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 0, false), UsageError);
  CHECK_THROWS_AS(make_grid(0.0, 1.0, 3, true), UsageError);
}

TEST_CASE("shipped presets equal the built-in ones") {
  for (const std::string name : {"figure3", "figure4", "figure4-full"}) {
    const auto file = load_config(std::string(DWM_PRESETS) + "/" + name + ".json");
    CHECK(to_json(file) == to_json(builtin_preset(name)));
  }
  CHECK_THROWS_AS(builtin_preset("figure5"), UsageError);
}

TEST_CASE("single-point brute force run") {
  const auto c = parse(R"({"M": 2, "n": 2, "state": {"family": "fock"}, "engine": "BruteForce", "cfi": true})");
  const auto r = run(c);
  REQUIRE(r.rows.size() == 1);
  CHECK(r.rows[0].param == "point");
  CHECK(r.rows[0].qfi == doctest::Approx(8.0).epsilon(1e-12));
  REQUIRE(r.rows[0].cfi);
  CHECK(*r.rows[0].cfi == doctest::Approx(8.0).epsilon(1e-8));
  CHECK(r.rows[0].method == "PureVariance");
  CHECK(r.rows[0].seconds == 0.0);
}

TEST_CASE("figure presets") {
  SUBCASE("twisting sweep") {
    auto c = builtin_preset("figure3");
    c.threads = 4;
    const auto r = run(c);
    REQUIRE(r.rows.size() == 2 * 201);
    CHECK(r.rows[0].method == "FastProduct");
    CHECK(r.rows[1].method == "FormulaRef");
    CHECK(r.rows[0].value == r.rows[1].value);
    std::map<std::string, double> refs(r.references.begin(), r.references.end());
    CHECK(refs["sql"] == 1000.0);
    CHECK(refs["hl_global"] == 1e6);
    CHECK(refs["oat_plateau"] == 50000.0);
    for (const auto& row : r.rows) {
      CHECK(row.qfi >= refs["sql"]);
      CHECK(row.qfi <= refs["hl_global"]);
    }
    // The exact engine sits near M n^2 / 2 away from the revival points.
    const auto& mid = r.rows[2 * 50];
    CHECK(mid.value == doctest::Approx(std::numbers::pi / 4));
    CHECK(std::abs(mid.qfi / 50000.0 - 1.0) < 0.05);
  }
  SUBCASE("fluctuation sweep") {
    const auto r = run(builtin_preset("figure4"));
    REQUIRE(r.rows.size() == 62);
    CHECK(r.rows.front().qfi == doctest::Approx(dwm::qfi_fock_css(3, 4)).epsilon(1e-9));
    CHECK(std::isinf(r.rows.back().value));
    CHECK(r.rows.back().qfi == doctest::Approx(dwm::sigma_inf_qfi(3, 4)).epsilon(1e-12));
    for (const auto& row : r.rows) {
      CHECK(row.method == "DiagonalProduct");
      CHECK(row.qfi <= 36.0 + 1e-9);
      CHECK(row.qfi >= 12.0);
    }
  }
}

TEST_CASE("automatic engine selection") {
  CHECK(resolve_auto(parse(R"({"M": 2, "n": 2, "state": {"family": "css", "theta": 1.0}})")) == Engine::BruteForce);
  CHECK(resolve_auto(parse(R"({"M": 10, "n": 100, "state": {"family": "oat", "chi_t": 0.4}})")) == Engine::FastProduct);
  CHECK(resolve_auto(parse(R"({"M": 10, "n": 20, "state": {"family": "gaussian", "sigma": 2}})")) == Engine::DiagonalProduct);
  CHECK(resolve_auto(parse(R"({"M": 10, "n": 20, "state": {"family": "noon-global"}, "mixing": false})")) == Engine::Formula);
  CHECK_THROWS_AS(resolve_auto(parse(R"({"M": 10, "n": 20, "state": {"family": "noon-global"}})")), InfeasibleError);

  const auto r = run(parse(R"({"M": 10, "n": 20, "state": {"family": "noon-global"}, "mixing": false})"));
  CHECK(r.rows[0].method == "FormulaRef");
  CHECK(r.rows[0].qfi == 40000.0);
}

TEST_CASE("infeasible requests name the feasible engines") {
  const auto c = parse(R"({"M": 10, "n": 20, "state": {"family": "fock"}, "engine": "BruteForce"})");
  CHECK_THROWS_WITH_AS(run(c), doctest::Contains("feasible engines: DiagonalProduct, FastProduct, Formula"), InfeasibleError);
  CHECK_THROWS_AS(run(parse(R"({"M": 1, "n": 2, "state": {"family": "fock"}})")), InfeasibleError);
  CHECK_THROWS_AS(run(parse(R"({"M": 2, "n": 2, "state": {"family": "gaussian"}, "cfi": true})")), InfeasibleError);
  CHECK_THROWS_AS(run(parse(R"({"M": 2, "n": 2, "state": {"family": "fock"}, "engine": "BruteForce", "cap": 5})")),
                  InfeasibleError);
}

TEST_CASE("thread count does not change the output") {
  auto c = parse(R"({"M": 3, "n": 2, "state": {"family": "oat"}, "engines": ["BruteForce", "FastProduct", "Formula"],
                     "sweep": {"param": "chi_t", "start": 0, "stop": "pi", "points": 13}, "cfi": true})");
  const auto serial = csv(run(c));
  c.threads = 5;
  CHECK(csv(run(c)) == serial);
  CHECK(csv(run(c)) == serial);
}

TEST_CASE("result rows respect the Cramer-Rao ordering") {
  const auto c = parse(R"({"M": 2, "n": 3, "state": {"family": "css", "theta": 1.2, "phi": 0.4},
                           "sweep": {"param": "theta", "start": 0, "stop": 3, "points": 7}})");
  for (const auto& row : run(c).rows) {
    CHECK(row.qfi >= 0.0);
    REQUIRE(row.cfi);
    CHECK(*row.cfi <= row.qfi + 1e-8);
  }
}

TEST_CASE("CSV schema") {
  const auto c = parse(R"({"M": 2, "n": 2, "state": {"family": "gaussian"},
                           "sweep": {"param": "sigma", "values": [0.5, 1.0], "uniform": true}})");
  const auto text = csv(run(c));
  std::stringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCsvSchemaLine);
  std::getline(in, line);
  CHECK(line.rfind("# scenario ", 0) == 0);
  std::getline(in, line);
  CHECK(line.rfind("# references ", 0) == 0);
  std::getline(in, line);
  CHECK(line == "param,value,qfi,cfi,method,seconds");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(split(line, ','));
  REQUIRE(rows.size() == 3);
  for (const auto& r : rows) {
    REQUIRE(r.size() == 6);
    CHECK(r[0] == "sigma");
    CHECK(r[3].empty());
    CHECK(r[5] == "0");
  }
  CHECK(rows[2][1] == "inf");
  CHECK(rows[2][2] == "4");
  CHECK(std::stod(rows[0][2]) > 4.0);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(123456789012345.0) == "1.23456789012e+14");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(std::nan("")) == "nan");
}

TEST_CASE("JSON output") {
  const auto c = parse(R"({"M": 2, "n": 2, "state": {"family": "fock"}, "engines": ["BruteForce", "Formula"]})");
  const auto j = result_json(run(c));
  CHECK(j["schema"] == "dwm-results");
  CHECK(j["version"] == 1);
  REQUIRE(j["rows"].size() == 2);
  CHECK(j["rows"][0]["cfi"].is_null());
  CHECK(j["rows"][1]["method"] == "FormulaRef");
  CHECK(j["rows"][1]["qfi"].get<double>() == 8.0);
  CHECK(parse_config(j["scenario"]).M == 2);
}

TEST_CASE("verify suites") {
  const auto ops = verify("operators");
  CHECK(ops.passed());
  CHECK(ops.checks.size() > 10);
  for (const auto& check : ops.checks) CHECK(check.suite == "operators");
  CHECK(verify("fisher-cross").passed());
  CHECK_THROWS_AS(verify("everything"), UsageError);
}

TEST_CASE("command line") {
  const std::string presets = DWM_PRESETS;
  SUBCASE("exit codes") {
    CHECK(cli("basis-info -M 2 -N 2") == 0);
    CHECK(cli("basis-info -M 10 -N 200") == 3);
    CHECK(cli("") == 1);
    CHECK(cli("run") == 1);
    CHECK(cli("run --config " + presets + "/fock-single.json --format yaml") == 1);
    CHECK(cli("run --config /nonexistent.json") == 1);
    CHECK(cli("figure4 --bogus") == 1);
    CHECK(cli("verify nonsense") == 1);
    CHECK(cli("verify operators") == 0);
    CHECK(cli("run --config " + presets + "/fock-single.json --cap 5") == 3);
    CHECK(cli("run --config " + presets + "/fock-single.json", "DWM_CAP=5") == 3);
    CHECK(cli("figure4") == 0);
  }
  SUBCASE("outputs are byte-identical across runs and thread counts") {
    const auto a = scratch("a.csv"), b = scratch("b.csv");
    REQUIRE(cli("figure3 --out " + a.string()) == 0);
    REQUIRE(cli("figure3 --threads 3 --out " + b.string()) == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a).rfind(kCsvSchemaLine, 0) == 0);
  }
  SUBCASE("environment overrides") {
    const auto out = scratch("env.json");
    REQUIRE(cli("run", "DWM_CONFIG=" + presets + "/fock-single.json DWM_FORMAT=json DWM_OUT=" + out.string()) == 0);
    const auto j = json::parse(slurp(out));
    CHECK(j["rows"][0]["qfi"].get<double>() == doctest::Approx(8.0));
    // Flags win over the environment.
    const auto csv_out = scratch("flag.csv");
    REQUIRE(cli("run --format csv --out " + csv_out.string(),
                "DWM_CONFIG=" + presets + "/fock-single.json DWM_FORMAT=json") == 0);
    CHECK(slurp(csv_out).rfind(kCsvSchemaLine, 0) == 0);
  }
}
