#include "dwm/harness/output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

namespace dwm::harness {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

void write_csv(std::ostream& out, const RunResult& result) {
  const auto& c = result.config;
  out << kCsvSchemaLine << '\n';
  out << "# scenario name=" << c.name << " M=" << c.M << " n=" << c.n
      << " state=" << to_string(c.state.family) << " mixing=" << (c.mixing ? "true" : "false")
      << '\n';
  out << "# references";
  for (const auto& [key, value] : result.references) out << ' ' << key << '=' << format_number(value);
  out << '\n';
  out << kCsvHeader << '\n';
  for (const auto& r : result.rows) {
    out << r.param << ',' << format_number(r.value) << ',' << format_number(r.qfi) << ','
        << (r.cfi ? format_number(*r.cfi) : "") << ',' << r.method << ','
        << format_number(r.seconds) << '\n';
  }
}

nlohmann::json result_json(const RunResult& result) {
  // Non-finite values go out as strings so the document stays valid JSON.
  auto number = [](double x) -> nlohmann::json {
    if (std::isfinite(x)) return x;
    return format_number(x);
  };
  nlohmann::json j;
  j["schema"] = "dwm-results";
  j["version"] = 1;
  j["scenario"] = to_json(result.config);
  j["references"] = nlohmann::json::object();
  for (const auto& [key, value] : result.references) j["references"][key] = number(value);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : result.rows) {
    j["rows"].push_back({{"param", r.param},
                         {"value", number(r.value)},
                         {"qfi", number(r.qfi)},
                         {"cfi", r.cfi ? number(*r.cfi) : nlohmann::json(nullptr)},
                         {"method", r.method},
                         {"seconds", r.seconds}});
  }
  j["warnings"] = result.warnings;
  return j;
}

void write_json(std::ostream& out, const RunResult& result) {
  out << result_json(result).dump(2) << '\n';
}

void write_result(const RunResult& result) {
  const auto& spec = result.config.output;
  auto emit = [&](std::ostream& out) {
    out.precision(17);
    if (spec.format == OutputFormat::Json) write_json(out, result);
    else write_csv(out, result);
  };
  if (spec.path == "-") {
    emit(std::cout);
    return;
  }
  std::ofstream file(spec.path);
  if (!file) throw UsageError("cannot open output file " + spec.path);
  emit(file);
  if (!file) throw std::runtime_error("failed writing " + spec.path);
}

}  // namespace dwm::harness
