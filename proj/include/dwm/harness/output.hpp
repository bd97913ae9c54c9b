#pragma once

#include <ostream>
#include <string>

#include <json.hpp>

#include "dwm/harness/run.hpp"

namespace dwm::harness {

inline constexpr const char* kCsvSchemaLine = "# dwm-results v1 columns=param,value,qfi,cfi,method,seconds";
inline constexpr const char* kCsvHeader = "param,value,qfi,cfi,method,seconds";

/// %.12g, with "inf", "-inf" and "nan" spelled out.
std::string format_number(double x);

void write_csv(std::ostream& out, const RunResult& result);
nlohmann::json result_json(const RunResult& result);
void write_json(std::ostream& out, const RunResult& result);

/// Writes in result.config.output.format to its path ("-" is stdout).
void write_result(const RunResult& result);

}  // namespace dwm::harness
