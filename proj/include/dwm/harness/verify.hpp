#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

namespace dwm::harness {

struct Check {
  std::string suite;
  std::string name;
  double deviation = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct VerifyReport {
  std::vector<Check> checks;
  double seconds = 0.0;

  std::size_t failures() const;
  bool passed() const { return failures() == 0; }
};

/// "operators", "fisher-cross", "formulas-vs-oracle" and "all".
const std::vector<std::string>& suite_names();

/// Runs a suite; throws UsageError for an unknown name. `cap` bounds every
/// basis the checks build.
VerifyReport verify(const std::string& suite, std::size_t cap = 200000);

/// One line per check plus a summary line.
void print_report(std::ostream& out, const VerifyReport& report);

}  // namespace dwm::harness
