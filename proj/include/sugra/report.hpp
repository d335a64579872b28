// Check result records shared by test suites and the CLI runner.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sugra {

struct CheckResult {
  std::string suite;
  std::uint64_t case_seed = 0;
  std::string check_id;
  // Stable human-readable name of the identity being certified.
  std::string anchor;
  bool exact_zero = false;
  // For failed checks: a description of one nonzero component
  // (field/component/derivative index/monomial/coefficient).
  std::string witness;
  std::int64_t elapsed_ms = 0;
};

struct ReportSummary {
  int total = 0;
  int passed = 0;
  bool all_passed() const { return total == passed; }
};

std::string to_json_line(const CheckResult& r);
std::string to_text_line(const CheckResult& r);

}  // namespace sugra
