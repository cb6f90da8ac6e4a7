#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geoest::bench {

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  /// Lines reported alongside the checks without affecting the verdict.
  std::vector<std::string> notes;
  bool passed() const;
};

struct AcceptanceOptions {
  int threads = 1;
  /// When set, result files of the underlying experiments are written here.
  std::optional<std::string> out_dir;
};

inline constexpr int kCriterionCount = 10;

CriterionResult run_criterion(int id, const AcceptanceOptions& opts);
/// Every criterion in `ids` (all when empty), in the given order.
std::vector<CriterionResult> run_acceptance_suite(const AcceptanceOptions& opts, const std::vector<int>& ids = {});

/// "PASS  3  title" followed by one indented line per check and note.
std::string format_result(const CriterionResult& r);

}  // namespace geoest::bench
