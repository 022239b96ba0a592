#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rbmld {

struct CriterionResult {
  int id;
  std::string name;
  bool passed;
  std::string detail;
  double seconds;
  double budget_seconds;
};

struct AcceptanceOptions {
  bool fast = false;            // reduced sample sizes, for smoke runs
  std::uint64_t seed = 20240611;
  unsigned workers = 0;
};

std::vector<int> criterion_ids();
CriterionResult run_criterion(int id, const AcceptanceOptions& opt);

// One line per criterion, without timings, so reruns compare byte for byte.
std::string report_line(const CriterionResult& r);

}  // namespace rbmld
