#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qlev::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  std::string detail;  // failure reasons, empty on pass
};

// Runs the twelve acceptance criteria, printing one pass/fail line per
// criterion to out. reduced shrinks the Monte Carlo sample counts (with
// correspondingly looser statistical thresholds) for a quick self-test.
std::vector<CriterionResult> run_criteria(bool reduced, std::ostream& out);

}  // namespace qlev::acceptance
