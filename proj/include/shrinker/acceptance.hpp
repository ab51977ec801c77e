#pragma once

#include <functional>
#include <string>
#include <vector>

namespace shrinker {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // measured values, and the first failed check if any
  double seconds = 0;
};

// Ids 1..16; 16 summarises the others (all pass, total time budget).
const std::vector<std::pair<int, std::string>>& acceptance_criteria();

CriterionResult run_criterion(int id);

// Runs the requested ids (empty: all) in order; `progress` sees each result
// as it completes. Id 16 is evaluated from the results of 1..15, which are
// run if not requested explicitly.
std::vector<CriterionResult> run_acceptance(const std::vector<int>& ids = {},
                                            const std::function<void(const CriterionResult&)>& progress = {});

// "criterion  3 PASS  title  [1.23 s]  detail"
std::string format_criterion(const CriterionResult& r);

}  // namespace shrinker
