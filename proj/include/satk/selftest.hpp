#ifndef SATK_SELFTEST_HPP
#define SATK_SELFTEST_HPP

#include <functional>
#include <string>
#include <vector>

namespace satk {

struct CriterionResult {
  int id = 0;
  std::string title;
  bool pass = false;
  std::string detail;  // measured values against the pinned tolerances
  double seconds = 0.0;
};

struct SelftestOptions {
  std::vector<int> only;  // criterion ids; empty runs all twelve
  int workers = 0;        // for the Monte Carlo criterion
  std::function<void(const CriterionResult&)> on_result;
};

std::vector<CriterionResult> run_selftest(const SelftestOptions& opt = {});

// "PASS [ 4] title :: detail (1.2 s)"
std::string format_result(const CriterionResult& r);

}  // namespace satk

#endif
