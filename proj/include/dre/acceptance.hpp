#ifndef DRE_ACCEPTANCE_HPP
#define DRE_ACCEPTANCE_HPP

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dre {

inline constexpr int kCriterionCount = 10;

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string summary;
  /// Named numbers behind the verdict, in a fixed order.
  std::vector<std::pair<std::string, double>> metrics;
};

struct AcceptanceOptions {
  std::uint64_t seed = 20241019;
  /// Multiplies every sample size (1 = the full protocol). Tolerances stay fixed.
  double scale = 1.0;
};

std::string criterion_name(int id);

/// Runs one criterion (1..10). Exceptions from the samplers are caught and
/// turned into a failing result naming the error.
CriterionResult run_criterion(int id, const AcceptanceOptions& opts);

/// "criterion N <name>: PASS|FAIL  <summary>"
std::string format_result_line(const CriterionResult& r);

}  // namespace dre

#endif  // DRE_ACCEPTANCE_HPP
