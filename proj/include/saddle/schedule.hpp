#pragma once

#include "saddle/types.hpp"

#include <optional>
#include <vector>

namespace saddle {

// Step-size shapes. Decaying kinds evaluate at the current step index,
// fixed kinds evaluate at the horizon and hold that value.
enum class ScheduleKind { decaying_sqrt, fixed_sqrt, decaying_cbrt, fixed_cbrt };

const char* to_string(ScheduleKind k);
std::optional<ScheduleKind> schedule_kind_from_string(const std::string& s);

// nu_t = a/(t+b)^(1/2) or a/(t+b)^(1/3); fixed kinds substitute t = T.
struct ScheduleSpec {
  ScheduleKind kind = ScheduleKind::decaying_sqrt;
  double a = 1.0 / 16.0;
  double b = 3.0;
  std::optional<long> horizon_T;  // required for fixed kinds

  // Throws ConfigError unless a > 0, b >= 1, nu_0 <= 1, and a horizon is
  // present when the kind is fixed.
  void validate() const;

  double nu(long t) const;
};

// Step-size multipliers of the single-loop solvers. gamma scales the
// primal descent target, eta the dual ascent target, alpha/beta the
// gradient-estimator mixing weights.
struct AlgorithmParams {
  double gamma = 0.0;
  double eta = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
};

// One inequality of a parameter certificate, reported as lhs <= rhs.
struct CheckItem {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

struct ValidatorReport {
  std::string name;
  bool pass = false;
  std::vector<CheckItem> checks;
};

// Sufficient-condition certificates for the four convergence regimes.
// Report-only: runs proceed regardless, the report is attached to run
// artifacts. Decaying momentum regime.
ValidatorReport validate_thm1(const ProblemConstants& c, const AlgorithmParams& p, double b);
// Fixed-step momentum regime.
ValidatorReport validate_thm2(const ProblemConstants& c, const AlgorithmParams& p, double b);
// Decaying variance-reduced regime.
ValidatorReport validate_thm3(const ProblemConstants& c, const AlgorithmParams& p, double b);
// Fixed-step variance-reduced regime.
ValidatorReport validate_thm4(const ProblemConstants& c, const AlgorithmParams& p, double b);

}  // namespace saddle
