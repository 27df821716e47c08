#pragma once

#include "saddle/problem.hpp"

#include <string>
#include <vector>

namespace saddle {

struct ValidationCheck {
  std::string name;
  double observed = 0.0;
  double bound = 0.0;
  bool pass = false;
};

struct ValidationReport {
  bool pass = false;
  std::vector<ValidationCheck> checks;
};

// Statistical audit of a problem's oracle against its declared
// constants, at points drawn from the validation region:
//  - unbiasedness: ||mean stoch_grad - pop_grad|| within the CLT bound
//    4 sqrt(sigma2/trials) plus tol,
//  - Lipschitz: population-gradient difference ratios within
//    lipschitz_L * (1 + tol),
//  - variance: empirical E||stoch - pop||^2 within sigma2 * (1 + tol)
//    plus a four-standard-error allowance,
//  - declared constants sane (mu > 0, L >= mu, dims positive).
// Throws ContractError if the oracle itself misbehaves (shape
// mismatches, non-finite output).
ValidationReport validate_problem(const Problem& problem, std::uint64_t seed, long trials,
                                  double tol);

}  // namespace saddle
