#include "saddle/problem.hpp"

namespace saddle {

void Problem::check_point(const Vec& theta, const Vec& omega) const {
  if (theta.size() != constants().dim_primal) throw ContractError("primal dimension mismatch");
  if (omega.size() != constants().dim_dual) throw ContractError("dual dimension mismatch");
  if (!all_finite(theta) || !all_finite(omega)) throw ContractError("non-finite point");
}

}  // namespace saddle
