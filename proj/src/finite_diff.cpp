#include "saddle/finite_diff.hpp"

#include <algorithm>

namespace saddle {

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x, double h) {
  if (!(h > 0.0)) throw ContractError("finite_diff_grad: h must be positive");
  if (!all_finite(x)) throw ContractError("finite_diff_grad: non-finite point");
  Vec g(x.size());
  Vec probe = x;
  for (Index i = 0; i < x.size(); ++i) {
    double xi = x[i];
    probe[i] = xi + h;
    double fp = f(probe);
    probe[i] = xi - h;
    double fm = f(probe);
    probe[i] = xi;
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

double rel_err(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) throw ContractError("rel_err: dimension mismatch");
  return (a - b).norm() / std::max({1.0, a.norm(), b.norm()});
}

}  // namespace saddle
