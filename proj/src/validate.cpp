#include "saddle/validate.hpp"

#include <cmath>
#include <limits>

namespace saddle {

ValidationReport validate_problem(const Problem& problem, std::uint64_t seed, long trials,
                                  double tol) {
  if (trials < 2) throw ContractError("validate_problem: need at least 2 trials");
  if (!(tol >= 0.0)) throw ContractError("validate_problem: negative tolerance");

  const ProblemConstants& c = problem.constants();
  ValidationReport report;
  auto add = [&report](std::string name, double observed, double bound, bool pass) {
    report.checks.push_back({std::move(name), observed, bound, pass});
  };

  add("constants: mu > 0", c.mu, 0.0, c.mu > 0.0);
  add("constants: L >= mu", c.mu, c.lipschitz_L, c.lipschitz_L >= c.mu);
  add("constants: sigma2 >= 0", c.sigma2, 0.0, c.sigma2 >= 0.0);
  add("constants: dims positive", static_cast<double>(std::min(c.dim_primal, c.dim_dual)), 0.0,
      c.dim_primal > 0 && c.dim_dual > 0);

  SplitMix64 points(seed);
  Rng draws = make_run_rng(seed ^ 0x9e3779b97f4a7c15ULL);

  // Unbiasedness and variance at a few fixed points.
  const int n_points = 4;
  double worst_gap = 0.0;
  double gap_bound = 4.0 * std::sqrt(c.sigma2 / static_cast<double>(trials)) + tol;
  double worst_var = 0.0;
  double worst_var_bound = std::numeric_limits<double>::infinity();
  bool var_pass = true;
  for (int k = 0; k < n_points; ++k) {
    Vec theta = problem.validation_theta(points);
    Vec omega = problem.validation_omega(points);
    GradPair pop = problem.pop_grad(theta, omega);
    if (!all_finite(pop.theta) || !all_finite(pop.omega))
      throw ContractError("validate_problem: non-finite population gradient");

    Vec mean_t = Vec::Zero(theta.size());
    Vec mean_w = Vec::Zero(omega.size());
    double sq = 0.0, sq2 = 0.0;
    for (long i = 0; i < trials; ++i) {
      Sample xi = problem.sample(draws);
      GradPair g = problem.stoch_grad(theta, omega, xi);
      if (g.theta.size() != theta.size() || g.omega.size() != omega.size())
        throw ContractError("validate_problem: gradient shape mismatch");
      if (!all_finite(g.theta) || !all_finite(g.omega))
        throw ContractError("validate_problem: non-finite stochastic gradient");
      mean_t += g.theta;
      mean_w += g.omega;
      double dev = (g.theta - pop.theta).squaredNorm() + (g.omega - pop.omega).squaredNorm();
      sq += dev;
      sq2 += dev * dev;
    }
    double n = static_cast<double>(trials);
    mean_t /= n;
    mean_w /= n;
    double gap = std::sqrt((mean_t - pop.theta).squaredNorm() + (mean_w - pop.omega).squaredNorm());
    worst_gap = std::max(worst_gap, gap);

    double var = sq / n;
    double var_std = std::sqrt(std::max(0.0, sq2 / n - var * var) / n);
    double var_bound = c.sigma2 * (1.0 + tol) + 4.0 * var_std;
    if (var - var_bound > worst_var - worst_var_bound) {
      worst_var = var;
      worst_var_bound = var_bound;
    }
    var_pass = var_pass && var <= var_bound;
  }
  add("unbiasedness: ||mean - pop|| <= 4 sqrt(sigma2/N) + tol", worst_gap, gap_bound,
      worst_gap <= gap_bound);
  add("variance: E||stoch - pop||^2 <= sigma2 (1+tol) + 4 se", worst_var, worst_var_bound,
      var_pass);

  // Population-gradient Lipschitz ratios over sampled pairs.
  long n_pairs = std::min<long>(std::max<long>(trials, 100), 1000);
  double worst_ratio = 0.0;
  for (long i = 0; i < n_pairs; ++i) {
    Vec t1 = problem.validation_theta(points);
    Vec t2 = problem.validation_theta(points);
    Vec w1 = problem.validation_omega(points);
    Vec w2 = problem.validation_omega(points);
    double dist = std::sqrt((t1 - t2).squaredNorm() + (w1 - w2).squaredNorm());
    if (dist < 1e-9) continue;
    GradPair g1 = problem.pop_grad(t1, w1);
    GradPair g2 = problem.pop_grad(t2, w2);
    double diff =
        std::sqrt((g1.theta - g2.theta).squaredNorm() + (g1.omega - g2.omega).squaredNorm());
    worst_ratio = std::max(worst_ratio, diff / dist);
  }
  double ratio_bound = c.lipschitz_L * (1.0 + tol) + tol;
  add("lipschitz: pop-gradient ratio <= L (1+tol)", worst_ratio, ratio_bound,
      worst_ratio <= ratio_bound);

  report.pass = true;
  for (const auto& chk : report.checks) report.pass = report.pass && chk.pass;
  return report;
}

}  // namespace saddle
