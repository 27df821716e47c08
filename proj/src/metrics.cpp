#include "saddle/metrics.hpp"

#include <cmath>
#include <sstream>

namespace saddle {

Vec inner_maximizer(const Problem& problem, const Vec& theta, double tol, long max_iter) {
  if (theta.size() != problem.constants().dim_primal)
    throw ContractError("inner_maximizer: primal dimension mismatch");
  if (auto closed = problem.inner_max(theta)) return *closed;

  const FeasibleSet& set = problem.dual_set();
  double L = problem.constants().lipschitz_L;
  if (!(L > 0.0)) throw ContractError("inner_maximizer: nonpositive Lipschitz constant");
  double step = 1.0 / L;
  Vec omega = set.kind() == SetKind::ball ? set.center()
            : set.kind() == SetKind::box ? Vec(0.5 * (set.lower() + set.upper()))
                                         : Vec(Vec::Zero(set.dim()));
  double gap = std::numeric_limits<double>::infinity();
  for (long k = 0; k < max_iter; ++k) {
    Vec next = project(set, omega + step * problem.pop_grad(theta, omega).omega);
    gap = (next - omega).norm();
    omega = std::move(next);
    if (gap <= tol * step) return omega;
  }
  std::ostringstream msg;
  msg << "inner_maximizer: no fixed point within " << max_iter << " iterations (last gap " << gap
      << ")";
  throw ConvergenceError(gap, msg.str());
}

MetricTerms metric_terms(const StepOutputs& out, const SolverState& state, const Problem& problem,
                         double gamma, double L, double inner_tol) {
  if (!(gamma > 0.0) || !(L > 0.0)) throw ContractError("metric_terms: gamma and L must be positive");
  MetricTerms terms;
  terms.drift = (out.theta_tilde - state.theta).norm() / gamma;
  GradPair pop = problem.pop_grad(state.theta, state.omega);
  terms.grad_err = (pop.theta - state.p).norm();
  Vec omega_star = inner_maximizer(problem, state.theta, inner_tol);
  terms.dual_gap = L * (state.omega - omega_star).norm();
  return terms;
}

double metric_M(const StepOutputs& out, const SolverState& state, const Problem& problem,
                double gamma, double L) {
  return metric_terms(out, state, problem, gamma, L).M();
}

double metric_Mbar(const StepOutputs& out, const SolverState& state, const Problem& problem,
                   double gamma, double L) {
  return metric_terms(out, state, problem, gamma, L).Mbar();
}

namespace {

LyapunovRecord lyapunov_common(const SolverState& state, const Problem& problem,
                               const AlgorithmParams& params, double L, double est_weight,
                               double inner_tol) {
  if (!(params.gamma > 0.0) || !(params.eta > 0.0))
    throw ContractError("lyapunov: gamma and eta must be positive");
  double mu = problem.constants().mu;
  if (!(mu > 0.0)) throw ContractError("lyapunov: nonpositive mu");

  LyapunovRecord rec;
  Vec omega_star = inner_maximizer(problem, state.theta, inner_tol);
  GradPair pop = problem.pop_grad(state.theta, state.omega);

  double dual_w = 10.0 * L * L * params.gamma / (mu * params.eta);
  rec.dual_term = dual_w * (state.omega - omega_star).squaredNorm();
  rec.est_p_term = est_weight * (state.p - pop.theta).squaredNorm();
  rec.est_d_term = est_weight * (state.d - pop.omega).squaredNorm();

  double j_theta = problem.pop_value(state.theta, omega_star);
  if (auto j_star = problem.primal_min_value()) {
    rec.primal_gap = j_theta - *j_star;
    rec.partial = false;
    rec.value = rec.primal_gap + rec.dual_term + rec.est_p_term + rec.est_d_term;
  } else {
    rec.primal_gap = std::numeric_limits<double>::quiet_NaN();
    rec.partial = true;
    rec.value = rec.dual_term + rec.est_p_term + rec.est_d_term;
  }
  return rec;
}

}  // namespace

LyapunovRecord lyapunov_q(const SolverState& state, const Problem& problem,
                          const AlgorithmParams& params, double L, double inner_tol) {
  double mu = problem.constants().mu;
  return lyapunov_common(state, problem, params, L, 2.0 * params.gamma / (mu * params.eta),
                         inner_tol);
}

LyapunovRecord lyapunov_s(const SolverState& state, const Problem& problem,
                          const AlgorithmParams& params, double L, double nu_prev,
                          double inner_tol) {
  if (!(nu_prev > 0.0)) throw ContractError("lyapunov_s: nu_prev must be positive");
  double mu = problem.constants().mu;
  return lyapunov_common(state, problem, params, L,
                         2.0 * params.gamma / (mu * params.eta * nu_prev), inner_tol);
}

double loglog_slope(const std::vector<std::pair<double, double>>& series, std::size_t lo,
                    std::size_t hi) {
  if (hi > series.size() || lo >= hi) throw ContractError("loglog_slope: bad window");
  if (hi - lo < 10) throw ContractError("loglog_slope: window needs at least 10 points");

  std::ostringstream bad;
  bool any_bad = false;
  for (std::size_t i = lo; i < hi; ++i) {
    if (!(series[i].first > 0.0) || !(series[i].second > 0.0)) {
      bad << (any_bad ? ", " : "") << i;
      any_bad = true;
    }
  }
  if (any_bad)
    throw ContractError("loglog_slope: nonpositive entries at indices " + bad.str());

  double n = static_cast<double>(hi - lo);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = lo; i < hi; ++i) {
    double x = std::log(series[i].first);
    double y = std::log(series[i].second);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double denom = n * sxx - sx * sx;
  if (denom <= 0.0) throw ContractError("loglog_slope: degenerate abscissae");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace saddle
