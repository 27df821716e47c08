#pragma once

#include "saddle/problem.hpp"
#include "saddle/schedule.hpp"
#include "saddle/solver.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace saddle {

// argmax_omega F(theta, .): the closed form when the problem has one,
// otherwise projected gradient ascent with step 1/L from the dual
// set's center (origin for all_space), stopped once an update moves
// less than tol/L. Throws ConvergenceError (carrying the last gap) at
// max_iter.
Vec inner_maximizer(const Problem& problem, const Vec& theta, double tol = 1e-10,
                    long max_iter = 1000000);

// The three components of the stationarity measure at the pre-step
// state, using the recorded projected target theta_tilde:
//   drift    = ||theta_tilde - theta|| / gamma
//   grad_err = ||pop_grad_theta(theta, omega) - p||
//   dual_gap = L * ||omega - omega_star(theta)||
struct MetricTerms {
  double drift = 0.0;
  double grad_err = 0.0;
  double dual_gap = 0.0;
  double M() const { return drift + grad_err + dual_gap; }
  double Mbar() const { return drift * drift + grad_err * grad_err + dual_gap * dual_gap; }
};

MetricTerms metric_terms(const StepOutputs& out, const SolverState& state, const Problem& problem,
                         double gamma, double L, double inner_tol = 1e-10);

double metric_M(const StepOutputs& out, const SolverState& state, const Problem& problem,
                double gamma, double L);
double metric_Mbar(const StepOutputs& out, const SolverState& state, const Problem& problem,
                   double gamma, double L);

// Potential-function diagnostic at one state. For the momentum solver:
//   Q = (J(theta) - J*) + (10 L^2 gamma/(mu eta)) ||omega - omega*||^2
//       + (2 gamma/(mu eta)) (||p - grad_theta F||^2 + ||d - grad_omega F||^2)
// The variance-reduced form S divides the estimator-error weight by the
// previous step size (nu_prev = nu_0 at t = 0). When the instance cannot
// supply J*, the record is marked partial and the value omits the
// primal-gap term.
struct LyapunovRecord {
  double value = 0.0;
  double primal_gap = 0.0;
  double dual_term = 0.0;
  double est_p_term = 0.0;
  double est_d_term = 0.0;
  bool partial = false;
};

LyapunovRecord lyapunov_q(const SolverState& state, const Problem& problem,
                          const AlgorithmParams& params, double L, double inner_tol = 1e-10);

LyapunovRecord lyapunov_s(const SolverState& state, const Problem& problem,
                          const AlgorithmParams& params, double L, double nu_prev,
                          double inner_tol = 1e-10);

// Least-squares slope of log(value) against log(t) over the half-open
// index window [lo, hi) of the series. Requires >= 10 points and
// positive (t, value) pairs; offending indices are listed in the error.
double loglog_slope(const std::vector<std::pair<double, double>>& series, std::size_t lo,
                    std::size_t hi);

// One row of the metric trace, in CSV column order.
struct MetricRecord {
  long t = 0;
  double nu = 0.0;
  double drift = 0.0;
  double grad_err = 0.0;
  double dual_gap = 0.0;
  double M = 0.0;
  double Mbar = 0.0;
  double running_avg = 0.0;
  std::optional<double> lyapunov;
};

}  // namespace saddle
