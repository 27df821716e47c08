#include "saddle/solver.hpp"

#include <cmath>
#include <string>

namespace saddle {

namespace {

constexpr double kFeasTol = 1e-12;

void check_nu(double nu_t) {
  if (!(nu_t > 0.0) || nu_t > 1.0 || !std::isfinite(nu_t))
    throw ConfigError("step: nu_t must lie in (0, 1]");
}

void check_params(const AlgorithmParams& p) {
  if (!(p.gamma > 0.0) || !(p.eta > 0.0)) throw ConfigError("step: gamma and eta must be positive");
  if (!(p.alpha > 0.0) || !(p.beta > 0.0)) throw ConfigError("step: alpha and beta must be positive");
}

// Projects a prospective iterate. A finite state whose scaled update
// overflows is a diverging run, not a caller mistake, so it aborts with
// the numeric diagnostic rather than tripping the projection contract.
Vec project_update(const FeasibleSet& set, Vec x, long step, const char* field) {
  if (!all_finite(x))
    throw NumericAbort(step, field,
                       "run: non-finite " + std::string(field) + " update at step " +
                           std::to_string(step) + " (diverging iterates)");
  return project(set, std::move(x));
}

// Shared iterate update of both single-timescale solvers.
void advance_iterates(const SolverState& s, const Problem& prob, const AlgorithmParams& p,
                      double nu_t, StepOutputs& out) {
  out.theta_tilde = project_update(prob.primal_set(), s.theta - p.gamma * s.p, s.t, "theta");
  out.next.theta = s.theta + nu_t * (out.theta_tilde - s.theta);
  out.omega_tilde = project_update(prob.dual_set(), s.omega + p.eta * s.d, s.t, "omega");
  out.next.omega = s.omega + nu_t * (out.omega_tilde - s.omega);
}

}  // namespace

SolverState init_state(const Problem& problem, const Vec& theta0, const Vec& omega0, Rng& rng) {
  problem.check_point(theta0, omega0);
  if (!contains(problem.primal_set(), theta0, kFeasTol))
    throw ContractError("init_state: theta0 outside the primal set");
  if (!contains(problem.dual_set(), omega0, kFeasTol))
    throw ContractError("init_state: omega0 outside the dual set");
  SolverState s;
  s.theta = theta0;
  s.omega = omega0;
  Sample xi = problem.sample(rng);
  GradPair g = problem.stoch_grad(theta0, omega0, xi);
  s.p = std::move(g.theta);
  s.d = std::move(g.omega);
  s.t = 0;
  return s;
}

StepOutputs momentum_step(const SolverState& state, const Problem& problem,
                          const AlgorithmParams& params, double nu_t, Rng& rng) {
  check_nu(nu_t);
  check_params(params);
  if (params.alpha * nu_t > 1.0 || params.beta * nu_t > 1.0)
    throw ConfigError("momentum_step: alpha*nu and beta*nu must be <= 1");

  StepOutputs out;
  advance_iterates(state, problem, params, nu_t, out);
  out.sample_used = problem.sample(rng);
  GradPair g = problem.stoch_grad(out.next.theta, out.next.omega, out.sample_used);
  double ca = params.alpha * nu_t;
  double cb = params.beta * nu_t;
  out.next.p = (1.0 - ca) * state.p + ca * g.theta;
  out.next.d = (1.0 - cb) * state.d + cb * g.omega;
  out.next.t = state.t + 1;
  out.nu_used = nu_t;
  return out;
}

StepOutputs vr_momentum_step(const SolverState& state, const Problem& problem,
                             const AlgorithmParams& params, double nu_t, Rng& rng) {
  check_nu(nu_t);
  check_params(params);
  double nu2 = nu_t * nu_t;
  if (params.alpha * nu2 > 1.0 || params.beta * nu2 > 1.0)
    throw ConfigError("vr_momentum_step: alpha*nu^2 and beta*nu^2 must be <= 1");

  StepOutputs out;
  advance_iterates(state, problem, params, nu_t, out);
  // One token, two evaluation points: correction at the old iterate,
  // fresh estimate at the new one.
  out.sample_used = problem.sample(rng);
  GradPair g_new = problem.stoch_grad(out.next.theta, out.next.omega, out.sample_used);
  GradPair g_old = problem.stoch_grad(state.theta, state.omega, out.sample_used);
  double ca = params.alpha * nu2;
  double cb = params.beta * nu2;
  out.next.p = (1.0 - ca) * (state.p - g_old.theta) + g_new.theta;
  out.next.d = (1.0 - cb) * (state.d - g_old.omega) + g_new.omega;
  out.next.t = state.t + 1;
  out.nu_used = nu_t;
  return out;
}

StepOutputs two_timescale_step(const SolverState& state, const Problem& problem, double nu_t,
                               double mu_t, Rng& rng) {
  if (!(nu_t > 0.0) || !(mu_t > 0.0)) throw ConfigError("two_timescale_step: step sizes must be positive");

  StepOutputs out;
  out.sample_used = problem.sample(rng);
  GradPair g = problem.stoch_grad(state.theta, state.omega, out.sample_used);
  out.theta_tilde = project_update(problem.primal_set(), state.theta - nu_t * g.theta, state.t, "theta");
  out.omega_tilde = project_update(problem.dual_set(), state.omega + mu_t * g.omega, state.t, "omega");
  out.next.theta = out.theta_tilde;
  out.next.omega = out.omega_tilde;
  out.next.p = std::move(g.theta);
  out.next.d = std::move(g.omega);
  out.next.t = state.t + 1;
  out.nu_used = nu_t;
  return out;
}

double TwoTimescaleSchedule::nu(long t) const {
  return c1 / std::pow(static_cast<double>(t) + 1.0, p1);
}

double TwoTimescaleSchedule::mu(long t) const {
  return c2 / std::pow(static_cast<double>(t) + 1.0, p2);
}

void TwoTimescaleSchedule::validate() const {
  if (!(c1 > 0.0) || !(c2 > 0.0)) throw ConfigError("two_timescale: c1 and c2 must be positive");
  if (!(p1 > p2)) throw ConfigError("two_timescale: primal exponent must exceed dual exponent");
  if (!(p2 > 0.0)) throw ConfigError("two_timescale: exponents must be positive");
}

const char* to_string(AlgorithmKind k) {
  switch (k) {
    case AlgorithmKind::momentum: return "momentum";
    case AlgorithmKind::vr_momentum: return "vr_momentum";
    case AlgorithmKind::two_timescale: return "two_timescale";
  }
  return "?";
}

std::optional<AlgorithmKind> algorithm_from_string(const std::string& s) {
  if (s == "momentum") return AlgorithmKind::momentum;
  if (s == "vr_momentum") return AlgorithmKind::vr_momentum;
  if (s == "two_timescale") return AlgorithmKind::two_timescale;
  return std::nullopt;
}

namespace {

void check_finite_state(const SolverState& s, long step) {
  const char* field = nullptr;
  if (!all_finite(s.theta)) field = "theta";
  else if (!all_finite(s.omega)) field = "omega";
  else if (!all_finite(s.p)) field = "p";
  else if (!all_finite(s.d)) field = "d";
  if (field)
    throw NumericAbort(step, field,
                       "run: non-finite " + std::string(field) + " at step " + std::to_string(step));
}

}  // namespace

RunResult run(const Problem& problem, const RunSpec& spec, const Vec& theta0, const Vec& omega0,
              std::uint64_t seed, const StepRecorder& recorder) {
  if (spec.T < 0) throw ConfigError("run: negative horizon");
  if (spec.algorithm == AlgorithmKind::two_timescale) {
    spec.two_timescale.validate();
  } else {
    spec.schedule.validate();
  }

  Rng rng = make_run_rng(seed);
  SolverState state = init_state(problem, theta0, omega0, rng);
  check_finite_state(state, 0);

  for (long t = 0; t < spec.T; ++t) {
    StepOutputs out;
    switch (spec.algorithm) {
      case AlgorithmKind::momentum:
        out = momentum_step(state, problem, spec.params, spec.schedule.nu(t), rng);
        break;
      case AlgorithmKind::vr_momentum:
        out = vr_momentum_step(state, problem, spec.params, spec.schedule.nu(t), rng);
        break;
      case AlgorithmKind::two_timescale:
        out = two_timescale_step(state, problem, spec.two_timescale.nu(t),
                                 spec.two_timescale.mu(t), rng);
        break;
    }
    check_finite_state(out.next, t);
    if (recorder) recorder(state, out);
    state = std::move(out.next);
  }
  return RunResult{std::move(state), spec.T};
}

}  // namespace saddle
