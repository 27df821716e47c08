#pragma once

#include "saddle/problem.hpp"
#include "saddle/schedule.hpp"

#include <functional>
#include <optional>

namespace saddle {

// Iterates and gradient trackers after t steps. p tracks the primal
// gradient, d the dual gradient; for the two-timescale baseline they
// mirror the most recent raw stochastic gradient.
struct SolverState {
  Vec theta;
  Vec omega;
  Vec p;
  Vec d;
  long t = 0;
};

// Everything one step produces. theta_tilde and omega_tilde are the
// projected targets exactly as used inside the step; diagnostics must
// consume these recorded values, never recompute them.
struct StepOutputs {
  SolverState next;
  Vec theta_tilde;
  Vec omega_tilde;
  double nu_used = 0.0;
  Sample sample_used;
};

// Feasibility-checks (theta0, omega0), draws the initial sample and
// starts both trackers at the stochastic gradient. Consumes one sample.
SolverState init_state(const Problem& problem, const Vec& theta0, const Vec& omega0, Rng& rng);

// One step of the momentum solver:
//   theta_tilde = P_Theta(theta - gamma p),  theta' = theta + nu (theta_tilde - theta)
//   omega_tilde = P_Omega(omega + eta d),    omega' = omega + nu (omega_tilde - omega)
//   p' = (1 - alpha nu) p + alpha nu g_theta(theta', omega'; xi)
//   d' = (1 - beta nu) d + beta nu g_omega(theta', omega'; xi)
// with one fresh sample xi drawn after the iterate update. Requires
// nu in (0,1], alpha*nu <= 1, beta*nu <= 1.
StepOutputs momentum_step(const SolverState& state, const Problem& problem,
                          const AlgorithmParams& params, double nu_t, Rng& rng);

// One step of the variance-reduced variant. Same iterate updates; the
// trackers use the fresh sample at both the new and the old point:
//   p' = (1 - alpha nu^2)(p - g_theta(theta, omega; xi)) + g_theta(theta', omega'; xi)
// (d' analogous with beta). Evaluation order: iterates first, then the
// sample is drawn, then both gradient evaluations under that one token.
// Requires nu in (0,1], alpha*nu^2 <= 1, beta*nu^2 <= 1.
StepOutputs vr_momentum_step(const SolverState& state, const Problem& problem,
                             const AlgorithmParams& params, double nu_t, Rng& rng);

// Projected SGDA baseline with separate primal/dual step sizes, one
// fresh sample per step evaluated at the current iterate.
StepOutputs two_timescale_step(const SolverState& state, const Problem& problem, double nu_t,
                               double mu_t, Rng& rng);

// Baseline step sizes nu_t = c1/(t+1)^p1 (primal), mu_t = c2/(t+1)^p2
// (dual), with p1 > p2 so the primal clock runs slower.
struct TwoTimescaleSchedule {
  double c1 = 0.1;
  double p1 = 0.9;
  double c2 = 0.5;
  double p2 = 0.5;
  double nu(long t) const;
  double mu(long t) const;
  void validate() const;
};

enum class AlgorithmKind { momentum, vr_momentum, two_timescale };

const char* to_string(AlgorithmKind k);
std::optional<AlgorithmKind> algorithm_from_string(const std::string& s);

struct RunSpec {
  AlgorithmKind algorithm = AlgorithmKind::momentum;
  AlgorithmParams params;
  ScheduleSpec schedule;
  TwoTimescaleSchedule two_timescale;
  long T = 0;
};

// Called once per step with the pre-step state and the step's outputs.
using StepRecorder = std::function<void(const SolverState& before, const StepOutputs& out)>;

struct RunResult {
  SolverState final_state;
  long steps = 0;
};

// Runs T steps from (theta0, omega0) with a run-local engine derived
// from seed. Total oracle draws: exactly T + 1 (one at init, one per
// step). Aborts with NumericAbort naming the step and field if an
// iterate turns non-finite. T = 0 is allowed and performs only the
// initialization.
RunResult run(const Problem& problem, const RunSpec& spec, const Vec& theta0, const Vec& omega0,
              std::uint64_t seed, const StepRecorder& recorder = {});

}  // namespace saddle
