#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>

namespace saddle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

// Random engine used by solver runs. One engine per run; never shared
// across threads.
using Rng = std::mt19937_64;

// Violated caller contract: dimension mismatch, non-finite input,
// infeasible initialization.
struct ContractError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid run configuration: bad schedule constants, momentum weights
// outside [0,1], unknown keys.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A run produced a non-finite iterate. Carries the step index and the
// first offending field so the failure is attributable.
struct NumericAbort : std::runtime_error {
  NumericAbort(long step_index, std::string field_name, const std::string& what)
      : std::runtime_error(what), step(step_index), field(std::move(field_name)) {}
  long step;
  std::string field;
};

// Iterative subroutine hit its iteration cap; carries the last gap seen.
struct ConvergenceError : std::runtime_error {
  ConvergenceError(double gap, const std::string& what)
      : std::runtime_error(what), last_gap(gap) {}
  double last_gap;
};

// Problem instance fails its own well-posedness requirements
// (degenerate dual curvature, reducible chain, ...).
struct InstanceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Pair of partial gradients of the objective, primal block then dual block.
struct GradPair {
  Vec theta;
  Vec omega;
};

// Constants every problem instance declares at construction. mu is the
// strong-concavity modulus of the dual block; lipschitz_L bounds the
// gradient Lipschitz constant over the instance's validation region and
// serves both the population and per-sample gradient maps; sigma2 bounds
// E||stoch_grad - pop_grad||^2 at fixed arguments.
struct ProblemConstants {
  double mu = 0.0;
  double lipschitz_L = 0.0;
  double sigma2 = 0.0;
  Index dim_primal = 0;
  Index dim_dual = 0;
};

// One oracle draw for the tabular policy-evaluation problem.
struct Transition {
  int s = 0;
  int a = 0;
  int s_next = 0;
};

// One oracle draw for the synthetic family: additive gradient noise,
// kept verbatim so the same draw can be re-evaluated at several points.
struct GaussianDraw {
  Vec theta_noise;
  Vec omega_noise;
};

// Opaque sample token. Tokens are reusable: evaluating a gradient twice
// with the same token must be consistent (same underlying draw).
using Sample = std::variant<std::monostate, Transition, GaussianDraw>;

// SplitMix64 (Vigna). Used for deterministic auxiliary draws: instance
// generation, validation grids, test points. Fully specified arithmetic,
// so results do not depend on the standard library.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0,1).
  double u01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in [lo,hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  // Standard normal via Box-Muller (fresh pair each call, second value
  // discarded; determinism matters more than throughput here).
  double normal();

 private:
  std::uint64_t state_;
};

// Engine for a solver run. The raw seed is whitened through SplitMix64 so
// that small consecutive seeds give unrelated streams.
inline Rng make_run_rng(std::uint64_t seed) {
  SplitMix64 mix(seed);
  std::uint64_t s0 = mix.next();
  std::uint64_t s1 = mix.next();
  return Rng(s0 ^ (s1 << 1));
}

inline bool all_finite(const Vec& v) { return v.allFinite(); }

}  // namespace saddle
