#pragma once

#include "saddle/feasible_set.hpp"
#include "saddle/types.hpp"

#include <atomic>
#include <memory>
#include <optional>

namespace saddle {

// Stochastic minimax problem min_theta max_omega F(theta, omega) with
// F strongly concave in omega. Instances are immutable after
// construction; all oracle calls are const and safe to share across
// threads (each run still uses its own Rng).
class Problem {
 public:
  virtual ~Problem() = default;

  virtual const ProblemConstants& constants() const = 0;
  virtual const FeasibleSet& primal_set() const = 0;
  virtual const FeasibleSet& dual_set() const = 0;

  // Draws one oracle sample. Tokens are reusable: stoch_grad may be
  // evaluated at several points with the same token.
  virtual Sample sample(Rng& rng) const = 0;

  // Unbiased gradient estimate at (theta, omega) under the given token.
  virtual GradPair stoch_grad(const Vec& theta, const Vec& omega, const Sample& xi) const = 0;

  // Population (exact) gradient.
  virtual GradPair pop_grad(const Vec& theta, const Vec& omega) const = 0;

  // Population objective F(theta, omega).
  virtual double pop_value(const Vec& theta, const Vec& omega) const = 0;

  // Per-sample objective f(theta, omega; xi) whose gradient is
  // stoch_grad; used by finite-difference checks. Optional.
  virtual std::optional<double> stoch_value(const Vec&, const Vec&, const Sample&) const {
    return std::nullopt;
  }

  // Closed-form argmax_omega F(theta, .) when available.
  virtual std::optional<Vec> inner_max(const Vec&) const { return std::nullopt; }

  // Lower bound J* on J(theta) = max_omega F(theta, omega), exact when
  // the instance can certify it; used by Lyapunov diagnostics.
  virtual std::optional<double> primal_min_value() const { return std::nullopt; }

  // Approximate minimizer of J over the primal set when the instance can
  // produce one.
  virtual std::optional<Vec> primal_minimizer() const { return std::nullopt; }

  // Deterministic draws from the region the declared constants certify.
  // For bounded sets this is the set itself; unbounded sets use an
  // instance-specific bounded region that contains the iterates of
  // interest.
  virtual Vec validation_theta(SplitMix64& rng) const = 0;
  virtual Vec validation_omega(SplitMix64& rng) const = 0;

  // Convenience for contract checks.
  void check_point(const Vec& theta, const Vec& omega) const;
};

// Forwarding wrapper that counts oracle draws. Used for sample
// accounting in run summaries and tests.
class CountingProblem : public Problem {
 public:
  explicit CountingProblem(const Problem& inner) : inner_(inner) {}

  long samples_drawn() const { return count_.load(); }
  void reset() { count_.store(0); }

  const ProblemConstants& constants() const override { return inner_.constants(); }
  const FeasibleSet& primal_set() const override { return inner_.primal_set(); }
  const FeasibleSet& dual_set() const override { return inner_.dual_set(); }
  Sample sample(Rng& rng) const override {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_.sample(rng);
  }
  GradPair stoch_grad(const Vec& t, const Vec& w, const Sample& xi) const override {
    return inner_.stoch_grad(t, w, xi);
  }
  GradPair pop_grad(const Vec& t, const Vec& w) const override { return inner_.pop_grad(t, w); }
  double pop_value(const Vec& t, const Vec& w) const override { return inner_.pop_value(t, w); }
  std::optional<double> stoch_value(const Vec& t, const Vec& w, const Sample& xi) const override {
    return inner_.stoch_value(t, w, xi);
  }
  std::optional<Vec> inner_max(const Vec& t) const override { return inner_.inner_max(t); }
  std::optional<double> primal_min_value() const override { return inner_.primal_min_value(); }
  std::optional<Vec> primal_minimizer() const override { return inner_.primal_minimizer(); }
  Vec validation_theta(SplitMix64& rng) const override { return inner_.validation_theta(rng); }
  Vec validation_omega(SplitMix64& rng) const override { return inner_.validation_omega(rng); }

 private:
  const Problem& inner_;
  mutable std::atomic<long> count_{0};
};

}  // namespace saddle
