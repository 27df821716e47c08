#pragma once

#include "saddle/problem.hpp"

#include <Eigen/Cholesky>

#include <memory>
#include <mutex>
#include <optional>

namespace saddle {

// Solves K x = b for SPD K via LDLT with one refinement pass.
Vec solve_spd(const Mat& K, const Vec& b);

// Construction recipe for the synthetic family
//   F(theta, omega) = c0 sum_i cos(theta_i) + (lambda/2)||theta||^2
//                     + G(theta)' omega - (1/2) omega' K omega,
//   G_i(theta) = sin(a_i' theta),
// with additive Gaussian gradient noise of per-coordinate scale
// noise_sigma. K must be symmetric positive definite.
struct SyntheticSpec {
  double c0 = 0.25;
  double lambda = 0.25;
  Mat A;  // n x d, rows a_i
  Mat K;  // n x n
  double noise_sigma = 1.0;
  FeasibleSet primal_set = FeasibleSet::all_space(1);
  FeasibleSet dual_set = FeasibleSet::all_space(1);
  // Radius of the primal validation ball when the primal set is
  // unbounded (bounded sets are sampled directly).
  double primal_validation_radius = 3.0;
};

class QuadraticDualSynthetic : public Problem {
 public:
  explicit QuadraticDualSynthetic(SyntheticSpec spec);

  const ProblemConstants& constants() const override { return constants_; }
  const FeasibleSet& primal_set() const override { return spec_.primal_set; }
  const FeasibleSet& dual_set() const override { return spec_.dual_set; }

  Sample sample(Rng& rng) const override;
  GradPair stoch_grad(const Vec& theta, const Vec& omega, const Sample& xi) const override;
  GradPair pop_grad(const Vec& theta, const Vec& omega) const override;
  double pop_value(const Vec& theta, const Vec& omega) const override;
  std::optional<double> stoch_value(const Vec& theta, const Vec& omega,
                                    const Sample& xi) const override;

  // Closed form K^{-1} G(theta); only exposed when the dual set is all
  // of R^n (otherwise the iterative maximizer applies).
  std::optional<Vec> inner_max(const Vec& theta) const override;

  // J* and argmin J over a bounded primal set, via a dense grid plus
  // projected-gradient polish; computed once and cached. Unbounded
  // primal sets yield nullopt.
  std::optional<double> primal_min_value() const override;
  std::optional<Vec> primal_minimizer() const override;

  Vec validation_theta(SplitMix64& rng) const override;
  Vec validation_omega(SplitMix64& rng) const override;

  const SyntheticSpec& spec() const { return spec_; }
  // Radius of the dual region the declared constants certify.
  double dual_validation_radius() const { return dual_val_radius_; }
  double primal_value(const Vec& theta) const;  // J(theta)

 private:
  Vec coupling(const Vec& theta) const;  // G(theta)
  void ensure_minimizer() const;

  SyntheticSpec spec_;
  ProblemConstants constants_;
  Eigen::LDLT<Mat> K_ldlt_;
  double dual_val_radius_ = 0.0;

  mutable std::once_flag min_once_;
  mutable std::optional<Vec> theta_star_;
  mutable std::optional<double> j_star_;
};

// Shipped presets. All use d = 4, n = 3, mu = 1.
//   synthetic-default        ball primal set, free dual, noisy
//   synthetic-noiseless      default with noise_sigma = 0
//   synthetic-ball-dual      ball primal and dual sets, noisy
//   synthetic-unconstrained  both sets free, noisy
SyntheticSpec synthetic_default_spec();
SyntheticSpec synthetic_noiseless_spec();
SyntheticSpec synthetic_ball_dual_spec();
SyntheticSpec synthetic_unconstrained_spec();

}  // namespace saddle
