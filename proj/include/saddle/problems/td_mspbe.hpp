#pragma once

#include "saddle/mdp.hpp"
#include "saddle/problem.hpp"

#include <memory>

namespace saddle {

// Differentiable value-function family V_theta(s) = v(theta, phi(s)).
class ValueFamily {
 public:
  virtual ~ValueFamily() = default;
  virtual double value(const Vec& theta, const Vec& phi) const = 0;
  virtual Vec grad(const Vec& theta, const Vec& phi) const = 0;
  // Hessian-vector product d^2 v / dtheta^2 * u.
  virtual Vec hvp(const Vec& theta, const Vec& phi, const Vec& u) const = 0;
  virtual const char* name() const = 0;
};

// V = theta' phi. Curvature-free: hvp is identically zero.
class LinearValue : public ValueFamily {
 public:
  double value(const Vec& theta, const Vec& phi) const override { return theta.dot(phi); }
  Vec grad(const Vec&, const Vec& phi) const override { return phi; }
  Vec hvp(const Vec& theta, const Vec&, const Vec&) const override { return Vec::Zero(theta.size()); }
  const char* name() const override { return "linear"; }
};

// V = scale * tanh(theta' phi).
class TanhValue : public ValueFamily {
 public:
  explicit TanhValue(double scale = 1.0) : scale_(scale) {}
  double value(const Vec& theta, const Vec& phi) const override;
  Vec grad(const Vec& theta, const Vec& phi) const override;
  Vec hvp(const Vec& theta, const Vec& phi, const Vec& u) const override;
  const char* name() const override { return "tanh"; }

 private:
  double scale_;
};

enum class FamilyKind { linear, tanh };

struct TdSpec {
  FiniteMdp mdp;
  FamilyKind family = FamilyKind::tanh;
  double tanh_scale = 1.0;
  double primal_radius = 5.0;
};

// Saddle-point form of projected-Bellman-error minimization:
//   F(theta, omega) = b(theta)' omega - (1/2) omega' K(theta) omega,
//   b(theta) = E[delta grad V],  K(theta) = E_s[grad V grad V'],
// over theta in a ball and omega free. max_omega F equals the
// half-squared K-weighted norm of the expected TD update, and the
// per-sample gradient comes from
//   l(theta, omega; s,a,s') = delta (g' omega) - (1/2)(g' omega)^2.
// Signs are already oriented for primal descent / dual ascent.
//
// mu, L, and sigma2 are measured on a deterministic validation grid at
// construction: mu as the smallest K(theta) eigenvalue (instances below
// 1e-6 are rejected), L from per-sample gradient ratios with a 1.5x
// margin, sigma2 as 1.25x the largest exact per-point variance.
class TdMspbeProblem : public Problem {
 public:
  explicit TdMspbeProblem(TdSpec spec);

  const ProblemConstants& constants() const override { return constants_; }
  const FeasibleSet& primal_set() const override { return primal_set_; }
  const FeasibleSet& dual_set() const override { return dual_set_; }

  Sample sample(Rng& rng) const override;
  GradPair stoch_grad(const Vec& theta, const Vec& omega, const Sample& xi) const override;
  GradPair pop_grad(const Vec& theta, const Vec& omega) const override;
  double pop_value(const Vec& theta, const Vec& omega) const override;
  std::optional<double> stoch_value(const Vec& theta, const Vec& omega,
                                    const Sample& xi) const override;

  // K(theta)^{-1} b(theta); rejects instances whose K(theta) condition
  // number exceeds 1e12.
  std::optional<Vec> inner_max(const Vec& theta) const override;

  // MSPBE is nonnegative, so 0 is a certified lower bound on J
  // (attained exactly on realizable instances).
  std::optional<double> primal_min_value() const override { return 0.0; }

  Vec validation_theta(SplitMix64& rng) const override;
  Vec validation_omega(SplitMix64& rng) const override;

  double mspbe(const Vec& theta) const;
  Vec expected_td_update(const Vec& theta) const;          // b(theta)
  Mat feature_second_moment(const Vec& theta) const;       // K(theta)
  const FiniteMdp& mdp() const { return spec_.mdp; }
  const PolicyInduced& chain() const { return chain_; }
  const ValueFamily& family() const { return *family_; }
  double dual_validation_radius() const { return dual_val_radius_; }

 private:
  double transition_weight(const Transition& t) const;  // d(s) pi(a|s) P(s,a,s')

  TdSpec spec_;
  PolicyInduced chain_;
  std::unique_ptr<ValueFamily> family_;
  FeasibleSet primal_set_ = FeasibleSet::all_space(1);
  FeasibleSet dual_set_ = FeasibleSet::all_space(1);
  ProblemConstants constants_;
  double dual_val_radius_ = 0.0;
};

// Default instance: default_mdp with the tanh family, radius-5 ball.
TdSpec td_default_spec();

// Linear-family instance whose first feature column is the exact policy
// value, so theta = e_1 attains MSPBE = 0.
TdSpec td_realizable_spec();

}  // namespace saddle
