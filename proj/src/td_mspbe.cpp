#include "saddle/problems/td_mspbe.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>

namespace saddle {

double TanhValue::value(const Vec& theta, const Vec& phi) const {
  return scale_ * std::tanh(theta.dot(phi));
}

Vec TanhValue::grad(const Vec& theta, const Vec& phi) const {
  double th = std::tanh(theta.dot(phi));
  return (scale_ * (1.0 - th * th)) * phi;
}

Vec TanhValue::hvp(const Vec& theta, const Vec& phi, const Vec& u) const {
  double th = std::tanh(theta.dot(phi));
  double sech2 = 1.0 - th * th;
  return (scale_ * (-2.0 * th * sech2) * phi.dot(u)) * phi;
}

namespace {

std::unique_ptr<ValueFamily> make_family(const TdSpec& spec) {
  if (spec.family == FamilyKind::linear) return std::make_unique<LinearValue>();
  return std::make_unique<TanhValue>(spec.tanh_scale);
}

}  // namespace

TdMspbeProblem::TdMspbeProblem(TdSpec spec)
    : spec_(std::move(spec)), chain_(induce(spec_.mdp)), family_(make_family(spec_)) {
  const Index d = spec_.mdp.features.cols();
  if (!(spec_.primal_radius > 0.0)) throw InstanceError("td: primal radius must be positive");
  primal_set_ = FeasibleSet::ball(Vec::Zero(d), spec_.primal_radius);
  dual_set_ = FeasibleSet::all_space(d);
  constants_.dim_primal = d;
  constants_.dim_dual = d;

  // Validation pass over a fixed grid: smallest dual curvature, dual
  // radius, per-sample Lipschitz ratios, exact per-point variance.
  SplitMix64 grid(0x7d5eedULL);
  const int n_theta = 96;
  double mu = std::numeric_limits<double>::infinity();
  double r_dual = 1.0;
  std::vector<Vec> thetas;
  thetas.reserve(n_theta);
  for (int i = 0; i < n_theta; ++i) thetas.push_back(primal_set_.sample(grid));
  thetas.push_back(Vec::Zero(d));
  for (const Vec& th : thetas) {
    Mat K = feature_second_moment(th);
    Eigen::SelfAdjointEigenSolver<Mat> eig(K);
    mu = std::min(mu, eig.eigenvalues().minCoeff());
    if (!(mu > 1e-6))
      throw InstanceError("td: dual curvature below 1e-6 on the validation grid; instance rejected");
    Vec b = expected_td_update(th);
    Eigen::LDLT<Mat> ldlt(K);
    Vec w = ldlt.solve(b);
    w += ldlt.solve(b - K * w);
    r_dual = std::max(r_dual, w.norm());
  }
  constants_.mu = mu;
  dual_val_radius_ = 2.0 * r_dual;

  FeasibleSet dual_region = FeasibleSet::ball(Vec::Zero(d), dual_val_radius_);
  double max_ratio = 0.0;
  for (int i = 0; i < 160; ++i) {
    Vec t1 = primal_set_.sample(grid);
    Vec t2 = primal_set_.sample(grid);
    Vec w1 = dual_region.sample(grid);
    Vec w2 = dual_region.sample(grid);
    double dist = std::sqrt((t1 - t2).squaredNorm() + (w1 - w2).squaredNorm());
    if (dist < 1e-9) continue;
    for (int s = 0; s < spec_.mdp.n_states; ++s)
      for (int a = 0; a < spec_.mdp.n_actions; ++a)
        for (int s2 = 0; s2 < spec_.mdp.n_states; ++s2) {
          Sample xi = Transition{s, a, s2};
          GradPair g1 = stoch_grad(t1, w1, xi);
          GradPair g2 = stoch_grad(t2, w2, xi);
          double diff =
              std::sqrt((g1.theta - g2.theta).squaredNorm() + (g1.omega - g2.omega).squaredNorm());
          max_ratio = std::max(max_ratio, diff / dist);
        }
  }
  constants_.lipschitz_L = std::max(1.5 * max_ratio, constants_.mu);

  double max_var = 0.0;
  for (int i = 0; i < 64; ++i) {
    Vec th = primal_set_.sample(grid);
    Vec w = dual_region.sample(grid);
    GradPair mean = pop_grad(th, w);
    double var = 0.0;
    for (int s = 0; s < spec_.mdp.n_states; ++s)
      for (int a = 0; a < spec_.mdp.n_actions; ++a)
        for (int s2 = 0; s2 < spec_.mdp.n_states; ++s2) {
          Transition t{s, a, s2};
          double wgt = transition_weight(t);
          if (wgt == 0.0) continue;
          GradPair g = stoch_grad(th, w, Sample{t});
          var += wgt * ((g.theta - mean.theta).squaredNorm() + (g.omega - mean.omega).squaredNorm());
        }
    max_var = std::max(max_var, var);
  }
  constants_.sigma2 = 1.25 * max_var;
}

double TdMspbeProblem::transition_weight(const Transition& t) const {
  return chain_.d_pi[t.s] * spec_.mdp.policy(t.s, t.a) * spec_.mdp.transition[t.a](t.s, t.s_next);
}

Sample TdMspbeProblem::sample(Rng& rng) const {
  return sample_transition(spec_.mdp, chain_, rng);
}

GradPair TdMspbeProblem::stoch_grad(const Vec& theta, const Vec& omega, const Sample& xi) const {
  const auto* t = std::get_if<Transition>(&xi);
  if (!t) throw ContractError("td: sample token of foreign type");
  if (t->s < 0 || t->s >= spec_.mdp.n_states || t->a < 0 || t->a >= spec_.mdp.n_actions ||
      t->s_next < 0 || t->s_next >= spec_.mdp.n_states)
    throw ContractError("td: sample token indices out of range");
  check_point(theta, omega);

  Vec phi_s = spec_.mdp.features.row(t->s).transpose();
  Vec phi_n = spec_.mdp.features.row(t->s_next).transpose();
  double rho = spec_.mdp.discount;
  double r = spec_.mdp.reward[t->a](t->s, t->s_next);
  double v_s = family_->value(theta, phi_s);
  double v_n = family_->value(theta, phi_n);
  Vec g = family_->grad(theta, phi_s);
  Vec g_next = family_->grad(theta, phi_n);
  double delta = r + rho * v_n - v_s;
  double u = g.dot(omega);
  Vec hv = family_->hvp(theta, phi_s, omega);

  GradPair out;
  out.theta = (rho * g_next - g) * u + (delta - u) * hv;
  out.omega = delta * g - u * g;
  return out;
}

GradPair TdMspbeProblem::pop_grad(const Vec& theta, const Vec& omega) const {
  check_point(theta, omega);
  GradPair acc;
  acc.theta = Vec::Zero(theta.size());
  acc.omega = Vec::Zero(omega.size());
  for (int s = 0; s < spec_.mdp.n_states; ++s)
    for (int a = 0; a < spec_.mdp.n_actions; ++a)
      for (int s2 = 0; s2 < spec_.mdp.n_states; ++s2) {
        Transition t{s, a, s2};
        double w = transition_weight(t);
        if (w == 0.0) continue;
        GradPair g = stoch_grad(theta, omega, Sample{t});
        acc.theta += w * g.theta;
        acc.omega += w * g.omega;
      }
  return acc;
}

double TdMspbeProblem::pop_value(const Vec& theta, const Vec& omega) const {
  check_point(theta, omega);
  return expected_td_update(theta).dot(omega) -
         0.5 * omega.dot(feature_second_moment(theta) * omega);
}

std::optional<double> TdMspbeProblem::stoch_value(const Vec& theta, const Vec& omega,
                                                  const Sample& xi) const {
  const auto* t = std::get_if<Transition>(&xi);
  if (!t) throw ContractError("td: sample token of foreign type");
  check_point(theta, omega);
  Vec phi_s = spec_.mdp.features.row(t->s).transpose();
  Vec phi_n = spec_.mdp.features.row(t->s_next).transpose();
  double delta = spec_.mdp.reward[t->a](t->s, t->s_next) +
                 spec_.mdp.discount * family_->value(theta, phi_n) - family_->value(theta, phi_s);
  double u = family_->grad(theta, phi_s).dot(omega);
  return delta * u - 0.5 * u * u;
}

Vec TdMspbeProblem::expected_td_update(const Vec& theta) const {
  Vec b = Vec::Zero(theta.size());
  for (int s = 0; s < spec_.mdp.n_states; ++s) {
    Vec phi_s = spec_.mdp.features.row(s).transpose();
    Vec g = family_->grad(theta, phi_s);
    double v_s = family_->value(theta, phi_s);
    double exp_delta = 0.0;
    for (int a = 0; a < spec_.mdp.n_actions; ++a)
      for (int s2 = 0; s2 < spec_.mdp.n_states; ++s2) {
        double w = spec_.mdp.policy(s, a) * spec_.mdp.transition[a](s, s2);
        if (w == 0.0) continue;
        Vec phi_n = spec_.mdp.features.row(s2).transpose();
        exp_delta += w * (spec_.mdp.reward[a](s, s2) +
                          spec_.mdp.discount * family_->value(theta, phi_n) - v_s);
      }
    b += chain_.d_pi[s] * exp_delta * g;
  }
  return b;
}

Mat TdMspbeProblem::feature_second_moment(const Vec& theta) const {
  Mat K = Mat::Zero(theta.size(), theta.size());
  for (int s = 0; s < spec_.mdp.n_states; ++s) {
    Vec g = family_->grad(theta, spec_.mdp.features.row(s).transpose());
    K += chain_.d_pi[s] * (g * g.transpose());
  }
  return K;
}

std::optional<Vec> TdMspbeProblem::inner_max(const Vec& theta) const {
  if (theta.size() != constants_.dim_primal) throw ContractError("td inner_max: dimension mismatch");
  Mat K = feature_second_moment(theta);
  Eigen::SelfAdjointEigenSolver<Mat> eig(K);
  double lo = eig.eigenvalues().minCoeff();
  double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw InstanceError("td: feature second moment is numerically singular");
  Vec b = expected_td_update(theta);
  Eigen::LDLT<Mat> ldlt(K);
  Vec w = ldlt.solve(b);
  w += ldlt.solve(b - K * w);
  return w;
}

double TdMspbeProblem::mspbe(const Vec& theta) const {
  return 0.5 * expected_td_update(theta).dot(*inner_max(theta));
}

Vec TdMspbeProblem::validation_theta(SplitMix64& rng) const { return primal_set_.sample(rng); }

Vec TdMspbeProblem::validation_omega(SplitMix64& rng) const {
  return FeasibleSet::ball(Vec::Zero(constants_.dim_dual), dual_val_radius_).sample(rng);
}

TdSpec td_default_spec() {
  TdSpec s;
  s.mdp = default_mdp();
  s.family = FamilyKind::tanh;
  s.tanh_scale = 1.0;
  s.primal_radius = 5.0;
  return s;
}

TdSpec td_realizable_spec() {
  TdSpec s;
  s.mdp = default_mdp();
  PolicyInduced chain = induce(s.mdp);
  s.mdp.features.col(0) = exact_value(s.mdp, chain);
  s.family = FamilyKind::linear;
  s.primal_radius = 5.0;
  return s;
}

}  // namespace saddle
