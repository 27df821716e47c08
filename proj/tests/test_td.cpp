#include "saddle/problems/td_mspbe.hpp"

#include "saddle/finite_diff.hpp"
#include "saddle/problems/synthetic.hpp"  // solve_spd

#include "doctest.h"

#include <Eigen/Eigenvalues>

#include <cmath>

using namespace saddle;

TEST_CASE("tanh family calculus against finite differences") {
  TanhValue fam(1.3);
  SplitMix64 rng(51);
  for (int k = 0; k < 20; ++k) {
    Vec theta(4), phi(4), u(4);
    for (int i = 0; i < 4; ++i) {
      theta[i] = rng.uniform(-2.0, 2.0);
      phi[i] = rng.uniform(-1.0, 1.0);
      u[i] = rng.uniform(-1.0, 1.0);
    }
    Vec g = fam.grad(theta, phi);
    Vec fd_g = finite_diff_grad([&](const Vec& t) { return fam.value(t, phi); }, theta);
    CHECK(rel_err(g, fd_g) <= 1e-8);

    // Hessian-vector product vs a central difference of the gradient.
    double h = 1e-5;
    Vec fd_h = (fam.grad(theta + h * u, phi) - fam.grad(theta - h * u, phi)) / (2.0 * h);
    CHECK(rel_err(fam.hvp(theta, phi, u), fd_h) <= 1e-6);
  }
}

TEST_CASE("linear family has zero curvature") {
  LinearValue fam;
  Vec theta(3), phi(3), u(3);
  theta << 1.0, -2.0, 0.5;
  phi << 0.3, 0.1, -0.7;
  u << 1.0, 1.0, 1.0;
  CHECK(fam.value(theta, phi) == doctest::Approx(theta.dot(phi)).epsilon(1e-15));
  CHECK((fam.grad(theta, phi) - phi).norm() == 0.0);
  CHECK(fam.hvp(theta, phi, u).norm() == 0.0);
}

TEST_CASE("population gradients match finite differences of the value") {
  TdMspbeProblem prob(td_default_spec());
  SplitMix64 grid(53);
  for (int k = 0; k < 10; ++k) {
    Vec theta = prob.validation_theta(grid);
    Vec omega = prob.validation_omega(grid);
    GradPair g = prob.pop_grad(theta, omega);
    Vec fd_theta = finite_diff_grad(
        [&](const Vec& t) { return prob.pop_value(t, omega); }, theta);
    Vec fd_omega = finite_diff_grad(
        [&](const Vec& w) { return prob.pop_value(theta, w); }, omega);
    CHECK(rel_err(g.theta, fd_theta) <= 1e-7);
    CHECK(rel_err(g.omega, fd_omega) <= 1e-7);
  }
}

TEST_CASE("per-sample gradients match finite differences of the sampled loss") {
  TdMspbeProblem prob(td_default_spec());
  SplitMix64 grid(57);
  const auto& mdp = prob.mdp();
  int token = 0;
  for (int k = 0; k < 8; ++k) {
    Vec theta = prob.validation_theta(grid);
    Vec omega = prob.validation_omega(grid);
    // Walk a deterministic selection of transitions (all have positive
    // probability in the default instance).
    Transition t;
    t.s = token % mdp.n_states;
    t.a = (token / mdp.n_states) % mdp.n_actions;
    t.s_next = (token / (mdp.n_states * mdp.n_actions)) % mdp.n_states;
    ++token;
    Sample xi = t;
    GradPair g = prob.stoch_grad(theta, omega, xi);
    auto value = [&](const Vec& th, const Vec& w) {
      auto v = prob.stoch_value(th, w, xi);
      REQUIRE(v.has_value());
      return *v;
    };
    Vec fd_theta = finite_diff_grad([&](const Vec& th) { return value(th, omega); }, theta);
    Vec fd_omega = finite_diff_grad([&](const Vec& w) { return value(theta, w); }, omega);
    CHECK(rel_err(g.theta, fd_theta) <= 1e-6);
    CHECK(rel_err(g.omega, fd_omega) <= 1e-6);
  }
}

TEST_CASE("the transition mixture of the sampled oracle is the population oracle") {
  TdMspbeProblem prob(td_default_spec());
  const auto& mdp = prob.mdp();
  const auto& chain = prob.chain();
  SplitMix64 grid(59);
  for (int k = 0; k < 5; ++k) {
    Vec theta = prob.validation_theta(grid);
    Vec omega = prob.validation_omega(grid);
    double value_acc = 0.0;
    Vec gt_acc = Vec::Zero(theta.size());
    Vec gw_acc = Vec::Zero(omega.size());
    double weight_acc = 0.0;
    for (int s = 0; s < mdp.n_states; ++s)
      for (int a = 0; a < mdp.n_actions; ++a)
        for (int s2 = 0; s2 < mdp.n_states; ++s2) {
          double w = chain.d_pi[s] * mdp.policy(s, a) * mdp.transition[a](s, s2);
          Sample xi = Transition{s, a, s2};
          value_acc += w * *prob.stoch_value(theta, omega, xi);
          GradPair g = prob.stoch_grad(theta, omega, xi);
          gt_acc += w * g.theta;
          gw_acc += w * g.omega;
          weight_acc += w;
        }
    CHECK(weight_acc == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(value_acc == doctest::Approx(prob.pop_value(theta, omega)).epsilon(1e-10));
    GradPair pop = prob.pop_grad(theta, omega);
    CHECK(rel_err(gt_acc, pop.theta) <= 1e-12);
    CHECK(rel_err(gw_acc, pop.omega) <= 1e-12);
  }
}

TEST_CASE("expected update agrees with the Bellman-backup route") {
  TdMspbeProblem prob(td_default_spec());
  const auto& mdp = prob.mdp();
  const auto& chain = prob.chain();
  const auto& fam = prob.family();
  SplitMix64 grid(61);
  for (int k = 0; k < 10; ++k) {
    Vec theta = prob.validation_theta(grid);
    // V_theta over states, then one Bellman backup of that vector.
    Vec v(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) v[s] = fam.value(theta, mdp.features.row(s).transpose());
    Vec tv = bellman_apply(mdp, chain, v);
    Vec b = Vec::Zero(theta.size());
    for (int s = 0; s < mdp.n_states; ++s)
      b += chain.d_pi[s] * (tv[s] - v[s]) * fam.grad(theta, mdp.features.row(s).transpose());
    CHECK(rel_err(b, prob.expected_td_update(theta)) <= 1e-12);
  }
}

TEST_CASE("objective value equals the weighted norm of the expected update") {
  TdMspbeProblem prob(td_default_spec());
  const auto& mdp = prob.mdp();
  const auto& chain = prob.chain();
  const auto& fam = prob.family();
  SplitMix64 grid(63);
  for (int k = 0; k < 10; ++k) {
    Vec theta = prob.validation_theta(grid);
    // Independent reconstruction of b and K from public pieces.
    Vec v(mdp.n_states);
    for (int s = 0; s < mdp.n_states; ++s) v[s] = fam.value(theta, mdp.features.row(s).transpose());
    Vec tv = bellman_apply(mdp, chain, v);
    Vec b = Vec::Zero(theta.size());
    Mat K = Mat::Zero(theta.size(), theta.size());
    for (int s = 0; s < mdp.n_states; ++s) {
      Vec g = fam.grad(theta, mdp.features.row(s).transpose());
      b += chain.d_pi[s] * (tv[s] - v[s]) * g;
      K += chain.d_pi[s] * g * g.transpose();
    }
    double direct = 0.5 * b.dot(solve_spd(K, b));
    CHECK(prob.mspbe(theta) == doctest::Approx(direct).epsilon(1e-9));
    CHECK((K - prob.feature_second_moment(theta)).norm() <= 1e-12);
  }
}

TEST_CASE("inner maximizer attains the objective value") {
  TdMspbeProblem prob(td_default_spec());
  SplitMix64 grid(67);
  for (int k = 0; k < 50; ++k) {
    Vec theta = prob.validation_theta(grid);
    auto omega_star = prob.inner_max(theta);
    REQUIRE(omega_star.has_value());
    GradPair g = prob.pop_grad(theta, *omega_star);
    CHECK(g.omega.norm() <= 1e-8);
    CHECK(std::abs(prob.mspbe(theta) - prob.pop_value(theta, *omega_star)) <= 1e-10);
  }
}

TEST_CASE("the value surrogate is exactly quadratic in the dual block") {
  TdMspbeProblem prob(td_default_spec());
  SplitMix64 grid(71);
  for (int k = 0; k < 20; ++k) {
    Vec theta = prob.validation_theta(grid);
    Vec w1 = prob.validation_omega(grid);
    Vec w2 = prob.validation_omega(grid);
    Mat K = prob.feature_second_moment(theta);
    Eigen::SelfAdjointEigenSolver<Mat> eig(K);
    CHECK(eig.eigenvalues().minCoeff() > 0.0);
    GradPair g1 = prob.pop_grad(theta, w1);
    double predicted = prob.pop_value(theta, w1) + g1.omega.dot(w2 - w1) -
                       0.5 * (w2 - w1).dot(K * (w2 - w1));
    CHECK(prob.pop_value(theta, w2) == doctest::Approx(predicted).epsilon(1e-9));
  }
}

TEST_CASE("realizable instance attains zero error at the designed weights") {
  TdMspbeProblem prob(td_realizable_spec());
  Vec e1 = Vec::Zero(prob.constants().dim_primal);
  e1[0] = 1.0;
  CHECK(prob.expected_td_update(e1).norm() <= 1e-10);
  CHECK(prob.mspbe(e1) <= 1e-16);
  auto omega_star = prob.inner_max(e1);
  REQUIRE(omega_star.has_value());
  CHECK(omega_star->norm() <= 1e-8);
  // First feature column is the exact policy value.
  const auto& mdp = prob.mdp();
  Vec v_exact = exact_value(mdp, prob.chain());
  for (int s = 0; s < mdp.n_states; ++s)
    CHECK(prob.family().value(e1, mdp.features.row(s).transpose()) ==
          doctest::Approx(v_exact[s]).epsilon(1e-10));
  // Zero is therefore the attained lower bound.
  REQUIRE(prob.primal_min_value().has_value());
  CHECK(*prob.primal_min_value() == 0.0);
}

TEST_CASE("declared constants are coherent") {
  TdMspbeProblem prob(td_default_spec());
  const auto& c = prob.constants();
  CHECK(c.mu > 0.0);
  CHECK(c.lipschitz_L >= c.mu);
  CHECK(c.sigma2 > 0.0);
  CHECK(c.dim_primal == 4);
  CHECK(c.dim_dual == 4);
  CHECK(prob.primal_min_value().has_value());
  CHECK(*prob.primal_min_value() == 0.0);
}

TEST_CASE("token type and range are enforced") {
  TdMspbeProblem prob(td_default_spec());
  Vec theta = Vec::Zero(4), omega = Vec::Zero(4);
  Sample gaussian = GaussianDraw{};
  CHECK_THROWS_AS(prob.stoch_grad(theta, omega, gaussian), ContractError);
  Sample out_of_range = Transition{99, 0, 0};
  CHECK_THROWS_AS(prob.stoch_grad(theta, omega, out_of_range), ContractError);
}

TEST_CASE("sampled transitions drive an unbiased gradient") {
  TdMspbeProblem prob(td_default_spec());
  SplitMix64 grid(73);
  Vec theta = prob.validation_theta(grid);
  Vec omega = prob.validation_omega(grid);
  GradPair pop = prob.pop_grad(theta, omega);
  Rng rng = make_run_rng(501);
  const long N = 20000;
  Vec mt = Vec::Zero(theta.size()), mw = Vec::Zero(omega.size());
  for (long i = 0; i < N; ++i) {
    Sample xi = prob.sample(rng);
    GradPair g = prob.stoch_grad(theta, omega, xi);
    mt += g.theta;
    mw += g.omega;
  }
  mt /= static_cast<double>(N);
  mw /= static_cast<double>(N);
  double gap =
      std::sqrt((mt - pop.theta).squaredNorm() + (mw - pop.omega).squaredNorm());
  CHECK(gap <= 4.0 * std::sqrt(prob.constants().sigma2 / static_cast<double>(N)));
}
