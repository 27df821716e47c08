#pragma once

#include "saddle/types.hpp"

#include <string>
#include <vector>

namespace saddle {

// Tabular MDP with a fixed behavior policy and state features.
// transition[a](s, s') is the next-state distribution, reward[a](s, s')
// the reward on that transition, policy(s, a) the action distribution,
// features row s the feature vector of state s.
struct FiniteMdp {
  int n_states = 0;
  int n_actions = 0;
  double discount = 0.0;
  std::vector<Mat> transition;
  std::vector<Mat> reward;
  Mat policy;
  Mat features;

  void validate() const;  // shapes, stochasticity, discount in [0,1)
};

// Policy-induced chain: P_pi, R_pi, and the stationary distribution.
struct PolicyInduced {
  Mat P;         // n x n
  Vec R;         // n
  Vec d_pi;      // stationary distribution of P
  Vec d_cdf;     // cumulative d_pi, for sampling
  std::vector<Vec> policy_cdf;      // per state, over actions
  std::vector<std::vector<Vec>> next_cdf;  // per (state, action), over next states
};

// Builds the induced chain. The stationary distribution comes from
// power iteration to 1e-12, with a dense eigensolve fallback; a chain
// with no unique positive stationary vector is rejected.
PolicyInduced induce(const FiniteMdp& mdp);

// Exact policy value: solves (I - discount P_pi) V = R_pi.
Vec exact_value(const FiniteMdp& mdp, const PolicyInduced& chain);

// One Bellman backup R_pi + discount * P_pi V.
Vec bellman_apply(const FiniteMdp& mdp, const PolicyInduced& chain, const Vec& v);

// I.i.d. transition draw: s ~ d_pi, a ~ policy(s, .), s' ~ P[s][a][.].
Transition sample_transition(const FiniteMdp& mdp, const PolicyInduced& chain, Rng& rng);

// Plain-text loader; format documented in the README (header line
// "mdp <n_states> <n_actions> <n_features> <discount>" followed by P,
// R, PI, PHI blocks in row-major order, '#' comments allowed).
FiniteMdp load_mdp(const std::string& path);

// Deterministic 6-state, 2-action, 4-feature instance used by the
// policy-evaluation presets.
FiniteMdp default_mdp();

}  // namespace saddle
