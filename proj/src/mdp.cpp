#include "saddle/mdp.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>

namespace saddle {

namespace {

constexpr double kRowSumTol = 1e-9;

Vec cdf_of(const Vec& probs) {
  Vec c(probs.size());
  double acc = 0.0;
  for (Index i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    c[i] = acc;
  }
  c[probs.size() - 1] = 1.0;  // guard against rounding in the tail
  return c;
}

int draw_from_cdf(const Vec& cdf, double u) {
  for (Index i = 0; i < cdf.size(); ++i)
    if (u < cdf[i]) return static_cast<int>(i);
  return static_cast<int>(cdf.size() - 1);
}

}  // namespace

void FiniteMdp::validate() const {
  if (n_states <= 0 || n_actions <= 0) throw InstanceError("mdp: empty state or action space");
  if (!(discount >= 0.0) || discount >= 1.0) throw InstanceError("mdp: discount must lie in [0,1)");
  if (static_cast<int>(transition.size()) != n_actions ||
      static_cast<int>(reward.size()) != n_actions)
    throw InstanceError("mdp: per-action tensor count mismatch");
  for (int a = 0; a < n_actions; ++a) {
    if (transition[a].rows() != n_states || transition[a].cols() != n_states ||
        reward[a].rows() != n_states || reward[a].cols() != n_states)
      throw InstanceError("mdp: tensor shape mismatch");
    if ((transition[a].array() < 0.0).any()) throw InstanceError("mdp: negative transition probability");
    for (int s = 0; s < n_states; ++s)
      if (std::abs(transition[a].row(s).sum() - 1.0) > kRowSumTol)
        throw InstanceError("mdp: transition rows must sum to 1");
  }
  if (policy.rows() != n_states || policy.cols() != n_actions)
    throw InstanceError("mdp: policy shape mismatch");
  if ((policy.array() < 0.0).any()) throw InstanceError("mdp: negative policy probability");
  for (int s = 0; s < n_states; ++s)
    if (std::abs(policy.row(s).sum() - 1.0) > kRowSumTol)
      throw InstanceError("mdp: policy rows must sum to 1");
  if (features.rows() != n_states || features.cols() <= 0)
    throw InstanceError("mdp: features shape mismatch");
}

PolicyInduced induce(const FiniteMdp& mdp) {
  mdp.validate();
  const int n = mdp.n_states;
  PolicyInduced out;
  out.P = Mat::Zero(n, n);
  out.R = Vec::Zero(n);
  for (int a = 0; a < mdp.n_actions; ++a) {
    for (int s = 0; s < n; ++s) {
      double pa = mdp.policy(s, a);
      out.P.row(s) += pa * mdp.transition[a].row(s);
      out.R[s] += pa * mdp.transition[a].row(s).dot(mdp.reward[a].row(s));
    }
  }

  // Stationary distribution: left eigenvector of P for eigenvalue 1.
  Vec v = Vec::Constant(n, 1.0 / n);
  double residual = std::numeric_limits<double>::infinity();
  for (long k = 0; k < 200000 && residual > 1e-12; ++k) {
    Vec next = out.P.transpose() * v;
    next /= next.sum();
    residual = (next - v).lpNorm<Eigen::Infinity>();
    v = std::move(next);
  }
  if (residual > 1e-12) {
    // Periodic or slowly mixing chain: fall back to a dense eigensolve.
    Eigen::EigenSolver<Mat> eig(out.P.transpose());
    int best = -1;
    for (int i = 0; i < n; ++i) {
      std::complex<double> lam = eig.eigenvalues()[i];
      if (std::abs(lam - std::complex<double>(1.0, 0.0)) < 1e-9) {
        if (best >= 0) throw InstanceError("mdp: stationary distribution is not unique; supply an ergodic chain");
        best = i;
      }
    }
    if (best < 0) throw InstanceError("mdp: no unit eigenvalue found; supply an ergodic chain");
    Eigen::VectorXcd col = eig.eigenvectors().col(best);
    if (col.imag().cwiseAbs().maxCoeff() > 1e-9)
      throw InstanceError("mdp: complex stationary candidate; supply an ergodic chain");
    v = col.real();
    if (v.sum() < 0.0) v = -v;
    if ((v.array() < -1e-9).any())
      throw InstanceError("mdp: stationary candidate has negative mass; supply an ergodic chain");
    v = v.cwiseMax(0.0);
    v /= v.sum();
  }
  if ((v.array() <= 0.0).any())
    throw InstanceError("mdp: stationary distribution not strictly positive; supply an ergodic chain");
  out.d_pi = v;

  out.d_cdf = cdf_of(out.d_pi);
  out.policy_cdf.reserve(n);
  out.next_cdf.resize(n);
  for (int s = 0; s < n; ++s) {
    out.policy_cdf.push_back(cdf_of(mdp.policy.row(s).transpose()));
    out.next_cdf[s].reserve(mdp.n_actions);
    for (int a = 0; a < mdp.n_actions; ++a)
      out.next_cdf[s].push_back(cdf_of(mdp.transition[a].row(s).transpose()));
  }
  return out;
}

Vec exact_value(const FiniteMdp& mdp, const PolicyInduced& chain) {
  Mat A = Mat::Identity(mdp.n_states, mdp.n_states) - mdp.discount * chain.P;
  return A.partialPivLu().solve(chain.R);
}

Vec bellman_apply(const FiniteMdp& mdp, const PolicyInduced& chain, const Vec& v) {
  if (v.size() != mdp.n_states) throw ContractError("bellman_apply: value dimension mismatch");
  return chain.R + mdp.discount * (chain.P * v);
}

Transition sample_transition(const FiniteMdp& mdp, const PolicyInduced& chain, Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Transition t;
  t.s = draw_from_cdf(chain.d_cdf, unif(rng));
  t.a = draw_from_cdf(chain.policy_cdf[t.s], unif(rng));
  t.s_next = draw_from_cdf(chain.next_cdf[t.s][t.a], unif(rng));
  (void)mdp;
  return t;
}

namespace {

double next_number(std::istream& in, const char* what) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    try {
      return std::stod(tok);
    } catch (const std::exception&) {
      throw IoError(std::string("mdp file: expected a number for ") + what + ", got '" + tok + "'");
    }
  }
  throw IoError(std::string("mdp file: unexpected end of file while reading ") + what);
}

std::string next_token(std::istream& in) {
  std::string tok;
  while (in >> tok) {
    if (tok[0] == '#') {
      std::string rest;
      std::getline(in, rest);
      continue;
    }
    return tok;
  }
  throw IoError("mdp file: unexpected end of file");
}

}  // namespace

FiniteMdp load_mdp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("mdp file: cannot open " + path);

  if (next_token(in) != "mdp") throw IoError("mdp file: missing 'mdp' header");
  FiniteMdp m;
  m.n_states = static_cast<int>(next_number(in, "n_states"));
  m.n_actions = static_cast<int>(next_number(in, "n_actions"));
  int n_features = static_cast<int>(next_number(in, "n_features"));
  m.discount = next_number(in, "discount");
  if (m.n_states <= 0 || m.n_actions <= 0 || n_features <= 0)
    throw IoError("mdp file: nonpositive dimensions in header");

  auto read_block = [&](const char* tag) {
    if (next_token(in) != tag) throw IoError(std::string("mdp file: expected block '") + tag + "'");
  };

  read_block("P");
  m.transition.assign(m.n_actions, Mat(m.n_states, m.n_states));
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a)
      for (int s2 = 0; s2 < m.n_states; ++s2) m.transition[a](s, s2) = next_number(in, "P entry");

  read_block("R");
  m.reward.assign(m.n_actions, Mat(m.n_states, m.n_states));
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a)
      for (int s2 = 0; s2 < m.n_states; ++s2) m.reward[a](s, s2) = next_number(in, "R entry");

  read_block("PI");
  m.policy.resize(m.n_states, m.n_actions);
  for (int s = 0; s < m.n_states; ++s)
    for (int a = 0; a < m.n_actions; ++a) m.policy(s, a) = next_number(in, "PI entry");

  read_block("PHI");
  m.features.resize(m.n_states, n_features);
  for (int s = 0; s < m.n_states; ++s)
    for (int j = 0; j < n_features; ++j) m.features(s, j) = next_number(in, "PHI entry");

  try {
    m.validate();
  } catch (const InstanceError& e) {
    throw IoError(std::string("mdp file: ") + e.what());
  }
  return m;
}

FiniteMdp default_mdp() {
  // Generated from a fixed stream; the floor on transition and policy
  // mass keeps the chain ergodic.
  const int n = 6, na = 2, nf = 4;
  SplitMix64 gen(0x5eed05eedULL);
  FiniteMdp m;
  m.n_states = n;
  m.n_actions = na;
  m.discount = 0.9;
  m.transition.assign(na, Mat(n, n));
  m.reward.assign(na, Mat(n, n));
  for (int a = 0; a < na; ++a) {
    for (int s = 0; s < n; ++s) {
      Vec row(n);
      for (int s2 = 0; s2 < n; ++s2) {
        double u = gen.u01();
        row[s2] = 0.08 + u * u;
      }
      row /= row.sum();
      m.transition[a].row(s) = row.transpose();
      for (int s2 = 0; s2 < n; ++s2) m.reward[a](s, s2) = gen.uniform(-0.5, 0.5);
    }
  }
  m.policy.resize(n, na);
  for (int s = 0; s < n; ++s) {
    double u = gen.uniform(0.25, 0.75);
    m.policy(s, 0) = u;
    m.policy(s, 1) = 1.0 - u;
  }
  m.features.resize(n, nf);
  for (int s = 0; s < n; ++s)
    for (int j = 0; j < nf; ++j) m.features(s, j) = gen.uniform(-0.15, 0.15);
  m.validate();
  return m;
}

}  // namespace saddle
