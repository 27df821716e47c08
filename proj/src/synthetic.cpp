#include "saddle/problems/synthetic.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <vector>

namespace saddle {

Vec solve_spd(const Mat& K, const Vec& b) {
  if (K.rows() != K.cols() || K.rows() != b.size()) throw ContractError("solve_spd: shape mismatch");
  double scale = K.cwiseAbs().maxCoeff();
  if ((K - K.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, scale))
    throw ContractError("solve_spd: matrix is not symmetric");
  Eigen::LDLT<Mat> ldlt(K);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive())
    throw InstanceError("solve_spd: matrix is not positive definite");
  Vec x = ldlt.solve(b);
  x += ldlt.solve(b - K * x);  // one refinement pass
  return x;
}

QuadraticDualSynthetic::QuadraticDualSynthetic(SyntheticSpec spec) : spec_(std::move(spec)) {
  const Index n = spec_.A.rows();
  const Index d = spec_.A.cols();
  if (n <= 0 || d <= 0) throw InstanceError("synthetic: empty coupling matrix");
  if (spec_.K.rows() != n || spec_.K.cols() != n) throw InstanceError("synthetic: K shape mismatch");
  if (spec_.primal_set.dim() != d || spec_.dual_set.dim() != n)
    throw InstanceError("synthetic: feasible-set dimensions mismatch");
  if (spec_.noise_sigma < 0.0) throw InstanceError("synthetic: negative noise scale");
  if ((spec_.K - spec_.K.transpose()).cwiseAbs().maxCoeff() > 1e-12)
    throw InstanceError("synthetic: K must be symmetric");

  Eigen::SelfAdjointEigenSolver<Mat> eig(spec_.K);
  double mu = eig.eigenvalues().minCoeff();
  double k_norm = eig.eigenvalues().maxCoeff();
  if (!(mu > 0.0)) throw InstanceError("synthetic: K must be positive definite");
  K_ldlt_.compute(spec_.K);

  // Region the constants certify. Bounded dual sets certify themselves;
  // a free dual block uses twice the reachable-maximizer radius
  // ||K^{-1}|| sqrt(n) (|G_i| <= 1).
  switch (spec_.dual_set.kind()) {
    case SetKind::all_space:
      dual_val_radius_ = 2.0 * std::sqrt(static_cast<double>(n)) / mu;
      break;
    case SetKind::ball:
      dual_val_radius_ = spec_.dual_set.center().norm() + spec_.dual_set.radius();
      break;
    case SetKind::box:
      dual_val_radius_ =
          spec_.dual_set.lower().cwiseAbs().cwiseMax(spec_.dual_set.upper().cwiseAbs()).norm();
      break;
  }

  // Block bound on the joint Hessian over the validation region:
  // ||H|| <= max(||H_tt||, ||H_ww||) + ||H_tw||, with
  // ||H_tt|| <= c0 + lambda + ||omega|| sqrt(sum_i ||a_i||^4) and
  // ||H_tw|| <= ||A||_F.
  double sum4 = 0.0;
  for (Index i = 0; i < n; ++i) {
    double s = spec_.A.row(i).squaredNorm();
    sum4 += s * s;
  }
  double l_tt = spec_.c0 + spec_.lambda + dual_val_radius_ * std::sqrt(sum4);
  double l_tw = spec_.A.norm();

  constants_.mu = mu;
  constants_.lipschitz_L = std::max(l_tt, k_norm) + l_tw;
  constants_.sigma2 =
      spec_.noise_sigma * spec_.noise_sigma * static_cast<double>(d + n);
  constants_.dim_primal = d;
  constants_.dim_dual = n;
}

Vec QuadraticDualSynthetic::coupling(const Vec& theta) const {
  return (spec_.A * theta).array().sin().matrix();
}

Sample QuadraticDualSynthetic::sample(Rng& rng) const {
  GaussianDraw draw;
  draw.theta_noise.resize(constants_.dim_primal);
  draw.omega_noise.resize(constants_.dim_dual);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (Index i = 0; i < draw.theta_noise.size(); ++i) draw.theta_noise[i] = normal(rng);
  for (Index i = 0; i < draw.omega_noise.size(); ++i) draw.omega_noise[i] = normal(rng);
  return draw;
}

GradPair QuadraticDualSynthetic::pop_grad(const Vec& theta, const Vec& omega) const {
  check_point(theta, omega);
  Vec u = spec_.A * theta;
  GradPair g;
  g.theta = (-spec_.c0) * theta.array().sin().matrix() + spec_.lambda * theta +
            spec_.A.transpose() * (omega.array() * u.array().cos()).matrix();
  g.omega = u.array().sin().matrix() - spec_.K * omega;
  return g;
}

GradPair QuadraticDualSynthetic::stoch_grad(const Vec& theta, const Vec& omega,
                                            const Sample& xi) const {
  const auto* draw = std::get_if<GaussianDraw>(&xi);
  if (!draw) throw ContractError("synthetic: sample token of foreign type");
  if (draw->theta_noise.size() != constants_.dim_primal ||
      draw->omega_noise.size() != constants_.dim_dual)
    throw ContractError("synthetic: sample token dimension mismatch");
  GradPair g = pop_grad(theta, omega);
  if (spec_.noise_sigma > 0.0) {
    g.theta += spec_.noise_sigma * draw->theta_noise;
    g.omega += spec_.noise_sigma * draw->omega_noise;
  }
  return g;
}

double QuadraticDualSynthetic::pop_value(const Vec& theta, const Vec& omega) const {
  check_point(theta, omega);
  double h = spec_.c0 * theta.array().cos().sum() + 0.5 * spec_.lambda * theta.squaredNorm();
  return h + coupling(theta).dot(omega) - 0.5 * omega.dot(spec_.K * omega);
}

std::optional<double> QuadraticDualSynthetic::stoch_value(const Vec& theta, const Vec& omega,
                                                          const Sample& xi) const {
  const auto* draw = std::get_if<GaussianDraw>(&xi);
  if (!draw) throw ContractError("synthetic: sample token of foreign type");
  return pop_value(theta, omega) +
         spec_.noise_sigma * (draw->theta_noise.dot(theta) + draw->omega_noise.dot(omega));
}

std::optional<Vec> QuadraticDualSynthetic::inner_max(const Vec& theta) const {
  if (spec_.dual_set.kind() != SetKind::all_space) return std::nullopt;
  if (theta.size() != constants_.dim_primal) throw ContractError("inner_max: dimension mismatch");
  Vec b = coupling(theta);
  Vec x = K_ldlt_.solve(b);
  x += K_ldlt_.solve(b - spec_.K * x);
  return x;
}

double QuadraticDualSynthetic::primal_value(const Vec& theta) const {
  // J(theta) = h(theta) + (1/2) G' K^{-1} G.
  Vec b = coupling(theta);
  Vec x = K_ldlt_.solve(b);
  x += K_ldlt_.solve(b - spec_.K * x);
  return spec_.c0 * theta.array().cos().sum() + 0.5 * spec_.lambda * theta.squaredNorm() +
         0.5 * b.dot(x);
}

void QuadraticDualSynthetic::ensure_minimizer() const {
  std::call_once(min_once_, [this] {
    if (!spec_.primal_set.bounded()) return;
    const Index d = constants_.dim_primal;
    const FeasibleSet& set = spec_.primal_set;

    Vec lo(d), hi(d);
    if (set.kind() == SetKind::ball) {
      lo = set.center().array() - set.radius();
      hi = set.center().array() + set.radius();
    } else {
      lo = set.lower();
      hi = set.upper();
    }

    long per_axis = std::lround(std::floor(std::pow(6.0e4, 1.0 / static_cast<double>(d))));
    per_axis = std::clamp(per_axis, 5L, 41L);

    // Dense scan of the bounding grid, keeping the best feasible point.
    Vec best;
    double best_val = std::numeric_limits<double>::infinity();
    std::vector<long> idx(d, 0);
    Vec point(d);
    while (true) {
      for (Index i = 0; i < d; ++i) {
        double t = per_axis == 1 ? 0.5 : static_cast<double>(idx[i]) / (per_axis - 1);
        point[i] = lo[i] + t * (hi[i] - lo[i]);
      }
      if (contains(set, point, 1e-12)) {
        double v = primal_value(point);
        if (v < best_val) {
          best_val = v;
          best = point;
        }
      }
      Index k = 0;
      while (k < d && ++idx[k] == per_axis) idx[k++] = 0;
      if (k == d) break;
    }
    if (best.size() == 0) {
      best = project(set, 0.5 * (lo + hi));
      best_val = primal_value(best);
    }

    // Projected-gradient polish; grad J(theta) is the primal population
    // gradient at the exact inner maximizer.
    double L = constants_.lipschitz_L;
    double step = 1.0 / (L + L * L / constants_.mu);
    Vec x = best;
    for (long k = 0; k < 200000; ++k) {
      Vec omega_star = K_ldlt_.solve(coupling(x));
      Vec g = pop_grad(x, omega_star).theta;
      Vec next = project(set, x - step * g);
      double move = (next - x).norm();
      x = std::move(next);
      if (move <= 1e-14) break;
    }
    double xv = primal_value(x);
    if (xv < best_val) {
      best = x;
      best_val = xv;
    }
    theta_star_ = best;
    j_star_ = best_val;
  });
}

std::optional<double> QuadraticDualSynthetic::primal_min_value() const {
  ensure_minimizer();
  return j_star_;
}

std::optional<Vec> QuadraticDualSynthetic::primal_minimizer() const {
  ensure_minimizer();
  return theta_star_;
}

Vec QuadraticDualSynthetic::validation_theta(SplitMix64& rng) const {
  if (spec_.primal_set.bounded()) return spec_.primal_set.sample(rng);
  return FeasibleSet::ball(Vec::Zero(constants_.dim_primal), spec_.primal_validation_radius)
      .sample(rng);
}

Vec QuadraticDualSynthetic::validation_omega(SplitMix64& rng) const {
  if (spec_.dual_set.bounded()) return spec_.dual_set.sample(rng);
  return FeasibleSet::ball(Vec::Zero(constants_.dim_dual), dual_val_radius_).sample(rng);
}

namespace {

SyntheticSpec base_spec() {
  SyntheticSpec s;
  s.c0 = 0.25;
  s.lambda = 0.25;
  s.A.resize(3, 4);
  s.A << 0.40, 0.20, -0.10, 0.00,
        -0.10, 0.30, 0.20, 0.30,
         0.20, -0.20, 0.30, -0.30;
  s.K = Vec{{1.0, 1.25, 1.6}}.asDiagonal();
  s.noise_sigma = 1.0;
  s.primal_set = FeasibleSet::ball(Vec::Zero(4), 2.0);
  s.dual_set = FeasibleSet::all_space(3);
  return s;
}

}  // namespace

SyntheticSpec synthetic_default_spec() { return base_spec(); }

SyntheticSpec synthetic_noiseless_spec() {
  SyntheticSpec s = base_spec();
  s.noise_sigma = 0.0;
  return s;
}

SyntheticSpec synthetic_ball_dual_spec() {
  SyntheticSpec s = base_spec();
  s.dual_set = FeasibleSet::ball(Vec::Zero(3), 1.0);
  return s;
}

SyntheticSpec synthetic_unconstrained_spec() {
  SyntheticSpec s = base_spec();
  s.primal_set = FeasibleSet::all_space(4);
  return s;
}

}  // namespace saddle
