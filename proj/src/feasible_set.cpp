#include "saddle/feasible_set.hpp"

#include <cmath>

namespace saddle {

double SplitMix64::normal() {
  // Box-Muller; u clamped away from 0 so log stays finite.
  double u = u01();
  if (u <= 0.0) u = 0x1.0p-53;
  double v = u01();
  return std::sqrt(-2.0 * std::log(u)) * std::cos(6.283185307179586476925286766559 * v);
}

FeasibleSet FeasibleSet::all_space(Index dim) {
  if (dim <= 0) throw ContractError("all_space: dimension must be positive");
  FeasibleSet s;
  s.kind_ = SetKind::all_space;
  s.dim_ = dim;
  return s;
}

FeasibleSet FeasibleSet::ball(Vec center, double radius) {
  if (center.size() <= 0) throw ContractError("ball: empty center");
  if (!all_finite(center) || !std::isfinite(radius)) throw ContractError("ball: non-finite parameters");
  if (radius <= 0.0) throw ContractError("ball: radius must be positive");
  FeasibleSet s;
  s.kind_ = SetKind::ball;
  s.dim_ = center.size();
  s.center_ = std::move(center);
  s.radius_ = radius;
  return s;
}

FeasibleSet FeasibleSet::box(Vec lower, Vec upper) {
  if (lower.size() != upper.size() || lower.size() <= 0) throw ContractError("box: bound dimensions differ");
  if (!all_finite(lower) || !all_finite(upper)) throw ContractError("box: non-finite bounds");
  if ((lower.array() > upper.array()).any()) throw ContractError("box: lower must be <= upper elementwise");
  FeasibleSet s;
  s.kind_ = SetKind::box;
  s.dim_ = lower.size();
  s.lower_ = std::move(lower);
  s.upper_ = std::move(upper);
  return s;
}

Vec FeasibleSet::sample(SplitMix64& rng) const {
  switch (kind_) {
    case SetKind::all_space:
      throw ContractError("sample: all_space is unbounded");
    case SetKind::ball: {
      // Uniform in the ball: normal direction, radius ~ r * u^(1/d).
      Vec dir(dim_);
      for (Index i = 0; i < dim_; ++i) dir[i] = rng.normal();
      double n = dir.norm();
      if (n == 0.0) return center_;
      double r = radius_ * std::pow(rng.u01(), 1.0 / static_cast<double>(dim_));
      return center_ + (r / n) * dir;
    }
    case SetKind::box: {
      Vec x(dim_);
      for (Index i = 0; i < dim_; ++i) x[i] = rng.uniform(lower_[i], upper_[i]);
      return x;
    }
  }
  throw ContractError("sample: unknown set kind");
}

Vec project(const FeasibleSet& set, const Vec& x) {
  if (x.size() != set.dim()) throw ContractError("project: dimension mismatch");
  if (!all_finite(x)) throw ContractError("project: non-finite input");
  switch (set.kind()) {
    case SetKind::all_space:
      return x;
    case SetKind::ball: {
      Vec delta = x - set.center();
      double n = delta.norm();
      if (n <= set.radius()) return x;
      return set.center() + (set.radius() / n) * delta;
    }
    case SetKind::box:
      return x.cwiseMax(set.lower()).cwiseMin(set.upper());
  }
  throw ContractError("project: unknown set kind");
}

bool contains(const FeasibleSet& set, const Vec& x, double tol) {
  return (x - project(set, x)).norm() <= tol;
}

}  // namespace saddle
