#pragma once

#include "saddle/types.hpp"

namespace saddle {

enum class SetKind { all_space, ball, box };

// Closed convex feasible set with an exact Euclidean projection:
// identity, radial scaling, or componentwise clamp.
class FeasibleSet {
 public:
  static FeasibleSet all_space(Index dim);
  static FeasibleSet ball(Vec center, double radius);
  static FeasibleSet box(Vec lower, Vec upper);

  SetKind kind() const { return kind_; }
  Index dim() const { return dim_; }
  bool bounded() const { return kind_ != SetKind::all_space; }

  const Vec& center() const { return center_; }
  double radius() const { return radius_; }
  const Vec& lower() const { return lower_; }
  const Vec& upper() const { return upper_; }

  // Uniform draw from the set; throws ContractError for all_space.
  Vec sample(SplitMix64& rng) const;

 private:
  FeasibleSet() = default;
  SetKind kind_ = SetKind::all_space;
  Index dim_ = 0;
  Vec center_;
  double radius_ = 0.0;
  Vec lower_;
  Vec upper_;
};

// Euclidean projection of x onto the set. Throws ContractError on
// dimension mismatch or non-finite input.
Vec project(const FeasibleSet& set, const Vec& x);

// Membership test: distance(x, set) <= tol.
bool contains(const FeasibleSet& set, const Vec& x, double tol);

}  // namespace saddle
