#pragma once

#include <cstdint>
#include <span>

#include "chance_rrt/dynamics.hpp"
#include "chance_rrt/erf.hpp"
#include "chance_rrt/spatial.hpp"

namespace chance_rrt {

struct RiskConfig {
  double p_safe = 0.99;
  ErfMethod erf_method = ErfMethod::kRational;

  /// Allowed collision probability, 1 - p_safe.
  double risk_bound() const { return 1.0 - p_safe; }
  void validate() const;
};

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
};

/// P(a.z - b < 0) for z ~ N(mean, cov_total). Degenerate variance along `a`
/// falls back to the indicator with 1/2 on the boundary.
double constraint_satisfaction_prob(const Vec2& a, double b, const Vec2& z, const Mat2& cov_total,
                                    ErfMethod method = ErfMethod::kRational);

/// Ego half-planes pushed out by the obstacle's deterministic support along
/// each normal, so the obstacle center can be tested as a point.
HalfPlaneSet inflate_for(const HalfPlaneSet& polygon, const ObstacleBelief& obstacle);

/// Min over the four faces of the face-satisfaction probability: an upper
/// bound on the probability that the obstacle overlaps the ego footprint.
double collision_prob_obstacle(const HalfPlaneSet& polygon, const ObstacleBelief& obstacle,
                               const Mat2& ego_cov, ErfMethod method = ErfMethod::kRational);

/// Union bound over obstacles, clamped to 1.
double total_risk(const HalfPlaneSet& polygon, const Mat2& ego_cov,
                  std::span<const ObstacleBelief> obstacles,
                  ErfMethod method = ErfMethod::kRational);

/// delta_t < 1 - p_safe
bool check_chance_constraint(double delta_t, const RiskConfig& cfg);

/// Samples obstacle centers from N(center, obstacle.cov + ego_cov) and counts
/// hits inside the inflated polygon. Deterministic for a given seed.
MonteCarloEstimate mc_collision_oracle(const HalfPlaneSet& polygon, const ObstacleBelief& obstacle,
                                       const Mat2& ego_cov, int n, std::uint64_t seed);

}  // namespace chance_rrt
