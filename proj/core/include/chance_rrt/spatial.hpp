#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "chance_rrt/geometry.hpp"
#include "chance_rrt/uncertainty.hpp"

namespace chance_rrt {

/// Planar obstacle handed to the planner.
///
/// The deterministic footprint (half_length, half_width) is kept apart from
/// the stochastic part: `covariance` carries only the uncertainty of the
/// center, expressed in the world frame. The inflated semi-axes are what a
/// plot or a conservative footprint check would use.
struct ObstacleBelief {
  int id = -1;
  Vec2 center{0.0, 0.0};
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;
  double semi_axis_lon = 0.0;  ///< L_a
  double semi_axis_lat = 0.0;  ///< L_b
  double sigma_lon = 0.0;
  double sigma_lat = 0.0;
  double delta_a = 0.0;
  double delta_b = 0.0;
  Mat2 covariance = Mat2::Zero();
  Vec2 velocity{0.0, 0.0};
  double pe = 0.0;
  double mi = 0.0;
  bool suspect = false;

  OrientedBox footprint() const { return {center, heading, half_length, half_width}; }
  /// Constant-velocity extrapolation by `dt` seconds.
  ObstacleBelief at_time(double dt) const;
};

struct LatLonSigma {
  double sigma_lat = 0.0;
  double sigma_lon = 0.0;
};

struct OrientationMargins {
  double delta_a = 0.0;
  double delta_b = 0.0;
};

struct FilterResult {
  std::vector<ObstacleBelief> kept;
  std::vector<ObstacleBelief> rejected;
};

/// sigma_lat = sqrt(var_x + var_w), sigma_lon = sqrt(var_y + var_l).
LatLonSigma lateral_longitudinal_sigma(double var_x, double var_y, double var_w, double var_l);

/// Extra extent caused by yaw uncertainty. Requires w, l > 0 and
/// 0 <= sigma_theta < pi/2. Footprints wider than long give a negative raw
/// value; both margins are clamped at zero.
OrientationMargins orientation_margins(double w, double l, double sigma_theta);

ObstacleBelief make_obstacle_belief(const DetectionBelief& belief);

/// Rejects when pe > pe_max or mi > mi_max. Equality keeps the obstacle.
FilterResult filter_misdetections(std::span<const ObstacleBelief> obstacles, double pe_max,
                                  double mi_max);

inline double default_pe_max() { return 0.5 * std::log(2.0); }
inline double default_mi_max() { return 0.25 * std::log(2.0); }

}  // namespace chance_rrt
