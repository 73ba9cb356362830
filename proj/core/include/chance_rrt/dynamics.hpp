#pragma once

#include <array>
#include <vector>

#include "chance_rrt/geometry.hpp"

namespace chance_rrt {

struct EgoState {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double speed = 0.0;

  Vec2 position() const { return {x, y}; }
  bool operator==(const EgoState&) const = default;
};

struct ControlInput {
  double steering = 0.0;
  double accel = 0.0;
};

struct StateBelief {
  EgoState mean;
  Mat2 covariance = Mat2::Zero();  ///< position only, m^2
};

struct MotionConfig {
  double wheelbase = 2.8;
  double ego_length = 4.5;
  double ego_width = 1.8;
  double dt = 0.1;
  Mat2 process_noise = Mat2::Identity() * (0.02 * 0.02 * 0.1);
  Mat2 initial_covariance = Mat2::Identity() * (0.05 * 0.05);
  double lookahead = 4.0;
  double v_max = 10.0;
  double steer_max = 0.6;
  double a_min = -6.0;
  double a_max = 2.0;
  double cruise_speed = 5.0;
  double speed_gain = 1.0;
  double goal_tolerance = 0.5;
  int max_steps = 600;

  /// Throws DomainError on non-positive dt, non-PSD noise or inverted limits.
  void validate() const;
};

struct HalfPlane {
  Vec2 normal{1.0, 0.0};  ///< unit outward normal
  double offset = 0.0;    ///< footprint side: normal.p < offset
};

/// Oriented rectangle as the conjunction of four half-planes, ordered
/// front, left, back, right.
struct HalfPlaneSet {
  std::array<HalfPlane, 4> faces;

  bool contains_strictly(const Vec2& p) const;
};

struct TrajectoryStep {
  EgoState state;
  ControlInput control;  ///< the input that produced `state`
};

struct SteerResult {
  std::vector<TrajectoryStep> steps;
  bool complete = false;
};

/// One kinematic-bicycle integration step of length cfg.dt.
EgoState step(const EgoState& state, const ControlInput& control, const MotionConfig& cfg);

/// Pure-pursuit tracking of the segment from the start position to `target`,
/// one step at a time. Finishes inside goal_tolerance (complete), once the
/// target has been passed, or after max_steps.
class SegmentTracker {
 public:
  SegmentTracker(const EgoState& start, const Vec2& target, const MotionConfig& cfg);

  bool finished() const { return finished_; }
  bool complete() const { return complete_; }
  /// Requires !finished().
  TrajectoryStep advance();

 private:
  const MotionConfig& cfg_;
  EgoState state_;
  Vec2 start_;
  Vec2 target_;
  Vec2 dir_{1.0, 0.0};
  double seg_len_ = 0.0;
  int steps_ = 0;
  bool finished_ = false;
  bool complete_ = false;
};

/// Closed-loop pure-pursuit simulation toward `target`, tracking the segment
/// from the start position to the target. Stops inside goal_tolerance, once the
/// target has been passed, or after max_steps.
SteerResult steer_to(const StateBelief& belief, const Vec2& target, const MotionConfig& cfg);

/// Full braking with the wheel straight until the vehicle stops.
std::vector<TrajectoryStep> brake_to_stop(const EgoState& state, const MotionConfig& cfg);

/// A cov A^T + process_noise, symmetrized.
Mat2 propagate_covariance(const Mat2& cov, const Mat2& A, const Mat2& process_noise);

HalfPlaneSet ego_polygon(const EgoState& state, const MotionConfig& cfg);

OrientedBox ego_box(const EgoState& state, const MotionConfig& cfg);

}  // namespace chance_rrt
