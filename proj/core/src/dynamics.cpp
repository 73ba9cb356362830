#include "chance_rrt/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "chance_rrt/errors.hpp"

namespace chance_rrt {

void MotionConfig::validate() const {
  if (!(dt > 0.0)) throw DomainError("motion.dt must be positive");
  if (!(wheelbase > 0.0)) throw DomainError("motion.wheelbase must be positive");
  if (!(ego_length > 0.0 && ego_width > 0.0)) throw DomainError("ego dimensions must be positive");
  if (!is_psd(process_noise)) throw DomainError("motion.process_noise must be PSD");
  if (!is_psd(initial_covariance)) throw DomainError("motion.initial_covariance must be PSD");
  if (!(v_max > 0.0)) throw DomainError("motion.v_max must be positive");
  if (!(steer_max > 0.0 && steer_max < kPi / 2.0)) throw DomainError("motion.steer_max out of range");
  if (!(a_min < 0.0 && a_max > 0.0)) throw DomainError("motion accel limits must straddle zero");
  if (!(lookahead > 0.0)) throw DomainError("motion.lookahead must be positive");
  if (!(goal_tolerance > 0.0)) throw DomainError("motion.goal_tolerance must be positive");
  if (max_steps < 1) throw DomainError("motion.max_steps must be >= 1");
}

bool HalfPlaneSet::contains_strictly(const Vec2& p) const {
  return std::all_of(faces.begin(), faces.end(),
                     [&](const HalfPlane& f) { return f.normal.dot(p) < f.offset; });
}

EgoState step(const EgoState& s, const ControlInput& u, const MotionConfig& cfg) {
  EgoState n;
  n.x = s.x + s.speed * std::cos(s.heading) * cfg.dt;
  n.y = s.y + s.speed * std::sin(s.heading) * cfg.dt;
  n.heading = normalize_angle(s.heading + (s.speed / cfg.wheelbase) * std::tan(u.steering) * cfg.dt);
  n.speed = std::clamp(s.speed + u.accel * cfg.dt, 0.0, cfg.v_max);
  return n;
}

SegmentTracker::SegmentTracker(const EgoState& start, const Vec2& target, const MotionConfig& cfg)
    : cfg_(cfg), state_(start), start_(start.position()), target_(target) {
  const Vec2 seg = target - start_;
  seg_len_ = seg.norm();
  if (seg_len_ <= cfg.goal_tolerance) {
    complete_ = true;
    finished_ = true;
    return;
  }
  dir_ = seg / seg_len_;
}

TrajectoryStep SegmentTracker::advance() {
  const Vec2 pos = state_.position();
  const double along = std::clamp(dir_.dot(pos - start_), 0.0, seg_len_);
  const Vec2 look = start_ + std::min(along + cfg_.lookahead, seg_len_) * dir_;
  const Vec2 to_look = look - pos;

  ControlInput u;
  const double ld = to_look.norm();
  if (ld > 1e-9) {
    const double alpha = std::atan2(to_look.y(), to_look.x()) - state_.heading;
    u.steering = std::atan2(2.0 * cfg_.wheelbase * std::sin(alpha), ld);
  }
  u.steering = std::clamp(u.steering, -cfg_.steer_max, cfg_.steer_max);
  u.accel = std::clamp(cfg_.speed_gain * (cfg_.cruise_speed - state_.speed), cfg_.a_min, cfg_.a_max);

  state_ = step(state_, u, cfg_);
  ++steps_;
  const Vec2 p = state_.position();
  if ((target_ - p).norm() <= cfg_.goal_tolerance) {
    complete_ = true;
    finished_ = true;
  } else if (dir_.dot(p - start_) >= seg_len_ || steps_ >= cfg_.max_steps) {
    finished_ = true;  // passed the target or out of steps
  }
  return {state_, u};
}

SteerResult steer_to(const StateBelief& belief, const Vec2& target, const MotionConfig& cfg) {
  SteerResult out;
  SegmentTracker tracker(belief.mean, target, cfg);
  while (!tracker.finished()) out.steps.push_back(tracker.advance());
  out.complete = tracker.complete();
  return out;
}

std::vector<TrajectoryStep> brake_to_stop(const EgoState& state, const MotionConfig& cfg) {
  std::vector<TrajectoryStep> out;
  EgoState s = state;
  const ControlInput u{0.0, cfg.a_min};
  const int limit = static_cast<int>(std::ceil(cfg.v_max / (-cfg.a_min * cfg.dt))) + 1;
  for (int k = 0; k < limit && s.speed > 0.0; ++k) {
    s = step(s, u, cfg);
    out.push_back({s, u});
  }
  return out;
}

Mat2 propagate_covariance(const Mat2& cov, const Mat2& A, const Mat2& process_noise) {
  return symmetrized(A * cov * A.transpose() + process_noise);
}

HalfPlaneSet ego_polygon(const EgoState& state, const MotionConfig& cfg) {
  const Vec2 c = state.position();
  const Vec2 u(std::cos(state.heading), std::sin(state.heading));
  const Vec2 v(-u.y(), u.x());
  const double hl = 0.5 * cfg.ego_length;
  const double hw = 0.5 * cfg.ego_width;
  HalfPlaneSet set;
  set.faces[0] = {u, u.dot(c) + hl};
  set.faces[1] = {v, v.dot(c) + hw};
  set.faces[2] = {-u, -u.dot(c) + hl};
  set.faces[3] = {-v, -v.dot(c) + hw};
  return set;
}

OrientedBox ego_box(const EgoState& state, const MotionConfig& cfg) {
  return {state.position(), state.heading, 0.5 * cfg.ego_length, 0.5 * cfg.ego_width};
}

}  // namespace chance_rrt
