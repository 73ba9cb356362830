#pragma once

// Stand-in for the Bayesian detector: produces per-object sets of stochastic
// forward-pass samples whose spread grows with range and with off-axis
// viewing angle, and injects clutter whose passes disagree on the class.

#include <cstdint>
#include <span>
#include <vector>

#include "chance_rrt/dynamics.hpp"
#include "chance_rrt/geometry.hpp"
#include "chance_rrt/uncertainty.hpp"

namespace chance_rrt {

struct GroundTruthObstacle {
  int id = 0;
  Vec2 position{0.0, 0.0};
  double heading = 0.0;
  double h = 1.5;
  double w = 1.8;
  double l = 4.5;
  Vec2 velocity{0.0, 0.0};

  GroundTruthObstacle at_time(double t) const;
  OrientedBox footprint() const { return {position, heading, 0.5 * l, 0.5 * w}; }
};

struct SensorNoiseProfile {
  int samples_per_detection = 6;    ///< T
  double sigma0 = 0.05;             ///< m
  double k_dist = 0.01;             ///< m of std per m of range
  double k_azimuth = 0.1;           ///< m of std at |sin(bearing)| = 1
  double theta_noise = 0.01;        ///< rad
  double misdetect_rate = 0.0;
  double occluded_misdetect_rate = 0.0;
  double clutter_rate = 0.0;        ///< expected clutter objects per frame
  double max_range = 60.0;
  int num_classes = 2;              ///< class 0 is "vehicle"
  double confidence_base = 0.98;
  double confidence_decay = 0.0005; ///< per m of range
  double score_jitter = 0.005;
  double log_variance_jitter = 0.05;
  double clutter_position_sigma = 1.0;
  double clutter_confidence_min = 0.55;
  double clutter_confidence_max = 0.9;

  void validate() const;
  /// Position / scale std at range d and relative bearing phi.
  double sigma(double distance, double bearing) const;
  double yaw_sigma(double distance) const;
};

struct DetectionSet {
  int truth_id = -1;  ///< -1 for clutter
  bool clutter = false;
  Vec2 velocity{0.0, 0.0};
  std::vector<DetectionSample> samples;
};

/// One perception frame. Deterministic in (ego, truth, profile, seed).
std::vector<DetectionSet> sense(const EgoState& ego, std::span<const GroundTruthObstacle> truth,
                                const SensorNoiseProfile& profile, std::uint64_t seed);

}  // namespace chance_rrt
