#pragma once

// Scenario files are JSON. Every object is strict: an unknown key is an error
// naming its full path (e.g. "planner.k_cc" or "obstacles[2].vx"). Missing
// keys keep their defaults.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "chance_rrt/dynamics.hpp"
#include "chance_rrt/perception.hpp"
#include "chance_rrt/planner.hpp"
#include "chance_rrt/risk.hpp"

namespace chance_rrt {

struct Road {
  int lanes = 3;
  double lane_width = 3.5;
  double length = 100.0;

  double width() const { return lanes * lane_width; }
  PlanarBounds bounds() const { return {0.0, length, 0.0, width()}; }
};

struct Scenario {
  std::string name = "scenario";
  Road road;
  EgoState ego;
  Vec2 goal{90.0, 5.25};
  std::vector<GroundTruthObstacle> obstacles;
  SensorNoiseProfile sensor;
  MotionConfig motion;
  PlannerConfig planner;  ///< goal_radius lives here
  RiskConfig risk;
  int trials = 1;
  std::uint64_t base_seed = 0;

  /// Throws ScenarioError naming the first offending field.
  void validate() const;
};

Scenario parse_scenario(const std::string& json_text);
/// Throws IoError if the file cannot be read, ScenarioError if it is invalid.
Scenario load_scenario(const std::filesystem::path& path);

struct SweepConfig {
  SensorNoiseProfile profile;
  std::vector<double> distances{10.0, 20.0, 30.0, 40.0, 50.0};
  std::vector<double> azimuths{-1.2, -0.6, 0.0, 0.6, 1.2};  ///< rad
  int frames = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Accepts either a bare sensor object or {"sensor": {...}, "distances": [...],
/// "azimuths_deg": [...], "frames": N, "seed": S}.
SweepConfig parse_sweep_config(const std::string& json_text);
SweepConfig load_sweep_config(const std::filesystem::path& path);

}  // namespace chance_rrt
