#include "chance_rrt/execute.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "chance_rrt/errors.hpp"
#include "chance_rrt/perception.hpp"
#include "chance_rrt/spatial.hpp"
#include "chance_rrt/uncertainty.hpp"

namespace chance_rrt {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Mat2 matrix_sqrt(const Mat2& m) {
  Eigen::SelfAdjointEigenSolver<Mat2> eig(symmetrized(m));
  const Vec2 root = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return eig.eigenvectors() * root.asDiagonal() * eig.eigenvectors().transpose();
}

struct Perception {
  std::vector<ObstacleBelief> all;
  std::vector<ObstacleBelief> kept;
  int clutter = 0;
  int rejected = 0;
  int rejected_clutter = 0;
};

Perception perceive(const EgoState& ego, const std::vector<GroundTruthObstacle>& truth,
                    const SensorNoiseProfile& profile, const PlannerConfig& cfg, std::uint64_t seed) {
  Perception p;
  int clutter_index = 0;
  for (const auto& set : sense(ego, truth, profile, seed)) {
    ObstacleBelief ob = make_obstacle_belief(fuse_detection(set.samples));
    ob.id = set.clutter ? -1 - clutter_index++ : set.truth_id;
    ob.velocity = set.velocity;
    p.all.push_back(ob);
  }
  p.clutter = clutter_index;
  auto filtered = filter_misdetections(p.all, cfg.pe_max, cfg.mi_max);
  p.kept = std::move(filtered.kept);
  p.rejected = static_cast<int>(filtered.rejected.size());
  p.rejected_clutter = static_cast<int>(
      std::count_if(filtered.rejected.begin(), filtered.rejected.end(), [](const auto& o) { return o.id < 0; }));
  return p;
}

std::vector<EgoState> planned_states(const PlanTree& tree, const SelectedPath& path, int horizon,
                                     const MotionConfig& motion) {
  std::vector<EgoState> states;
  for (std::size_t i = 1; i < path.nodes.size() && static_cast<int>(states.size()) < horizon; ++i) {
    for (const auto& s : tree.node(path.nodes[i]).trajectory) states.push_back(s);
  }
  if (static_cast<int>(states.size()) < horizon) {
    const EgoState last = states.empty() ? tree.root().belief.mean : states.back();
    for (const auto& st : brake_to_stop(last, motion)) states.push_back(st.state);
    EgoState rest = states.empty() ? last : states.back();
    rest.speed = 0.0;
    while (static_cast<int>(states.size()) < horizon) states.push_back(rest);
  }
  states.resize(static_cast<std::size_t>(horizon));
  return states;
}

}  // namespace

std::string to_string(RunStatus status) {
  switch (status) {
    case RunStatus::kGoalReached: return "goal_reached";
    case RunStatus::kCollision: return "collision";
    case RunStatus::kTimeout: return "timeout";
  }
  return "unknown";
}

double RunTrace::length() const {
  double len = 0.0;
  Vec2 prev = start.position();
  for (const auto& s : executed) {
    len += (s.position() - prev).norm();
    prev = s.position();
  }
  return len;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return splitmix(splitmix(splitmix(seed) ^ a) ^ (b * 0xD6E8FEB86659FD93ULL));
}

RunTrace execute(const Scenario& scenario, const PlannerConfig& cfg, const MotionConfig& motion,
                 const RiskConfig& risk, std::uint64_t seed, const ExpansionObserver& observer) {
  cfg.validate();
  motion.validate();
  risk.validate();

  RunTrace trace;
  trace.start = scenario.ego;
  EgoState ego = scenario.ego;
  const Vec2 goal = scenario.goal;
  const double goal_radius = cfg.goal_radius;
  if ((ego.position() - goal).norm() <= goal_radius) {
    trace.status = RunStatus::kGoalReached;
    return trace;
  }

  const int horizon = std::max(1, static_cast<int>(std::lround(cfg.replan_horizon / motion.dt)));
  const Mat2 noise_root = matrix_sqrt(motion.process_noise);
  const bool blind = cfg.mode == PlannerMode::kCL;
  ExpansionBudget budget;
  budget.max_iterations = cfg.max_iterations;
  if (cfg.wall_clock_budget) budget.wall_time = std::chrono::duration<double>(cfg.expansion_interval);

  double now = 0.0;
  for (int cycle = 0; cycle < cfg.max_cycles; ++cycle) {
    std::vector<GroundTruthObstacle> truth;
    truth.reserve(scenario.obstacles.size());
    for (const auto& o : scenario.obstacles) truth.push_back(o.at_time(now));

    const auto seen = perceive(ego, truth, scenario.sensor, cfg, mix_seed(seed, static_cast<std::uint64_t>(cycle), 1));
    const std::vector<ObstacleBelief> planning =
        cfg.mode == PlannerMode::kPU ? seen.kept : baseline_mode_transform(seen.all, cfg);

    CycleRecord rec;
    rec.cycle = cycle;
    rec.time = now;
    rec.start = ego;
    rec.detections = static_cast<int>(seen.all.size());
    rec.clutter = seen.clutter;
    if (cfg.mode == PlannerMode::kPU) {
      rec.rejected = seen.rejected;
      rec.rejected_clutter = seen.rejected_clutter;
    }
    rec.perceived = seen.kept;

    StateBelief root{ego, blind ? Mat2::Zero() : motion.initial_covariance};
    PlanTree tree(root, goal, goal_radius);
    std::mt19937_64 rng(mix_seed(seed, static_cast<std::uint64_t>(cycle), 2));
    const auto stats = expand_tree(tree, planning, cfg, motion, risk, budget, rng);
    if (observer) observer(tree, cycle);

    const SelectedPath path = select_path(tree);
    rec.tree_size = tree.size();
    rec.iterations = stats.iterations;
    rec.goal_paths = static_cast<int>(tree.goal_paths().size());
    rec.reaches_goal = path.reaches_goal;
    rec.deadlock = path.nodes.size() <= 1;
    rec.path_score = path.score;
    trace.deadlocked = trace.deadlocked || rec.deadlock;

    std::mt19937_64 noise_rng(mix_seed(seed, static_cast<std::uint64_t>(cycle), 3));
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec2 drift = Vec2::Zero();
    Mat2 report_cov = motion.initial_covariance;
    std::vector<ObstacleBelief> moved(seen.kept.size());
    bool finished = false;

    const auto states = planned_states(tree, path, horizon, motion);
    for (int k = 0; k < horizon; ++k) {
      const double tau = (k + 1) * motion.dt;
      drift += noise_root * Vec2(gauss(noise_rng), gauss(noise_rng));
      report_cov = propagate_covariance(report_cov, Mat2::Identity(), motion.process_noise);

      EgoState actual = states[static_cast<std::size_t>(k)];
      actual.x += drift.x();
      actual.y += drift.y();

      for (std::size_t i = 0; i < moved.size(); ++i) moved[i] = seen.kept[i].at_time(tau);
      const double delta = total_risk(ego_polygon(actual, motion), report_cov, moved, risk.erf_method);
      trace.executed.push_back(actual);
      trace.step_risk.push_back(delta);
      rec.max_step_risk = std::max(rec.max_step_risk, delta);
      ++rec.executed_steps;

      const OrientedBox body = ego_box(actual, motion);
      const bool hit = std::any_of(scenario.obstacles.begin(), scenario.obstacles.end(), [&](const auto& o) {
        return boxes_overlap(body, o.at_time(now + tau).footprint());
      });
      if (hit) {
        trace.collided = true;
        trace.status = RunStatus::kCollision;
        finished = true;
      } else if ((actual.position() - goal).norm() <= goal_radius) {
        trace.status = RunStatus::kGoalReached;
        finished = true;
      }
      ego = actual;
      if (finished) break;
    }
    trace.cycles.push_back(std::move(rec));
    now += horizon * motion.dt;
    if (finished) return trace;
  }
  trace.status = RunStatus::kTimeout;
  return trace;
}

}  // namespace chance_rrt
