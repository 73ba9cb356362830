#include "chance_rrt/planner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "chance_rrt/errors.hpp"

namespace chance_rrt {

std::string to_string(PlannerMode mode) {
  switch (mode) {
    case PlannerMode::kPU: return "pu";
    case PlannerMode::kCC: return "cc";
    case PlannerMode::kCL: return "cl";
  }
  throw DomainError("unknown planner mode");
}

PlannerMode parse_mode(const std::string& text) {
  std::string lower;
  for (char c : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  if (lower == "pu") return PlannerMode::kPU;
  if (lower == "cc") return PlannerMode::kCC;
  if (lower == "cl") return PlannerMode::kCL;
  throw DomainError("unknown planner mode '" + text + "'");
}

void PlannerConfig::validate() const {
  if (candidates < 1) throw DomainError("planner.candidates must be >= 1");
  if (k_cc < 0.0 || k_dist < 0.0 || (k_cc == 0.0 && k_dist == 0.0)) {
    throw DomainError("planner cost weights must be non-negative and not both zero");
  }
  if (max_iterations < 0) throw DomainError("planner.max_iterations must be >= 0");
  if (!(goal_radius > 0.0)) throw DomainError("planner.goal_radius must be positive");
  if (!(goal_bias >= 0.0 && goal_bias <= 1.0)) throw DomainError("planner.goal_bias must lie in [0, 1]");
  if (!(node_interval > 0.0)) throw DomainError("planner.node_interval must be positive");
  if (!(replan_horizon > 0.0)) throw DomainError("planner.replan_horizon must be positive");
  if (max_cycles < 1) throw DomainError("planner.max_cycles must be >= 1");
  if (!(safe_stop_dwell >= 0.0)) throw DomainError("planner.safe_stop_dwell must be non-negative");
  if (cc_fixed_sigma < 0.0) throw DomainError("planner.cc_fixed_sigma must be non-negative");
  if (pe_max < 0.0 || mi_max < 0.0) throw DomainError("mis-detection thresholds must be non-negative");
  for (const auto* b : {&sample_region, &drivable_region}) {
    if (!(b->x_min < b->x_max && b->y_min < b->y_max)) throw DomainError("planar bounds are empty");
  }
}

// ---------------------------------------------------------------------------
// PlanTree

PlanTree::PlanTree(const StateBelief& root, const Vec2& goal, double goal_radius)
    : goal_(goal), goal_radius_(goal_radius) {
  TreeNode r;
  r.id = 0;
  r.belief = root;
  r.c_lb = (root.mean.position() - goal).norm();
  r.in_goal = in_goal(root.mean.position());
  if (r.in_goal) r.c_ub = r.c_lb;
  nodes_.push_back(std::move(r));
}

int PlanTree::add_node(TreeNode n) {
  if (n.parent < 0 || static_cast<std::size_t>(n.parent) >= nodes_.size()) {
    throw DomainError("tree node parent does not exist");
  }
  n.id = static_cast<int>(nodes_.size());
  n.children.clear();
  n.c_lb = (n.position() - goal_).norm();
  n.in_goal = in_goal(n.position());
  n.c_ub = kInfinity;
  nodes_[static_cast<std::size_t>(n.parent)].children.push_back(n.id);
  nodes_.push_back(std::move(n));
  return nodes_.back().id;
}

std::vector<int> PlanTree::path_to(int id) const {
  std::vector<int> path;
  for (int cur = id; cur != -1; cur = node(cur).parent) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

void PlanTree::record_goal_path(int goal_node_id) { goal_paths_.push_back(path_to(goal_node_id)); }

// ---------------------------------------------------------------------------
// Costs

double node_cost(const TreeNode& node, const Vec2& sample, const PlannerConfig& cfg) {
  return cfg.k_cc * node.delta + cfg.k_dist * (node.position() - sample).norm();
}

namespace {

double arc_length(const EgoState& from, const std::vector<EgoState>& traj) {
  double len = 0.0;
  Vec2 prev = from.position();
  for (const auto& s : traj) {
    len += (s.position() - prev).norm();
    prev = s.position();
  }
  return len;
}

}  // namespace

double edge_cost(const TreeNode& parent, const TreeNode& child, const PlannerConfig& cfg) {
  return cfg.k_cc * child.delta + cfg.k_dist * arc_length(parent.belief.mean, child.trajectory);
}

void update_cub(PlanTree& tree, int from_node_id) {
  TreeNode* cur = &tree.node(from_node_id);
  if (cur->in_goal) cur->c_ub = cur->c_lb;
  while (cur->parent != -1 && std::isfinite(cur->c_ub)) {
    TreeNode& parent = tree.node(cur->parent);
    if (parent.in_goal) break;  // pinned to C_LB
    const double candidate = cur->edge_cost + cur->c_ub;
    if (!(candidate < parent.c_ub)) break;
    parent.c_ub = candidate;
    cur = &parent;
  }
}

SelectedPath select_path(const PlanTree& tree) {
  SelectedPath best;
  const auto& paths = tree.goal_paths();
  for (const auto& path : paths) {
    double score = -kInfinity;
    for (int id : path) score = std::max(score, tree.node(id).c_ub);
    const bool better = !best.reaches_goal || score < best.score ||
                        (score == best.score && path.size() < best.nodes.size());
    if (!better) continue;
    best.nodes = path;
    best.score = score;
    best.reaches_goal = true;
  }
  if (best.reaches_goal) return best;

  const auto& nodes = tree.nodes();
  int closest = 0;
  for (const auto& n : nodes) {
    if (n.c_lb < nodes[static_cast<std::size_t>(closest)].c_lb) closest = n.id;
  }
  best.nodes = tree.path_to(closest);
  return best;
}

std::vector<ObstacleBelief> baseline_mode_transform(std::span<const ObstacleBelief> obstacles,
                                                    const PlannerConfig& cfg) {
  std::vector<ObstacleBelief> out(obstacles.begin(), obstacles.end());
  switch (cfg.mode) {
    case PlannerMode::kPU:
      return out;
    case PlannerMode::kCC:
    case PlannerMode::kCL: {
      const double var = cfg.mode == PlannerMode::kCC ? cfg.cc_fixed_sigma * cfg.cc_fixed_sigma : 0.0;
      for (auto& ob : out) {
        ob.covariance = Mat2::Identity() * var;
        ob.sigma_lat = ob.sigma_lon = 0.0;
        ob.delta_a = ob.delta_b = 0.0;
        ob.semi_axis_lon = ob.half_length;
        ob.semi_axis_lat = ob.half_width;
      }
      return out;
    }
  }
  throw DomainError("unknown planner mode");
}

double planning_risk(const EgoState& state, const Mat2& cov, double time,
                     std::span<const ObstacleBelief> obstacles, PlannerMode mode,
                     const MotionConfig& motion, const RiskConfig& risk) {
  const HalfPlaneSet poly = ego_polygon(state, motion);
  if (mode == PlannerMode::kCL) {
    const Mat2 zero = Mat2::Zero();
    for (const auto& ob : obstacles) {
      ObstacleBelief moved = ob.at_time(time);
      moved.covariance = zero;
      if (collision_prob_obstacle(poly, moved, zero, risk.erf_method) > 0.0) return 1.0;
    }
    return 0.0;
  }
  double sum = 0.0;
  for (const auto& ob : obstacles) {
    const ObstacleBelief moved = ob.at_time(time);
    sum += collision_prob_obstacle(poly, moved, cov, risk.erf_method);
    if (sum >= 1.0) return 1.0;
  }
  return sum;
}

// ---------------------------------------------------------------------------
// Expansion

namespace {

struct Expander {
  PlanTree& tree;
  std::span<const ObstacleBelief> obstacles;
  const PlannerConfig& cfg;
  const MotionConfig& motion;
  const RiskConfig& risk;
  int node_steps;

  struct Extension {
    std::vector<TreeNode> pending;
    bool reached_goal = false;
  };

  bool feasible(const EgoState& s) const {
    if (s.speed < 0.0 || s.speed > motion.v_max) return false;
    const auto corners = ego_box(s, motion).corners();
    return std::all_of(corners.begin(), corners.end(),
                       [&](const Vec2& c) { return cfg.drivable_region.contains(c); });
  }

  double risk_at(const EgoState& s, const Mat2& cov, double t) const {
    return planning_risk(s, cov, t, obstacles, cfg.mode, motion, risk);
  }

  // Braking from `s` must stay feasible and within the bound, and so must the
  // resting state for safe_stop_dwell seconds while traffic keeps moving.
  bool safe_stop(const EgoState& s, Mat2 cov, double t) const {
    EgoState rest = s;
    for (const auto& st : brake_to_stop(s, motion)) {
      cov = propagate_covariance(cov, Mat2::Identity(), motion.process_noise);
      t += motion.dt;
      if (!feasible(st.state)) return false;
      if (!check_chance_constraint(risk_at(st.state, cov, t), risk)) return false;
      rest = st.state;
    }
    rest.speed = 0.0;
    const int dwell = static_cast<int>(std::lround(cfg.safe_stop_dwell / motion.dt));
    for (int k = 0; k < dwell; ++k) {
      cov = propagate_covariance(cov, Mat2::Identity(), motion.process_noise);
      t += motion.dt;
      if (!check_chance_constraint(risk_at(rest, cov, t), risk)) return false;
    }
    return true;
  }

  Extension extend(int from, const Vec2& target) const {
    Extension ext;
    const TreeNode& start = tree.node(from);
    SegmentTracker tracker(start.belief.mean, target, motion);

    const int base = static_cast<int>(tree.size());
    int parent = from;
    EgoState parent_state = start.belief.mean;
    Mat2 cov = start.belief.covariance;
    double t = start.time;
    std::vector<EgoState> segment;
    double last_delta = 0.0;

    auto emit = [&](const EgoState& s, double delta) {
      if (cfg.require_safe_stop && !safe_stop(s, cov, t)) return false;
      TreeNode n;
      n.parent = parent;
      n.belief = {s, cov};
      n.delta = delta;
      n.time = t;
      n.edge_cost = cfg.k_cc * delta + cfg.k_dist * arc_length(parent_state, segment);
      n.trajectory = std::move(segment);
      segment.clear();
      ext.pending.push_back(std::move(n));
      parent = base + static_cast<int>(ext.pending.size()) - 1;
      parent_state = s;
      return true;
    };

    bool aborted = false;
    while (!tracker.finished()) {
      const EgoState s = tracker.advance().state;
      const Mat2 next_cov = propagate_covariance(cov, Mat2::Identity(), motion.process_noise);
      const double next_t = t + motion.dt;
      if (!feasible(s)) break;
      const double delta = risk_at(s, next_cov, next_t);
      if (!check_chance_constraint(delta, risk)) break;

      cov = next_cov;
      t = next_t;
      segment.push_back(s);
      last_delta = delta;

      const bool goal = tree.in_goal(s.position());
      if (static_cast<int>(segment.size()) == node_steps || tracker.finished() || goal) {
        if (!emit(s, delta)) {
          aborted = true;
          break;
        }
        if (goal) {
          ext.reached_goal = true;
          return ext;
        }
      }
    }
    if (!aborted && !segment.empty()) {
      const EgoState last = segment.back();
      emit(last, last_delta);
    }
    return ext;
  }

  /// Appends pending nodes; returns the id of the last one or -1.
  int commit(Extension& ext) {
    int last = -1;
    for (auto& n : ext.pending) last = tree.add_node(std::move(n));
    ext.pending.clear();
    return last;
  }

  void record(int goal_node) {
    tree.record_goal_path(goal_node);
    update_cub(tree, goal_node);
  }
};

}  // namespace

ExpansionStats expand_tree(PlanTree& tree, std::span<const ObstacleBelief> obstacles,
                           const PlannerConfig& cfg, const MotionConfig& motion,
                           const RiskConfig& risk, const ExpansionBudget& budget,
                           std::mt19937_64& rng) {
  ExpansionStats stats;
  if (budget.max_iterations <= 0) return stats;
  if (budget.wall_time && budget.wall_time->count() <= 0.0) return stats;

  const int node_steps = std::max(1, static_cast<int>(std::lround(cfg.node_interval / motion.dt)));
  Expander ex{tree, obstacles, cfg, motion, risk, node_steps};
  const auto started = std::chrono::steady_clock::now();
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto& region = cfg.sample_region;

  std::vector<int> order;
  std::vector<double> cost;
  for (int it = 0; it < budget.max_iterations; ++it) {
    if (budget.wall_time && std::chrono::steady_clock::now() - started >= *budget.wall_time) break;
    ++stats.iterations;

    Vec2 sample;
    if (unit(rng) < cfg.goal_bias) {
      sample = tree.goal();
    } else {
      const double x = region.x_min + unit(rng) * (region.x_max - region.x_min);
      const double y = region.y_min + unit(rng) * (region.y_max - region.y_min);
      sample = Vec2(x, y);
    }

    const auto n = tree.size();
    order.resize(n);
    cost.resize(n);
    std::iota(order.begin(), order.end(), 0);
    for (std::size_t i = 0; i < n; ++i) cost[i] = node_cost(tree.nodes()[i], sample, cfg);
    const auto m = std::min<std::size_t>(n, static_cast<std::size_t>(cfg.candidates));
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m), order.end(),
                      [&](int a, int b) {
                        const auto ua = static_cast<std::size_t>(a);
                        const auto ub = static_cast<std::size_t>(b);
                        return cost[ua] < cost[ub] || (cost[ua] == cost[ub] && a < b);
                      });
    const std::vector<int> chosen(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));

    for (int from : chosen) {
      if (tree.node(from).in_goal) continue;
      auto ext = ex.extend(from, sample);
      const bool reached = ext.reached_goal;
      const int added = static_cast<int>(ext.pending.size());
      const int last = ex.commit(ext);
      stats.nodes_added += added;
      if (last < 0) continue;
      if (reached) {
        ex.record(last);
        ++stats.goal_paths_added;
        continue;
      }

      auto link = ex.extend(last, tree.goal());
      if (link.reached_goal) {
        stats.nodes_added += static_cast<int>(link.pending.size());
        ex.record(ex.commit(link));
        ++stats.goal_paths_added;
      }
    }
  }
  return stats;
}

}  // namespace chance_rrt
