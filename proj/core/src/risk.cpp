#include "chance_rrt/risk.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "chance_rrt/errors.hpp"

namespace chance_rrt {

namespace {
constexpr double kDegenerateVariance = 1e-15;
}

void RiskConfig::validate() const {
  if (!(p_safe > 0.0 && p_safe < 1.0)) throw DomainError("p_safe must lie in (0, 1)");
}

double constraint_satisfaction_prob(const Vec2& a, double b, const Vec2& z, const Mat2& cov_total,
                                    ErfMethod method) {
  if (!is_psd(cov_total, 1e-12, 1e-12)) throw DomainError("combined covariance is not PSD");
  if (std::abs(a.norm() - 1.0) > 1e-9) throw DomainError("constraint normal is not unit length");
  const double margin = a.dot(z) - b;
  const double var = a.dot(cov_total * a);
  if (var <= kDegenerateVariance) {
    if (margin < 0.0) return 1.0;
    if (margin > 0.0) return 0.0;
    return 0.5;
  }
  return 0.5 * (1.0 - erf(margin / std::sqrt(2.0 * var), method));
}

HalfPlaneSet inflate_for(const HalfPlaneSet& polygon, const ObstacleBelief& obstacle) {
  HalfPlaneSet out = polygon;
  // Same as footprint().support(normal) with the trig hoisted out of the loop.
  const Vec2 u(std::cos(obstacle.heading), std::sin(obstacle.heading));
  const Vec2 v(-u.y(), u.x());
  for (auto& f : out.faces) {
    f.offset += obstacle.half_length * std::abs(f.normal.dot(u)) + obstacle.half_width * std::abs(f.normal.dot(v));
  }
  return out;
}

double collision_prob_obstacle(const HalfPlaneSet& polygon, const ObstacleBelief& obstacle,
                               const Mat2& ego_cov, ErfMethod method) {
  const HalfPlaneSet inflated = inflate_for(polygon, obstacle);
  const Mat2 cov = obstacle.covariance + ego_cov;
  double best = 1.0;
  for (const auto& f : inflated.faces) {
    best = std::min(best, constraint_satisfaction_prob(f.normal, f.offset, obstacle.center, cov, method));
    if (best == 0.0) break;
  }
  return best;
}

double total_risk(const HalfPlaneSet& polygon, const Mat2& ego_cov,
                  std::span<const ObstacleBelief> obstacles, ErfMethod method) {
  double sum = 0.0;
  for (const auto& ob : obstacles) sum += collision_prob_obstacle(polygon, ob, ego_cov, method);
  return std::min(sum, 1.0);
}

bool check_chance_constraint(double delta_t, const RiskConfig& cfg) {
  return delta_t < cfg.risk_bound();
}

MonteCarloEstimate mc_collision_oracle(const HalfPlaneSet& polygon, const ObstacleBelief& obstacle,
                                       const Mat2& ego_cov, int n, std::uint64_t seed) {
  if (n < 1000) throw DomainError("Monte Carlo oracle needs at least 1000 samples");
  const Mat2 cov = symmetrized(obstacle.covariance + ego_cov);
  if (!is_psd(cov)) throw DomainError("combined covariance is not PSD");

  // Symmetric square root handles singular covariances (point masses included).
  Eigen::SelfAdjointEigenSolver<Mat2> eig(cov);
  const Eigen::Vector2d root_vals = eig.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  const Mat2 root = eig.eigenvectors() * root_vals.asDiagonal() * eig.eigenvectors().transpose();

  const HalfPlaneSet inflated = inflate_for(polygon, obstacle);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  long hits = 0;
  for (int i = 0; i < n; ++i) {
    const Vec2 e(normal(rng), normal(rng));
    const Vec2 z = obstacle.center + root * e;
    if (inflated.contains_strictly(z)) ++hits;
  }
  const double p = static_cast<double>(hits) / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

}  // namespace chance_rrt
