#pragma once

#include <Eigen/Core>
#include <array>

namespace chance_rrt {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
double normalize_angle(double a);

Mat2 rotation(double heading);

/// (M + M^T) / 2
Mat2 symmetrized(const Mat2& m);

/// True when `m` is symmetric within `sym_tol` and its eigenvalues are >= -eig_tol.
bool is_psd(const Mat2& m, double sym_tol = 1e-12, double eig_tol = 1e-12);

/// Smallest eigenvalue of the symmetric part of `m`.
double min_eigenvalue(const Mat2& m);

/// Planar rectangle with center, heading and half extents along its body axes.
struct OrientedBox {
  Vec2 center{0.0, 0.0};
  double heading = 0.0;
  double half_length = 0.0;
  double half_width = 0.0;

  std::array<Vec2, 4> corners() const;
  /// Support function h(d) = max_{p in box} d.(p - center).
  double support(const Vec2& direction) const;
  bool contains(const Vec2& p) const;
};

/// Separating-axis overlap test. Touching boundaries count as overlap.
bool boxes_overlap(const OrientedBox& a, const OrientedBox& b);

/// True when the segment p->q crosses the interior or boundary of `box`.
bool segment_intersects_box(const Vec2& p, const Vec2& q, const OrientedBox& box);

}  // namespace chance_rrt
