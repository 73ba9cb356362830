#include "chance_rrt/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace chance_rrt {

double normalize_angle(double a) {
  if (!std::isfinite(a)) return a;
  a = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Mat2 rotation(double heading) {
  const double c = std::cos(heading);
  const double s = std::sin(heading);
  Mat2 r;
  r << c, -s, s, c;
  return r;
}

Mat2 symmetrized(const Mat2& m) { return 0.5 * (m + m.transpose()); }

double min_eigenvalue(const Mat2& m) {
  const Mat2 s = symmetrized(m);
  // closed form for 2x2 symmetric
  const double tr = s(0, 0) + s(1, 1);
  const double diff = s(0, 0) - s(1, 1);
  const double disc = std::sqrt(diff * diff + 4.0 * s(0, 1) * s(0, 1));
  return 0.5 * (tr - disc);
}

bool is_psd(const Mat2& m, double sym_tol, double eig_tol) {
  if (!m.allFinite()) return false;
  if (std::abs(m(0, 1) - m(1, 0)) > sym_tol) return false;
  return min_eigenvalue(m) >= -eig_tol;
}

std::array<Vec2, 4> OrientedBox::corners() const {
  const Vec2 u(std::cos(heading), std::sin(heading));
  const Vec2 v(-u.y(), u.x());
  return {center + half_length * u + half_width * v, center - half_length * u + half_width * v,
          center - half_length * u - half_width * v, center + half_length * u - half_width * v};
}

double OrientedBox::support(const Vec2& d) const {
  const Vec2 u(std::cos(heading), std::sin(heading));
  const Vec2 v(-u.y(), u.x());
  return half_length * std::abs(d.dot(u)) + half_width * std::abs(d.dot(v));
}

bool OrientedBox::contains(const Vec2& p) const {
  const Vec2 u(std::cos(heading), std::sin(heading));
  const Vec2 v(-u.y(), u.x());
  const Vec2 r = p - center;
  return std::abs(r.dot(u)) <= half_length && std::abs(r.dot(v)) <= half_width;
}

namespace {

bool separated_on(const Vec2& axis, const OrientedBox& a, const OrientedBox& b) {
  const double dist = std::abs(axis.dot(b.center - a.center));
  return dist > a.support(axis) + b.support(axis);
}

}  // namespace

bool boxes_overlap(const OrientedBox& a, const OrientedBox& b) {
  for (const OrientedBox* box : {&a, &b}) {
    const Vec2 u(std::cos(box->heading), std::sin(box->heading));
    const Vec2 v(-u.y(), u.x());
    if (separated_on(u, a, b) || separated_on(v, a, b)) return false;
  }
  return true;
}

bool segment_intersects_box(const Vec2& p, const Vec2& q, const OrientedBox& box) {
  // Clip the segment against the box slabs in the box frame.
  const Mat2 rt = rotation(box.heading).transpose();
  const Vec2 a = rt * (p - box.center);
  const Vec2 d = rt * (q - p);
  const std::array<double, 2> half{box.half_length, box.half_width};
  double t0 = 0.0;
  double t1 = 1.0;
  for (int k = 0; k < 2; ++k) {
    if (std::abs(d[k]) < 1e-15) {
      if (std::abs(a[k]) > half[k]) return false;
      continue;
    }
    double lo = (-half[k] - a[k]) / d[k];
    double hi = (half[k] - a[k]) / d[k];
    if (lo > hi) std::swap(lo, hi);
    t0 = std::max(t0, lo);
    t1 = std::min(t1, hi);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace chance_rrt
