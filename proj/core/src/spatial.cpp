#include "chance_rrt/spatial.hpp"

#include <algorithm>
#include <cmath>

#include "chance_rrt/errors.hpp"

namespace chance_rrt {

ObstacleBelief ObstacleBelief::at_time(double dt) const {
  ObstacleBelief out = *this;
  out.center += dt * velocity;
  return out;
}

LatLonSigma lateral_longitudinal_sigma(double var_x, double var_y, double var_w, double var_l) {
  if (!(var_x >= 0.0 && var_y >= 0.0 && var_w >= 0.0 && var_l >= 0.0)) {
    throw DomainError("variances must be non-negative");
  }
  return {std::sqrt(var_x + var_w), std::sqrt(var_y + var_l)};
}

OrientationMargins orientation_margins(double w, double l, double sigma_theta) {
  if (!(w > 0.0 && l > 0.0)) throw DomainError("box width and length must be positive");
  if (!(sigma_theta >= 0.0)) throw DomainError("yaw sigma must be non-negative");
  if (sigma_theta >= kPi / 2.0) throw DomainError("yaw sigma must be below pi/2");

  const double t2 = std::pow(std::tan(sigma_theta), 2);
  const double raw = 0.5 * l * (1.0 - w * std::sqrt((1.0 + t2) / (w * w + l * l * t2)));
  const double delta_a = std::max(raw, 0.0);
  return {delta_a, (w / l) * delta_a};
}

ObstacleBelief make_obstacle_belief(const DetectionBelief& belief) {
  const auto& var = belief.var_total;
  const auto sig = lateral_longitudinal_sigma(var[kX], var[kY], var[kW], var[kL]);
  const auto margins = orientation_margins(belief.mean.w, belief.mean.l, std::sqrt(var[kTheta]));

  ObstacleBelief ob;
  ob.center = Vec2(belief.mean.x, belief.mean.y);
  ob.heading = normalize_angle(belief.mean.theta);
  ob.half_length = 0.5 * belief.mean.l;
  ob.half_width = 0.5 * belief.mean.w;
  ob.sigma_lat = sig.sigma_lat;
  ob.sigma_lon = sig.sigma_lon;
  ob.delta_a = margins.delta_a;
  ob.delta_b = margins.delta_b;
  ob.semi_axis_lon = ob.half_length + ob.sigma_lon + ob.delta_a;
  ob.semi_axis_lat = ob.half_width + ob.sigma_lat + ob.delta_b;

  const double s_lon = ob.sigma_lon + ob.delta_a;
  const double s_lat = ob.sigma_lat + ob.delta_b;
  const Mat2 r = rotation(ob.heading);
  Mat2 body = Mat2::Zero();
  body(0, 0) = s_lon * s_lon;
  body(1, 1) = s_lat * s_lat;
  ob.covariance = symmetrized(r * body * r.transpose());

  ob.pe = belief.predictive_entropy;
  ob.mi = belief.mutual_information;
  ob.suspect = false;
  return ob;
}

FilterResult filter_misdetections(std::span<const ObstacleBelief> obstacles, double pe_max,
                                  double mi_max) {
  FilterResult out;
  for (const auto& ob : obstacles) {
    if (ob.pe > pe_max || ob.mi > mi_max) {
      auto rejected = ob;
      rejected.suspect = true;
      out.rejected.push_back(rejected);
    } else {
      out.kept.push_back(ob);
    }
  }
  return out;
}

}  // namespace chance_rrt
