// Copyright 2026 The Vistrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vistrack/controller.hpp"

#include <algorithm>

namespace vistrack {

bool ProjectionRegion::contains(const Vec3 &a_z, const Vec2 &a_z_perp,
                                double margin) const {
  for (int i = 0; i < 3; ++i) {
    if (a_z(i) < a_z_lo(i) + margin || a_z(i) > a_z_hi(i) - margin)
      return false;
  }
  for (int i = 0; i < 2; ++i) {
    if (a_z_perp(i) < a_z_perp_lo(i) + margin ||
        a_z_perp(i) > a_z_perp_hi(i) - margin)
      return false;
  }
  return true;
}

ReferenceVelocity reference_velocity(const Vec3 &q, const Vec2 &x_o,
                                     const Vec2 &x_d, const Vec2 &xdot_d,
                                     const EstimatedKinematics &est,
                                     double gamma) {
  ReferenceVelocity ref;
  ref.j_star = est.jacobian(q, 0.5 * (x_o + x_d));
  ref.xdot_r = xdot_d - gamma * (x_o - x_d);
  ref.z_hat = est.z_hat(q);
  const Mat pinv = pinv_full_row(ref.j_star);
  ref.qdot_r = pinv * (ref.z_hat * ref.xdot_r);
  return ref;
}

Vec3 reference_acceleration(const Vec3 &q, const Vec3 &qdot, const Vec2 &x_o,
                            const Vec2 &xdot_o, const Vec2 &x_d,
                            const Vec2 &xdot_d, const Vec2 &xddot_d,
                            const EstimatedKinematics &est,
                            const EstimatedKinematicsRate &est_rate,
                            double gamma, const ReferenceVelocity &ref) {
  const Vec2 xddot_r = xddot_d - gamma * (xdot_o - xdot_d);
  const double zh_dot = z_hat_full_rate(est, est_rate, q, qdot);
  const Vec2 x_mid = 0.5 * (x_o + x_d);
  const Vec2 xdot_mid = 0.5 * (xdot_o + xdot_d);
  const Mat23 j_star_dot =
      jacobian_hat_full_rate(est, est_rate, q, qdot, x_mid, xdot_mid);

  const Mat pinv = pinv_full_row(ref.j_star);
  const Vec3 direct =
      pinv * (ref.z_hat * xddot_r + zh_dot * ref.xdot_r -
              j_star_dot * ref.qdot_r);
  const Mat3 annihilator = Mat3::Identity() - pinv * ref.j_star;
  const Vec3 nullspace =
      annihilator * j_star_dot.transpose() * pinv.transpose() * ref.qdot_r;
  return direct + nullspace;
}

Vec3 control_torque(const Mat23 &j_star, double k, const Vec3 &s,
                    const Mat38 &y_d, const Vec8 &a_d_hat) {
  return -j_star.transpose() * (k * (j_star * s)) + y_d * a_d_hat;
}

AdaptationRates adaptation_rhs(const Vec3 &s, const Vec2 &dx,
                               const Vec2 &dx_o, const Mat38 &y_d,
                               const Mat2 &y_z_perp, const Mat23 &y_z_star,
                               const Mat23 &y_z_star_star,
                               const Gains &gains) {
  AdaptationRates rates;
  rates.a_d_dot = -gains.gamma_d * (y_d.transpose() * s);
  rates.a_z_perp_dot = gains.gamma_z_perp * (y_z_perp.transpose() * (dx - dx_o));
  rates.a_z_dot = -gains.gamma_z * (y_z_star_star.transpose() * dx -
                                    y_z_star.transpose() * dx_o);
  return rates;
}

namespace {

double project_component(double value, double rate, double lo, double hi) {
  if (value <= lo && rate < 0.0) return 0.0;
  if (value >= hi && rate > 0.0) return 0.0;
  return rate;
}

}  // namespace

AdaptationRates project_rates(const ControllerState &state,
                              const AdaptationRates &rates,
                              const ProjectionRegion &region) {
  AdaptationRates out = rates;
  for (int i = 0; i < 3; ++i) {
    out.a_z_dot(i) = project_component(state.a_z(i), rates.a_z_dot(i),
                                       region.a_z_lo(i), region.a_z_hi(i));
  }
  for (int i = 0; i < 2; ++i) {
    out.a_z_perp_dot(i) =
        project_component(state.a_z_perp(i), rates.a_z_perp_dot(i),
                          region.a_z_perp_lo(i), region.a_z_perp_hi(i));
  }
  return out;
}

ControllerState project_step(const ControllerState &state,
                             const AdaptationRates &rates,
                             const ProjectionRegion &region, double dt) {
  const AdaptationRates projected = project_rates(state, rates, region);
  ControllerState next;
  next.a_d = state.a_d + dt * projected.a_d_dot;
  next.a_z = state.a_z + dt * projected.a_z_dot;
  next.a_z_perp = state.a_z_perp + dt * projected.a_z_perp_dot;
  for (int i = 0; i < 3; ++i) {
    next.a_z(i) = std::clamp(next.a_z(i), region.a_z_lo(i), region.a_z_hi(i));
  }
  for (int i = 0; i < 2; ++i) {
    next.a_z_perp(i) = std::clamp(next.a_z_perp(i), region.a_z_perp_lo(i),
                                  region.a_z_perp_hi(i));
  }
  return next;
}

}  // namespace vistrack
