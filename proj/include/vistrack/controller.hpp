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

#ifndef VISTRACK_CONTROLLER_HPP_
#define VISTRACK_CONTROLLER_HPP_

#include "vistrack/arm.hpp"
#include "vistrack/kinparam.hpp"
#include "vistrack/linalg.hpp"

namespace vistrack {

/// Controller gains. Every matrix gain of the control and adaptation laws is
/// a positive scalar times the identity, which is how the nominal experiment
/// specifies them; the scalars are kept here. Theorem condition: the observer
/// gain must satisfy alpha > gamma / 3.
struct Gains {
  double k = 0.001;           // K = k I2, torque feedback
  double alpha = 10.0;        // observer gain
  double gamma = 10.0;        // reference-velocity gain
  double gamma_d = 300.0;     // Gamma_d = gamma_d I8
  double gamma_z_perp = 600.0;// Gamma_z_perp = gamma_z_perp I2
  double gamma_z = 0.2;       // Gamma_z = gamma_z I3

  bool positive() const {
    return k > 0 && alpha > 0 && gamma > 0 && gamma_d > 0 &&
           gamma_z_perp > 0 && gamma_z > 0;
  }
  bool stability_condition() const { return alpha > gamma / 3.0; }
};

/// Box region for the kinematic parameter estimates. The true parameters
/// must lie strictly inside; the bounds are chosen so that zhat stays
/// positive and Jhat* keeps full row rank over the motion envelope.
struct ProjectionRegion {
  Vec3 a_z_lo = Vec3::Zero();
  Vec3 a_z_hi = Vec3::Zero();
  Vec2 a_z_perp_lo = Vec2::Zero();
  Vec2 a_z_perp_hi = Vec2::Zero();

  bool contains(const Vec3 &a_z, const Vec2 &a_z_perp, double margin = 0.0)
      const;
};

/// The controller's adapted state.
struct ControllerState {
  Vec8 a_d = Vec8::Zero();
  Vec3 a_z = Vec3::Zero();
  Vec2 a_z_perp = Vec2::Zero();
};

struct ReferenceVelocity {
  Vec3 qdot_r;
  Mat23 j_star;   // Jhat(q, (x_o + x_d)/2)
  Vec2 xdot_r;    // xdot_d - gamma (x_o - x_d)
  double z_hat;
};

/// Joint reference velocity qdot_r = Jhat*^+ Zhat xdot_r through the
/// modified estimated Jacobian Jhat* = Jhat(q, (x_o+x_d)/2). Throws
/// RankDeficientError when Jhat* loses row rank.
ReferenceVelocity reference_velocity(const Vec3 &q, const Vec2 &x_o,
                                     const Vec2 &x_d, const Vec2 &xdot_d,
                                     const EstimatedKinematics &est,
                                     double gamma);

/// Joint reference acceleration
///   qddot_r = Jhat*^+ [Zhat xddot_r + d/dt(Zhat) xdot_r - Jhatdot* qdot_r]
///             + (I - Jhat*^+ Jhat*) Jhatdot*^T Jhat*^+T qdot_r,
/// with xdot_o taken from the observer dynamics (never from a measured
/// image-space velocity) and the estimate rates from the adaptation laws.
Vec3 reference_acceleration(const Vec3 &q, const Vec3 &qdot, const Vec2 &x_o,
                            const Vec2 &xdot_o, const Vec2 &x_d,
                            const Vec2 &xdot_d, const Vec2 &xddot_d,
                            const EstimatedKinematics &est,
                            const EstimatedKinematicsRate &est_rate,
                            double gamma, const ReferenceVelocity &ref);

/// s = qdot - qdot_r.
inline Vec3 sliding_vector(const Vec3 &qdot, const Vec3 &qdot_r) {
  return qdot - qdot_r;
}

/// tau = -Jhat*^T K Jhat* s + Y_d(q, qdot, qdot_r, qddot_r) a_d_hat.
Vec3 control_torque(const Mat23 &j_star, double k, const Vec3 &s,
                    const Mat38 &y_d, const Vec8 &a_d_hat);

struct AdaptationRates {
  Vec8 a_d_dot = Vec8::Zero();
  Vec2 a_z_perp_dot = Vec2::Zero();
  Vec3 a_z_dot = Vec3::Zero();
};

/// Gradient adaptation laws driven by the sliding vector, the tracking
/// error dx = x - x_d, and the observation error dx_o = x_o - x.
AdaptationRates adaptation_rhs(const Vec3 &s, const Vec2 &dx,
                               const Vec2 &dx_o, const Mat38 &y_d,
                               const Mat2 &y_z_perp, const Mat23 &y_z_star,
                               const Mat23 &y_z_star_star, const Gains &gains);

/// Componentwise gradient projection: a rate component pointing outward
/// while its estimate sits at (or beyond) the bound is zeroed.
AdaptationRates project_rates(const ControllerState &state,
                              const AdaptationRates &rates,
                              const ProjectionRegion &region);

/// Discrete projected update: outward rates at active bounds are zeroed,
/// the state is advanced by dt and clamped into the region. Identical to
/// the plain update whenever no bound is active.
ControllerState project_step(const ControllerState &state,
                             const AdaptationRates &rates,
                             const ProjectionRegion &region, double dt);

}  // namespace vistrack

#endif  // VISTRACK_CONTROLLER_HPP_
