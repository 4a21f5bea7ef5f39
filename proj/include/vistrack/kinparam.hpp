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

#ifndef VISTRACK_KINPARAM_HPP_
#define VISTRACK_KINPARAM_HPP_

#include <array>
#include <vector>

#include "vistrack/arm.hpp"
#include "vistrack/camera.hpp"
#include "vistrack/linalg.hpp"

namespace vistrack {

// Linear parameterization of the single-feature image kinematics for the
// reference geometry (camera viewing axis along X0, principal point at the
// image origin, feature at the wrist). The structure below is known to the
// controller; only the parameter magnitudes are not.
//
// Depth:  z(q) = h(q)^T a_z,  h = (cos q2 cos q1, cos(q2+q3) cos q1, 1),
//         a_z = (l2, l3, d_C).
// Image-plane part: J_z_perp(q) = a_zp1 B1(q) + a_zp2 B2(q),
//         a_z_perp = (beta f l2, beta f l3).

inline constexpr int kNumDepthParams = 3;  // p1
inline constexpr int kNumPerpParams = 2;   // p2

/// Depth basis h(q).
Vec3 depth_basis(const Vec3 &q);

/// hdot(q, qdot); linear in qdot.
Vec3 depth_basis_rate(const Vec3 &q, const Vec3 &qdot);

/// Rows are the gradients dh_k/dq, so that hdot = depth_basis_gradient * qdot.
Mat3 depth_basis_gradient(const Vec3 &q);

/// Time derivative of each gradient row; linear in qdot.
Mat3 depth_basis_gradient_rate(const Vec3 &q, const Vec3 &qdot);

/// Matrix basis of the depth-rate-independent Jacobian.
std::array<Mat23, kNumPerpParams> perp_basis(const Vec3 &q);

/// Time derivatives of the perp basis matrices; linear in qdot.
std::array<Mat23, kNumPerpParams> perp_basis_rate(const Vec3 &q,
                                                  const Vec3 &qdot);

/// Depth regressor: Z(q) psi = Y_z(q, psi) a_z.
Mat23 regressor_y_z(const Vec3 &q, const Vec2 &psi);

/// Depth-rate regressor: Zdot(q) phi = Y_bar_z(q, qdot, phi) a_z.
Mat23 regressor_y_bar_z(const Vec3 &q, const Vec3 &qdot, const Vec2 &phi);

/// Depth-rate-independent kinematic regressor:
/// J_z_perp(q) qdot = Y_z_perp(q, qdot) a_z_perp.
Mat2 regressor_y_z_perp(const Vec3 &q, const Vec3 &qdot);

/// The controller's adapted kinematic state.
struct EstimatedKinematics {
  Vec3 a_z = Vec3::Zero();       // depth parameter estimate
  Vec2 a_z_perp = Vec2::Zero();  // depth-rate-independent estimate

  /// zhat(q) = h(q)^T a_z; throws SingularZhatError when not safely positive.
  double z_hat(const Vec3 &q) const;

  /// Estimate of zdot(q): hdot^T a_z (the estimate of Zdot, no adaptation
  /// rate term).
  double z_hat_rate(const Vec3 &q, const Vec3 &qdot) const;

  /// Jhat_z(q), 1x3.
  RowVec3 jacobian_z(const Vec3 &q) const;

  /// Jhat_z_perp(q), 2x3.
  Mat23 jacobian_perp(const Vec3 &q) const;

  /// Jhat(q, x) = Jhat_z_perp(q) - x Jhat_z(q).
  Mat23 jacobian(const Vec3 &q, const Vec2 &x) const;
};

/// Rates of the adapted kinematic parameters (from the adaptation laws).
struct EstimatedKinematicsRate {
  Vec3 a_z_dot = Vec3::Zero();
  Vec2 a_z_perp_dot = Vec2::Zero();
};

/// Full time derivative of zhat along the closed loop:
/// d/dt (h^T a_z) = hdot^T a_z + h^T a_z_dot.
double z_hat_full_rate(const EstimatedKinematics &est,
                       const EstimatedKinematicsRate &rate, const Vec3 &q,
                       const Vec3 &qdot);

/// Full time derivative of Jhat(q, x(t)) when x evolves with rate xdot and
/// the estimates evolve with the given adaptation rates.
Mat23 jacobian_hat_full_rate(const EstimatedKinematics &est,
                             const EstimatedKinematicsRate &rate,
                             const Vec3 &q, const Vec3 &qdot, const Vec2 &x,
                             const Vec2 &xdot);

/// Combined depth regressor driving the observation-error channel:
/// Y_z^* = Y_z(q, Zhat^-1 Jhat(q,x) qdot)
///       + Y_bar_z(q, qdot, x + (x_o - x_d)/2)
///       - 1/2 Y_z(q, Zhat^-1 Zdothat (x_o - x_d)).
Mat23 regressor_y_z_star(const Vec3 &q, const Vec3 &qdot, const Vec2 &x,
                         const Vec2 &x_o, const Vec2 &x_d,
                         const EstimatedKinematics &est);

/// Combined depth regressor driving the tracking-error channel:
/// Y_z^** = 1/2 Y_bar_z(q, qdot, x_o + x_d) + Y_z(q, xdot_r).
Mat23 regressor_y_z_star_star(const Vec3 &q, const Vec3 &qdot,
                              const Vec2 &x_o, const Vec2 &x_d,
                              const Vec2 &xdot_r);

/// Ground-truth parameter values for a camera/arm pair in the reference
/// geometry family; throws ConfigError when the pair is outside the family
/// the parameterization was derived for.
struct KinematicParameterization {
  Vec3 a_z;
  Vec2 a_z_perp;
};

KinematicParameterization true_kinematic_params(const CameraModel &cam,
                                                const ArmModel &arm);

/// Ground-truth decomposition J = J_z_perp - X J_z of the overall image
/// Jacobian, general in the number of features.
struct JacobianDecomposition {
  Mat j_z_perp;  // 2m x n
  Mat j_z;       // m x n
};

JacobianDecomposition decompose_jacobian(const CameraModel &cam,
                                         const ArmModel &arm, const Vec3 &q);

/// Ground-truth overall image Jacobian J(q, x) = N(x) J_f J_r(q).
Mat image_jacobian(const CameraModel &cam, const ArmModel &arm, const Vec3 &q,
                   const std::vector<Vec2> &x);

}  // namespace vistrack

#endif  // VISTRACK_KINPARAM_HPP_
