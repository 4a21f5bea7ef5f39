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

#include "vistrack/observer.hpp"

namespace vistrack {

Vec2 observer_rhs(const Vec2 &x_o, const Vec2 &x, const Vec2 &x_d,
                  const Vec3 &q, const Vec3 &qdot,
                  const EstimatedKinematics &est, double alpha) {
  const double zh = est.z_hat(q);
  const double zh_dot = est.z_hat_rate(q, qdot);
  return est.jacobian(q, x) * qdot / zh -
         0.5 * (zh_dot / zh) * (x_o - x_d) - alpha * (x_o - x);
}

Vec2 observer_error_residual(const CameraModel &cam, const ArmModel &arm,
                             const KinematicParameterization &truth,
                             const EstimatedKinematics &est, const Vec3 &q,
                             const Vec3 &qdot, const Vec2 &x_o,
                             const Vec2 &x_d, double alpha) {
  const Vec3 r = feature_positions(arm, q)[0];
  const double z = cam.depth(r);
  const Vec2 x = cam.project(r);
  const Mat j = image_jacobian(cam, arm, q, {x});
  const JacobianDecomposition dec = decompose_jacobian(cam, arm, q);
  const double z_dot = (dec.j_z * qdot)(0);

  const Vec2 x_dot = (j * qdot) / z;
  const Vec2 dxo_dot = observer_rhs(x_o, x, x_d, q, qdot, est, alpha) - x_dot;
  const Vec2 lhs = z * dxo_dot + 0.5 * z_dot * (x_o - x_d);

  const Vec3 da_z = est.a_z - truth.a_z;
  const Vec2 da_z_perp = est.a_z_perp - truth.a_z_perp;
  const Vec2 rhs = -alpha * z * (x_o - x) +
                   regressor_y_z_perp(q, qdot) * da_z_perp -
                   regressor_y_z_star(q, qdot, x, x_o, x_d, est) * da_z;
  return lhs - rhs;
}

}  // namespace vistrack
