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

#ifndef VISTRACK_OBSERVER_HPP_
#define VISTRACK_OBSERVER_HPP_

#include "vistrack/kinparam.hpp"
#include "vistrack/linalg.hpp"

namespace vistrack {

/// Image-space observer dynamics. Uses only the measured image position x,
/// the joint state, and the kinematic estimates; the measured image-space
/// velocity never enters (there is deliberately no such parameter):
///
///   xdot_o = Zhat^-1 Jhat(q,x) qdot
///            - 1/2 Zhat^-1 Zdothat(q) (x_o - x_d)
///            - alpha (x_o - x).
Vec2 observer_rhs(const Vec2 &x_o, const Vec2 &x, const Vec2 &x_d,
                  const Vec3 &q, const Vec3 &qdot,
                  const EstimatedKinematics &est, double alpha);

/// Analysis-only defect of the observation-error dynamics:
///   Z dxo_dot + 1/2 Zdot (x_o - x_d)
///     - [ -alpha Z dxo + Y_z_perp da_z_perp - Y_z^* da_z ]
/// evaluated pointwise with ground truth; vanishes to roundoff when the
/// rearrangement of the closed-loop observer equations is implemented
/// correctly. The controller cannot reach this function.
Vec2 observer_error_residual(const CameraModel &cam, const ArmModel &arm,
                             const KinematicParameterization &truth,
                             const EstimatedKinematics &est, const Vec3 &q,
                             const Vec3 &qdot, const Vec2 &x_o,
                             const Vec2 &x_d, double alpha);

}  // namespace vistrack

#endif  // VISTRACK_OBSERVER_HPP_
