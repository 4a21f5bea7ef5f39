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

#ifndef VISTRACK_ARM_HPP_
#define VISTRACK_ARM_HPP_

#include <vector>

#include "vistrack/linalg.hpp"

namespace vistrack {

inline constexpr int kNumJoints = 3;
inline constexpr int kNumDynParams = 8;

using Vec8 = Eigen::Matrix<double, kNumDynParams, 1>;
using Mat38 = Eigen::Matrix<double, kNumJoints, kNumDynParams>;
using Mat63 = Eigen::Matrix<double, 6, kNumJoints>;

/// Ground-truth 3-DOF arm: a vertical-axis base joint followed by two
/// parallel-axis pitch joints. Links are uniform thin rods; the base column
/// contributes only its rotational inertia about the vertical axis.
///
/// Joint layout (base frame X0 Y0 Z0, gravity along -Z0):
///   q1  rotation about Z0
///   q2  shoulder pitch about (sin q1, -cos q1, 0); q2 = 0 is horizontal
///   q3  elbow pitch about the same axis direction
struct ArmModel {
  double l1 = 2.0;            // [m]
  double l2 = 2.0;            // [m]
  double l3 = 2.0;            // [m]
  double m1 = 2.0;            // [kg], base column (on the joint-1 axis)
  double m2 = 2.0;            // [kg]
  double m3 = 2.0;            // [kg]
  double base_inertia = 0.5;  // [kg m^2] about the joint-1 axis
  double gravity = 9.81;      // [m/s^2] along -Z0
  // Feature offsets c_i in the end-effector frame; one zero offset puts the
  // single feature at the wrist reference point.
  std::vector<Vec3> feature_offsets = {Vec3::Zero()};

  int feature_count() const {
    return static_cast<int>(feature_offsets.size());
  }
};

struct RobotState {
  Vec3 q = Vec3::Zero();
  Vec3 qdot = Vec3::Zero();
};

/// Wrist (end-effector reference point) position.
Vec3 wrist_position(const ArmModel &model, const Vec3 &q);

/// End-effector orientation; column 1 points along link 3.
Mat3 ee_rotation(const ArmModel &model, const Vec3 &q);

/// r_i = wrist + R_ee c_i for every configured feature offset.
std::vector<Vec3> feature_positions(const ArmModel &model, const Vec3 &q);

/// Manipulator Jacobian mapping qdot to (v0, omega0) of the wrist.
Mat63 manipulator_jacobian(const ArmModel &model, const Vec3 &q);

/// Feature-stacking Jacobian with rows [I3, -S(c_i)], c_i expressed in the
/// base frame at the current q; rdot = J_f J_r qdot.
Mat feature_stack_jacobian(const ArmModel &model, const Vec3 &q);

/// Same stacking for externally supplied base-frame offsets (rank audits).
Mat feature_stack_jacobian_from_offsets(const std::vector<Vec3> &offsets_base);

struct Dynamics {
  Mat3 m;
  Mat3 c;
  Vec3 g;
};

/// M(q), C(q,qdot) by Christoffel symbols, and gravity torque.
Dynamics dynamics(const ArmModel &model, const Vec3 &q, const Vec3 &qdot);

Mat3 inertia(const ArmModel &model, const Vec3 &q);

/// dM/dq_k, k in {0,1,2}.
Mat3 inertia_partial(const ArmModel &model, const Vec3 &q, int k);

Vec3 gravity_torque(const ArmModel &model, const Vec3 &q);

double kinetic_energy(const ArmModel &model, const Vec3 &q, const Vec3 &qdot);
double potential_energy(const ArmModel &model, const Vec3 &q);

/// Dynamic regressor with Y_d(q,qdot,xi,xidot) a = M(a) xidot + C(a,qdot) xi
/// + g(a) for every parameter vector a in the layout of true_dynamic_params.
Mat38 dynamic_regressor(const Vec3 &q, const Vec3 &qdot, const Vec3 &xi,
                        const Vec3 &xidot);

/// Parameter layout (all constant for a given model):
///   a1 = base_inertia
///   a2 = m2 l2^2 / 3        a3 = m3 l2^2
///   a4 = m3 l2 l3 / 2       a5 = m3 l3^2 / 3
///   a6 = m2 g l2 / 2        a7 = m3 g l2       a8 = m3 g l3 / 2
Vec8 true_dynamic_params(const ArmModel &model);

}  // namespace vistrack

#endif  // VISTRACK_ARM_HPP_
