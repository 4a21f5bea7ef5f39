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

#include "vistrack/kinparam.hpp"

#include <cmath>
#include <sstream>

#include "vistrack/faults.hpp"

namespace vistrack {

namespace {

// Guard against an estimate that escaped the projection region.
constexpr double kZhatFloor = 1e-6;

struct Trig {
  double c1, s1, c2, s2, c23, s23;
  explicit Trig(const Vec3 &q)
      : c1(std::cos(q(0))), s1(std::sin(q(0))),
        c2(std::cos(q(1))), s2(std::sin(q(1))),
        c23(std::cos(q(1) + q(2))), s23(std::sin(q(1) + q(2))) {}
};

}  // namespace

Vec3 depth_basis(const Vec3 &q) {
  const Trig t(q);
  return {t.c2 * t.c1, t.c23 * t.c1, 1.0};
}

Vec3 depth_basis_rate(const Vec3 &q, const Vec3 &qdot) {
  return depth_basis_gradient(q) * qdot;
}

Mat3 depth_basis_gradient(const Vec3 &q) {
  const Trig t(q);
  Mat3 g;
  g.row(0) << -t.c2 * t.s1, -t.s2 * t.c1, 0.0;
  g.row(1) << -t.c23 * t.s1, -t.s23 * t.c1, -t.s23 * t.c1;
  g.row(2).setZero();
  return g;
}

Mat3 depth_basis_gradient_rate(const Vec3 &q, const Vec3 &qdot) {
  const Trig t(q);
  const double qd1 = qdot(0);
  const double qd2 = qdot(1);
  const double sigma = qdot(1) + qdot(2);
  Mat3 g;
  g.row(0) << t.s2 * qd2 * t.s1 - t.c2 * t.c1 * qd1,
      -t.c2 * qd2 * t.c1 + t.s2 * t.s1 * qd1, 0.0;
  const double d21 = t.s23 * sigma * t.s1 - t.c23 * t.c1 * qd1;
  const double d22 = -t.c23 * sigma * t.c1 + t.s23 * t.s1 * qd1;
  g.row(1) << d21, d22, d22;
  g.row(2).setZero();
  return g;
}

std::array<Mat23, kNumPerpParams> perp_basis(const Vec3 &q) {
  const Trig t(q);
  std::array<Mat23, kNumPerpParams> b;
  b[0] << t.c2 * t.c1, -t.s2 * t.s1, 0.0,
          0.0, t.c2, 0.0;
  b[1] << t.c23 * t.c1, -t.s23 * t.s1, -t.s23 * t.s1,
          0.0, t.c23, t.c23;
  return b;
}

std::array<Mat23, kNumPerpParams> perp_basis_rate(const Vec3 &q,
                                                  const Vec3 &qdot) {
  const Trig t(q);
  const double qd1 = qdot(0);
  const double qd2 = qdot(1);
  const double sigma = qdot(1) + qdot(2);
  std::array<Mat23, kNumPerpParams> b;
  b[0] << -t.s2 * qd2 * t.c1 - t.c2 * t.s1 * qd1,
          -t.c2 * qd2 * t.s1 - t.s2 * t.c1 * qd1, 0.0,
          0.0, -t.s2 * qd2, 0.0;
  const double r12 = -t.c23 * sigma * t.s1 - t.s23 * t.c1 * qd1;
  b[1] << -t.s23 * sigma * t.c1 - t.c23 * t.s1 * qd1, r12, r12,
          0.0, -t.s23 * sigma, -t.s23 * sigma;
  return b;
}

Mat23 regressor_y_z(const Vec3 &q, const Vec2 &psi) {
  return psi * depth_basis(q).transpose();
}

Mat23 regressor_y_bar_z(const Vec3 &q, const Vec3 &qdot, const Vec2 &phi) {
  return phi * depth_basis_rate(q, qdot).transpose();
}

Mat2 regressor_y_z_perp(const Vec3 &q, const Vec3 &qdot) {
  const auto b = perp_basis(q);
  Mat2 y;
  y.col(0) = b[0] * qdot;
  y.col(1) = b[1] * qdot;
  return y;
}

double EstimatedKinematics::z_hat(const Vec3 &q) const {
  const double zh = depth_basis(q).dot(a_z);
  if (!(zh > kZhatFloor)) {
    std::ostringstream oss;
    oss << "z_hat: estimated depth " << zh
        << " not positive; depth estimate escaped the projection region";
    throw SingularZhatError(oss.str());
  }
  return zh;
}

double EstimatedKinematics::z_hat_rate(const Vec3 &q, const Vec3 &qdot) const {
  return depth_basis_rate(q, qdot).dot(a_z);
}

RowVec3 EstimatedKinematics::jacobian_z(const Vec3 &q) const {
  return a_z.transpose() * depth_basis_gradient(q);
}

Mat23 EstimatedKinematics::jacobian_perp(const Vec3 &q) const {
  const auto b = perp_basis(q);
  return a_z_perp(0) * b[0] + a_z_perp(1) * b[1];
}

Mat23 EstimatedKinematics::jacobian(const Vec3 &q, const Vec2 &x) const {
  return jacobian_perp(q) - x * jacobian_z(q);
}

double z_hat_full_rate(const EstimatedKinematics &est,
                       const EstimatedKinematicsRate &rate, const Vec3 &q,
                       const Vec3 &qdot) {
  return depth_basis_rate(q, qdot).dot(est.a_z) +
         depth_basis(q).dot(rate.a_z_dot);
}

Mat23 jacobian_hat_full_rate(const EstimatedKinematics &est,
                             const EstimatedKinematicsRate &rate,
                             const Vec3 &q, const Vec3 &qdot, const Vec2 &x,
                             const Vec2 &xdot) {
  const auto b = perp_basis(q);
  const auto bdot = perp_basis_rate(q, qdot);
  const RowVec3 jz = est.jacobian_z(q);
  const RowVec3 jz_dot = rate.a_z_dot.transpose() * depth_basis_gradient(q) +
                         est.a_z.transpose() *
                             depth_basis_gradient_rate(q, qdot);
  Mat23 out = rate.a_z_perp_dot(0) * b[0] + rate.a_z_perp_dot(1) * b[1] +
              est.a_z_perp(0) * bdot[0] + est.a_z_perp(1) * bdot[1];
  out -= xdot * jz;
  out -= x * jz_dot;
  return out;
}

Mat23 regressor_y_z_star(const Vec3 &q, const Vec3 &qdot, const Vec2 &x,
                         const Vec2 &x_o, const Vec2 &x_d,
                         const EstimatedKinematics &est) {
  const double zh = est.z_hat(q);
  const Vec2 dxo_d = x_o - x_d;
  const Vec2 psi_obs = est.jacobian(q, x) * qdot / zh;
  const Vec2 psi_corr = (est.z_hat_rate(q, qdot) / zh) * dxo_d;
  return regressor_y_z(q, psi_obs) +
         regressor_y_bar_z(q, qdot, x + 0.5 * dxo_d) -
         0.5 * regressor_y_z(q, psi_corr);
}

Mat23 regressor_y_z_star_star(const Vec3 &q, const Vec3 &qdot,
                              const Vec2 &x_o, const Vec2 &x_d,
                              const Vec2 &xdot_r) {
  return 0.5 * regressor_y_bar_z(q, qdot, x_o + x_d) +
         regressor_y_z(q, xdot_r);
}

KinematicParameterization true_kinematic_params(const CameraModel &cam,
                                                const ArmModel &arm) {
  const double bf = cam.intrinsics().beta * cam.intrinsics().focal_length;
  Mat23 d_bar_ref;
  d_bar_ref << 0.0, bf, 0.0,
               0.0, 0.0, bf;
  const Vec3 d3_ref(1.0, 0.0, 0.0);
  const double geom_err =
      (cam.d_bar() - d_bar_ref).cwiseAbs().maxCoeff() +
      (cam.d3() - d3_ref).cwiseAbs().maxCoeff() +
      cam.p_bar().cwiseAbs().maxCoeff();
  bool feature_at_wrist = arm.feature_count() == 1 &&
                          arm.feature_offsets[0].norm() < 1e-12;
  if (geom_err > 1e-9 || !feature_at_wrist) {
    throw ConfigError(
        "kinematic parameterization requires the reference camera/arm "
        "geometry (camera axis along X0, zero principal point, single "
        "feature at the wrist)");
  }
  KinematicParameterization truth;
  truth.a_z << arm.l2, arm.l3, cam.d0();
  truth.a_z_perp << bf * arm.l2, bf * arm.l3;
  return truth;
}

JacobianDecomposition decompose_jacobian(const CameraModel &cam,
                                         const ArmModel &arm, const Vec3 &q) {
  const int m = arm.feature_count();
  const Mat jfr = feature_stack_jacobian(arm, q) *
                  manipulator_jacobian(arm, q);  // 3m x n
  JacobianDecomposition dec;
  dec.j_z_perp = Mat::Zero(2 * m, kNumJoints);
  dec.j_z = Mat::Zero(m, kNumJoints);
  for (int i = 0; i < m; ++i) {
    dec.j_z_perp.middleRows(2 * i, 2) = cam.d_bar() * jfr.middleRows(3 * i, 3);
    dec.j_z.row(i) = cam.d3().transpose() * jfr.middleRows(3 * i, 3);
  }
  return dec;
}

Mat image_jacobian(const CameraModel &cam, const ArmModel &arm, const Vec3 &q,
                   const std::vector<Vec2> &x) {
  const int m = arm.feature_count();
  const Mat jfr = feature_stack_jacobian(arm, q) * manipulator_jacobian(arm, q);
  Mat j = Mat::Zero(2 * m, kNumJoints);
  for (int i = 0; i < m; ++i) {
    j.middleRows(2 * i, 2) =
        cam.interaction_matrix(x[i]) * jfr.middleRows(3 * i, 3);
  }
  return j;
}

}  // namespace vistrack
