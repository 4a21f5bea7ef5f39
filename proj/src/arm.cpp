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

#include "vistrack/arm.hpp"

#include <cmath>

namespace vistrack {

namespace {

struct Trig {
  double c1, s1;    // joint 1
  double c2, s2;    // joint 2
  double c3, s3;    // joint 3
  double c23, s23;  // q2 + q3
  explicit Trig(const Vec3 &q)
      : c1(std::cos(q(0))), s1(std::sin(q(0))),
        c2(std::cos(q(1))), s2(std::sin(q(1))),
        c3(std::cos(q(2))), s3(std::sin(q(2))),
        c23(std::cos(q(1) + q(2))), s23(std::sin(q(1) + q(2))) {}
};

// Grouped inertia constants of the two distal links.
struct InertiaConsts {
  double a;   // m2 l2^2/3 + m3 l2^2
  double b;   // m3 l2 l3
  double j3;  // m3 l3^2/3
  explicit InertiaConsts(const ArmModel &m)
      : a(m.m2 * m.l2 * m.l2 / 3.0 + m.m3 * m.l2 * m.l2),
        b(m.m3 * m.l2 * m.l3),
        j3(m.m3 * m.l3 * m.l3 / 3.0) {}
};

}  // namespace

Vec3 wrist_position(const ArmModel &model, const Vec3 &q) {
  const Trig t(q);
  const double rho = model.l2 * t.c2 + model.l3 * t.c23;
  return {rho * t.c1, rho * t.s1,
          model.l1 + model.l2 * t.s2 + model.l3 * t.s23};
}

Mat3 ee_rotation(const ArmModel &model, const Vec3 &q) {
  (void)model;
  const Trig t(q);
  const Vec3 e_rho(t.c1, t.s1, 0.0);
  const Vec3 e_tan(-t.s1, t.c1, 0.0);
  const Vec3 e_z(0.0, 0.0, 1.0);
  Mat3 rot;
  rot.col(0) = t.c23 * e_rho + t.s23 * e_z;   // along link 3
  rot.col(1) = e_tan;
  rot.col(2) = -t.s23 * e_rho + t.c23 * e_z;
  return rot;
}

std::vector<Vec3> feature_positions(const ArmModel &model, const Vec3 &q) {
  const Vec3 w = wrist_position(model, q);
  const Mat3 rot = ee_rotation(model, q);
  std::vector<Vec3> out;
  out.reserve(model.feature_offsets.size());
  for (const Vec3 &c : model.feature_offsets) out.push_back(w + rot * c);
  return out;
}

Mat63 manipulator_jacobian(const ArmModel &model, const Vec3 &q) {
  const Trig t(q);
  const Vec3 e_rho(t.c1, t.s1, 0.0);
  const Vec3 e_tan(-t.s1, t.c1, 0.0);
  const Vec3 e_z(0.0, 0.0, 1.0);
  const double rho = model.l2 * t.c2 + model.l3 * t.c23;

  Mat63 jac;
  jac.col(0).head<3>() = rho * e_tan;
  jac.col(1).head<3>() =
      (-model.l2 * t.s2 - model.l3 * t.s23) * e_rho +
      (model.l2 * t.c2 + model.l3 * t.c23) * e_z;
  jac.col(2).head<3>() = -model.l3 * t.s23 * e_rho + model.l3 * t.c23 * e_z;
  // Pitch joints rotate about (s1, -c1, 0).
  jac.col(0).tail<3>() = e_z;
  jac.col(1).tail<3>() = -e_tan;
  jac.col(2).tail<3>() = -e_tan;
  return jac;
}

Mat feature_stack_jacobian_from_offsets(
    const std::vector<Vec3> &offsets_base) {
  const int m = static_cast<int>(offsets_base.size());
  Mat jf = Mat::Zero(3 * m, 6);
  for (int i = 0; i < m; ++i) {
    jf.block<3, 3>(3 * i, 0) = Mat3::Identity();
    jf.block<3, 3>(3 * i, 3) = -skew(offsets_base[i]);
  }
  return jf;
}

Mat feature_stack_jacobian(const ArmModel &model, const Vec3 &q) {
  const Mat3 rot = ee_rotation(model, q);
  std::vector<Vec3> offsets_base;
  offsets_base.reserve(model.feature_offsets.size());
  for (const Vec3 &c : model.feature_offsets) offsets_base.push_back(rot * c);
  return feature_stack_jacobian_from_offsets(offsets_base);
}

Mat3 inertia(const ArmModel &model, const Vec3 &q) {
  const Trig t(q);
  const InertiaConsts k(model);
  Mat3 m = Mat3::Zero();
  m(0, 0) = model.base_inertia + k.a * t.c2 * t.c2 + k.b * t.c2 * t.c23 +
            k.j3 * t.c23 * t.c23;
  m(1, 1) = k.a + k.j3 + k.b * t.c3;
  m(1, 2) = k.j3 + 0.5 * k.b * t.c3;
  m(2, 1) = m(1, 2);
  m(2, 2) = k.j3;
  return m;
}

Mat3 inertia_partial(const ArmModel &model, const Vec3 &q, int k) {
  const Trig t(q);
  const InertiaConsts ic(model);
  const double s2q2 = std::sin(2.0 * q(1));
  const double s2q23 = std::sin(2.0 * (q(1) + q(2)));
  const double s2q2pq3 = std::sin(2.0 * q(1) + q(2));
  Mat3 d = Mat3::Zero();
  if (k == 1) {
    d(0, 0) = -ic.a * s2q2 - ic.b * s2q2pq3 - ic.j3 * s2q23;
  } else if (k == 2) {
    d(0, 0) = -ic.b * t.c2 * t.s23 - ic.j3 * s2q23;
    d(1, 1) = -ic.b * t.s3;
    d(1, 2) = -0.5 * ic.b * t.s3;
    d(2, 1) = d(1, 2);
  }
  return d;
}

Vec3 gravity_torque(const ArmModel &model, const Vec3 &q) {
  const Trig t(q);
  const double g = model.gravity;
  Vec3 gv = Vec3::Zero();
  gv(1) = (model.m2 * model.l2 / 2.0 + model.m3 * model.l2) * g * t.c2 +
          model.m3 * model.l3 / 2.0 * g * t.c23;
  gv(2) = model.m3 * model.l3 / 2.0 * g * t.c23;
  return gv;
}

Dynamics dynamics(const ArmModel &model, const Vec3 &q, const Vec3 &qdot) {
  Dynamics dyn;
  dyn.m = inertia(model, q);
  dyn.g = gravity_torque(model, q);

  Mat3 dm[3];
  for (int k = 0; k < 3; ++k) dm[k] = inertia_partial(model, q, k);

  // Christoffel symbols of the first kind:
  // C_kj = 1/2 sum_i (dM_kj/dq_i + dM_ki/dq_j - dM_ij/dq_k) qdot_i.
  dyn.c = Mat3::Zero();
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      double entry = 0.0;
      for (int i = 0; i < 3; ++i) {
        entry += 0.5 * (dm[i](k, j) + dm[j](k, i) - dm[k](i, j)) * qdot(i);
      }
      dyn.c(k, j) = entry;
    }
  }
  return dyn;
}

double kinetic_energy(const ArmModel &model, const Vec3 &q,
                      const Vec3 &qdot) {
  return 0.5 * qdot.dot(inertia(model, q) * qdot);
}

double potential_energy(const ArmModel &model, const Vec3 &q) {
  const Trig t(q);
  return model.gravity *
         ((model.m2 * model.l2 / 2.0 + model.m3 * model.l2) * t.s2 +
          model.m3 * model.l3 / 2.0 * t.s23);
}

Mat38 dynamic_regressor(const Vec3 &q, const Vec3 &qdot, const Vec3 &xi,
                        const Vec3 &xidot) {
  const Trig t(q);
  const double s2q2 = std::sin(2.0 * q(1));
  const double s2q23 = std::sin(2.0 * (q(1) + q(2)));
  const double s2q2pq3 = std::sin(2.0 * q(1) + q(2));
  const double qd1 = qdot(0), qd2 = qdot(1), qd3 = qdot(2);
  const double x1 = xi(0), x2 = xi(1), x3 = xi(2);

  Mat38 y = Mat38::Zero();

  // a1: base inertia.
  y(0, 0) = xidot(0);

  // a2, a3: shoulder inertia terms (identical columns for this geometry).
  y(0, 1) = t.c2 * t.c2 * xidot(0) - 0.5 * s2q2 * (qd2 * x1 + qd1 * x2);
  y(1, 1) = xidot(1) + 0.5 * s2q2 * qd1 * x1;
  y.col(2) = y.col(1);

  // a4: elbow coupling.
  y(0, 3) = 2.0 * t.c2 * t.c23 * xidot(0) -
            s2q2pq3 * (qd2 * x1 + qd1 * x2) -
            t.c2 * t.s23 * (qd3 * x1 + qd1 * x3);
  y(1, 3) = 2.0 * t.c3 * xidot(1) + t.c3 * xidot(2) + s2q2pq3 * qd1 * x1 -
            t.s3 * (qd3 * x2 + (qd2 + qd3) * x3);
  y(2, 3) = t.c3 * xidot(1) + t.c2 * t.s23 * qd1 * x1 + t.s3 * qd2 * x2;

  // a5: forearm inertia.
  y(0, 4) = t.c23 * t.c23 * xidot(0) -
            0.5 * s2q23 * ((qd2 + qd3) * x1 + qd1 * (x2 + x3));
  y(1, 4) = xidot(1) + xidot(2) + 0.5 * s2q23 * qd1 * x1;
  y(2, 4) = y(1, 4);

  // a6, a7: shoulder gravity (identical columns); a8: forearm gravity.
  y(1, 5) = t.c2;
  y(1, 6) = t.c2;
  y(1, 7) = t.c23;
  y(2, 7) = t.c23;

  return y;
}

Vec8 true_dynamic_params(const ArmModel &model) {
  Vec8 a;
  a << model.base_inertia,
      model.m2 * model.l2 * model.l2 / 3.0,
      model.m3 * model.l2 * model.l2,
      model.m3 * model.l2 * model.l3 / 2.0,
      model.m3 * model.l3 * model.l3 / 3.0,
      model.m2 * model.gravity * model.l2 / 2.0,
      model.m3 * model.gravity * model.l2,
      model.m3 * model.gravity * model.l3 / 2.0;
  return a;
}

}  // namespace vistrack
