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

#include <cmath>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "vistrack/config.hpp"
#include "vistrack/observer.hpp"

using namespace vistrack;

namespace {

struct Fixture {
  ExperimentConfig config = paper_sec4_preset();
  Models models = build_models(config);

  EstimatedKinematics truth_estimates() const {
    EstimatedKinematics est;
    est.a_z = models.truth.a_z;
    est.a_z_perp = models.truth.a_z_perp;
    return est;
  }
};

}  // namespace

TEST_CASE("observer tracks exactly at the error-free fixed point") {
  const Fixture f;
  const EstimatedKinematics est = f.truth_estimates();
  std::mt19937_64 rng(211);
  for (int k = 0; k < 50; ++k) {
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec3 r = feature_positions(f.models.arm, q)[0];
    const Vec2 x = f.models.cam.project(r);
    // qdot chosen in the kernel of J_z: the depth is stationary.
    const JacobianDecomposition dec =
        decompose_jacobian(f.models.cam, f.models.arm, q);
    const Eigen::FullPivLU<Mat> lu(dec.j_z);
    const Mat kernel = lu.kernel();
    REQUIRE(kernel.cols() >= 1);
    const Vec3 qd = kernel.col(0);
    // x_o = x and x = x_d: the rhs must equal the true pixel velocity.
    const Vec2 xdot_o =
        observer_rhs(x, x, x, q, qd, est, f.config.gains.alpha);
    const Vec2 xdot_true =
        image_jacobian(f.models.cam, f.models.arm, q, {x}) * qd /
        f.models.cam.depth(r);
    CHECK((xdot_o - xdot_true).norm() < 1e-9 * (1.0 + xdot_true.norm()));
  }
}

TEST_CASE("observer rhs vanishes at rest with zero errors") {
  const Fixture f;
  const EstimatedKinematics est = f.truth_estimates();
  const Vec3 q(0.9, 0.4, -0.8);
  const Vec2 x = f.models.cam.project(feature_positions(f.models.arm, q)[0]);
  const Vec2 xdot_o =
      observer_rhs(x, x, x, q, Vec3::Zero(), est, f.config.gains.alpha);
  CHECK(xdot_o.norm() == 0.0);
}

TEST_CASE("observer rhs is linear in the two error channels") {
  const Fixture f;
  std::mt19937_64 rng(223);
  for (int k = 0; k < 50; ++k) {
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec3 qd = testing::random_vec3(rng, -1.0, 1.0);
    const Vec2 x = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 x_d = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 a = testing::random_vec2(rng, -50.0, 50.0);
    const Vec2 b = testing::random_vec2(rng, -50.0, 50.0);
    EstimatedKinematics est = f.truth_estimates();
    const double alpha = f.config.gains.alpha;
    // Linearity in x_o holding everything else fixed.
    const Vec2 r0 = observer_rhs(Vec2::Zero(), x, x_d, q, qd, est, alpha);
    const Vec2 ra = observer_rhs(a, x, x_d, q, qd, est, alpha);
    const Vec2 rb = observer_rhs(b, x, x_d, q, qd, est, alpha);
    const Vec2 rab = observer_rhs(Vec2(a + b), x, x_d, q, qd, est, alpha);
    CHECK((rab - (ra + rb - r0)).norm() < 1e-9);
  }
}

TEST_CASE("observation-error residual vanishes with perfect estimates") {
  const Fixture f;
  const EstimatedKinematics est = f.truth_estimates();
  std::mt19937_64 rng(227);
  for (int k = 0; k < 1000; ++k) {
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec3 qd = testing::random_vec3(rng, -2.0, 2.0);
    const Vec2 x_o = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 x_d = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 res =
        observer_error_residual(f.models.cam, f.models.arm, f.models.truth,
                                est, q, qd, x_o, x_d, f.config.gains.alpha);
    CHECK(res.norm() < 1e-9);
  }
}

TEST_CASE("observation-error residual vanishes with estimate errors") {
  // The rearrangement into the combined depth regressor is an identity, so
  // the pointwise residual stays at roundoff for any estimate values.
  const Fixture f;
  std::mt19937_64 rng(229);
  std::uniform_real_distribution<double> rel(-0.4, 0.4);
  for (int k = 0; k < 1000; ++k) {
    EstimatedKinematics est;
    for (int i = 0; i < 3; ++i)
      est.a_z(i) = f.models.truth.a_z(i) * (1.0 + rel(rng));
    for (int i = 0; i < 2; ++i)
      est.a_z_perp(i) = f.models.truth.a_z_perp(i) * (1.0 + rel(rng));
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec3 qd = testing::random_vec3(rng, -2.0, 2.0);
    const Vec2 x_o = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 x_d = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 res =
        observer_error_residual(f.models.cam, f.models.arm, f.models.truth,
                                est, q, qd, x_o, x_d, f.config.gains.alpha);
    CHECK(res.norm() < 1e-9);
  }
}

TEST_CASE("zero-motion state gives an exactly zero residual") {
  const Fixture f;
  const EstimatedKinematics est = f.truth_estimates();
  const Vec3 q(1.1, 0.7, -1.1);
  const Vec2 x = f.models.cam.project(feature_positions(f.models.arm, q)[0]);
  const Vec2 res = observer_error_residual(
      f.models.cam, f.models.arm, f.models.truth, est, q, Vec3::Zero(), x, x,
      f.config.gains.alpha);
  CHECK(res.norm() == 0.0);
}

TEST_CASE("raw and rearranged observation-error dynamics agree") {
  // Left side assembled directly from the closed-loop observer equation;
  // right side from the residual form with the combined depth regressor.
  const Fixture f;
  std::mt19937_64 rng(233);
  std::uniform_real_distribution<double> rel(-0.4, 0.4);
  double worst = 0.0;
  for (int k = 0; k < 500; ++k) {
    EstimatedKinematics est;
    for (int i = 0; i < 3; ++i)
      est.a_z(i) = f.models.truth.a_z(i) * (1.0 + rel(rng));
    for (int i = 0; i < 2; ++i)
      est.a_z_perp(i) = f.models.truth.a_z_perp(i) * (1.0 + rel(rng));
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec3 qd = testing::random_vec3(rng, -2.0, 2.0);
    const Vec2 x_o = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 x_d = testing::random_vec2(rng, -100.0, 100.0);
    const double alpha = f.config.gains.alpha;

    const Vec3 r = feature_positions(f.models.arm, q)[0];
    const double z = f.models.cam.depth(r);
    const Vec2 x = f.models.cam.project(r);
    const Mat j = image_jacobian(f.models.cam, f.models.arm, q, {x});
    const JacobianDecomposition dec =
        decompose_jacobian(f.models.cam, f.models.arm, q);
    const double z_dot = (dec.j_z * qd)(0);
    const double zh = est.z_hat(q);
    const double zh_dot = est.z_hat_rate(q, qd);

    // Raw form: Z dxo_dot + 1/2 Zdot (x_o - x_d) expanded through the
    // observer equation before any regressor substitution.
    const Vec2 raw =
        (z - zh) / zh * (est.jacobian(q, x) * qd) +
        (est.jacobian(q, x) - Mat23(j)) * qd -
        0.5 * z * (zh_dot / zh) * (x_o - x_d) +
        0.5 * z_dot * (x_o - x_d) - alpha * z * (x_o - x);

    const Vec3 da_z = est.a_z - f.models.truth.a_z;
    const Vec2 da_zp = est.a_z_perp - f.models.truth.a_z_perp;
    const Vec2 rearranged =
        -alpha * z * (x_o - x) + regressor_y_z_perp(q, qd) * da_zp -
        regressor_y_z_star(q, qd, x, x_o, x_d, est) * da_z;
    worst = std::max(worst, (raw - rearranged).norm() /
                                (1.0 + raw.norm()));
  }
  CHECK(worst < 1e-12);
}

TEST_CASE("residual along integrated trajectories by finite differences") {
  // dxo_dot obtained by differencing the integrated closed loop rather
  // than from the observer equation.
  Fixture f;
  f.config.duration = 1.0;
  const auto states =
      testing::trajectory_states(f.models, f.config, 1.0, 20);
  const double h = 1e-6;
  for (const SimState &s : states) {
    const StateVec y = s.pack();
    const StateVec yp = testing::flow(f.models, f.config, s.t, y, h, 1);
    const StateVec ym = testing::flow(f.models, f.config, s.t, y, -h, 1);
    const SimState sp = SimState::unpack(s.t + h, yp);
    const SimState sm = SimState::unpack(s.t - h, ym);
    const auto x_of = [&](const SimState &st) {
      return f.models.cam.project(feature_positions(f.models.arm, st.q)[0]);
    };
    const Vec2 dxo_dot_fd =
        ((sp.x_o - x_of(sp)) - (sm.x_o - x_of(sm))) / (2.0 * h);

    const Vec3 r = feature_positions(f.models.arm, s.q)[0];
    const double z = f.models.cam.depth(r);
    const Vec2 x = x_of(s);
    const JacobianDecomposition dec =
        decompose_jacobian(f.models.cam, f.models.arm, s.q);
    const double z_dot = (dec.j_z * s.qdot)(0);
    const TrajectorySample traj = desired(f.config.trajectory, s.t);
    const Vec2 lhs = z * dxo_dot_fd + 0.5 * z_dot * (s.x_o - traj.x_d);

    const EstimatedKinematics est = s.estimates();
    const Vec3 da_z = est.a_z - f.models.truth.a_z;
    const Vec2 da_zp = est.a_z_perp - f.models.truth.a_z_perp;
    const Vec2 rhs =
        -f.config.gains.alpha * z * (s.x_o - x) +
        regressor_y_z_perp(s.q, s.qdot) * da_zp -
        regressor_y_z_star(s.q, s.qdot, x, s.x_o, traj.x_d, est) * da_z;
    CHECK((lhs - rhs).norm() < 1e-6 * (1.0 + lhs.norm()));
  }
}
