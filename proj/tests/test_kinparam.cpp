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
#include "vistrack/faults.hpp"
#include "vistrack/kinparam.hpp"

using namespace vistrack;

namespace {

struct Fixture {
  ExperimentConfig config = paper_sec4_preset();
  Models models = build_models(config);
};

EstimatedKinematics perturbed_estimates(const KinematicParameterization &truth,
                                        std::mt19937_64 &rng, double rel) {
  std::uniform_real_distribution<double> dist(-rel, rel);
  EstimatedKinematics est;
  for (int i = 0; i < 3; ++i) est.a_z(i) = truth.a_z(i) * (1.0 + dist(rng));
  for (int i = 0; i < 2; ++i)
    est.a_z_perp(i) = truth.a_z_perp(i) * (1.0 + dist(rng));
  return est;
}

}  // namespace

TEST_CASE("true parameters of the nominal geometry") {
  const Fixture f;
  CHECK((f.models.truth.a_z - Vec3(2.0, 2.0, 5.0)).norm() < 1e-12);
  CHECK((f.models.truth.a_z_perp - Vec2(270.0, 270.0)).norm() < 1e-12);
}

TEST_CASE("parameterization rejects geometry outside the derived family") {
  ExperimentConfig config = paper_sec4_preset();
  config.cam_extrinsics.rotation = Mat3::Identity();
  const CameraModel cam(config.cam_intrinsics, config.cam_extrinsics);
  CHECK_THROWS_AS(true_kinematic_params(cam, config.arm), ConfigError);

  ExperimentConfig config2 = paper_sec4_preset();
  config2.arm.feature_offsets = {Vec3(0.1, 0.0, 0.0)};
  const CameraModel cam2(config2.cam_intrinsics, config2.cam_extrinsics);
  CHECK_THROWS_AS(true_kinematic_params(cam2, config2.arm), ConfigError);
}

TEST_CASE("keystone identities of the linear parameterization") {
  const Fixture f;
  std::mt19937_64 rng(101);
  double worst_z = 0.0, worst_zdot = 0.0, worst_perp = 0.0, worst_eq12 = 0.0,
         worst_recon = 0.0, worst_jz = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Vec3 q = testing::random_vec3(rng, -M_PI, M_PI);
    const Vec3 qd = testing::random_vec3(rng, -2.0, 2.0);
    const Vec2 psi = testing::random_vec2(rng, -3.0, 3.0);
    const Vec2 phi = testing::random_vec2(rng, -3.0, 3.0);
    const Vec2 x = testing::random_vec2(rng, -150.0, 150.0);

    const Vec3 r = feature_positions(f.models.arm, q)[0];
    const double z = f.models.cam.depth(r);
    const JacobianDecomposition dec =
        decompose_jacobian(f.models.cam, f.models.arm, q);
    const double z_dot = (dec.j_z * qd)(0);
    const Mat j = image_jacobian(f.models.cam, f.models.arm, q, {x});

    worst_z = std::max(worst_z,
                       (z * psi - regressor_y_z(q, psi) * f.models.truth.a_z)
                               .norm() /
                           (1.0 + std::abs(z) * psi.norm()));
    worst_zdot = std::max(
        worst_zdot,
        (z_dot * phi - regressor_y_bar_z(q, qd, phi) * f.models.truth.a_z)
                .norm() /
            (1.0 + std::abs(z_dot) * phi.norm()));
    worst_perp = std::max(
        worst_perp,
        (dec.j_z_perp * qd -
         regressor_y_z_perp(q, qd) * f.models.truth.a_z_perp)
                .norm() /
            (1.0 + (dec.j_z_perp * qd).norm()));
    const Vec2 lhs = j * qd;
    const Vec2 rhs = regressor_y_z_perp(q, qd) * f.models.truth.a_z_perp -
                     regressor_y_bar_z(q, qd, x) * f.models.truth.a_z;
    worst_eq12 =
        std::max(worst_eq12, (lhs - rhs).norm() / (1.0 + lhs.norm()));
    const Mat recon = dec.j_z_perp - Mat(x * dec.j_z);
    worst_recon = std::max(worst_recon,
                           (j - recon).cwiseAbs().maxCoeff() /
                               (1.0 + j.cwiseAbs().maxCoeff()));
    // zdot via the depth-basis route as well.
    worst_jz = std::max(
        worst_jz,
        std::abs(z_dot - depth_basis_rate(q, qd).dot(f.models.truth.a_z)));
  }
  CHECK(worst_z < 1e-12);
  CHECK(worst_zdot < 1e-12);
  CHECK(worst_perp < 1e-12);
  CHECK(worst_eq12 < 1e-12);
  CHECK(worst_recon < 1e-12);
  CHECK(worst_jz < 1e-11);
}

TEST_CASE("depth rate matches finite differences of the measured depth") {
  const Fixture f;
  std::mt19937_64 rng(139);
  const double h = 1e-6;
  for (int k = 0; k < 100; ++k) {
    const Vec3 q = testing::random_vec3(rng, -M_PI, M_PI);
    const Vec3 qd = testing::random_vec3(rng, -1.0, 1.0);
    const auto depth_at = [&](const Vec3 &qq) {
      return f.models.cam.depth(feature_positions(f.models.arm, qq)[0]);
    };
    const double fd =
        (depth_at(Vec3(q + h * qd)) - depth_at(Vec3(q - h * qd))) / (2.0 * h);
    const JacobianDecomposition dec =
        decompose_jacobian(f.models.cam, f.models.arm, q);
    CHECK(std::abs(fd - (dec.j_z * qd)(0)) < 1e-5 * (1.0 + std::abs(fd)));
  }
}

TEST_CASE("decomposition at the image origin is the perp Jacobian") {
  const Fixture f;
  const Vec3 q(0.8, 0.5, -1.1);
  const JacobianDecomposition dec =
      decompose_jacobian(f.models.cam, f.models.arm, q);
  const Mat j0 = image_jacobian(f.models.cam, f.models.arm, q,
                                {Vec2::Zero()});
  CHECK((j0 - dec.j_z_perp).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("regressors are linear in their vector arguments") {
  std::mt19937_64 rng(103);
  for (int k = 0; k < 50; ++k) {
    const Vec3 q = testing::random_vec3(rng, -M_PI, M_PI);
    const Vec3 qd = testing::random_vec3(rng, -2.0, 2.0);
    const Vec2 psi = testing::random_vec2(rng, -3.0, 3.0);
    CHECK(regressor_y_z(q, Vec2::Zero()).cwiseAbs().maxCoeff() == 0.0);
    CHECK((regressor_y_z(q, Vec2(2.0 * psi)) - 2.0 * regressor_y_z(q, psi))
              .cwiseAbs()
              .maxCoeff() < 1e-14);
    CHECK(regressor_y_bar_z(q, Vec3::Zero(), psi).cwiseAbs().maxCoeff() ==
          0.0);
    CHECK((regressor_y_bar_z(q, Vec3(3.0 * qd), psi) -
           3.0 * regressor_y_bar_z(q, qd, psi))
              .cwiseAbs()
              .maxCoeff() < 1e-13);
    CHECK((regressor_y_z_perp(q, Vec3::Zero()) * Vec2(1.0, 1.0)).norm() ==
          0.0);
  }
}

TEST_CASE("depth gradient rates match finite differences") {
  std::mt19937_64 rng(107);
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const Vec3 q = testing::random_vec3(rng, -M_PI, M_PI);
    const Vec3 qd = testing::random_vec3(rng, -1.0, 1.0);
    const Mat3 fd = (depth_basis_gradient(Vec3(q + h * qd)) -
                     depth_basis_gradient(Vec3(q - h * qd))) /
                    (2.0 * h);
    CHECK((fd - depth_basis_gradient_rate(q, qd)).cwiseAbs().maxCoeff() <
          1e-7);
    const auto bp = perp_basis(Vec3(q + h * qd));
    const auto bm = perp_basis(Vec3(q - h * qd));
    const auto brate = perp_basis_rate(q, qd);
    for (int i = 0; i < 2; ++i) {
      const Mat23 fdb = (bp[i] - bm[i]) / (2.0 * h);
      CHECK((fdb - brate[i]).cwiseAbs().maxCoeff() < 1e-7);
    }
  }
}

TEST_CASE("estimate substitution with true parameters reproduces truth") {
  const Fixture f;
  EstimatedKinematics est;
  est.a_z = f.models.truth.a_z;
  est.a_z_perp = f.models.truth.a_z_perp;
  std::mt19937_64 rng(109);
  for (int k = 0; k < 100; ++k) {
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec3 qd = testing::random_vec3(rng, -2.0, 2.0);
    const Vec2 x = testing::random_vec2(rng, -150.0, 150.0);
    const Vec3 r = feature_positions(f.models.arm, q)[0];
    const JacobianDecomposition dec =
        decompose_jacobian(f.models.cam, f.models.arm, q);
    CHECK(std::abs(est.z_hat(q) - f.models.cam.depth(r)) < 1e-12);
    CHECK(std::abs(est.z_hat_rate(q, qd) - (dec.j_z * qd)(0)) < 1e-12);
    CHECK((est.jacobian_perp(q) - Mat23(dec.j_z_perp)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((Mat(est.jacobian(q, x)) -
           image_jacobian(f.models.cam, f.models.arm, q, {x}))
              .cwiseAbs()
              .maxCoeff() < 1e-10);
  }
}

TEST_CASE("z_hat throws when the estimate leaves positivity") {
  EstimatedKinematics est;
  est.a_z << 0.0, 0.0, -1.0;
  est.a_z_perp << 100.0, 100.0;
  CHECK_THROWS_AS(est.z_hat(Vec3::Zero()), SingularZhatError);
}

TEST_CASE("combined depth regressor reduces to its middle term") {
  const Fixture f;
  std::mt19937_64 rng(113);
  for (int k = 0; k < 50; ++k) {
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec2 x = testing::random_vec2(rng, -100.0, 100.0);
    EstimatedKinematics est =
        perturbed_estimates(f.models.truth, rng, 0.3);
    // x_o = x_d kills the correction terms; qdot in the kernel of Jhat
    // kills the observer term.
    const Mat jhat = est.jacobian(q, x);
    const Eigen::FullPivLU<Mat> lu(jhat);
    const Mat kernel = lu.kernel();
    REQUIRE(kernel.cols() >= 1);
    const Vec3 qd = kernel.col(0);
    const Vec2 x_od = testing::random_vec2(rng, -100.0, 100.0);
    const Mat23 y_star = regressor_y_z_star(q, qd, x, x_od, x_od, est);
    const Mat23 expected = regressor_y_bar_z(q, qd, x);
    CHECK((y_star - expected).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("combined depth regressor equals the sum of its three terms") {
  const Fixture f;
  std::mt19937_64 rng(127);
  for (int k = 0; k < 100; ++k) {
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec3 qd = testing::random_vec3(rng, -2.0, 2.0);
    const Vec2 x = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 x_o = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 x_d = testing::random_vec2(rng, -100.0, 100.0);
    EstimatedKinematics est = perturbed_estimates(f.models.truth, rng, 0.3);
    const double zh = est.z_hat(q);
    const Mat23 term1 = regressor_y_z(q, Vec2(est.jacobian(q, x) * qd / zh));
    const Mat23 term2 =
        regressor_y_bar_z(q, qd, Vec2(x + 0.5 * (x_o - x_d)));
    const Mat23 term3 = regressor_y_z(
        q, Vec2((est.z_hat_rate(q, qd) / zh) * (x_o - x_d)));
    const Mat23 combined = regressor_y_z_star(q, qd, x, x_o, x_d, est);
    CHECK((combined - (term1 + term2 - 0.5 * term3)).cwiseAbs().maxCoeff() <
          1e-12);
  }
}

TEST_CASE("tracking regressor trivial and linear cases") {
  std::mt19937_64 rng(131);
  for (int k = 0; k < 50; ++k) {
    const Vec3 q = testing::random_vec3(rng, -M_PI, M_PI);
    const Vec2 x_o = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 x_d = testing::random_vec2(rng, -100.0, 100.0);
    CHECK(regressor_y_z_star_star(q, Vec3::Zero(), x_o, x_d, Vec2::Zero())
              .cwiseAbs()
              .maxCoeff() == 0.0);
    const Vec3 qd = testing::random_vec3(rng, -2.0, 2.0);
    const Vec2 xr = testing::random_vec2(rng, -30.0, 30.0);
    const Mat23 a = regressor_y_z_star_star(q, qd, x_o, x_d, xr);
    const Mat23 b = regressor_y_z_star_star(q, qd, x_o, x_d, Vec2::Zero()) +
                    regressor_y_z(q, xr);
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-13);
  }
}

TEST_CASE("sliding identity through the modified estimated Jacobian") {
  // Jhat* s = Z(xdot - xdot_d + gamma(x_o - x_d)) + 1/2 Zdot(dx - dx_o)
  //           + Y_z_perp da_z_perp - Y_z_star_star da_z
  const Fixture f;
  std::mt19937_64 rng(137);
  const double gamma = f.config.gains.gamma;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const Vec3 q = testing::random_vec3(rng, -1.3, 1.3);
    const Vec3 qd = testing::random_vec3(rng, -1.5, 1.5);
    const Vec2 x_o = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 x_d = testing::random_vec2(rng, -100.0, 100.0);
    const Vec2 xdot_d = testing::random_vec2(rng, -30.0, 30.0);
    EstimatedKinematics est = perturbed_estimates(f.models.truth, rng, 0.3);

    const Vec3 r = feature_positions(f.models.arm, q)[0];
    const double z = f.models.cam.depth(r);
    const Vec2 x = f.models.cam.project(r);
    const Mat j = image_jacobian(f.models.cam, f.models.arm, q, {x});
    const JacobianDecomposition dec =
        decompose_jacobian(f.models.cam, f.models.arm, q);
    const double z_dot = (dec.j_z * qd)(0);
    const Vec2 x_dot = j * qd / z;

    const ReferenceVelocity ref =
        reference_velocity(q, x_o, x_d, xdot_d, est, gamma);
    const Vec3 s = qd - ref.qdot_r;

    const Vec2 lhs = ref.j_star * s;
    const Vec2 dx = x - x_d;
    const Vec2 dx_o = x_o - x;
    const Vec3 da_z = est.a_z - f.models.truth.a_z;
    const Vec2 da_zp = est.a_z_perp - f.models.truth.a_z_perp;
    const Mat23 y_ss = regressor_y_z_star_star(q, qd, x_o, x_d, ref.xdot_r);
    const Vec2 rhs = z * (x_dot - xdot_d + gamma * (x_o - x_d)) +
                     0.5 * z_dot * (dx - dx_o) +
                     regressor_y_z_perp(q, qd) * da_zp - y_ss * da_z;
    worst = std::max(worst, (lhs - rhs).norm() / (1.0 + lhs.norm()));
  }
  CHECK(worst < 1e-9);
}
