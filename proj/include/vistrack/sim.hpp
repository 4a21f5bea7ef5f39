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

#ifndef VISTRACK_SIM_HPP_
#define VISTRACK_SIM_HPP_

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "vistrack/arm.hpp"
#include "vistrack/camera.hpp"
#include "vistrack/controller.hpp"
#include "vistrack/kinparam.hpp"
#include "vistrack/linalg.hpp"
#include "vistrack/observer.hpp"

namespace vistrack {

/// Circle in the image plane.
struct DesiredTrajectory {
  Vec2 center = Vec2(45.0, 65.0);  // [px]
  double radius = 20.0;            // [px]
  double omega = M_PI / 3.0;       // [rad/s]
};

struct TrajectorySample {
  Vec2 x_d;
  Vec2 xdot_d;
  Vec2 xddot_d;
};

TrajectorySample desired(const DesiredTrajectory &traj, double t);

/// Everything a run needs, loaded from one flat key=value config file.
struct ExperimentConfig {
  double dt = 0.005;      // [s]
  double duration = 30.0; // [s]
  int log_every = 1;

  Gains gains;
  // Box bounds obtained by sweeping the nominal run, widening the visited
  // interval of every component by 50% on each side and rounding outward;
  // the true values and the initial estimates lie strictly inside and no
  // bound activates during the nominal run.
  ProjectionRegion projection{Vec3(1.0, 0.5, 2.0), Vec3(4.0, 4.5, 6.0),
                              Vec2(140.0, 140.0), Vec2(320.0, 320.0)};
  DesiredTrajectory trajectory;

  CameraIntrinsics cam_intrinsics;
  // Camera viewing axis along X0, image axes along Y0 and Z0, pinhole 5 m
  // behind the base origin.
  CameraExtrinsics cam_extrinsics{
      (Mat3() << 0, 1, 0, 0, 0, 1, 1, 0, 0).finished(), Vec3(-5.0, 0.0, 0.0)};
  ArmModel arm;

  Vec3 q0 = Vec3(1.2377, 0.9334, -1.3002);
  Vec3 qdot0 = Vec3::Zero();
  std::optional<Vec2> x_o0;  // empty: start at the measured x(q0)

  // Initial kinematic estimates as the five scalar quantities of the
  // uncalibrated model; they map into the parameter vectors as
  // a_z = (l2, l3, dC) and a_z_perp = beta f (l2, l3).
  double l2_hat0 = 3.0;
  double l3_hat0 = 3.0;
  double dc_hat0 = 3.0;
  double f_hat0 = 0.1;
  double beta_hat0 = 700.0;
  Vec8 a_d_hat0 = (Vec8() << 0, 0, 0, 0, 0, 0, 15, 0).finished();

  // Amplitude of the corruption applied to the shadow image-velocity
  // diagnostic. The controller must be bit-for-bit insensitive to it.
  double xdot_shadow_noise = 0.0;
  unsigned long seed = 0;

  // Audit settings.
  int audit_samples = 1000;
  double audit_pixel_min = -100.0;
  double audit_pixel_max = 200.0;
  int audit_grid_n = 13;
  std::array<Vec3, 2> audit_m2_offsets = {Vec3(0.3, 0.0, 0.1),
                                          Vec3(-0.2, 0.25, 0.0)};
  std::array<Vec3, 3> audit_m3_offsets = {Vec3(0.3, 0.0, 0.1),
                                          Vec3(-0.2, 0.25, 0.0),
                                          Vec3(0.1, -0.15, 0.3)};

  EstimatedKinematics initial_kinematic_estimates() const {
    EstimatedKinematics est;
    est.a_z << l2_hat0, l3_hat0, dc_hat0;
    const double bf = beta_hat0 * f_hat0;
    est.a_z_perp << bf * l2_hat0, bf * l3_hat0;
    return est;
  }
};

struct Models {
  CameraModel cam;
  ArmModel arm;
  KinematicParameterization truth;
};

Models build_models(const ExperimentConfig &config);

inline constexpr int kStateDim = 22;
using StateVec = Eigen::Matrix<double, kStateDim, 1>;

/// ODE state: plant, observer, and adapted parameters. The measured image
/// position is always derived from q through the camera, never integrated.
/// js_integral accumulates s^T Jhat*^T Z^-1 Jhat* s for the Lyapunov
/// diagnostics; nothing in the control path reads it.
struct SimState {
  double t = 0.0;
  Vec3 q = Vec3::Zero();
  Vec3 qdot = Vec3::Zero();
  Vec2 x_o = Vec2::Zero();
  Vec8 a_d = Vec8::Zero();
  Vec3 a_z = Vec3::Zero();
  Vec2 a_z_perp = Vec2::Zero();
  double js_integral = 0.0;

  StateVec pack() const;
  static SimState unpack(double t, const StateVec &y);

  EstimatedKinematics estimates() const {
    EstimatedKinematics est;
    est.a_z = a_z;
    est.a_z_perp = a_z_perp;
    return est;
  }
};

struct StepDiagnostics {
  Vec2 x = Vec2::Zero();
  Vec2 x_d = Vec2::Zero();
  Vec2 xdot_d = Vec2::Zero();
  Vec2 xdot_o = Vec2::Zero();
  double z = 0.0;
  double z_hat = 0.0;
  Vec3 qdot_r = Vec3::Zero();
  Vec3 qddot_r = Vec3::Zero();
  Vec3 s = Vec3::Zero();
  Vec3 tau = Vec3::Zero();
  Vec3 qddot = Vec3::Zero();
  Mat23 j_star = Mat23::Zero();
  AdaptationRates rates;
  // Ground-truth image velocity reconstructed only as a dead-end
  // diagnostic; optionally corrupted to prove the controller never uses it.
  Vec2 xdot_shadow = Vec2::Zero();
};

struct RhsResult {
  StateVec ydot;
  StepDiagnostics diag;
};

/// One evaluation of the closed-loop right-hand side (plant + observer +
/// adaptation with rate projection). Throws on depth, rank, or estimated
/// depth faults with a state snapshot attached.
RhsResult closed_loop_rhs(const Models &models, const ExperimentConfig &config,
                          double t, const StateVec &y);

/// Classical fixed-step RK4 for ydot = f(t, y).
template <typename F, typename Y>
Y rk4_step(F &&f, double t, const Y &y, double dt) {
  const Y k1 = f(t, y);
  const Y k2 = f(t + 0.5 * dt, Y(y + 0.5 * dt * k1));
  const Y k3 = f(t + 0.5 * dt, Y(y + 0.5 * dt * k2));
  const Y k4 = f(t + dt, Y(y + dt * k3));
  return y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

/// One full step: RK4 over the stacked state, then the box projection of
/// the kinematic parameter estimates.
SimState step_rk4(const Models &models, const ExperimentConfig &config,
                  const SimState &state);

/// One logged row. V1/V2 use ground truth and exist only for analysis.
struct StepRecord {
  double t;
  Vec3 q, qdot;
  Vec2 x, x_o, x_d, dx, dx_o;
  Vec3 tau, s;
  Vec8 a_d;
  Vec3 a_z;
  Vec2 a_z_perp;
  double z, z_hat;
  double v1, v2_core, js_integral;
};

struct RunSummary {
  int steps = 0;
  double dt = 0.0;
  double duration = 0.0;
  bool faulted = false;
  std::string fault_message;
  double terminal_dx_inf = 0.0;
  double terminal_dxo_inf = 0.0;
  double tail_start = 0.0;
  double max_dx_inf_tail = 0.0;
  double max_dxo_inf_tail = 0.0;
  double depth_err_rel_initial = 0.0;
  double depth_err_rel_terminal = 0.0;
  double l_m = 0.0;  // final value of the js integral
  double min_depth = 0.0;
  // Lyapunov monotonicity violations at slack 1e-6 dt (V2 with the
  // post-run constant of its integral term).
  int v1_violations = 0;
  int v2_violations = 0;
};

struct RunLog {
  std::vector<StepRecord> rows;
  RunSummary summary;
};

/// Integrate the experiment; on a fault the partial log is kept and the
/// summary carries the fault message.
RunLog run(const ExperimentConfig &config);

SimState initial_state(const Models &models, const ExperimentConfig &config);

/// Fixed-order CSV with 17 significant digits; byte-identical across runs
/// of the same configuration.
void write_csv(const RunLog &log, const std::string &path);
void write_summary(const RunLog &log, const std::string &path);
void write_lyapunov_csv(const RunLog &log, double gamma,
                        const std::string &path);
void write_gnuplot_script(const std::string &csv_name,
                          const std::string &path);

const std::vector<std::string> &csv_columns();

}  // namespace vistrack

#endif  // VISTRACK_SIM_HPP_
