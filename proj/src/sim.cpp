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

#include "vistrack/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "vistrack/faults.hpp"

namespace vistrack {

TrajectorySample desired(const DesiredTrajectory &traj, double t) {
  const double a = traj.omega * t;
  const Vec2 radial(std::cos(a), std::sin(a));
  TrajectorySample s;
  s.x_d = traj.center + traj.radius * radial;
  s.xdot_d = traj.radius * traj.omega * Vec2(-std::sin(a), std::cos(a));
  s.xddot_d = -traj.omega * traj.omega * traj.radius * radial;
  return s;
}

Models build_models(const ExperimentConfig &config) {
  CameraModel cam(config.cam_intrinsics, config.cam_extrinsics);
  return Models{cam, config.arm, true_kinematic_params(cam, config.arm)};
}

StateVec SimState::pack() const {
  StateVec y;
  y.segment<3>(0) = q;
  y.segment<3>(3) = qdot;
  y.segment<2>(6) = x_o;
  y.segment<8>(8) = a_d;
  y.segment<3>(16) = a_z;
  y.segment<2>(19) = a_z_perp;
  y(21) = js_integral;
  return y;
}

SimState SimState::unpack(double t, const StateVec &y) {
  SimState s;
  s.t = t;
  s.q = y.segment<3>(0);
  s.qdot = y.segment<3>(3);
  s.x_o = y.segment<2>(6);
  s.a_d = y.segment<8>(8);
  s.a_z = y.segment<3>(16);
  s.a_z_perp = y.segment<2>(19);
  s.js_integral = y(21);
  return s;
}

namespace {

std::string state_snapshot(double t, const StateVec &y) {
  std::ostringstream oss;
  oss.precision(17);
  oss << "t=" << t << " y=[";
  for (int i = 0; i < kStateDim; ++i) {
    if (i) oss << ", ";
    oss << y(i);
  }
  oss << "]";
  return oss.str();
}

}  // namespace

RhsResult closed_loop_rhs(const Models &models, const ExperimentConfig &config,
                          double t, const StateVec &y) {
  const SimState s = SimState::unpack(t, y);
  const Gains &gains = config.gains;
  RhsResult out;
  out.ydot.setZero();
  StepDiagnostics &diag = out.diag;

  try {
    // Measurement: the camera sees the feature driven by the true plant.
    const Vec3 r = feature_positions(models.arm, s.q)[0];
    diag.z = models.cam.depth(r);
    const Vec2 x = models.cam.project(r);
    diag.x = x;

    const TrajectorySample ref_traj = desired(config.trajectory, t);
    diag.x_d = ref_traj.x_d;
    diag.xdot_d = ref_traj.xdot_d;

    const EstimatedKinematics est = s.estimates();
    diag.z_hat = est.z_hat(s.q);

    // Observer (velocity-measurement free).
    const Vec2 xdot_o =
        observer_rhs(s.x_o, x, ref_traj.x_d, s.q, s.qdot, est, gains.alpha);
    diag.xdot_o = xdot_o;

    // Reference motion through the modified estimated Jacobian.
    const ReferenceVelocity ref = reference_velocity(
        s.q, s.x_o, ref_traj.x_d, ref_traj.xdot_d, est, gains.gamma);
    diag.j_star = ref.j_star;
    diag.qdot_r = ref.qdot_r;
    const Vec3 sv = sliding_vector(s.qdot, ref.qdot_r);
    diag.s = sv;

    const Vec2 dx = x - ref_traj.x_d;
    const Vec2 dx_o = s.x_o - x;

    // Kinematic regressors and adaptation rates; the rates feed the
    // reference acceleration, so they are evaluated first.
    const Mat2 y_z_perp = regressor_y_z_perp(s.q, s.qdot);
    const Mat23 y_z_star =
        regressor_y_z_star(s.q, s.qdot, x, s.x_o, ref_traj.x_d, est);
    const Mat23 y_z_star_star = regressor_y_z_star_star(
        s.q, s.qdot, s.x_o, ref_traj.x_d, ref.xdot_r);

    AdaptationRates rates;
    rates.a_z_perp_dot =
        gains.gamma_z_perp * (y_z_perp.transpose() * (dx - dx_o));
    rates.a_z_dot = -gains.gamma_z * (y_z_star_star.transpose() * dx -
                                      y_z_star.transpose() * dx_o);
    ControllerState cs;
    cs.a_d = s.a_d;
    cs.a_z = s.a_z;
    cs.a_z_perp = s.a_z_perp;
    rates = project_rates(cs, rates, config.projection);

    EstimatedKinematicsRate est_rate;
    est_rate.a_z_dot = rates.a_z_dot;
    est_rate.a_z_perp_dot = rates.a_z_perp_dot;

    const Vec3 qddot_r = reference_acceleration(
        s.q, s.qdot, s.x_o, xdot_o, ref_traj.x_d, ref_traj.xdot_d,
        ref_traj.xddot_d, est, est_rate, gains.gamma, ref);
    diag.qddot_r = qddot_r;

    // Torque and dynamic-parameter adaptation.
    const Mat38 y_d = dynamic_regressor(s.q, s.qdot, ref.qdot_r, qddot_r);
    const Vec3 tau = control_torque(ref.j_star, gains.k, sv, y_d, s.a_d);
    diag.tau = tau;
    rates.a_d_dot = -gains.gamma_d * (y_d.transpose() * sv);
    diag.rates = rates;

    // Plant.
    const Dynamics dyn = dynamics(models.arm, s.q, s.qdot);
    const Vec3 qddot = dyn.m.ldlt().solve(tau - dyn.c * s.qdot - dyn.g);
    diag.qddot = qddot;

    // Shadow image velocity: reconstructed from ground truth, optionally
    // corrupted, and never read by anything above.
    const Mat j_true = image_jacobian(models.cam, models.arm, s.q, {x});
    diag.xdot_shadow = (j_true * s.qdot) / diag.z;
    if (config.xdot_shadow_noise != 0.0) {
      diag.xdot_shadow.array() +=
          config.xdot_shadow_noise *
          std::sin(12345.6789 * t + 0.7 * s.q(0) + 1.3 * s.q(1));
    }

    out.ydot.segment<3>(0) = s.qdot;
    out.ydot.segment<3>(3) = qddot;
    out.ydot.segment<2>(6) = xdot_o;
    out.ydot.segment<8>(8) = rates.a_d_dot;
    out.ydot.segment<3>(16) = rates.a_z_dot;
    out.ydot.segment<2>(19) = rates.a_z_perp_dot;
    const Vec2 js = ref.j_star * sv;
    out.ydot(21) = js.squaredNorm() / diag.z;
  } catch (SimulationFault &fault) {
    if (fault.snapshot().empty()) fault.set_snapshot(state_snapshot(t, y));
    throw;
  }
  return out;
}

SimState step_rk4(const Models &models, const ExperimentConfig &config,
                  const SimState &state) {
  const auto f = [&](double t, const StateVec &y) {
    return closed_loop_rhs(models, config, t, y).ydot;
  };
  const StateVec y0 = state.pack();
  const StateVec y1 = rk4_step(f, state.t, y0, config.dt);
  SimState next = SimState::unpack(state.t + config.dt, y1);

  // Box projection of the kinematic estimates at the end of the full step.
  // When no bound is involved the RK4 result is kept bit-exact.
  if (config.projection.contains(next.a_z, next.a_z_perp)) return next;
  ControllerState before;
  before.a_d = state.a_d;
  before.a_z = state.a_z;
  before.a_z_perp = state.a_z_perp;
  AdaptationRates step_rates;
  step_rates.a_d_dot = (next.a_d - state.a_d) / config.dt;
  step_rates.a_z_dot = (next.a_z - state.a_z) / config.dt;
  step_rates.a_z_perp_dot = (next.a_z_perp - state.a_z_perp) / config.dt;
  const ControllerState projected =
      project_step(before, step_rates, config.projection, config.dt);
  next.a_d = projected.a_d;
  next.a_z = projected.a_z;
  next.a_z_perp = projected.a_z_perp;
  return next;
}

SimState initial_state(const Models &models, const ExperimentConfig &config) {
  SimState s;
  s.t = 0.0;
  s.q = config.q0;
  s.qdot = config.qdot0;
  const EstimatedKinematics est = config.initial_kinematic_estimates();
  s.a_z = est.a_z;
  s.a_z_perp = est.a_z_perp;
  s.a_d = config.a_d_hat0;
  if (config.x_o0.has_value()) {
    s.x_o = *config.x_o0;
  } else {
    s.x_o = models.cam.project(feature_positions(models.arm, s.q)[0]);
  }
  s.js_integral = 0.0;
  return s;
}

namespace {

StepRecord make_record(const Models &models, const ExperimentConfig &config,
                       const SimState &s) {
  const RhsResult r = closed_loop_rhs(models, config, s.t, s.pack());
  StepRecord rec;
  rec.t = s.t;
  rec.q = s.q;
  rec.qdot = s.qdot;
  rec.x = r.diag.x;
  rec.x_o = s.x_o;
  rec.x_d = r.diag.x_d;
  rec.dx = r.diag.x - r.diag.x_d;
  rec.dx_o = s.x_o - r.diag.x;
  rec.tau = r.diag.tau;
  rec.s = r.diag.s;
  rec.a_d = s.a_d;
  rec.a_z = s.a_z;
  rec.a_z_perp = s.a_z_perp;
  rec.z = r.diag.z;
  rec.z_hat = r.diag.z_hat;
  rec.js_integral = s.js_integral;

  // Analysis-only certificates computed from ground truth.
  const Vec8 da_d = s.a_d - true_dynamic_params(models.arm);
  const Mat3 m = inertia(models.arm, s.q);
  rec.v1 = 0.5 * rec.s.dot(m * rec.s) +
           0.5 * da_d.squaredNorm() / config.gains.gamma_d;
  const Vec3 da_z = s.a_z - models.truth.a_z;
  const Vec2 da_z_perp = s.a_z_perp - models.truth.a_z_perp;
  rec.v2_core = 0.5 * rec.z * rec.dx_o.squaredNorm() +
                0.5 * rec.z * rec.dx.squaredNorm() +
                0.5 * da_z_perp.squaredNorm() / config.gains.gamma_z_perp +
                0.5 * da_z.squaredNorm() / config.gains.gamma_z;
  return rec;
}

bool record_finite(const StepRecord &rec) {
  const auto ok = [](double v) { return std::isfinite(v); };
  bool fine = ok(rec.t) && ok(rec.z) && ok(rec.z_hat) && ok(rec.v1) &&
              ok(rec.v2_core) && ok(rec.js_integral);
  fine = fine && rec.q.allFinite() && rec.qdot.allFinite() &&
         rec.x.allFinite() && rec.x_o.allFinite() && rec.x_d.allFinite() &&
         rec.tau.allFinite() && rec.s.allFinite() && rec.a_d.allFinite() &&
         rec.a_z.allFinite() && rec.a_z_perp.allFinite();
  return fine;
}

void finish_summary(RunLog &log, const ExperimentConfig &config) {
  RunSummary &sum = log.summary;
  sum.dt = config.dt;
  sum.duration = config.duration;
  sum.steps = static_cast<int>(log.rows.size()) - 1;
  if (log.rows.empty()) return;
  const StepRecord &first = log.rows.front();
  const StepRecord &last = log.rows.back();
  sum.terminal_dx_inf = last.dx.cwiseAbs().maxCoeff();
  sum.terminal_dxo_inf = last.dx_o.cwiseAbs().maxCoeff();
  sum.depth_err_rel_initial = std::abs(first.z_hat - first.z) / first.z;
  sum.depth_err_rel_terminal = std::abs(last.z_hat - last.z) / last.z;
  sum.l_m = last.js_integral;
  sum.tail_start = config.duration >= 20.0 ? 20.0 : 0.5 * config.duration;
  sum.max_dx_inf_tail = 0.0;
  sum.max_dxo_inf_tail = 0.0;
  sum.min_depth = first.z;
  const double slack = 1e-6 * config.dt;
  double prev_v1 = first.v1;
  double prev_v2 = first.v2_core - first.js_integral / config.gains.gamma;
  for (const StepRecord &rec : log.rows) {
    sum.min_depth = std::min(sum.min_depth, rec.z);
    if (rec.t >= sum.tail_start) {
      sum.max_dx_inf_tail =
          std::max(sum.max_dx_inf_tail, rec.dx.cwiseAbs().maxCoeff());
      sum.max_dxo_inf_tail =
          std::max(sum.max_dxo_inf_tail, rec.dx_o.cwiseAbs().maxCoeff());
    }
    // Monotonicity bookkeeping; the post-run constant of the V2 integral
    // term drops out of differences.
    const double v2 = rec.v2_core - rec.js_integral / config.gains.gamma;
    if (rec.v1 > prev_v1 + slack) ++sum.v1_violations;
    if (v2 > prev_v2 + slack) ++sum.v2_violations;
    prev_v1 = rec.v1;
    prev_v2 = v2;
  }
}

}  // namespace

RunLog run(const ExperimentConfig &config) {
  const Models models = build_models(config);
  RunLog log;
  SimState state = initial_state(models, config);
  const long total_steps = std::lround(config.duration / config.dt);
  log.rows.reserve(static_cast<size_t>(total_steps / config.log_every) + 2);

  try {
    log.rows.push_back(make_record(models, config, state));
    if (!record_finite(log.rows.back())) {
      throw SimulationFault("non-finite value in initial record",
                            state_snapshot(state.t, state.pack()));
    }
    for (long k = 0; k < total_steps; ++k) {
      state = step_rk4(models, config, state);
      state.t = (k + 1) * config.dt;  // avoid accumulated time drift
      if ((k + 1) % config.log_every == 0 || k + 1 == total_steps) {
        log.rows.push_back(make_record(models, config, state));
        if (!record_finite(log.rows.back())) {
          throw SimulationFault("non-finite value in log",
                                state_snapshot(state.t, state.pack()));
        }
      }
    }
  } catch (const SimulationFault &fault) {
    log.summary.faulted = true;
    log.summary.fault_message = fault.what();
    if (!fault.snapshot().empty()) {
      log.summary.fault_message += " | " + fault.snapshot();
    }
  }
  finish_summary(log, config);
  return log;
}

namespace {

void append_value(std::string &line, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  if (!line.empty()) line.push_back(',');
  line += buf;
}

std::vector<std::string> make_columns() {
  std::vector<std::string> cols = {"t"};
  const auto add = [&cols](const std::string &base, int n) {
    for (int i = 1; i <= n; ++i) cols.push_back(base + std::to_string(i));
  };
  add("q", 3);
  add("qd", 3);
  add("x", 2);
  add("xo", 2);
  add("xd", 2);
  add("dx", 2);
  add("dxo", 2);
  add("tau", 3);
  add("s", 3);
  add("ad", 8);
  add("az", 3);
  add("azp", 2);
  cols.push_back("z");
  cols.push_back("z_hat");
  cols.push_back("v1");
  cols.push_back("v2_core");
  cols.push_back("js_integral");
  return cols;
}

}  // namespace

const std::vector<std::string> &csv_columns() {
  static const std::vector<std::string> cols = make_columns();
  return cols;
}

void write_csv(const RunLog &log, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  const auto &cols = csv_columns();
  for (size_t i = 0; i < cols.size(); ++i) {
    if (i) out << ',';
    out << cols[i];
  }
  out << '\n';
  for (const StepRecord &r : log.rows) {
    std::string line;
    append_value(line, r.t);
    for (int i = 0; i < 3; ++i) append_value(line, r.q(i));
    for (int i = 0; i < 3; ++i) append_value(line, r.qdot(i));
    for (int i = 0; i < 2; ++i) append_value(line, r.x(i));
    for (int i = 0; i < 2; ++i) append_value(line, r.x_o(i));
    for (int i = 0; i < 2; ++i) append_value(line, r.x_d(i));
    for (int i = 0; i < 2; ++i) append_value(line, r.dx(i));
    for (int i = 0; i < 2; ++i) append_value(line, r.dx_o(i));
    for (int i = 0; i < 3; ++i) append_value(line, r.tau(i));
    for (int i = 0; i < 3; ++i) append_value(line, r.s(i));
    for (int i = 0; i < 8; ++i) append_value(line, r.a_d(i));
    for (int i = 0; i < 3; ++i) append_value(line, r.a_z(i));
    for (int i = 0; i < 2; ++i) append_value(line, r.a_z_perp(i));
    append_value(line, r.z);
    append_value(line, r.z_hat);
    append_value(line, r.v1);
    append_value(line, r.v2_core);
    append_value(line, r.js_integral);
    out << line << '\n';
  }
}

void write_summary(const RunLog &log, const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  const RunSummary &s = log.summary;
  out.precision(17);
  out << "steps = " << s.steps << '\n';
  out << "dt = " << s.dt << '\n';
  out << "duration = " << s.duration << '\n';
  out << "faulted = " << (s.faulted ? 1 : 0) << '\n';
  out << "fault_message = " << s.fault_message << '\n';
  out << "terminal_dx_inf = " << s.terminal_dx_inf << '\n';
  out << "terminal_dxo_inf = " << s.terminal_dxo_inf << '\n';
  out << "tail_start = " << s.tail_start << '\n';
  out << "max_dx_inf_tail = " << s.max_dx_inf_tail << '\n';
  out << "max_dxo_inf_tail = " << s.max_dxo_inf_tail << '\n';
  out << "depth_err_rel_initial = " << s.depth_err_rel_initial << '\n';
  out << "depth_err_rel_terminal = " << s.depth_err_rel_terminal << '\n';
  out << "l_m = " << s.l_m << '\n';
  out << "min_depth = " << s.min_depth << '\n';
  out << "v1_violations = " << s.v1_violations << '\n';
  out << "v2_violations = " << s.v2_violations << '\n';
}

void write_lyapunov_csv(const RunLog &log, double gamma,
                        const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "t,v1,v2_core,js_integral,v2\n";
  const double l_m = log.summary.l_m;
  for (const StepRecord &r : log.rows) {
    std::string line;
    append_value(line, r.t);
    append_value(line, r.v1);
    append_value(line, r.v2_core);
    append_value(line, r.js_integral);
    append_value(line, r.v2_core + (l_m - r.js_integral) / gamma);
    out << line << '\n';
  }
}

void write_gnuplot_script(const std::string &csv_name,
                          const std::string &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << "# gnuplot script for the tracking and depth figures\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set grid\n"
      << "set terminal pngcairo size 900,600\n"
      << "set output 'tracking_errors.png'\n"
      << "set xlabel 't [s]'\n"
      << "set ylabel 'image-space tracking error [px]'\n"
      << "plot '" << csv_name << "' using 1:14 with lines title 'dx_u', \\\n"
      << "     '" << csv_name << "' using 1:15 with lines title 'dx_v'\n"
      << "set output 'depths.png'\n"
      << "set ylabel 'depth [m]'\n"
      << "plot '" << csv_name << "' using 1:37 with lines title 'z', \\\n"
      << "     '" << csv_name << "' using 1:38 with lines title 'z estimate'\n";
}

}  // namespace vistrack
