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

#include "vistrack/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "vistrack/faults.hpp"

namespace vistrack {

namespace {

std::vector<double> parse_numbers(const std::string &key,
                                  const std::string &value, size_t count) {
  std::istringstream iss(value);
  std::vector<double> out;
  double v;
  while (iss >> v) out.push_back(v);
  if (!iss.eof() || out.size() != count) {
    std::ostringstream oss;
    oss << "config key '" << key << "' expects " << count
        << " numeric value(s), got '" << value << "'";
    throw ConfigError(oss.str());
  }
  return out;
}

double parse_scalar(const std::string &key, const std::string &value) {
  return parse_numbers(key, value, 1)[0];
}

std::string trim(const std::string &s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r\n");
  return s.substr(begin, end - begin + 1);
}

using Setter =
    std::function<void(ExperimentConfig &, const std::string &key,
                       const std::string &value)>;

const std::map<std::string, Setter> &setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    const auto scalar = [](double ExperimentConfig::*field) {
      return [field](ExperimentConfig &c, const std::string &k,
                     const std::string &v) { c.*field = parse_scalar(k, v); };
    };
    t["dt"] = scalar(&ExperimentConfig::dt);
    t["duration"] = scalar(&ExperimentConfig::duration);
    t["log_every"] = [](ExperimentConfig &c, const std::string &k,
                        const std::string &v) {
      c.log_every = static_cast<int>(parse_scalar(k, v));
    };
    t["seed"] = [](ExperimentConfig &c, const std::string &k,
                   const std::string &v) {
      c.seed = static_cast<unsigned long>(parse_scalar(k, v));
    };

    t["gains.K"] = [](ExperimentConfig &c, const std::string &k,
                      const std::string &v) { c.gains.k = parse_scalar(k, v); };
    t["gains.alpha"] = [](ExperimentConfig &c, const std::string &k,
                          const std::string &v) {
      c.gains.alpha = parse_scalar(k, v);
    };
    t["gains.gamma"] = [](ExperimentConfig &c, const std::string &k,
                          const std::string &v) {
      c.gains.gamma = parse_scalar(k, v);
    };
    t["gains.Gamma_d"] = [](ExperimentConfig &c, const std::string &k,
                            const std::string &v) {
      c.gains.gamma_d = parse_scalar(k, v);
    };
    t["gains.Gamma_z_perp"] = [](ExperimentConfig &c, const std::string &k,
                                 const std::string &v) {
      c.gains.gamma_z_perp = parse_scalar(k, v);
    };
    t["gains.Gamma_z"] = [](ExperimentConfig &c, const std::string &k,
                            const std::string &v) {
      c.gains.gamma_z = parse_scalar(k, v);
    };

    t["camera.f"] = [](ExperimentConfig &c, const std::string &k,
                       const std::string &v) {
      c.cam_intrinsics.focal_length = parse_scalar(k, v);
    };
    t["camera.beta"] = [](ExperimentConfig &c, const std::string &k,
                          const std::string &v) {
      c.cam_intrinsics.beta = parse_scalar(k, v);
    };
    t["camera.principal_point"] = [](ExperimentConfig &c,
                                     const std::string &k,
                                     const std::string &v) {
      const auto n = parse_numbers(k, v, 2);
      c.cam_intrinsics.principal_point << n[0], n[1];
    };
    t["camera.rotation"] = [](ExperimentConfig &c, const std::string &k,
                              const std::string &v) {
      const auto n = parse_numbers(k, v, 9);
      for (int r = 0; r < 3; ++r)
        for (int col = 0; col < 3; ++col)
          c.cam_extrinsics.rotation(r, col) = n[3 * r + col];
    };
    t["camera.position"] = [](ExperimentConfig &c, const std::string &k,
                              const std::string &v) {
      const auto n = parse_numbers(k, v, 3);
      c.cam_extrinsics.position << n[0], n[1], n[2];
    };

    t["arm.l1"] = [](ExperimentConfig &c, const std::string &k,
                     const std::string &v) { c.arm.l1 = parse_scalar(k, v); };
    t["arm.l2"] = [](ExperimentConfig &c, const std::string &k,
                     const std::string &v) { c.arm.l2 = parse_scalar(k, v); };
    t["arm.l3"] = [](ExperimentConfig &c, const std::string &k,
                     const std::string &v) { c.arm.l3 = parse_scalar(k, v); };
    t["arm.m1"] = [](ExperimentConfig &c, const std::string &k,
                     const std::string &v) { c.arm.m1 = parse_scalar(k, v); };
    t["arm.m2"] = [](ExperimentConfig &c, const std::string &k,
                     const std::string &v) { c.arm.m2 = parse_scalar(k, v); };
    t["arm.m3"] = [](ExperimentConfig &c, const std::string &k,
                     const std::string &v) { c.arm.m3 = parse_scalar(k, v); };
    t["arm.base_inertia"] = [](ExperimentConfig &c, const std::string &k,
                               const std::string &v) {
      c.arm.base_inertia = parse_scalar(k, v);
    };
    t["arm.gravity"] = [](ExperimentConfig &c, const std::string &k,
                          const std::string &v) {
      c.arm.gravity = parse_scalar(k, v);
    };
    t["arm.feature_offset"] = [](ExperimentConfig &c, const std::string &k,
                                 const std::string &v) {
      const auto n = parse_numbers(k, v, 3);
      c.arm.feature_offsets = {Vec3(n[0], n[1], n[2])};
    };

    t["initial.q"] = [](ExperimentConfig &c, const std::string &k,
                        const std::string &v) {
      const auto n = parse_numbers(k, v, 3);
      c.q0 << n[0], n[1], n[2];
    };
    t["initial.qdot"] = [](ExperimentConfig &c, const std::string &k,
                           const std::string &v) {
      const auto n = parse_numbers(k, v, 3);
      c.qdot0 << n[0], n[1], n[2];
    };
    t["initial.x_o"] = [](ExperimentConfig &c, const std::string &k,
                          const std::string &v) {
      if (trim(v) == "auto") {
        c.x_o0.reset();
        return;
      }
      const auto n = parse_numbers(k, v, 2);
      c.x_o0 = Vec2(n[0], n[1]);
    };
    t["initial.l2_hat"] = scalar(&ExperimentConfig::l2_hat0);
    t["initial.l3_hat"] = scalar(&ExperimentConfig::l3_hat0);
    t["initial.dC_hat"] = scalar(&ExperimentConfig::dc_hat0);
    t["initial.f_hat"] = scalar(&ExperimentConfig::f_hat0);
    t["initial.beta_hat"] = scalar(&ExperimentConfig::beta_hat0);
    t["initial.a_d_hat"] = [](ExperimentConfig &c, const std::string &k,
                              const std::string &v) {
      const auto n = parse_numbers(k, v, 8);
      for (int i = 0; i < 8; ++i) c.a_d_hat0(i) = n[i];
    };

    t["projection.a_z_min"] = [](ExperimentConfig &c, const std::string &k,
                                 const std::string &v) {
      const auto n = parse_numbers(k, v, 3);
      c.projection.a_z_lo << n[0], n[1], n[2];
    };
    t["projection.a_z_max"] = [](ExperimentConfig &c, const std::string &k,
                                 const std::string &v) {
      const auto n = parse_numbers(k, v, 3);
      c.projection.a_z_hi << n[0], n[1], n[2];
    };
    t["projection.a_z_perp_min"] = [](ExperimentConfig &c,
                                      const std::string &k,
                                      const std::string &v) {
      const auto n = parse_numbers(k, v, 2);
      c.projection.a_z_perp_lo << n[0], n[1];
    };
    t["projection.a_z_perp_max"] = [](ExperimentConfig &c,
                                      const std::string &k,
                                      const std::string &v) {
      const auto n = parse_numbers(k, v, 2);
      c.projection.a_z_perp_hi << n[0], n[1];
    };

    t["trajectory.center"] = [](ExperimentConfig &c, const std::string &k,
                                const std::string &v) {
      const auto n = parse_numbers(k, v, 2);
      c.trajectory.center << n[0], n[1];
    };
    t["trajectory.radius"] = [](ExperimentConfig &c, const std::string &k,
                                const std::string &v) {
      c.trajectory.radius = parse_scalar(k, v);
    };
    t["trajectory.omega"] = [](ExperimentConfig &c, const std::string &k,
                               const std::string &v) {
      c.trajectory.omega = parse_scalar(k, v);
    };

    t["sim.xdot_shadow_noise"] = scalar(&ExperimentConfig::xdot_shadow_noise);

    t["audit.samples"] = [](ExperimentConfig &c, const std::string &k,
                            const std::string &v) {
      c.audit_samples = static_cast<int>(parse_scalar(k, v));
    };
    t["audit.pixel_min"] = scalar(&ExperimentConfig::audit_pixel_min);
    t["audit.pixel_max"] = scalar(&ExperimentConfig::audit_pixel_max);
    t["audit.grid_n"] = [](ExperimentConfig &c, const std::string &k,
                           const std::string &v) {
      c.audit_grid_n = static_cast<int>(parse_scalar(k, v));
    };
    t["audit.m2_offsets"] = [](ExperimentConfig &c, const std::string &k,
                               const std::string &v) {
      const auto n = parse_numbers(k, v, 6);
      for (int i = 0; i < 2; ++i)
        c.audit_m2_offsets[i] << n[3 * i], n[3 * i + 1], n[3 * i + 2];
    };
    t["audit.m3_offsets"] = [](ExperimentConfig &c, const std::string &k,
                               const std::string &v) {
      const auto n = parse_numbers(k, v, 9);
      for (int i = 0; i < 3; ++i)
        c.audit_m3_offsets[i] << n[3 * i], n[3 * i + 1], n[3 * i + 2];
    };
    return t;
  }();
  return table;
}

}  // namespace

ExperimentConfig paper_sec4_preset() {
  // Every default of ExperimentConfig is the nominal experiment.
  return ExperimentConfig{};
}

void apply_override(ExperimentConfig &config, const std::string &key,
                    const std::string &value) {
  const auto &table = setters();
  const auto it = table.find(key);
  if (it == table.end()) {
    throw ConfigError("unknown config key '" + key + "'");
  }
  it->second(config, key, value);
}

void apply_override_expr(ExperimentConfig &config, const std::string &expr) {
  const auto eq = expr.find('=');
  if (eq == std::string::npos) {
    throw ConfigError("override must look like key=value, got '" + expr +
                      "'");
  }
  apply_override(config, trim(expr.substr(0, eq)), trim(expr.substr(eq + 1)));
}

ExperimentConfig parse_config_text(const std::string &text) {
  ExperimentConfig config = paper_sec4_preset();
  std::istringstream iss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(iss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      std::ostringstream oss;
      oss << "config line " << lineno << " is not 'key = value': '" << line
          << "'";
      throw ConfigError(oss.str());
    }
    apply_override(config, trim(line.substr(0, eq)),
                   trim(line.substr(eq + 1)));
  }
  return config;
}

ExperimentConfig parse_config_file(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config_text(buffer.str());
}

void validate(const ExperimentConfig &config, bool allow_theorem_violation) {
  if (!(config.dt > 0.0)) throw ConfigError("dt must be positive");
  if (config.duration < 0.0) throw ConfigError("duration must be >= 0");
  if (config.log_every < 1) throw ConfigError("log_every must be >= 1");
  if (!config.gains.positive()) {
    throw ConfigError("all gains must be positive");
  }
  if (!config.gains.stability_condition() && !allow_theorem_violation) {
    std::ostringstream oss;
    oss << "gains violate the stability condition alpha > gamma/3 (alpha="
        << config.gains.alpha << ", gamma=" << config.gains.gamma
        << "); pass --allow-theorem-violation to run anyway";
    throw ConfigError(oss.str());
  }
  if (config.arm.l1 <= 0 || config.arm.l2 <= 0 || config.arm.l3 <= 0) {
    throw ConfigError("link lengths must be positive");
  }
  if (config.arm.m2 <= 0 || config.arm.m3 <= 0 ||
      config.arm.base_inertia <= 0) {
    throw ConfigError("masses and the base inertia must be positive");
  }
  if (config.cam_intrinsics.focal_length <= 0 ||
      config.cam_intrinsics.beta <= 0) {
    throw ConfigError("camera focal length and scaling must be positive");
  }
  const Mat3 &rot = config.cam_extrinsics.rotation;
  if ((rot * rot.transpose() - Mat3::Identity()).cwiseAbs().maxCoeff() >
      1e-9) {
    throw ConfigError("camera.rotation must be orthonormal");
  }

  // The run itself additionally needs the reference geometry family for the
  // hand-derived kinematic parameterization; surface that early.
  Models models = build_models(config);

  const ProjectionRegion &region = config.projection;
  for (int i = 0; i < 3; ++i) {
    if (!(region.a_z_lo(i) < region.a_z_hi(i)))
      throw ConfigError("projection.a_z bounds must satisfy min < max");
  }
  for (int i = 0; i < 2; ++i) {
    if (!(region.a_z_perp_lo(i) < region.a_z_perp_hi(i)))
      throw ConfigError("projection.a_z_perp bounds must satisfy min < max");
  }
  if (!region.contains(models.truth.a_z, models.truth.a_z_perp)) {
    throw ConfigError(
        "true kinematic parameters must lie strictly inside the projection "
        "region");
  }
  const EstimatedKinematics est0 = config.initial_kinematic_estimates();
  if (!region.contains(est0.a_z, est0.a_z_perp)) {
    throw ConfigError(
        "initial kinematic estimates must lie inside the projection region");
  }
  if (config.a_d_hat0.size() != kNumDynParams) {
    throw ConfigError("initial.a_d_hat must have 8 entries");
  }
}

std::string serialize(const ExperimentConfig &c) {
  std::ostringstream out;
  out.precision(17);
  const auto vec = [&out](const char *key, const auto &v, int n) {
    out << key << " = ";
    for (int i = 0; i < n; ++i) {
      if (i) out << ' ';
      out << v(i);
    }
    out << '\n';
  };
  out << "# experiment configuration (flat key = value format)\n";
  out << "dt = " << c.dt << '\n';
  out << "duration = " << c.duration << '\n';
  out << "log_every = " << c.log_every << '\n';
  out << "seed = " << c.seed << '\n';
  out << "\n# gains (each a positive scalar times the identity)\n";
  out << "gains.K = " << c.gains.k << '\n';
  out << "gains.alpha = " << c.gains.alpha << '\n';
  out << "gains.gamma = " << c.gains.gamma << '\n';
  out << "gains.Gamma_d = " << c.gains.gamma_d << '\n';
  out << "gains.Gamma_z_perp = " << c.gains.gamma_z_perp << '\n';
  out << "gains.Gamma_z = " << c.gains.gamma_z << '\n';
  out << "\n# camera (ground truth; the controller never reads this block)\n";
  out << "camera.f = " << c.cam_intrinsics.focal_length << '\n';
  out << "camera.beta = " << c.cam_intrinsics.beta << '\n';
  vec("camera.principal_point", c.cam_intrinsics.principal_point, 2);
  out << "camera.rotation =";
  for (int r = 0; r < 3; ++r)
    for (int col = 0; col < 3; ++col)
      out << ' ' << c.cam_extrinsics.rotation(r, col);
  out << '\n';
  vec("camera.position", c.cam_extrinsics.position, 3);
  out << "\n# arm (ground truth)\n";
  out << "arm.l1 = " << c.arm.l1 << '\n';
  out << "arm.l2 = " << c.arm.l2 << '\n';
  out << "arm.l3 = " << c.arm.l3 << '\n';
  out << "arm.m1 = " << c.arm.m1 << '\n';
  out << "arm.m2 = " << c.arm.m2 << '\n';
  out << "arm.m3 = " << c.arm.m3 << '\n';
  out << "arm.base_inertia = " << c.arm.base_inertia << '\n';
  out << "arm.gravity = " << c.arm.gravity << '\n';
  vec("arm.feature_offset", c.arm.feature_offsets[0], 3);
  out << "\n# initial conditions and estimates\n";
  vec("initial.q", c.q0, 3);
  vec("initial.qdot", c.qdot0, 3);
  if (c.x_o0.has_value()) {
    vec("initial.x_o", *c.x_o0, 2);
  } else {
    out << "initial.x_o = auto\n";
  }
  out << "initial.l2_hat = " << c.l2_hat0 << '\n';
  out << "initial.l3_hat = " << c.l3_hat0 << '\n';
  out << "initial.dC_hat = " << c.dc_hat0 << '\n';
  out << "initial.f_hat = " << c.f_hat0 << '\n';
  out << "initial.beta_hat = " << c.beta_hat0 << '\n';
  vec("initial.a_d_hat", c.a_d_hat0, 8);
  out << "\n# projection region for the kinematic estimates\n";
  vec("projection.a_z_min", c.projection.a_z_lo, 3);
  vec("projection.a_z_max", c.projection.a_z_hi, 3);
  vec("projection.a_z_perp_min", c.projection.a_z_perp_lo, 2);
  vec("projection.a_z_perp_max", c.projection.a_z_perp_hi, 2);
  out << "\n# desired image-space trajectory\n";
  vec("trajectory.center", c.trajectory.center, 2);
  out << "trajectory.radius = " << c.trajectory.radius << '\n';
  out << "trajectory.omega = " << c.trajectory.omega << '\n';
  out << "\n# diagnostics\n";
  out << "sim.xdot_shadow_noise = " << c.xdot_shadow_noise << '\n';
  out << "\n# audit settings\n";
  out << "audit.samples = " << c.audit_samples << '\n';
  out << "audit.pixel_min = " << c.audit_pixel_min << '\n';
  out << "audit.pixel_max = " << c.audit_pixel_max << '\n';
  out << "audit.grid_n = " << c.audit_grid_n << '\n';
  out << "audit.m2_offsets =";
  for (const auto &v : c.audit_m2_offsets)
    out << ' ' << v(0) << ' ' << v(1) << ' ' << v(2);
  out << '\n';
  out << "audit.m3_offsets =";
  for (const auto &v : c.audit_m3_offsets)
    out << ' ' << v(0) << ' ' << v(1) << ' ' << v(2);
  out << '\n';
  return out.str();
}

}  // namespace vistrack
