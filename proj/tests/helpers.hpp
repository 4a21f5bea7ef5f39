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

#ifndef VISTRACK_TESTS_HELPERS_HPP_
#define VISTRACK_TESTS_HELPERS_HPP_

#include <random>

#include "vistrack/config.hpp"
#include "vistrack/sim.hpp"

namespace vistrack::testing {

inline Vec3 random_vec3(std::mt19937_64 &rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return {dist(rng), dist(rng), dist(rng)};
}

inline Vec2 random_vec2(std::mt19937_64 &rng, double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return {dist(rng), dist(rng)};
}

/// High-accuracy local propagation of the closed loop from (t, y) over a
/// short horizon; used to turn trajectory derivatives into central
/// finite differences.
inline StateVec flow(const Models &models, const ExperimentConfig &config,
                     double t, const StateVec &y, double horizon,
                     int substeps = 8) {
  const auto f = [&](double tt, const StateVec &yy) {
    return closed_loop_rhs(models, config, tt, yy).ydot;
  };
  StateVec cur = y;
  double tcur = t;
  const double h = horizon / substeps;
  for (int i = 0; i < substeps; ++i) {
    cur = rk4_step(f, tcur, cur, h);
    tcur += h;
  }
  return cur;
}

/// States visited by a short nominal run, at the given stride, for
/// along-trajectory identity checks.
inline std::vector<SimState> trajectory_states(
    const Models &models, const ExperimentConfig &config, double duration,
    int stride) {
  std::vector<SimState> states;
  SimState s = initial_state(models, config);
  const long steps = std::lround(duration / config.dt);
  states.push_back(s);
  for (long k = 0; k < steps; ++k) {
    s = step_rk4(models, config, s);
    s.t = (k + 1) * config.dt;
    if ((k + 1) % stride == 0) states.push_back(s);
  }
  return states;
}

}  // namespace vistrack::testing

#endif  // VISTRACK_TESTS_HELPERS_HPP_
