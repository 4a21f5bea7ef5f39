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

#ifndef VISTRACK_FAULTS_HPP_
#define VISTRACK_FAULTS_HPP_

#include <stdexcept>
#include <string>

namespace vistrack {

/// Base class for runtime faults raised inside a simulation step. The
/// snapshot carries a printable dump of the offending state so that an
/// aborted run can be diagnosed from its log alone.
class SimulationFault : public std::runtime_error {
 public:
  explicit SimulationFault(const std::string &msg, std::string snapshot = "")
      : std::runtime_error(msg), snapshot_(std::move(snapshot)) {}

  const std::string &snapshot() const { return snapshot_; }
  void set_snapshot(std::string snapshot) { snapshot_ = std::move(snapshot); }

 private:
  std::string snapshot_;
};

/// A matrix expected to have full row rank lost it (smallest singular value
/// below tolerance). Signals a misconfigured projection region.
class RankDeficientError : public SimulationFault {
 public:
  using SimulationFault::SimulationFault;
};

/// A feature point reached or crossed the camera plane.
class NonPositiveDepthError : public SimulationFault {
 public:
  using SimulationFault::SimulationFault;
};

/// The estimated depth lost positivity, i.e. the depth parameter estimate
/// escaped the projection region. Treated as a programming error.
class SingularZhatError : public SimulationFault {
 public:
  using SimulationFault::SimulationFault;
};

/// Invalid or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace vistrack

#endif  // VISTRACK_FAULTS_HPP_
