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

#ifndef VISTRACK_CONFIG_HPP_
#define VISTRACK_CONFIG_HPP_

#include <string>
#include <vector>

#include "vistrack/sim.hpp"

namespace vistrack {

/// The nominal experiment: every numeric choice of the reference run.
ExperimentConfig paper_sec4_preset();

/// Flat `key = value` text; '#' starts a comment; vector values are
/// whitespace-separated. Unknown keys are a hard error.
ExperimentConfig parse_config_text(const std::string &text);
ExperimentConfig parse_config_file(const std::string &path);

/// Apply one `key=value` override to an existing configuration.
void apply_override(ExperimentConfig &config, const std::string &key,
                    const std::string &value);
void apply_override_expr(ExperimentConfig &config, const std::string &expr);

/// Reject invalid configurations. The stability condition alpha > gamma/3
/// is enforced unless explicitly waived for counterexample experiments.
void validate(const ExperimentConfig &config,
              bool allow_theorem_violation = false);

std::string serialize(const ExperimentConfig &config);

}  // namespace vistrack

#endif  // VISTRACK_CONFIG_HPP_
