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

#ifndef VISTRACK_CLI_HPP_
#define VISTRACK_CLI_HPP_

#include <string>
#include <vector>

#include "vistrack/config.hpp"

namespace vistrack {

// Exit codes: 0 ok, 2 config error, 3 runtime fault, 4 audit failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitRuntime = 3;
inline constexpr int kExitAudit = 4;

/// Run one experiment and write trajectory.csv, summary.txt, lyapunov.csv
/// and plots.gp into outdir.
int cmd_run(const ExperimentConfig &config, const std::string &outdir);

/// Run the audit suite and write report.txt plus audit_summary.txt.
int cmd_audit(const ExperimentConfig &config, const std::string &outdir);

/// One run per value of the addressable config key, in parallel; terminal
/// metrics aggregated into sweep.csv.
int cmd_sweep(const ExperimentConfig &config, const std::string &outdir,
              const std::string &param,
              const std::vector<std::string> &values);

/// Full command-line front end.
int run_cli(int argc, const char *const *argv);

}  // namespace vistrack

#endif  // VISTRACK_CLI_HPP_
