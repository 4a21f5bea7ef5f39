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

#include "vistrack/cli.hpp"

#include <cctype>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "vistrack/analysis.hpp"
#include "vistrack/faults.hpp"

namespace vistrack {

namespace fs = std::filesystem;

namespace {

void write_text(const std::string &path, const std::string &text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open for writing: " + path);
  out << text;
}

std::string sanitize(std::string s) {
  for (char &c : s) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-') c = '_';
  }
  return s;
}

}  // namespace

int cmd_run(const ExperimentConfig &config, const std::string &outdir) {
  fs::create_directories(outdir);
  const RunLog log = run(config);
  write_csv(log, outdir + "/trajectory.csv");
  write_summary(log, outdir + "/summary.txt");
  write_lyapunov_csv(log, config.gains.gamma, outdir + "/lyapunov.csv");
  write_gnuplot_script("trajectory.csv", outdir + "/plots.gp");
  if (log.summary.faulted) {
    write_text(outdir + "/fault_snapshot.txt",
               log.summary.fault_message + "\n");
    std::cerr << "run faulted: " << log.summary.fault_message << "\n";
    return kExitRuntime;
  }
  std::cout << "run complete: " << log.rows.size() << " rows, terminal |dx|="
            << log.summary.terminal_dx_inf << " px\n";
  return kExitOk;
}

int cmd_audit(const ExperimentConfig &config, const std::string &outdir) {
  fs::create_directories(outdir);
  const AuditOutcome outcome = run_full_audit(config);
  write_text(outdir + "/report.txt", outcome.report);
  write_text(outdir + "/audit_summary.txt", outcome.machine_summary);
  std::cout << outcome.report;
  return outcome.pass ? kExitOk : kExitAudit;
}

int cmd_sweep(const ExperimentConfig &config, const std::string &outdir,
              const std::string &param,
              const std::vector<std::string> &values) {
  if (values.empty()) {
    std::cerr << "sweep: empty value list\n";
    return kExitConfig;
  }
  fs::create_directories(outdir);

  struct SweepRow {
    std::string value;
    bool config_error = false;
    RunSummary summary;
  };

  std::vector<std::future<SweepRow>> futures;
  futures.reserve(values.size());
  for (const std::string &value : values) {
    futures.push_back(std::async(std::launch::async, [&, value]() {
      SweepRow row;
      row.value = value;
      ExperimentConfig local = config;
      try {
        apply_override(local, param, value);
        validate(local);
      } catch (const ConfigError &err) {
        row.config_error = true;
        row.summary.fault_message = err.what();
        return row;
      }
      const RunLog log = run(local);
      row.summary = log.summary;
      const std::string dir =
          outdir + "/" + sanitize(param) + "_" + sanitize(value);
      fs::create_directories(dir);
      write_csv(log, dir + "/trajectory.csv");
      write_summary(log, dir + "/summary.txt");
      return row;
    }));
  }

  std::ofstream out(outdir + "/sweep.csv", std::ios::binary);
  out << "value,faulted,terminal_dx_inf,terminal_dxo_inf,max_dx_inf_tail,"
         "depth_err_rel_terminal,l_m\n";
  out.precision(17);
  int failures = 0;
  for (auto &f : futures) {
    const SweepRow row = f.get();
    const bool failed = row.config_error || row.summary.faulted;
    if (failed) ++failures;
    out << row.value << ',' << (failed ? 1 : 0) << ','
        << row.summary.terminal_dx_inf << ',' << row.summary.terminal_dxo_inf
        << ',' << row.summary.max_dx_inf_tail << ','
        << row.summary.depth_err_rel_terminal << ',' << row.summary.l_m
        << '\n';
    if (failed) {
      std::cerr << "sweep " << param << "=" << row.value
                << " failed: " << row.summary.fault_message << "\n";
    }
  }
  if (failures == static_cast<int>(values.size())) return kExitRuntime;
  return kExitOk;
}

int run_cli(int argc, const char *const *argv) {
  CLI::App app{"observer-based adaptive visual tracking simulator"};
  app.require_subcommand(1);

  std::string preset = "paper-sec4";
  std::string config_path;
  std::string outdir = "out";
  std::vector<std::string> overrides;
  bool allow_violation = false;
  std::string sweep_param;
  std::string sweep_values;

  const auto add_common = [&](CLI::App *cmd) {
    cmd->add_option("--preset", preset, "named preset (paper-sec4)");
    cmd->add_option("--config", config_path, "configuration file path");
    cmd->add_option("--override", overrides, "key=value override; repeatable");
    cmd->add_flag("--allow-theorem-violation", allow_violation,
                  "accept gains with alpha <= gamma/3");
  };

  CLI::App *run_cmd = app.add_subcommand("run", "run one experiment");
  add_common(run_cmd);
  run_cmd->add_option("--outdir", outdir, "output directory");

  CLI::App *audit_cmd = app.add_subcommand("audit", "run the audit suite");
  add_common(audit_cmd);
  audit_cmd->add_option("--outdir", outdir, "output directory");

  CLI::App *sweep_cmd =
      app.add_subcommand("sweep", "run one experiment per parameter value");
  add_common(sweep_cmd);
  sweep_cmd->add_option("--outdir", outdir, "output directory");
  sweep_cmd->add_option("--param", sweep_param, "config key to sweep")
      ->required();
  sweep_cmd->add_option("--values", sweep_values,
                        "comma-separated list of values");

  CLI::App *validate_cmd =
      app.add_subcommand("validate-config", "parse and validate only");
  add_common(validate_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  ExperimentConfig config;
  try {
    if (preset != "paper-sec4") {
      throw ConfigError("unknown preset '" + preset + "'");
    }
    config = config_path.empty() ? paper_sec4_preset()
                                 : parse_config_file(config_path);
    for (const std::string &expr : overrides) {
      apply_override_expr(config, expr);
    }
    validate(config, allow_violation);
  } catch (const ConfigError &err) {
    std::cerr << "config error: " << err.what() << "\n";
    return kExitConfig;
  }

  if (validate_cmd->parsed()) {
    std::cout << "config ok\n";
    return kExitOk;
  }
  if (run_cmd->parsed()) return cmd_run(config, outdir);
  if (audit_cmd->parsed()) return cmd_audit(config, outdir);
  if (sweep_cmd->parsed()) {
    std::vector<std::string> values;
    std::string token;
    std::istringstream iss(sweep_values);
    while (std::getline(iss, token, ',')) {
      if (!token.empty()) values.push_back(token);
    }
    return cmd_sweep(config, outdir, sweep_param, values);
  }
  return kExitConfig;
}

}  // namespace vistrack
