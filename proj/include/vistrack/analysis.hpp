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

#ifndef VISTRACK_ANALYSIS_HPP_
#define VISTRACK_ANALYSIS_HPP_

#include <string>
#include <vector>

#include "vistrack/sim.hpp"

namespace vistrack {

// Lyapunov certificates (consume ground truth; analysis only; nothing in
// the control path can reach these).

/// V1 = 1/2 s^T M s + 1/2 da_d^T Gamma_d^-1 da_d.
double lyapunov_v1(const Vec3 &s, const Mat3 &m, const Vec8 &da_d,
                   double gamma_d);

/// V2 = 1/2 dxo^T Z dxo + 1/2 dx^T Z dx + 1/2 da_zp^T G_zp^-1 da_zp
///      + 1/2 da_z^T G_z^-1 da_z + (l_m - integral)/gamma.
double lyapunov_v2(const Vec2 &dx_o, const Vec2 &dx, double z,
                   const Vec2 &da_z_perp, const Vec3 &da_z,
                   const Gains &gains, double integral_term, double l_m);

/// Smallest eigenvalue over the per-feature blocks
/// [[alpha z, gamma z / 2], [gamma z / 2, 3 gamma z / 4]];
/// positive iff alpha > gamma / 3 (for z > 0).
double h_matrix_min_eig(double alpha, double gamma,
                        const std::vector<double> &depths);

struct MonotonicityReport {
  int violations = 0;
  double worst_increase = 0.0;  // largest single-step increase observed
};

MonotonicityReport check_nonincreasing(const std::vector<double> &values,
                                       double slack);

/// Per-step decrement audit of the tracking certificate: the analytic rate
///   v2dot = -alpha z |dxo|^2 - gamma z |dx|^2 - gamma z dx.dxo
///           + dx.(J* s) - |J* s|^2 / (gamma z)
/// must not exceed -[dxo; dx]^T H [dxo; dx] by more than the slack.
double v2_rate_closed_form(double z, const Vec2 &dx, const Vec2 &dx_o,
                           const Vec2 &j_star_s, const Gains &gains);
double h_quadratic_form(double z, const Vec2 &dx, const Vec2 &dx_o,
                        const Gains &gains);

struct RankAuditReport {
  bool pass = false;
  int samples = 0;
  int rank_failures = 0;
  int nongeneric_samples = 0;
  int jf_rank = 0;
  int expected_jf_rank = 0;
  int expected_image_rank = 0;
  std::string detail;
};

/// Numeric rank of N(u) J_f over random pixel inputs for the given
/// base-frame feature offsets (m = offsets.size() in {1,2,3}).
RankAuditReport rank_audit(const CameraModel &cam,
                           const std::vector<Vec3> &offsets_base, int samples,
                           double pixel_min, double pixel_max,
                           unsigned long seed);

struct WorkspaceAuditReport {
  bool pass = false;
  int cells = 0;
  int singular_cells = 0;
  int rank_violations = 0;  // rank below 2m away from flagged cells
  std::vector<Vec3> sample_singular_q;
  std::string detail;
};

/// Sweeps q over a joint-space grid and checks the overall image Jacobian
/// keeps full row rank away from flagged singular cells.
WorkspaceAuditReport jacobian_rank_workspace_audit(const CameraModel &cam,
                                                   const ArmModel &arm,
                                                   int grid_n);

/// Rank margin of J (and of Jhat* from the logged estimates) along a run.
struct TrajectoryRankReport {
  bool pass = false;
  double min_rel_sigma_j = 0.0;
  double min_rel_sigma_j_star = 0.0;
};

TrajectoryRankReport trajectory_rank_audit(const CameraModel &cam,
                                           const ArmModel &arm,
                                           const RunLog &log);

/// Minimum feature depth over uniformly sampled joint configurations.
double min_depth_over_workspace(const CameraModel &cam, const ArmModel &arm,
                                int samples, unsigned long seed);

struct AuditOutcome {
  bool pass = false;
  std::string report;           // human-readable
  std::string machine_summary;  // key = 0/1 lines consumed by tests
};

/// Full audit: regressor identity suites, rank audits, H-matrix condition,
/// workspace depth and rank sweeps.
AuditOutcome run_full_audit(const ExperimentConfig &config);

}  // namespace vistrack

#endif  // VISTRACK_ANALYSIS_HPP_
