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

#include "vistrack/analysis.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "vistrack/faults.hpp"

namespace vistrack {

double lyapunov_v1(const Vec3 &s, const Mat3 &m, const Vec8 &da_d,
                   double gamma_d) {
  return 0.5 * s.dot(m * s) + 0.5 * da_d.squaredNorm() / gamma_d;
}

double lyapunov_v2(const Vec2 &dx_o, const Vec2 &dx, double z,
                   const Vec2 &da_z_perp, const Vec3 &da_z,
                   const Gains &gains, double integral_term, double l_m) {
  return 0.5 * z * dx_o.squaredNorm() + 0.5 * z * dx.squaredNorm() +
         0.5 * da_z_perp.squaredNorm() / gains.gamma_z_perp +
         0.5 * da_z.squaredNorm() / gains.gamma_z +
         (l_m - integral_term) / gains.gamma;
}

double h_matrix_min_eig(double alpha, double gamma,
                        const std::vector<double> &depths) {
  double min_eig = std::numeric_limits<double>::infinity();
  for (double z : depths) {
    Mat2 h;
    h << alpha * z, 0.5 * gamma * z,
         0.5 * gamma * z, 0.75 * gamma * z;
    Eigen::SelfAdjointEigenSolver<Mat2> eig(h);
    min_eig = std::min(min_eig, eig.eigenvalues().minCoeff());
  }
  return min_eig;
}

MonotonicityReport check_nonincreasing(const std::vector<double> &values,
                                       double slack) {
  MonotonicityReport rep;
  for (size_t i = 1; i < values.size(); ++i) {
    const double increase = values[i] - values[i - 1];
    if (increase > slack) {
      ++rep.violations;
      rep.worst_increase = std::max(rep.worst_increase, increase);
    }
  }
  return rep;
}

double v2_rate_closed_form(double z, const Vec2 &dx, const Vec2 &dx_o,
                           const Vec2 &j_star_s, const Gains &gains) {
  return -gains.alpha * z * dx_o.squaredNorm() -
         gains.gamma * z * dx.squaredNorm() -
         gains.gamma * z * dx.dot(dx_o) + dx.dot(j_star_s) -
         j_star_s.squaredNorm() / (gains.gamma * z);
}

double h_quadratic_form(double z, const Vec2 &dx, const Vec2 &dx_o,
                        const Gains &gains) {
  return gains.alpha * z * dx_o.squaredNorm() +
         gains.gamma * z * dx.dot(dx_o) +
         0.75 * gains.gamma * z * dx.squaredNorm();
}

namespace {

// Orthonormal basis of the range space of A (columns).
Mat range_basis(const Mat &a) {
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const int rank = numeric_rank(a);
  return svd.matrixU().leftCols(rank);
}

// Distance of v from the range space of A, relative to |v|.
double relative_range_distance(const Mat &a, const Vec3 &v) {
  if (v.norm() == 0.0) return 0.0;
  const Mat u = range_basis(a);
  const Vec res = v - u * (u.transpose() * v);
  return res.norm() / v.norm();
}

}  // namespace

RankAuditReport rank_audit(const CameraModel &cam,
                           const std::vector<Vec3> &offsets_base, int samples,
                           double pixel_min, double pixel_max,
                           unsigned long seed) {
  const int m = static_cast<int>(offsets_base.size());
  RankAuditReport rep;
  rep.samples = samples;
  rep.expected_image_rank = 2 * m;
  rep.expected_jf_rank = (m == 1) ? 3 : (m == 2 ? 5 : 6);

  const Mat jf = feature_stack_jacobian_from_offsets(offsets_base);
  rep.jf_rank = numeric_rank(jf);

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pix(pixel_min, pixel_max);
  for (int k = 0; k < samples; ++k) {
    std::vector<Mat> blocks;
    blocks.reserve(m);
    std::vector<Mat23> interaction(m);
    for (int i = 0; i < m; ++i) {
      const Vec2 u(pix(rng), pix(rng));
      interaction[i] = cam.interaction_matrix(u);
      blocks.push_back(interaction[i]);
    }
    const Mat n = block_diag(blocks);
    bool generic = true;
    if (m == 2) {
      // The rank statement needs c1 - c2 outside the intersection of the
      // interaction-matrix range spaces; checked, not assumed.
      const Vec3 d = offsets_base[0] - offsets_base[1];
      const double r1 =
          relative_range_distance(interaction[0].transpose(), d);
      const double r2 =
          relative_range_distance(interaction[1].transpose(), d);
      generic = (r1 > 1e-9) || (r2 > 1e-9);
    }
    if (!generic) {
      ++rep.nongeneric_samples;
      continue;
    }
    if (numeric_rank(n * jf) != rep.expected_image_rank) ++rep.rank_failures;
  }

  rep.pass = rep.rank_failures == 0 && rep.jf_rank == rep.expected_jf_rank;
  std::ostringstream oss;
  oss << "m=" << m << " rank(J_f)=" << rep.jf_rank << " (expected "
      << rep.expected_jf_rank << "), rank(N(u)J_f) failures "
      << rep.rank_failures << "/" << samples << ", non-generic "
      << rep.nongeneric_samples;
  rep.detail = oss.str();
  return rep;
}

WorkspaceAuditReport jacobian_rank_workspace_audit(const CameraModel &cam,
                                                   const ArmModel &arm,
                                                   int grid_n) {
  WorkspaceAuditReport rep;
  const double lo = -M_PI;
  const double hi = M_PI;
  const double step = (hi - lo) / (grid_n - 1);
  for (int i = 0; i < grid_n; ++i) {
    for (int j = 0; j < grid_n; ++j) {
      for (int k = 0; k < grid_n; ++k) {
        const Vec3 q(lo + i * step, lo + j * step, lo + k * step);
        const Vec2 x = cam.project(feature_positions(arm, q)[0]);
        const Mat jac = image_jacobian(cam, arm, q, {x});
        ++rep.cells;
        Eigen::JacobiSVD<Mat> svd(jac);
        const double smax = svd.singularValues().maxCoeff();
        const double smin = svd.singularValues().minCoeff();
        if (smin <= 1e-6 * smax) {
          ++rep.singular_cells;
          if (rep.sample_singular_q.size() < 8) {
            rep.sample_singular_q.push_back(q);
          }
        } else if (numeric_rank(jac) != 2 * arm.feature_count()) {
          ++rep.rank_violations;
        }
      }
    }
  }
  rep.pass = rep.rank_violations == 0;
  std::ostringstream oss;
  oss << "cells " << rep.cells << ", singular " << rep.singular_cells
      << ", rank violations " << rep.rank_violations;
  rep.detail = oss.str();
  return rep;
}

TrajectoryRankReport trajectory_rank_audit(const CameraModel &cam,
                                           const ArmModel &arm,
                                           const RunLog &log) {
  TrajectoryRankReport rep;
  rep.min_rel_sigma_j = std::numeric_limits<double>::infinity();
  rep.min_rel_sigma_j_star = std::numeric_limits<double>::infinity();
  for (const StepRecord &row : log.rows) {
    const Mat jac = image_jacobian(cam, arm, row.q, {row.x});
    Eigen::JacobiSVD<Mat> svd(jac);
    rep.min_rel_sigma_j =
        std::min(rep.min_rel_sigma_j, svd.singularValues().minCoeff() /
                                          svd.singularValues().maxCoeff());
    EstimatedKinematics est;
    est.a_z = row.a_z;
    est.a_z_perp = row.a_z_perp;
    const Mat j_star = est.jacobian(row.q, 0.5 * (row.x_o + row.x_d));
    Eigen::JacobiSVD<Mat> svd2(j_star);
    rep.min_rel_sigma_j_star =
        std::min(rep.min_rel_sigma_j_star, svd2.singularValues().minCoeff() /
                                               svd2.singularValues().maxCoeff());
  }
  rep.pass = rep.min_rel_sigma_j > 1e-6 && rep.min_rel_sigma_j_star > 1e-6;
  return rep;
}

double min_depth_over_workspace(const CameraModel &cam, const ArmModel &arm,
                                int samples, unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  double min_depth = std::numeric_limits<double>::infinity();
  for (int k = 0; k < samples; ++k) {
    const Vec3 q(angle(rng), angle(rng), angle(rng));
    for (const Vec3 &r : feature_positions(arm, q)) {
      min_depth = std::min(min_depth, cam.depth(r));
    }
  }
  return min_depth;
}

namespace {

struct IdentityAudit {
  double max_property1 = 0.0;    // Z psi, Zdot phi, Jperp identities
  double max_eq12 = 0.0;         // composite J qdot identity
  double max_decomposition = 0.0;
  double max_dyn_regressor = 0.0;
  double max_skew = 0.0;  // |v^T (Mdot - 2C) v| with finite-difference Mdot
};

IdentityAudit identity_audit(const Models &models, int samples,
                             unsigned long seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> pixel(-100.0, 200.0);
  const auto rand_vec3 = [&](auto &dist) {
    return Vec3(dist(rng), dist(rng), dist(rng));
  };

  IdentityAudit audit;
  const Vec3 a_z = models.truth.a_z;
  const Vec2 a_zp = models.truth.a_z_perp;
  const Vec8 a_d = true_dynamic_params(models.arm);

  for (int k = 0; k < samples; ++k) {
    const Vec3 q = rand_vec3(angle);
    const Vec3 qd = rand_vec3(unit);
    const Vec2 psi(unit(rng), unit(rng));
    const Vec2 phi(unit(rng), unit(rng));
    const Vec2 x(pixel(rng), pixel(rng));

    const Vec3 r = feature_positions(models.arm, q)[0];
    const double z = models.cam.depth(r);
    const JacobianDecomposition dec =
        decompose_jacobian(models.cam, models.arm, q);
    const double z_dot = (dec.j_z * qd)(0);
    const Mat j = image_jacobian(models.cam, models.arm, q, {x});

    const double scale = 1.0 + std::abs(z) + qd.norm();
    audit.max_property1 = std::max(
        audit.max_property1,
        (z * psi - regressor_y_z(q, psi) * a_z).norm() / scale);
    audit.max_property1 = std::max(
        audit.max_property1,
        (z_dot * phi - regressor_y_bar_z(q, qd, phi) * a_z).norm() / scale);
    audit.max_property1 = std::max(
        audit.max_property1,
        (dec.j_z_perp * qd - regressor_y_z_perp(q, qd) * a_zp).norm() /
            (1.0 + (dec.j_z_perp * qd).norm()));

    const Vec2 lhs = j * qd;
    const Vec2 rhs = regressor_y_z_perp(q, qd) * a_zp -
                     regressor_y_bar_z(q, qd, x) * a_z;
    audit.max_eq12 =
        std::max(audit.max_eq12, (lhs - rhs).norm() / (1.0 + lhs.norm()));

    const Mat recon = dec.j_z_perp - Mat(x * dec.j_z);
    audit.max_decomposition =
        std::max(audit.max_decomposition,
                 (j - recon).cwiseAbs().maxCoeff() /
                     (1.0 + j.cwiseAbs().maxCoeff()));

    const Vec3 xi = rand_vec3(unit);
    const Vec3 xidot = rand_vec3(unit);
    const Dynamics dyn = dynamics(models.arm, q, qd);
    const Vec3 want = dyn.m * xidot + dyn.c * xi + dyn.g;
    const Vec3 got = dynamic_regressor(q, qd, xi, xidot) * a_d;
    audit.max_dyn_regressor = std::max(
        audit.max_dyn_regressor, (want - got).norm() / (1.0 + want.norm()));

    // Mdot along qd by a fourth-order central difference; the wide stencil
    // keeps the roundoff term far below the 1e-9 assertion level.
    const double h = 1e-3;
    const Mat3 mdot_fd =
        (-inertia(models.arm, Vec3(q + 2.0 * h * qd)) +
         8.0 * inertia(models.arm, Vec3(q + h * qd)) -
         8.0 * inertia(models.arm, Vec3(q - h * qd)) +
         inertia(models.arm, Vec3(q - 2.0 * h * qd))) /
        (12.0 * h);
    const Vec3 v = rand_vec3(unit);
    audit.max_skew = std::max(
        audit.max_skew, std::abs(v.dot((mdot_fd - 2.0 * dyn.c) * v)));
  }
  return audit;
}

void add_check(std::ostringstream &report, std::ostringstream &summary,
               bool &all_pass, const std::string &name, bool pass,
               const std::string &detail) {
  report << (pass ? "[PASS] " : "[FAIL] ") << name;
  if (!detail.empty()) report << " -- " << detail;
  report << '\n';
  summary << name << " = " << (pass ? 1 : 0) << '\n';
  all_pass = all_pass && pass;
}

}  // namespace

AuditOutcome run_full_audit(const ExperimentConfig &config) {
  const Models models = build_models(config);
  AuditOutcome out;
  std::ostringstream report;
  std::ostringstream summary;
  bool all_pass = true;
  report << "audit report\n============\n";

  // Algebraic identity suites on random states.
  const IdentityAudit ids = identity_audit(models, config.audit_samples,
                                           config.seed + 1);
  {
    std::ostringstream d;
    d << "max residual " << ids.max_property1;
    add_check(report, summary, all_pass, "identity_property1",
              ids.max_property1 < 1e-10, d.str());
  }
  {
    std::ostringstream d;
    d << "max residual " << ids.max_eq12;
    add_check(report, summary, all_pass, "identity_composite",
              ids.max_eq12 < 1e-10, d.str());
  }
  {
    std::ostringstream d;
    d << "max residual " << ids.max_decomposition;
    add_check(report, summary, all_pass, "identity_decomposition",
              ids.max_decomposition < 1e-10, d.str());
  }
  {
    std::ostringstream d;
    d << "max residual " << ids.max_dyn_regressor;
    add_check(report, summary, all_pass, "identity_dynamic_regressor",
              ids.max_dyn_regressor < 1e-10, d.str());
  }
  {
    std::ostringstream d;
    d << "max |v^T (Mdot - 2C) v| " << ids.max_skew;
    add_check(report, summary, all_pass, "skew_symmetry",
              ids.max_skew < 1e-9, d.str());
  }

  // Rank audits for one, two, and three feature points.
  {
    const std::vector<Vec3> c1 = {models.arm.feature_offsets[0]};
    const RankAuditReport r = rank_audit(models.cam, c1, config.audit_samples,
                                         config.audit_pixel_min,
                                         config.audit_pixel_max,
                                         config.seed + 2);
    add_check(report, summary, all_pass, "rank_m1", r.pass, r.detail);
  }
  {
    const std::vector<Vec3> c2(config.audit_m2_offsets.begin(),
                               config.audit_m2_offsets.end());
    const RankAuditReport r = rank_audit(models.cam, c2, config.audit_samples,
                                         config.audit_pixel_min,
                                         config.audit_pixel_max,
                                         config.seed + 3);
    add_check(report, summary, all_pass, "rank_m2", r.pass, r.detail);
  }
  {
    const std::vector<Vec3> c3(config.audit_m3_offsets.begin(),
                               config.audit_m3_offsets.end());
    const RankAuditReport r = rank_audit(models.cam, c3, config.audit_samples,
                                         config.audit_pixel_min,
                                         config.audit_pixel_max,
                                         config.seed + 4);
    add_check(report, summary, all_pass, "rank_m3", r.pass, r.detail);
  }

  // Theorem condition on the gain pair.
  {
    const double min_eig =
        h_matrix_min_eig(config.gains.alpha, config.gains.gamma,
                         {0.1, 1.0, 10.0});
    std::ostringstream d;
    d << "min eigenvalue " << min_eig << " (alpha=" << config.gains.alpha
      << ", gamma=" << config.gains.gamma << ")";
    add_check(report, summary, all_pass, "h_matrix_positive",
              min_eig > 1e-12, d.str());
  }

  // Workspace sweeps.
  {
    const double min_depth = min_depth_over_workspace(
        models.cam, models.arm, 10000, config.seed + 5);
    std::ostringstream d;
    d << "min depth " << min_depth << " m";
    add_check(report, summary, all_pass, "depth_positive",
              min_depth > 0.1, d.str());
  }
  {
    const WorkspaceAuditReport r = jacobian_rank_workspace_audit(
        models.cam, models.arm, config.audit_grid_n);
    add_check(report, summary, all_pass, "workspace_rank", r.pass, r.detail);
  }

  out.pass = all_pass;
  out.report = report.str();
  out.machine_summary = summary.str();
  return out;
}

}  // namespace vistrack
