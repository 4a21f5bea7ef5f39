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

#ifndef VISTRACK_LINALG_HPP_
#define VISTRACK_LINALG_HPP_

#include <Eigen/Dense>
#include <vector>

namespace vistrack {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using Mat23 = Eigen::Matrix<double, 2, 3>;
using RowVec3 = Eigen::Matrix<double, 1, 3>;

/// Relative tolerance used by default in rank decisions.
inline constexpr double kRankTol = 1e-8;

/// Skew-symmetric matrix S(b) with S(b) w = b x w.
Mat3 skew(const Vec3 &b);

/// Block-diagonal assembly; off-block entries are exactly zero.
Mat block_diag(const std::vector<Mat> &blocks);

/// Right pseudoinverse A^T (A A^T)^-1 of a full-row-rank matrix, computed
/// through a symmetric positive-definite solve of A A^T (no SVD in the hot
/// loop). Throws RankDeficientError when the smallest eigenvalue of A A^T
/// falls below rel_tol times the largest.
Mat pinv_full_row(const Mat &a, double rel_tol = kRankTol);

/// Number of singular values exceeding rel_tol times the largest one.
int numeric_rank(const Mat &a, double rel_tol = kRankTol);

/// Smallest singular value (0 for an empty matrix).
double smallest_singular_value(const Mat &a);

}  // namespace vistrack

#endif  // VISTRACK_LINALG_HPP_
