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

#include "vistrack/linalg.hpp"

#include <sstream>

#include "vistrack/faults.hpp"

namespace vistrack {

Mat3 skew(const Vec3 &b) {
  Mat3 s;
  s << 0.0, -b.z(), b.y(),
       b.z(), 0.0, -b.x(),
      -b.y(), b.x(), 0.0;
  return s;
}

Mat block_diag(const std::vector<Mat> &blocks) {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  for (const Mat &b : blocks) {
    rows += b.rows();
    cols += b.cols();
  }
  Mat out = Mat::Zero(rows, cols);
  Eigen::Index r = 0;
  Eigen::Index c = 0;
  for (const Mat &b : blocks) {
    out.block(r, c, b.rows(), b.cols()) = b;
    r += b.rows();
    c += b.cols();
  }
  return out;
}

Mat pinv_full_row(const Mat &a, double rel_tol) {
  const Mat gram = a * a.transpose();
  Eigen::SelfAdjointEigenSolver<Mat> eig(gram);
  const double lambda_max = eig.eigenvalues().maxCoeff();
  const double lambda_min = eig.eigenvalues().minCoeff();
  if (!(lambda_min > rel_tol * lambda_max) || !(lambda_max > 0.0)) {
    std::ostringstream oss;
    oss << "pinv_full_row: rank-deficient " << a.rows() << "x" << a.cols()
        << " matrix, lambda_min(AA^T)=" << lambda_min
        << ", lambda_max(AA^T)=" << lambda_max;
    throw RankDeficientError(oss.str());
  }
  // A^+ = A^T (A A^T)^-1 via Cholesky of the small Gram matrix.
  const Mat solved = gram.llt().solve(a);  // (AA^T)^-1 A
  return solved.transpose();
}

int numeric_rank(const Mat &a, double rel_tol) {
  if (a.size() == 0) return 0;
  Eigen::JacobiSVD<Mat> svd(a);
  const Vec &sv = svd.singularValues();
  if (sv.size() == 0 || sv(0) <= 0.0) return 0;
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > rel_tol * sv(0)) ++rank;
  }
  return rank;
}

double smallest_singular_value(const Mat &a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues().minCoeff();
}

}  // namespace vistrack
