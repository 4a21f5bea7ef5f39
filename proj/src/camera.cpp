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

#include "vistrack/camera.hpp"

#include <sstream>

#include "vistrack/faults.hpp"

namespace vistrack {

CameraModel::CameraModel(const CameraIntrinsics &intr,
                         const CameraExtrinsics &extr)
    : intrinsics_(intr), extrinsics_(extr) {
  const double bf = intr.beta * intr.focal_length;  // [px]
  const Mat3 &rot = extr.rotation;
  const Vec3 t = -rot * extr.position;  // base origin in camera coordinates
  d_bar_ = bf * rot.topRows<2>() + intr.principal_point * rot.row(2);
  d3_ = rot.row(2).transpose();
  p_bar_ = bf * t.head<2>() + intr.principal_point * t.z();
  d0_ = t.z();
}

Vec2 CameraModel::project(const Vec3 &r) const {
  const double z = depth(r);
  if (!(z > 0.0)) {
    std::ostringstream oss;
    oss << "project: non-positive depth z=" << z << " for feature at ("
        << r.x() << ", " << r.y() << ", " << r.z() << ")";
    throw NonPositiveDepthError(oss.str());
  }
  return (d_bar_ * r + p_bar_) / z;
}

StackedImageMaps stacked_maps(const CameraModel &cam,
                              const std::vector<Vec2> &x,
                              const std::vector<Vec3> &r) {
  const int m = static_cast<int>(x.size());
  StackedImageMaps maps;
  maps.z = Mat::Zero(2 * m, 2 * m);
  maps.n = Mat::Zero(2 * m, 3 * m);
  maps.x = Mat::Zero(2 * m, m);
  for (int i = 0; i < m; ++i) {
    maps.z.block<2, 2>(2 * i, 2 * i) = cam.depth(r[i]) * Mat2::Identity();
    maps.n.block<2, 3>(2 * i, 3 * i) = cam.interaction_matrix(x[i]);
    maps.x.block<2, 1>(2 * i, i) = x[i];
  }
  return maps;
}

}  // namespace vistrack
