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

#ifndef VISTRACK_CAMERA_HPP_
#define VISTRACK_CAMERA_HPP_

#include <vector>

#include "vistrack/linalg.hpp"

namespace vistrack {

struct CameraIntrinsics {
  double focal_length = 0.15;          // [m]
  double beta = 900.0;                 // scaling factor [px/m], same on both axes
  Vec2 principal_point = Vec2::Zero(); // [px]
};

struct CameraExtrinsics {
  // Rows of `rotation` are the camera axes expressed in the manipulator
  // base frame (base -> camera coordinates). `position` is the pinhole
  // location in the base frame.
  Mat3 rotation = Mat3::Identity();
  Vec3 position = Vec3::Zero();
};

/// Ground-truth fixed pinhole camera. The perspective projection matrix
/// [D_bar p_bar; d3^T d0] is compiled once at construction; the hot loop
/// touches only those blocks. The controller never sees this object.
class CameraModel {
 public:
  CameraModel(const CameraIntrinsics &intr, const CameraExtrinsics &extr);

  /// x = (D_bar r + p_bar) / z with z = d3^T r + d0.
  /// Throws NonPositiveDepthError when z <= 0.
  Vec2 project(const Vec3 &r) const;

  /// z(r) = d3^T r + d0.
  double depth(const Vec3 &r) const { return d3_.dot(r) + d0_; }

  /// Depth-independent interaction matrix N(x) = D_bar - x d3^T.
  Mat23 interaction_matrix(const Vec2 &x) const {
    return d_bar_ - x * d3_.transpose();
  }

  const Mat23 &d_bar() const { return d_bar_; }
  const Vec3 &d3() const { return d3_; }
  double d0() const { return d0_; }
  const Vec2 &p_bar() const { return p_bar_; }
  const CameraIntrinsics &intrinsics() const { return intrinsics_; }
  const CameraExtrinsics &extrinsics() const { return extrinsics_; }

 private:
  CameraIntrinsics intrinsics_;
  CameraExtrinsics extrinsics_;
  Mat23 d_bar_;
  Vec3 d3_;
  Vec2 p_bar_;
  double d0_;
};

/// Stacked image-space maps for m feature points:
/// Z = diag(z_i I2), N = diag(N_i(x_i)), X = diag(x_i as 2x1 columns).
struct StackedImageMaps {
  Mat z;  // 2m x 2m
  Mat n;  // 2m x 3m
  Mat x;  // 2m x m
};

StackedImageMaps stacked_maps(const CameraModel &cam,
                              const std::vector<Vec2> &x,
                              const std::vector<Vec3> &r);

}  // namespace vistrack

#endif  // VISTRACK_CAMERA_HPP_
