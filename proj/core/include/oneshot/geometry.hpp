// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <torch/torch.h>

#include <Eigen/Dense>

#include "oneshot/landmarks.hpp"

namespace oneshot {

// p' = s * R(theta) * p + t, stored as the 2x2 linear part plus translation.
struct SimilarityTransform {
  Eigen::Matrix2d linear = Eigen::Matrix2d::Identity();
  Eigen::Vector2d translation = Eigen::Vector2d::Zero();

  Eigen::Vector2d apply(const Eigen::Vector2d& p) const { return linear * p + translation; }
  PointMatrix apply(const PointMatrix& pts) const;
  SimilarityTransform inverse() const;
  double scale() const { return std::sqrt(std::abs(linear.determinant())); }
  double rotation_radians() const { return std::atan2(linear(1, 0), linear(0, 0)); }

  // Least-squares similarity from src to dst (Umeyama). Rows with non-finite
  // coordinates on either side are ignored. Throws DataError when fewer than
  // three usable points remain or the configuration is collinear.
  static SimilarityTransform fit(const PointMatrix& src, const PointMatrix& dst);
};

struct AlignedFace {
  torch::Tensor image;     // (3, res, res) in [-1, 1]
  LandmarkSet landmarks;   // re-expressed in the aligned frame
  bool padded = false;     // sampling left the source raster (edge replication)
};

// Rigidly maps `landmarks` onto `mean_shape` and resamples the raw image into
// a resolution x resolution frame. `raw_image` is (3, H0, W0) in [-1, 1].
AlignedFace align_face(const torch::Tensor& raw_image, const LandmarkSet& landmarks,
                       const LandmarkSet& mean_shape, int resolution);

}  // namespace oneshot
