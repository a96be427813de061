// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <torch/torch.h>

#include <Eigen/Dense>
#include <filesystem>

#include "oneshot/landmarks.hpp"

namespace oneshot {

// Identity-level parameters of the parametric face: proportions, colors and a
// deterministic freckle pattern (texture that warping preserves but synthesis
// tends to blur).
struct ToyIdentity {
  double face_width = 1.0;
  double face_height = 1.0;
  double eye_spacing = 1.0;
  double eye_size = 1.0;
  double mouth_width = 1.0;
  double nose_length = 1.0;
  double brow_height = 0.0;  // additive, template units
  Eigen::Vector3d skin{0.85, 0.65, 0.5};
  Eigen::Vector3d lip{0.7, 0.2, 0.25};
  Eigen::Vector3d iris{0.3, 0.25, 0.2};
  std::vector<Eigen::Vector3d> freckles;  // (x, y, radius) in template units

  static ToyIdentity sample(std::uint64_t seed);
};

// Sample-level pose and expression.
struct ToyExpression {
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;
  double mouth_open = 0.0;  // [0, 1]
  double eye_open = 1.0;    // [0.3, 1]
  double brow_raise = 0.0;  // [-1, 1]
  Eigen::Vector2d gaze{0.0, 0.0};  // [-1, 1]^2
  double scale_jitter = 1.0;
  Eigen::Vector2d shift{0.0, 0.0};

  static ToyExpression sample(std::uint64_t seed);
  static ToyExpression neutral() { return ToyExpression{}; }
};

// R = Rz(roll) * Ry(yaw) * Rx(pitch), math frame: x right, y up, z to viewer.
Eigen::Matrix3d rotation_from_angles(double yaw_deg, double pitch_deg, double roll_deg);

// Parametric 3D face whose projected template points are the landmark vector
// of LandmarkLayout::standard(). Rendering and landmarks share one geometry,
// so rasterized parts sit exactly on the landmark polylines.
class ToyFaceModel {
 public:
  ToyFaceModel();

  const LandmarkLayout& layout() const { return layout_; }

  // 3D points (3 x L) for identity+expression before head rotation.
  Eigen::Matrix3Xd template_points(const ToyIdentity& id, const ToyExpression& ex) const;

  // Mean-identity, neutral-expression template; the pose solver's reference.
  Eigen::Matrix3Xd canonical_points() const;

  // Projected landmarks in [0,1]^2 (weak perspective).
  LandmarkSet project(const ToyIdentity& id, const ToyExpression& ex) const;

  // (3, res, res) raster in [-1, 1], supersampled then area-downsampled.
  torch::Tensor render(const ToyIdentity& id, const ToyExpression& ex, int resolution) const;

  static Eigen::Vector3d background_color() { return {0.16, 0.18, 0.20}; }

 private:
  const LandmarkLayout& layout_;
};

// Writes a raw (unaligned) dataset: <id>_<sample>.png plus a matching .txt
// landmark file per image. Returns the number of samples written.
int generate_toy_dataset(const std::filesystem::path& root, int num_identities,
                         int samples_per_identity, std::uint64_t seed, int resolution);

}  // namespace oneshot
