// SPDX-License-Identifier: Apache-2.0
#include "oneshot/geometry.hpp"

#include <Eigen/Geometry>
#include <cmath>

namespace oneshot {

PointMatrix SimilarityTransform::apply(const PointMatrix& pts) const {
  PointMatrix out(pts.rows(), 2);
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    out.row(i) = apply(pts.row(i).transpose()).transpose();
  }
  return out;
}

SimilarityTransform SimilarityTransform::inverse() const {
  SimilarityTransform inv;
  inv.linear = linear.inverse();
  inv.translation = -inv.linear * translation;
  return inv;
}

SimilarityTransform SimilarityTransform::fit(const PointMatrix& src, const PointMatrix& dst) {
  if (src.rows() != dst.rows()) {
    throw DataError("similarity fit needs matching point counts");
  }
  std::vector<Eigen::Index> usable;
  for (Eigen::Index i = 0; i < src.rows(); ++i) {
    if (src.row(i).allFinite() && dst.row(i).allFinite()) usable.push_back(i);
  }
  if (usable.size() < 3) {
    throw DataError("degenerate landmark configuration: fewer than 3 usable points");
  }
  Eigen::Matrix2Xd s(2, usable.size()), d(2, usable.size());
  for (size_t k = 0; k < usable.size(); ++k) {
    s.col(static_cast<Eigen::Index>(k)) = src.row(usable[k]).transpose();
    d.col(static_cast<Eigen::Index>(k)) = dst.row(usable[k]).transpose();
  }
  Eigen::Matrix2Xd sc = s.colwise() - s.rowwise().mean();
  Eigen::JacobiSVD<Eigen::Matrix2Xd> svd(sc);
  double s0 = svd.singularValues()(0);
  double s1 = svd.singularValues()(1);
  if (s0 < 1e-12 || s1 < 1e-9 * s0) {
    throw DataError("degenerate landmark configuration: points are collinear");
  }
  Eigen::Matrix3d m = Eigen::umeyama(s, d, /*with_scaling=*/true);
  SimilarityTransform t;
  t.linear = m.topLeftCorner<2, 2>();
  t.translation = m.topRightCorner<2, 1>();
  return t;
}

AlignedFace align_face(const torch::Tensor& raw_image, const LandmarkSet& landmarks,
                       const LandmarkSet& mean_shape, int resolution) {
  if (resolution < 16 || !is_power_of_two(resolution)) {
    throw ConfigError("resolution must be a power of two >= 16");
  }
  if (!raw_image.defined() || raw_image.dim() != 3 || raw_image.size(0) != 3) {
    throw DataError("align_face expects a (3, H, W) image");
  }
  if (landmarks.size() != mean_shape.size()) {
    throw DataError("landmarks and mean shape have different layouts");
  }
  const double h0 = static_cast<double>(raw_image.size(1));
  const double w0 = static_cast<double>(raw_image.size(2));
  const double res = static_cast<double>(resolution);

  // Fit in pixel coordinates so non-square inputs stay rigid.
  PointMatrix src_px = landmarks.points;
  src_px.col(0) *= w0;
  src_px.col(1) *= h0;
  PointMatrix dst_px = mean_shape.points * res;
  SimilarityTransform fwd = SimilarityTransform::fit(src_px, dst_px);
  SimilarityTransform inv = fwd.inverse();

  auto src = raw_image.to(torch::kFloat32).contiguous();
  auto acc = src.accessor<float, 3>();
  auto out = torch::empty({3, resolution, resolution}, torch::kFloat32);
  auto oacc = out.accessor<float, 3>();
  bool padded = false;
  const int iw = static_cast<int>(w0), ih = static_cast<int>(h0);
  for (int y = 0; y < resolution; ++y) {
    for (int x = 0; x < resolution; ++x) {
      Eigen::Vector2d p = inv.apply({x + 0.5, y + 0.5});
      double fx = p.x() - 0.5, fy = p.y() - 0.5;
      if (fx < 0.0 || fy < 0.0 || fx > w0 - 1.0 || fy > h0 - 1.0) padded = true;
      int x0 = static_cast<int>(std::floor(fx)), y0 = static_cast<int>(std::floor(fy));
      double ax = fx - x0, ay = fy - y0;
      int x0c = std::clamp(x0, 0, iw - 1), x1c = std::clamp(x0 + 1, 0, iw - 1);
      int y0c = std::clamp(y0, 0, ih - 1), y1c = std::clamp(y0 + 1, 0, ih - 1);
      for (int c = 0; c < 3; ++c) {
        double v00 = acc[c][y0c][x0c], v01 = acc[c][y0c][x1c];
        double v10 = acc[c][y1c][x0c], v11 = acc[c][y1c][x1c];
        double v0 = v00 * (1 - ax) + v01 * ax;
        double v1 = v10 * (1 - ax) + v11 * ax;
        oacc[c][y][x] = static_cast<float>(v0 * (1 - ay) + v1 * ay);
      }
    }
  }

  AlignedFace aligned;
  aligned.image = out.clamp(-1.0, 1.0);
  aligned.landmarks.points = fwd.apply(src_px) / res;
  for (Eigen::Index i = 0; i < aligned.landmarks.points.rows(); ++i) {
    for (int c = 0; c < 2; ++c) {
      double v = aligned.landmarks.points(i, c);
      if (v < 0.0 || v > 1.0) {
        aligned.landmarks.points(i, c) = std::clamp(v, 0.0, 1.0);
        padded = true;
      }
    }
  }
  aligned.padded = padded;
  return aligned;
}

}  // namespace oneshot
