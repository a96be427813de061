// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "oneshot/common.hpp"

namespace oneshot {

using PointMatrix = Eigen::Matrix<double, Eigen::Dynamic, 2>;

// How a part's landmark indices are rasterized.
enum class PartKind {
  kPolyline,  // connected stroke through >= 2 points
  kPoints,    // isolated dot(s), >= 1 point (gaze)
};

struct PartDef {
  std::string name;
  int begin = 0;  // first landmark index
  int end = 0;    // one past the last landmark index
  PartKind kind = PartKind::kPolyline;
  bool closed = false;  // polyline wraps around (head outline)

  int size() const { return end - begin; }
};

// Named index ranges over a fixed landmark vector. Parts are listed in
// channel-registry order: the first 15 are boundary parts, the optional
// trailing two are gaze points.
class LandmarkLayout {
 public:
  static const LandmarkLayout& standard();

  int num_points() const { return num_points_; }
  const std::vector<PartDef>& parts() const { return parts_; }
  const PartDef& part(int index) const { return parts_.at(static_cast<size_t>(index)); }
  const PartDef& part(std::string_view name) const;
  int part_index(std::string_view name) const;  // -1 when absent
  const PartDef& contour() const { return parts_.front(); }

  int num_boundary_parts() const { return num_boundary_parts_; }
  int num_gaze_parts() const { return static_cast<int>(parts_.size()) - num_boundary_parts_; }
  // 15 boundary channels, plus 2 gaze channels when enabled.
  int num_channels(bool use_gaze) const {
    return use_gaze ? static_cast<int>(parts_.size()) : num_boundary_parts_;
  }

  LandmarkLayout(std::vector<PartDef> parts, int num_boundary_parts);

 private:
  std::vector<PartDef> parts_;
  int num_points_ = 0;
  int num_boundary_parts_ = 0;
};

// L x 2 landmark coordinates, normalized to [0, 1] image coordinates.
struct LandmarkSet {
  PointMatrix points;

  int size() const { return static_cast<int>(points.rows()); }
  Eigen::Vector2d point(int i) const { return points.row(i).transpose(); }

  // Rows of one part, in index order.
  PointMatrix part_points(const PartDef& part) const;

  // Throws DataError when the point count disagrees with the layout or a
  // coordinate leaves [0,1].
  void validate(const LandmarkLayout& layout) const;
};

// Replaces the face-contour range of `base` with the contour of `donor`,
// leaving every inner part untouched.
LandmarkSet resample_contour(const LandmarkSet& base, const LandmarkSet& donor,
                             const LandmarkLayout& layout);

// Plain-text landmark files: one "x y" row per point.
LandmarkSet load_landmarks(const std::filesystem::path& path);
void save_landmarks(const LandmarkSet& landmarks, const std::filesystem::path& path);

}  // namespace oneshot
