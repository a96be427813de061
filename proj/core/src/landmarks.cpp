// SPDX-License-Identifier: Apache-2.0
#include "oneshot/landmarks.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace oneshot {

LandmarkLayout::LandmarkLayout(std::vector<PartDef> parts, int num_boundary_parts)
    : parts_(std::move(parts)), num_boundary_parts_(num_boundary_parts) {
  for (const auto& p : parts_) {
    if (p.begin < 0 || p.end < p.begin) {
      throw ConfigError("landmark layout part '" + p.name + "' has an invalid index range");
    }
    num_points_ = std::max(num_points_, p.end);
  }
}

const PartDef& LandmarkLayout::part(std::string_view name) const {
  int idx = part_index(name);
  if (idx < 0) throw ConfigError("unknown landmark part: " + std::string(name));
  return parts_[static_cast<size_t>(idx)];
}

int LandmarkLayout::part_index(std::string_view name) const {
  for (size_t i = 0; i < parts_.size(); ++i) {
    if (parts_[i].name == name) return static_cast<int>(i);
  }
  return -1;
}

const LandmarkLayout& LandmarkLayout::standard() {
  static const LandmarkLayout layout = [] {
    std::vector<PartDef> parts;
    int at = 0;
    auto add = [&](std::string name, int count, PartKind kind, bool closed = false) {
      parts.push_back(PartDef{std::move(name), at, at + count, kind, closed});
      at += count;
    };
    // 15 boundary parts, disjoint index ranges.
    add("contour", 17, PartKind::kPolyline, /*closed=*/true);  // full head outline
    add("left_brow_upper", 4, PartKind::kPolyline);
    add("left_brow_lower", 4, PartKind::kPolyline);
    add("right_brow_upper", 4, PartKind::kPolyline);
    add("right_brow_lower", 4, PartKind::kPolyline);
    add("nose_bridge", 4, PartKind::kPolyline);
    add("nose_base", 5, PartKind::kPolyline);
    add("left_eye_upper", 4, PartKind::kPolyline);
    add("left_eye_lower", 4, PartKind::kPolyline);
    add("right_eye_upper", 4, PartKind::kPolyline);
    add("right_eye_lower", 4, PartKind::kPolyline);
    add("lip_outer_upper", 5, PartKind::kPolyline);
    add("lip_outer_lower", 5, PartKind::kPolyline);
    add("lip_inner_upper", 3, PartKind::kPolyline);
    add("lip_inner_lower", 3, PartKind::kPolyline);
    // Optional gaze channels.
    add("gaze_left", 1, PartKind::kPoints);
    add("gaze_right", 1, PartKind::kPoints);
    return LandmarkLayout(std::move(parts), 15);
  }();
  return layout;
}

PointMatrix LandmarkSet::part_points(const PartDef& part) const {
  return points.block(part.begin, 0, part.size(), 2);
}

void LandmarkSet::validate(const LandmarkLayout& layout) const {
  if (size() != layout.num_points()) {
    throw DataError("landmark set has " + std::to_string(size()) + " points, layout expects " +
                    std::to_string(layout.num_points()));
  }
  for (int i = 0; i < size(); ++i) {
    double x = points(i, 0), y = points(i, 1);
    if (!std::isfinite(x) || !std::isfinite(y) || x < 0.0 || x > 1.0 || y < 0.0 || y > 1.0) {
      throw DataError("landmark " + std::to_string(i) + " outside [0,1]: (" + std::to_string(x) +
                      ", " + std::to_string(y) + ")");
    }
  }
}

LandmarkSet resample_contour(const LandmarkSet& base, const LandmarkSet& donor,
                             const LandmarkLayout& layout) {
  if (base.size() != donor.size()) {
    throw DataError("contour resampling requires identical landmark layouts");
  }
  const PartDef& contour = layout.contour();
  LandmarkSet out = base;
  out.points.block(contour.begin, 0, contour.size(), 2) =
      donor.points.block(contour.begin, 0, contour.size(), 2);
  return out;
}

LandmarkSet load_landmarks(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open landmark file: " + path.string());
  std::vector<Eigen::Vector2d> pts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double x = 0.0, y = 0.0;
    if (!(ss >> x >> y)) {
      throw DataError("malformed landmark row in " + path.string() + ": '" + line + "'");
    }
    pts.emplace_back(x, y);
  }
  LandmarkSet lms;
  lms.points.resize(static_cast<Eigen::Index>(pts.size()), 2);
  for (size_t i = 0; i < pts.size(); ++i) lms.points.row(static_cast<Eigen::Index>(i)) = pts[i];
  return lms;
}

void save_landmarks(const LandmarkSet& landmarks, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write landmark file: " + path.string());
  out.precision(10);
  for (int i = 0; i < landmarks.size(); ++i) {
    out << landmarks.points(i, 0) << " " << landmarks.points(i, 1) << "\n";
  }
}

}  // namespace oneshot
