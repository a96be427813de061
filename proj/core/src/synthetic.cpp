// SPDX-License-Identifier: Apache-2.0
#include "oneshot/synthetic.hpp"

#include <opencv2/imgproc.hpp>

#include <cmath>

#include "oneshot/face_image.hpp"

namespace oneshot {

namespace {

constexpr int kSupersample = 4;
constexpr int kShiftBits = 4;  // fixed-point fraction bits for cv drawing

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

Eigen::Vector3d hsv(std::mt19937_64& rng, double h_lo, double h_hi, double s_lo, double s_hi,
                    double v_lo, double v_hi) {
  double h = uniform(rng, h_lo, h_hi);
  h = h - std::floor(h);
  double s = uniform(rng, s_lo, s_hi);
  double v = uniform(rng, v_lo, v_hi);
  double c = v * s;
  double hp = h * 6.0;
  double x = c * (1.0 - std::abs(std::fmod(hp, 2.0) - 1.0));
  double m = v - c;
  double r = 0, g = 0, b = 0;
  switch (static_cast<int>(hp) % 6) {
    case 0: r = c; g = x; break;
    case 1: r = x; g = c; break;
    case 2: g = c; b = x; break;
    case 3: g = x; b = c; break;
    case 4: r = x; b = c; break;
    default: r = c; b = x; break;
  }
  return {r + m, g + m, b + m};
}

cv::Scalar color_of(const Eigen::Vector3d& rgb) {
  return cv::Scalar(rgb.x() * 255.0, rgb.y() * 255.0, rgb.z() * 255.0);
}

struct Raster {
  cv::Mat img;  // CV_8UC3, RGB order
  double size;  // supersampled canvas size in px

  cv::Point fixed(const Eigen::Vector2d& uv) const {
    const double f = size * (1 << kShiftBits);
    return {static_cast<int>(std::lround(uv.x() * f)), static_cast<int>(std::lround(uv.y() * f))};
  }
  std::vector<cv::Point> fixed_all(const PointMatrix& pts) const {
    std::vector<cv::Point> out;
    out.reserve(static_cast<size_t>(pts.rows()));
    for (Eigen::Index i = 0; i < pts.rows(); ++i) out.push_back(fixed(pts.row(i).transpose()));
    return out;
  }
  void fill(const std::vector<cv::Point>& poly, const Eigen::Vector3d& rgb) {
    std::vector<std::vector<cv::Point>> polys{poly};
    cv::fillPoly(img, polys, color_of(rgb), cv::LINE_8, kShiftBits);
  }
  void stroke(const std::vector<cv::Point>& pts, const Eigen::Vector3d& rgb, double width_frac,
              bool closed = false) {
    int thick = std::max(1, static_cast<int>(std::lround(width_frac * size)));
    std::vector<std::vector<cv::Point>> polys{pts};
    cv::polylines(img, polys, closed, color_of(rgb), thick, cv::LINE_8, kShiftBits);
  }
  void dot(const Eigen::Vector2d& uv, double radius_frac, const Eigen::Vector3d& rgb) {
    int r = std::max(1, static_cast<int>(std::lround(radius_frac * size * (1 << kShiftBits))));
    cv::circle(img, fixed(uv), r, color_of(rgb), cv::FILLED, cv::LINE_8, kShiftBits);
  }
};

// Reads one part's projected points.
PointMatrix part_rows(const LandmarkSet& lms, const LandmarkLayout& layout, const char* name) {
  return lms.part_points(layout.part(name));
}

}  // namespace

Eigen::Matrix3d rotation_from_angles(double yaw_deg, double pitch_deg, double roll_deg) {
  const double a = pitch_deg * M_PI / 180.0;  // about x
  const double b = yaw_deg * M_PI / 180.0;    // about y
  const double c = roll_deg * M_PI / 180.0;   // about z
  Eigen::Matrix3d rx, ry, rz;
  rx << 1, 0, 0, 0, std::cos(a), -std::sin(a), 0, std::sin(a), std::cos(a);
  ry << std::cos(b), 0, std::sin(b), 0, 1, 0, -std::sin(b), 0, std::cos(b);
  rz << std::cos(c), -std::sin(c), 0, std::sin(c), std::cos(c), 0, 0, 0, 1;
  return rz * ry * rx;
}

ToyIdentity ToyIdentity::sample(std::uint64_t seed) {
  auto rng = make_rng(seed, 0x1de11);
  ToyIdentity id;
  id.face_width = uniform(rng, 0.92, 1.08);
  id.face_height = uniform(rng, 0.92, 1.08);
  id.eye_spacing = uniform(rng, 0.90, 1.12);
  id.eye_size = uniform(rng, 0.85, 1.15);
  id.mouth_width = uniform(rng, 0.85, 1.15);
  id.nose_length = uniform(rng, 0.85, 1.15);
  id.brow_height = uniform(rng, -0.012, 0.012);
  id.skin = hsv(rng, 0.03, 0.10, 0.22, 0.50, 0.62, 0.92);
  id.lip = hsv(rng, 0.96, 1.03, 0.55, 0.80, 0.45, 0.75);
  id.iris = hsv(rng, 0.05, 0.65, 0.30, 0.70, 0.20, 0.45);
  int n_freckles = 5 + static_cast<int>(rng() % 6);
  for (int i = 0; i < n_freckles; ++i) {
    double side = (rng() % 2 == 0) ? -1.0 : 1.0;
    double fx = side * uniform(rng, 0.08, 0.20);
    double fy = uniform(rng, -0.28, -0.10);
    double fr = uniform(rng, 0.008, 0.016);
    id.freckles.emplace_back(fx, fy, fr);
  }
  return id;
}

ToyExpression ToyExpression::sample(std::uint64_t seed) {
  auto rng = make_rng(seed, 0xe4b);
  ToyExpression ex;
  ex.yaw_deg = uniform(rng, -25.0, 25.0);
  ex.pitch_deg = uniform(rng, -15.0, 15.0);
  ex.roll_deg = uniform(rng, -10.0, 10.0);
  ex.mouth_open = (uniform(rng, 0.0, 1.0) < 0.35) ? 0.0 : uniform(rng, 0.15, 1.0);
  ex.eye_open = uniform(rng, 0.30, 1.0);
  ex.brow_raise = uniform(rng, -1.0, 1.0);
  ex.gaze = {uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0)};
  ex.scale_jitter = uniform(rng, 0.92, 1.08);
  ex.shift = {uniform(rng, -0.03, 0.03), uniform(rng, -0.03, 0.03)};
  return ex;
}

ToyFaceModel::ToyFaceModel() : layout_(LandmarkLayout::standard()) {}

Eigen::Matrix3Xd ToyFaceModel::template_points(const ToyIdentity& id,
                                               const ToyExpression& ex) const {
  Eigen::Matrix3Xd pts(3, layout_.num_points());
  auto set_part = [&](const char* name, const Eigen::Matrix3Xd& block) {
    const PartDef& p = layout_.part(name);
    if (block.cols() != p.size()) throw Error("template part size mismatch: " + std::string(name));
    pts.block(0, p.begin, 3, p.size()) = block;
  };

  // Head outline: flat ellipse, z = 0.
  {
    const PartDef& contour = layout_.contour();
    Eigen::Matrix3Xd c(3, contour.size());
    const double ax = 0.30 * id.face_width, ay = 0.38 * id.face_height;
    for (int i = 0; i < contour.size(); ++i) {
      double th = (-90.0 + 360.0 * i / contour.size()) * M_PI / 180.0;
      c.col(i) = Eigen::Vector3d(ax * std::cos(th), ay * std::sin(th), 0.0);
    }
    pts.block(0, contour.begin, 3, contour.size()) = c;
  }

  const double ex_c = 0.115 * id.eye_spacing;  // eye center |x|
  const double ey_c = 0.09;
  const double eye_w = 0.055 * id.eye_size;
  const double eye_hu = 0.028 * id.eye_size * ex.eye_open;
  const double eye_hl = 0.022 * id.eye_size * ex.eye_open;
  auto eye_arc = [&](double cx, double h, double sign) {
    Eigen::Matrix3Xd m(3, 4);
    const double dx[4] = {-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
    const double dy[4] = {0.0, 0.95, 0.95, 0.0};
    for (int i = 0; i < 4; ++i) {
      m.col(i) = Eigen::Vector3d(cx + dx[i] * eye_w, ey_c + sign * dy[i] * h, 0.17);
    }
    return m;
  };
  set_part("left_eye_upper", eye_arc(-ex_c, eye_hu, 1.0));
  set_part("left_eye_lower", eye_arc(-ex_c, eye_hl, -1.0));
  set_part("right_eye_upper", eye_arc(ex_c, eye_hu, 1.0));
  set_part("right_eye_lower", eye_arc(ex_c, eye_hl, -1.0));

  const double brow_y = 0.180 + 0.028 * ex.brow_raise + id.brow_height;
  const double brow_w = 0.062 * id.eye_size;
  auto brow_arc = [&](double cx, double y0) {
    Eigen::Matrix3Xd m(3, 4);
    const double dx[4] = {-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0};
    const double dy[4] = {0.0, 0.012, 0.012, 0.0};
    for (int i = 0; i < 4; ++i) {
      m.col(i) = Eigen::Vector3d(cx + dx[i] * brow_w, y0 + dy[i], 0.16);
    }
    return m;
  };
  set_part("left_brow_upper", brow_arc(-ex_c, brow_y));
  set_part("left_brow_lower", brow_arc(-ex_c, brow_y - 0.014));
  set_part("right_brow_upper", brow_arc(ex_c, brow_y));
  set_part("right_brow_lower", brow_arc(ex_c, brow_y - 0.014));

  {
    Eigen::Matrix3Xd m(3, 4);
    for (int i = 0; i < 4; ++i) {
      double t = i / 3.0;
      m.col(i) = Eigen::Vector3d(0.0, 0.095 - 0.150 * id.nose_length * t, 0.20 + 0.10 * t);
    }
    set_part("nose_bridge", m);
  }
  {
    Eigen::Matrix3Xd m(3, 5);
    const double nb_y = 0.095 - 0.165 * id.nose_length;
    const double dx[5] = {-0.035, -0.018, 0.0, 0.018, 0.035};
    const double dy[5] = {0.010, 0.002, 0.0, 0.002, 0.010};
    for (int i = 0; i < 5; ++i) m.col(i) = Eigen::Vector3d(dx[i], nb_y + dy[i], 0.26);
    set_part("nose_base", m);
  }

  const double mc_y = -0.175;
  const double mw = 0.075 * id.mouth_width;
  {
    Eigen::Matrix3Xd up(3, 5), lo(3, 5);
    const double dx[5] = {-1.0, -0.5, 0.0, 0.5, 1.0};
    const double uy[5] = {0.0, 0.018, 0.022, 0.018, 0.0};
    const double ly[5] = {0.0, 0.020, 0.026, 0.020, 0.0};
    const double ow[5] = {0.0, 0.7, 1.0, 0.7, 0.0};  // openness weight
    for (int i = 0; i < 5; ++i) {
      up.col(i) = Eigen::Vector3d(dx[i] * mw, mc_y + uy[i], 0.22);
      lo.col(i) = Eigen::Vector3d(dx[i] * mw, mc_y - ly[i] - ex.mouth_open * 0.050 * ow[i], 0.22);
    }
    set_part("lip_outer_upper", up);
    set_part("lip_outer_lower", lo);
  }
  {
    Eigen::Matrix3Xd up(3, 3), lo(3, 3);
    const double dx[3] = {-0.6, 0.0, 0.6};
    const double w[3] = {0.5, 1.0, 0.5};
    for (int i = 0; i < 3; ++i) {
      up.col(i) = Eigen::Vector3d(dx[i] * mw, mc_y + 0.006 * ex.mouth_open * w[i], 0.22);
      lo.col(i) = Eigen::Vector3d(dx[i] * mw, mc_y - 0.048 * ex.mouth_open * (0.6 + 0.4 * w[i]), 0.22);
    }
    set_part("lip_inner_upper", up);
    set_part("lip_inner_lower", lo);
  }

  {
    Eigen::Matrix3Xd gl(3, 1), gr(3, 1);
    double gx = ex.gaze.x() * 0.018 * id.eye_size;
    double gy = ex.gaze.y() * 0.010 * id.eye_size;
    gl.col(0) = Eigen::Vector3d(-ex_c + gx, ey_c + gy, 0.18);
    gr.col(0) = Eigen::Vector3d(ex_c + gx, ey_c + gy, 0.18);
    set_part("gaze_left", gl);
    set_part("gaze_right", gr);
  }
  return pts;
}

Eigen::Matrix3Xd ToyFaceModel::canonical_points() const {
  return template_points(ToyIdentity{}, ToyExpression::neutral());
}

LandmarkSet ToyFaceModel::project(const ToyIdentity& id, const ToyExpression& ex) const {
  Eigen::Matrix3Xd p = rotation_from_angles(ex.yaw_deg, ex.pitch_deg, ex.roll_deg) *
                       template_points(id, ex);
  LandmarkSet lms;
  lms.points.resize(p.cols(), 2);
  for (Eigen::Index i = 0; i < p.cols(); ++i) {
    lms.points(i, 0) = 0.5 + p(0, i) * ex.scale_jitter + ex.shift.x();
    lms.points(i, 1) = 0.5 - p(1, i) * ex.scale_jitter + ex.shift.y();
  }
  return lms;
}

torch::Tensor ToyFaceModel::render(const ToyIdentity& id, const ToyExpression& ex,
                                   int resolution) const {
  LandmarkSet lms = project(id, ex);
  const int S = resolution * kSupersample;
  Raster r;
  r.size = static_cast<double>(S);
  const Eigen::Vector3d bg = background_color();
  r.img = cv::Mat(S, S, CV_8UC3, color_of(bg));

  // Face.
  auto contour_pts = r.fixed_all(lms.part_points(layout_.contour()));
  r.fill(contour_pts, id.skin);

  // Freckles move with the head like every other template point.
  {
    Eigen::Matrix3d rot = rotation_from_angles(ex.yaw_deg, ex.pitch_deg, ex.roll_deg);
    for (const auto& f : id.freckles) {
      Eigen::Vector3d p = rot * Eigen::Vector3d(f.x(), f.y(), 0.12);
      Eigen::Vector2d uv(0.5 + p.x() * ex.scale_jitter + ex.shift.x(),
                         0.5 - p.y() * ex.scale_jitter + ex.shift.y());
      r.dot(uv, f.z() * ex.scale_jitter, id.skin * 0.55);
    }
  }

  // Nose.
  r.stroke(r.fixed_all(part_rows(lms, layout_, "nose_bridge")), id.skin * 0.80, 0.008);
  r.stroke(r.fixed_all(part_rows(lms, layout_, "nose_base")), id.skin * 0.80, 0.006);

  const Eigen::Vector3d brow_color(0.13, 0.09, 0.06);
  auto fill_band = [&](const char* upper, const char* lower, const Eigen::Vector3d& color) {
    PointMatrix up = part_rows(lms, layout_, upper);
    PointMatrix lo = part_rows(lms, layout_, lower);
    std::vector<cv::Point> poly;
    for (Eigen::Index i = 0; i < up.rows(); ++i) poly.push_back(r.fixed(up.row(i).transpose()));
    for (Eigen::Index i = lo.rows() - 1; i >= 0; --i) poly.push_back(r.fixed(lo.row(i).transpose()));
    r.fill(poly, color);
  };
  fill_band("left_brow_upper", "left_brow_lower", brow_color);
  fill_band("right_brow_upper", "right_brow_lower", brow_color);

  // Eyes: sclera band, pupil, lash line.
  const Eigen::Vector3d sclera(0.93, 0.93, 0.91);
  const Eigen::Vector3d pupil_color(0.04, 0.04, 0.05);
  const Eigen::Vector3d lash(0.10, 0.08, 0.07);
  auto draw_eye = [&](const char* upper, const char* lower, const char* gaze_part) {
    fill_band(upper, lower, sclera);
    PointMatrix up = part_rows(lms, layout_, upper);
    PointMatrix lo = part_rows(lms, layout_, lower);
    double open_h = std::abs(up(1, 1) - lo(1, 1));
    double rp = 0.016 * id.eye_size * ex.scale_jitter;
    if (open_h > rp * 0.6) {
      Eigen::Vector2d g = part_rows(lms, layout_, gaze_part).row(0).transpose();
      r.dot(g, std::min(rp, open_h * 0.45), pupil_color);
      r.dot(g, std::min(rp, open_h * 0.45) * 0.55, id.iris);
      r.dot(g, std::min(rp, open_h * 0.45) * 0.30, pupil_color);
    }
    r.stroke(r.fixed_all(up), lash, 0.0045);
  };
  draw_eye("left_eye_upper", "left_eye_lower", "gaze_left");
  draw_eye("right_eye_upper", "right_eye_lower", "gaze_right");

  // Mouth.
  fill_band("lip_outer_upper", "lip_outer_lower", id.lip);
  if (ex.mouth_open > 0.05) {
    fill_band("lip_inner_upper", "lip_inner_lower", Eigen::Vector3d(0.12, 0.05, 0.06));
  }

  cv::Mat small;
  cv::resize(r.img, small, cv::Size(resolution, resolution), 0, 0, cv::INTER_AREA);
  cv::Mat f32;
  small.convertTo(f32, CV_32FC3, 1.0 / 127.5, -1.0);
  auto t = torch::from_blob(f32.data, {resolution, resolution, 3}, torch::kFloat32).clone();
  return t.permute({2, 0, 1}).clamp(-1.0, 1.0).contiguous();
}

int generate_toy_dataset(const std::filesystem::path& root, int num_identities,
                         int samples_per_identity, std::uint64_t seed, int resolution) {
  if (num_identities < 1 || samples_per_identity < 1) {
    throw ConfigError("synthetic dataset needs at least one identity and one sample");
  }
  std::filesystem::create_directories(root);
  ToyFaceModel model;
  int written = 0;
  for (int i = 0; i < num_identities; ++i) {
    ToyIdentity ident = ToyIdentity::sample(mix_seed(seed, 0x1d, static_cast<std::uint64_t>(i)));
    for (int s = 0; s < samples_per_identity; ++s) {
      ToyExpression ex =
          ToyExpression::sample(mix_seed(seed, static_cast<std::uint64_t>(i) * 7919 + 13,
                                         static_cast<std::uint64_t>(s)));
      char name[64];
      std::snprintf(name, sizeof(name), "%03d_%03d", i, s);
      auto img = model.render(ident, ex, resolution);
      save_image_tensor(img, root / (std::string(name) + ".png"));
      save_landmarks(model.project(ident, ex), root / (std::string(name) + ".txt"));
      ++written;
    }
  }
  return written;
}

}  // namespace oneshot
