// SPDX-License-Identifier: Apache-2.0
#include "oneshot/parsing.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>

namespace oneshot {

namespace {

// Max-composites a Gaussian stroke around segment (a, b), coordinates in
// array pixel space.
void splat_segment(torch::TensorAccessor<float, 2> ch, int res, Eigen::Vector2d a,
                   Eigen::Vector2d b, double sigma) {
  const double reach = 3.5 * sigma + 1.0;
  const double x_lo = std::min(a.x(), b.x()) - reach, x_hi = std::max(a.x(), b.x()) + reach;
  const double y_lo = std::min(a.y(), b.y()) - reach, y_hi = std::max(a.y(), b.y()) + reach;
  const int x0 = std::max(0, static_cast<int>(std::floor(x_lo)));
  const int x1 = std::min(res - 1, static_cast<int>(std::ceil(x_hi)));
  const int y0 = std::max(0, static_cast<int>(std::floor(y_lo)));
  const int y1 = std::min(res - 1, static_cast<int>(std::ceil(y_hi)));
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      Eigen::Vector2d p(x, y);
      double t = len2 > 1e-12 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
      double d2 = (p - (a + t * ab)).squaredNorm();
      float v = static_cast<float>(std::exp(-d2 * inv_two_sigma2));
      if (v > ch[y][x]) ch[y][x] = v;
    }
  }
}

std::map<std::string, ParsingBackendFactory>& backend_registry() {
  static std::map<std::string, ParsingBackendFactory> reg;
  return reg;
}

std::mutex& registry_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

void ParsingMap::validate() const {
  if (!channels.defined() || channels.dim() != 3) {
    throw DataError("parsing map must be a (K, H, W) tensor");
  }
  const int k = num_channels();
  if (k != 15 && k != 17) {
    throw DataError("parsing map must have 15 or 17 channels, got " + std::to_string(k));
  }
  if (static_cast<int>(names.size()) != k) {
    throw DataError("parsing channel registry size mismatch");
  }
  if (channels.size(1) != channels.size(2)) throw DataError("parsing map must be square");
  float lo = channels.min().item<float>();
  float hi = channels.max().item<float>();
  if (lo < 0.0f || hi > 1.0f + 1e-6f || !torch::isfinite(channels).all().item<bool>()) {
    throw DataError("parsing channels must lie in [0, 1]");
  }
}

ParsingMap render_parsing(const LandmarkSet& landmarks, const LandmarkLayout& layout,
                          int resolution, double stroke_sigma, bool use_gaze) {
  if (stroke_sigma <= 0.0) throw ConfigError("stroke_sigma must be > 0");
  if (landmarks.size() != layout.num_points()) {
    throw DataError("landmark count does not match layout");
  }
  const int k = layout.num_channels(use_gaze);
  ParsingMap out;
  out.channels = torch::zeros({k, resolution, resolution}, torch::kFloat32);
  auto acc = out.channels.accessor<float, 3>();
  for (int c = 0; c < k; ++c) {
    const PartDef& part = layout.part(c);
    out.names.push_back(part.name);
    std::vector<Eigen::Vector2d> pts;
    for (int i = part.begin; i < part.end; ++i) {
      Eigen::Vector2d p = landmarks.point(i);
      if (!p.allFinite()) continue;
      // Normalized [0,1] to array pixel coordinates.
      pts.emplace_back(p.x() * resolution - 0.5, p.y() * resolution - 0.5);
    }
    const int needed = part.kind == PartKind::kPolyline ? 2 : 1;
    if (static_cast<int>(pts.size()) < needed) {
      out.empty_parts.push_back(c);
      continue;
    }
    auto ch = acc[c];
    if (part.kind == PartKind::kPoints || pts.size() == 1) {
      for (const auto& p : pts) splat_segment(ch, resolution, p, p, stroke_sigma);
    } else {
      for (size_t i = 0; i + 1 < pts.size(); ++i) {
        splat_segment(ch, resolution, pts[i], pts[i + 1], stroke_sigma);
      }
      if (part.closed && pts.size() > 2) {
        splat_segment(ch, resolution, pts.back(), pts.front(), stroke_sigma);
      }
    }
  }
  return out;
}

ColorizedParsing colorize(const ParsingMap& parsing, const Palette& palette, double threshold) {
  if (palette.size() != parsing.num_channels()) {
    throw ConfigError("palette has " + std::to_string(palette.size()) + " entries, parsing has " +
                      std::to_string(parsing.num_channels()) + " channels");
  }
  const int res = parsing.resolution();
  auto [max_vals, argmax] = parsing.channels.max(0);
  auto out = torch::empty({3, res, res}, torch::kFloat32);
  auto oacc = out.accessor<float, 3>();
  auto macc = max_vals.accessor<float, 2>();
  auto aacc = argmax.accessor<int64_t, 2>();
  for (int y = 0; y < res; ++y) {
    for (int x = 0; x < res; ++x) {
      const Eigen::Vector3d& c = macc[y][x] > threshold
                                     ? palette.colors[static_cast<size_t>(aacc[y][x])]
                                     : palette.background;
      for (int ch = 0; ch < 3; ++ch) {
        oacc[ch][y][x] = static_cast<float>(c(ch) * 2.0 - 1.0);
      }
    }
  }
  return ColorizedParsing{out, palette};
}

Palette default_palette(const LandmarkLayout& layout, bool use_gaze) {
  Palette p;
  const int k = layout.num_channels(use_gaze);
  for (int i = 0; i < k; ++i) {
    p.names.push_back(layout.part(i).name);
    double h = std::fmod(0.071 + i * 0.61803398875, 1.0) * 6.0;
    double x = 1.0 - std::abs(std::fmod(h, 2.0) - 1.0);
    double r = 0, g = 0, b = 0;
    switch (static_cast<int>(h) % 6) {
      case 0: r = 1; g = x; break;
      case 1: r = x; g = 1; break;
      case 2: g = 1; b = x; break;
      case 3: g = x; b = 1; break;
      case 4: r = x; b = 1; break;
      default: r = 1; b = x; break;
    }
    p.colors.emplace_back(0.15 + 0.85 * r, 0.15 + 0.85 * g, 0.15 + 0.85 * b);
  }
  return p;
}

Palette load_palette(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open palette file: " + path.string());
  Palette p;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string name;
    double r = 0, g = 0, b = 0;
    if (!(ss >> name >> r >> g >> b)) {
      throw DataError("malformed palette row: '" + line + "'");
    }
    p.names.push_back(name);
    p.colors.emplace_back(r / 255.0, g / 255.0, b / 255.0);
  }
  return p;
}

void save_palette(const Palette& palette, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write palette file: " + path.string());
  for (int i = 0; i < palette.size(); ++i) {
    out << palette.names[static_cast<size_t>(i)] << " "
        << std::lround(palette.colors[static_cast<size_t>(i)].x() * 255) << " "
        << std::lround(palette.colors[static_cast<size_t>(i)].y() * 255) << " "
        << std::lround(palette.colors[static_cast<size_t>(i)].z() * 255) << "\n";
  }
}

LandmarkRasterizerBackend::LandmarkRasterizerBackend(const LandmarkLayout& layout, int resolution,
                                                     double stroke_sigma, bool use_gaze)
    : layout_(layout), resolution_(resolution), stroke_sigma_(stroke_sigma), use_gaze_(use_gaze) {}

int LandmarkRasterizerBackend::num_channels() const {
  return layout_.num_channels(use_gaze_);
}

ParsingMap LandmarkRasterizerBackend::encode(const torch::Tensor& /*image*/,
                                             const LandmarkSet* landmarks) const {
  if (landmarks == nullptr) {
    throw DataError("landmark_rasterizer backend requires landmarks");
  }
  return render_parsing(*landmarks, layout_, resolution_, stroke_sigma_, use_gaze_);
}

TorchModuleBackend::TorchModuleBackend(std::string name,
                                       std::shared_ptr<torch::nn::Module> module, Forward forward,
                                       int num_channels, int resolution)
    : name_(std::move(name)),
      module_(std::move(module)),
      forward_(std::move(forward)),
      num_channels_(num_channels),
      resolution_(resolution) {
  if (!module_ || !forward_) {
    throw PluginError("parsing backend '" + name_ + "' unavailable: no module");
  }
  for (auto& p : module_->parameters()) p.set_requires_grad(false);
  module_->eval();
}

ParsingMap TorchModuleBackend::encode(const torch::Tensor& image,
                                      const LandmarkSet* /*landmarks*/) const {
  if (!image.defined()) {
    throw DataError("parsing backend '" + name_ + "' requires an image input");
  }
  torch::NoGradGuard no_grad;
  auto in = image.dim() == 3 ? image.unsqueeze(0) : image;
  auto out = forward_(in);
  if (!out.defined() || out.dim() != 4 || out.size(0) != 1) {
    throw PluginError("parsing backend '" + name_ + "' returned a malformed tensor");
  }
  ParsingMap map;
  map.channels = out.squeeze(0).detach().to(torch::kFloat32).clamp(0.0, 1.0).contiguous();
  if (map.num_channels() != num_channels_ || map.channels.size(1) != resolution_ ||
      map.channels.size(2) != resolution_) {
    throw PluginError("parsing backend '" + name_ + "' violated the (" +
                      std::to_string(num_channels_) + ", " + std::to_string(resolution_) + ", " +
                      std::to_string(resolution_) + ") output contract");
  }
  for (int c = 0; c < map.num_channels(); ++c) {
    map.names.push_back(name_ + ":" + std::to_string(c));
  }
  return map;
}

std::uint64_t TorchModuleBackend::parameter_checksum() const {
  std::uint64_t h = 1469598103934665603ull;
  for (const auto& p : module_->parameters()) {
    auto flat = p.detach().to(torch::kFloat64).contiguous().reshape({-1});
    auto a = flat.accessor<double, 1>();
    for (int64_t i = 0; i < flat.size(0); ++i) {
      std::uint64_t bits;
      double v = a[i];
      std::memcpy(&bits, &v, sizeof(bits));
      h ^= bits;
      h *= 1099511628211ull;
    }
  }
  return h;
}

void register_parsing_backend(const std::string& name, ParsingBackendFactory factory) {
  std::lock_guard<std::mutex> lock(registry_mutex());
  backend_registry()[name] = std::move(factory);
}

std::unique_ptr<ParsingBackend> make_parsing_backend(const std::string& name,
                                                     const LandmarkLayout& layout, int resolution,
                                                     double stroke_sigma, bool use_gaze) {
  if (name == "landmark_rasterizer") {
    return std::make_unique<LandmarkRasterizerBackend>(layout, resolution, stroke_sigma, use_gaze);
  }
  ParsingBackendFactory factory;
  {
    std::lock_guard<std::mutex> lock(registry_mutex());
    auto it = backend_registry().find(name);
    if (it != backend_registry().end()) factory = it->second;
  }
  if (!factory) {
    throw PluginError("parsing backend '" + name + "' unavailable");
  }
  return factory(resolution);
}

}  // namespace oneshot
