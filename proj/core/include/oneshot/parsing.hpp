// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <torch/torch.h>

#include <Eigen/Dense>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "oneshot/landmarks.hpp"

namespace oneshot {

// K-channel rasterized boundary map, values in [0, 1]. K is 15, or 17 with
// the two gaze channels enabled.
struct ParsingMap {
  torch::Tensor channels;               // (K, H, W) float32
  std::vector<std::string> names;       // channel registry
  std::vector<int> empty_parts;         // parts skipped for lack of points

  int num_channels() const { return static_cast<int>(channels.size(0)); }
  int resolution() const { return static_cast<int>(channels.size(1)); }
  void validate() const;
};

struct Palette {
  std::vector<std::string> names;
  std::vector<Eigen::Vector3d> colors;  // [0, 1] rgb
  Eigen::Vector3d background{0.05, 0.05, 0.08};

  int size() const { return static_cast<int>(colors.size()); }
};

struct ColorizedParsing {
  torch::Tensor pixels;  // (3, H, W) in [-1, 1]
  Palette palette;
};

// Rasterizes each part's polyline as a Gaussian-blurred stroke with peak 1
// into its own channel. Parts whose usable (finite) point count is too small
// (< 2 for polylines, < 1 for dots) yield an all-zero channel and are listed
// in `empty_parts`.
ParsingMap render_parsing(const LandmarkSet& landmarks, const LandmarkLayout& layout,
                          int resolution, double stroke_sigma, bool use_gaze);

inline double default_stroke_sigma(int resolution) { return resolution / 64.0; }

// Per-pixel color of the strongest channel above `threshold`, background
// elsewhere. Throws ConfigError when the palette size differs from K.
ColorizedParsing colorize(const ParsingMap& parsing, const Palette& palette,
                          double threshold = 0.25);

Palette default_palette(const LandmarkLayout& layout, bool use_gaze);
Palette load_palette(const std::filesystem::path& path);   // K lines: "name r g b" (0..255)
void save_palette(const Palette& palette, const std::filesystem::path& path);

// Shape-encoder backend: produces the parsing map either from landmarks (the
// default rasterizer) or from an external frozen model adapter. Backends are
// never trained; encode() must not build autograd graphs.
class ParsingBackend {
 public:
  virtual ~ParsingBackend() = default;
  virtual std::string name() const = 0;
  virtual int num_channels() const = 0;
  virtual ParsingMap encode(const torch::Tensor& image, const LandmarkSet* landmarks) const = 0;
  // Checksum over backend parameters; constant across training by contract.
  virtual std::uint64_t parameter_checksum() const { return 0; }
};

class LandmarkRasterizerBackend final : public ParsingBackend {
 public:
  LandmarkRasterizerBackend(const LandmarkLayout& layout, int resolution, double stroke_sigma,
                            bool use_gaze);
  std::string name() const override { return "landmark_rasterizer"; }
  int num_channels() const override;
  ParsingMap encode(const torch::Tensor& image, const LandmarkSet* landmarks) const override;

 private:
  const LandmarkLayout& layout_;
  int resolution_;
  double stroke_sigma_;
  bool use_gaze_;
};

// Adapter for an external frozen torch module mapping (1,3,H,W) -> (1,K,H,W).
// The module's parameters are frozen on construction; the output contract
// (channel count, spatial size, value range) is validated on every call.
class TorchModuleBackend final : public ParsingBackend {
 public:
  using Forward = std::function<torch::Tensor(const torch::Tensor&)>;

  TorchModuleBackend(std::string name, std::shared_ptr<torch::nn::Module> module, Forward forward,
                     int num_channels, int resolution);
  std::string name() const override { return name_; }
  int num_channels() const override { return num_channels_; }
  ParsingMap encode(const torch::Tensor& image, const LandmarkSet* landmarks) const override;
  std::uint64_t parameter_checksum() const override;

 private:
  std::string name_;
  std::shared_ptr<torch::nn::Module> module_;
  Forward forward_;
  int num_channels_;
  int resolution_;
};

using ParsingBackendFactory = std::function<std::unique_ptr<ParsingBackend>(int resolution)>;

// Name-keyed backend resolution; "landmark_rasterizer" is built in. Unknown
// names raise PluginError naming the backend.
void register_parsing_backend(const std::string& name, ParsingBackendFactory factory);
std::unique_ptr<ParsingBackend> make_parsing_backend(const std::string& name,
                                                     const LandmarkLayout& layout, int resolution,
                                                     double stroke_sigma, bool use_gaze);

}  // namespace oneshot
