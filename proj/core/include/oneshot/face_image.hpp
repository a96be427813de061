// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <torch/torch.h>

#include <filesystem>

#include "oneshot/common.hpp"

namespace oneshot {

// Aligned RGB face raster: float32 (3, H, W) with H = W = resolution and
// values in [-1, 1].
struct FaceImage {
  torch::Tensor pixels;

  static FaceImage from_pixels(torch::Tensor pixels);
  static FaceImage load(const std::filesystem::path& path, int resolution);

  int resolution() const { return static_cast<int>(pixels.size(1)); }
  void save(const std::filesystem::path& path) const;
  void validate() const;
};

// Raw image I/O on unconstrained sizes; values in [-1, 1], RGB, (3, H, W).
torch::Tensor load_image_tensor(const std::filesystem::path& path);
void save_image_tensor(const torch::Tensor& chw, const std::filesystem::path& path);

// Tiles a row-major list of (3, H, W) tensors into one (3, rows*H, cols*W)
// image. Missing cells (undefined tensors) render as black.
torch::Tensor tile_images(const std::vector<torch::Tensor>& cells, int rows, int cols);

}  // namespace oneshot
