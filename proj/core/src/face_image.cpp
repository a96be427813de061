// SPDX-License-Identifier: Apache-2.0
#include "oneshot/face_image.hpp"

#include <opencv2/imgcodecs.hpp>
#include <opencv2/imgproc.hpp>

namespace oneshot {

namespace {

cv::Mat tensor_to_mat8(const torch::Tensor& chw) {
  auto t = chw.detach().to(torch::kFloat32).contiguous();
  const int h = static_cast<int>(t.size(1));
  const int w = static_cast<int>(t.size(2));
  auto hwc = t.permute({1, 2, 0}).contiguous();
  cv::Mat f32(h, w, CV_32FC3, hwc.data_ptr<float>());
  cv::Mat scaled = (f32 + 1.0f) * 127.5f;
  cv::Mat u8;
  scaled.convertTo(u8, CV_8UC3);
  cv::Mat bgr;
  cv::cvtColor(u8, bgr, cv::COLOR_RGB2BGR);
  return bgr;
}

}  // namespace

FaceImage FaceImage::from_pixels(torch::Tensor pixels) {
  FaceImage img{std::move(pixels)};
  img.validate();
  return img;
}

void FaceImage::validate() const {
  if (!pixels.defined() || pixels.dim() != 3 || pixels.size(0) != 3) {
    throw DataError("face image must be a (3, H, W) tensor");
  }
  if (pixels.size(1) != pixels.size(2)) {
    throw DataError("face image must be square, got " + std::to_string(pixels.size(1)) + "x" +
                    std::to_string(pixels.size(2)));
  }
  if (pixels.scalar_type() != torch::kFloat32) {
    throw DataError("face image must be float32");
  }
  if (!torch::isfinite(pixels).all().item<bool>()) {
    throw DataError("face image contains non-finite values");
  }
  float lo = pixels.min().item<float>();
  float hi = pixels.max().item<float>();
  if (lo < -1.0f - 1e-5f || hi > 1.0f + 1e-5f) {
    throw DataError("face image values outside [-1, 1]: min " + std::to_string(lo) + " max " +
                    std::to_string(hi));
  }
}

FaceImage FaceImage::load(const std::filesystem::path& path, int resolution) {
  auto t = load_image_tensor(path);
  if (t.size(1) != resolution || t.size(2) != resolution) {
    throw DataError("image " + path.string() + " is " + std::to_string(t.size(2)) + "x" +
                    std::to_string(t.size(1)) + ", expected " + std::to_string(resolution) + "x" +
                    std::to_string(resolution));
  }
  return from_pixels(std::move(t));
}

void FaceImage::save(const std::filesystem::path& path) const {
  save_image_tensor(pixels, path);
}

torch::Tensor load_image_tensor(const std::filesystem::path& path) {
  cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
  if (bgr.empty()) throw DataError("cannot read image: " + path.string());
  cv::Mat rgb;
  cv::cvtColor(bgr, rgb, cv::COLOR_BGR2RGB);
  cv::Mat f32;
  rgb.convertTo(f32, CV_32FC3, 1.0 / 127.5, -1.0);
  auto t = torch::from_blob(f32.data, {f32.rows, f32.cols, 3}, torch::kFloat32).clone();
  return t.permute({2, 0, 1}).clamp(-1.0, 1.0).contiguous();
}

void save_image_tensor(const torch::Tensor& chw, const std::filesystem::path& path) {
  if (!chw.defined() || chw.dim() != 3 || chw.size(0) != 3) {
    throw DataError("expected a (3, H, W) tensor to save");
  }
  if (!path.parent_path().empty()) std::filesystem::create_directories(path.parent_path());
  if (!cv::imwrite(path.string(), tensor_to_mat8(chw.clamp(-1.0, 1.0)))) {
    throw DataError("cannot write image: " + path.string());
  }
}

torch::Tensor tile_images(const std::vector<torch::Tensor>& cells, int rows, int cols) {
  if (rows <= 0 || cols <= 0 || cells.empty()) throw DataError("empty image grid");
  int h = 0, w = 0;
  for (const auto& c : cells) {
    if (c.defined()) {
      h = static_cast<int>(c.size(1));
      w = static_cast<int>(c.size(2));
      break;
    }
  }
  if (h == 0) throw DataError("image grid has no defined cells");
  auto grid = torch::full({3, rows * h, cols * w}, -1.0f);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      size_t i = static_cast<size_t>(r) * static_cast<size_t>(cols) + static_cast<size_t>(c);
      if (i >= cells.size() || !cells[i].defined()) continue;
      grid.slice(1, r * h, (r + 1) * h).slice(2, c * w, (c + 1) * w) = cells[i];
    }
  }
  return grid;
}

}  // namespace oneshot
