// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "oneshot/common.hpp"

namespace oneshot {

// Balancing weights of the composite objective:
//   total = reenact + lambda_app * app_recons
//   reenact = alpha_r * reconstruct + alpha_p * perceptual
//           + alpha_g * gan + alpha_i * id
struct LossWeights {
  double lambda_app = 25.0;
  double alpha_r = 25.0;
  double alpha_p = 1.0;
  double alpha_g = 1.0;
  double alpha_i = 1.0;

  void validate() const;
};

struct DataConfig {
  int resolution = 64;
  bool use_gaze = false;
  double p_swap = 0.5;       // contour resampling probability during training
  double split_ratio = 0.8;  // fraction of identities assigned to train
  std::uint64_t seed = 7;

  void validate() const;
};

// Channel schedules are stated at the reference scale (256 px input) and
// derived for smaller working resolutions by truncating to depth = log2(res)
// and dividing widths by `channel_divisor`.
struct NetConfig {
  std::vector<int> encoder_channels_256 = {64, 128, 256, 512, 1024, 1024, 1024, 1024};
  int channel_divisor = 8;  // 1 reproduces the reference scale
  int spade_on_last = 4;
  int spade_hidden_256 = 128;
  int disc_scales = 2;      // 3 at the reference scale
  int disc_base_channels_256 = 64;
  bool concat_pyramid = true;  // multi-scale appearance injection ("no concat" ablation: false)
  bool with_fusion = true;

  // Derived schedules for a working resolution.
  std::vector<int> encoder_channels(int resolution) const;
  std::vector<int> decoder_channels(int resolution) const;   // appearance decoder
  std::vector<int> composer_channels(int resolution) const;  // reenactment decoder modules
  int spade_hidden(int) const { return std::max(2, spade_hidden_256 / channel_divisor); }
  int disc_base_channels(int) const { return std::max(2, disc_base_channels_256 / channel_divisor); }

  void validate(int resolution) const;
};

struct OptimConfig {
  double lr_generator = 1e-4;
  double lr_discriminator = 5e-5;
  double adam_beta1 = 0.0;
  double adam_beta2 = 0.999;
  int batch_size = 8;
  int max_steps = 2000;
  int fusion_steps = 400;  // second phase length; 0 disables fusion training
  std::uint64_t seed = 7;

  void validate() const;
};

struct PluginConfig {
  std::string perceptual = "random_pyramid";  // frozen feature pyramid
  std::string identity = "random_projection"; // frozen embedding network
  std::uint64_t seed = 99;                    // init seed for the frozen plugins
  std::vector<double> perceptual_layer_weights = {0.25, 0.5, 1.0};
};

struct ExperimentConfig {
  DataConfig data;
  NetConfig net;
  LossWeights weights;
  OptimConfig optim;
  PluginConfig plugins;
  int checkpoint_every = 500;
  int log_every = 25;
  int k_shot = 0;  // 0 = unrestricted; k > 0 limits references per identity

  void validate() const;
  std::string to_json() const;                       // full echo, stable key order
  static ExperimentConfig from_json(const std::string& text);
  std::string config_hash() const;                   // short hex digest of the echo
};

}  // namespace oneshot
