// SPDX-License-Identifier: Apache-2.0
#include "oneshot/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>

namespace oneshot {

using nlohmann::json;

void LossWeights::validate() const {
  for (double v : {lambda_app, alpha_r, alpha_p, alpha_g, alpha_i}) {
    if (!(v >= 0.0)) throw ConfigError("loss weights must be >= 0");
  }
}

void DataConfig::validate() const {
  if (resolution < 16 || !is_power_of_two(resolution)) {
    throw ConfigError("resolution must be a power of two >= 16");
  }
  if (p_swap < 0.0 || p_swap > 1.0) throw ConfigError("p_swap must be in [0,1]");
  if (split_ratio <= 0.0 || split_ratio >= 1.0) throw ConfigError("split_ratio must be in (0,1)");
}

std::vector<int> NetConfig::encoder_channels(int resolution) const {
  const int depth = log2_exact(resolution);
  std::vector<int> chans;
  chans.reserve(static_cast<size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    int base = i < static_cast<int>(encoder_channels_256.size())
                   ? encoder_channels_256[static_cast<size_t>(i)]
                   : encoder_channels_256.back();
    chans.push_back(std::max(2, base / channel_divisor));
  }
  return chans;
}

std::vector<int> NetConfig::decoder_channels(int resolution) const {
  // Mirror of the encoder with the outermost block dropped; the final
  // projection back to RGB is separate.
  auto enc = encoder_channels(resolution);
  std::vector<int> dec(enc.begin() + 1, enc.end());
  std::reverse(dec.begin(), dec.end());
  return dec;
}

std::vector<int> NetConfig::composer_channels(int resolution) const {
  auto enc = encoder_channels(resolution);
  std::reverse(enc.begin(), enc.end());
  return enc;
}

void NetConfig::validate(int resolution) const {
  if (encoder_channels_256.empty()) throw ConfigError("encoder channel schedule is empty");
  for (int c : encoder_channels_256) {
    if (c <= 0) throw ConfigError("channel widths must be positive");
  }
  if (channel_divisor < 1) throw ConfigError("channel_divisor must be >= 1");
  const int depth = log2_exact(resolution);
  if (spade_on_last < 1 || spade_on_last > depth) {
    throw ConfigError("spade_on_last must be in [1, log2(resolution)]");
  }
  if (disc_scales < 1) throw ConfigError("disc_scales must be >= 1");
}

void OptimConfig::validate() const {
  if (lr_generator <= 0.0 || lr_discriminator <= 0.0) {
    throw ConfigError("learning rates must be > 0");
  }
  for (double b : {adam_beta1, adam_beta2}) {
    if (b < 0.0 || b >= 1.0) throw ConfigError("adam betas must be in [0, 1)");
  }
  if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
  if (max_steps < 0 || fusion_steps < 0) throw ConfigError("step counts must be >= 0");
}

void ExperimentConfig::validate() const {
  data.validate();
  net.validate(data.resolution);
  weights.validate();
  optim.validate();
  if (k_shot < 0) throw ConfigError("k_shot must be >= 0");
  if (checkpoint_every < 1 || log_every < 1) {
    throw ConfigError("checkpoint_every and log_every must be >= 1");
  }
}

std::string ExperimentConfig::to_json() const {
  json j;
  j["data"] = {{"resolution", data.resolution},
               {"use_gaze", data.use_gaze},
               {"p_swap", data.p_swap},
               {"split_ratio", data.split_ratio},
               {"seed", data.seed}};
  j["net"] = {{"encoder_channels_256", net.encoder_channels_256},
              {"channel_divisor", net.channel_divisor},
              {"spade_on_last", net.spade_on_last},
              {"spade_hidden_256", net.spade_hidden_256},
              {"disc_scales", net.disc_scales},
              {"disc_base_channels_256", net.disc_base_channels_256},
              {"concat_pyramid", net.concat_pyramid},
              {"with_fusion", net.with_fusion}};
  j["weights"] = {{"lambda_app", weights.lambda_app},
                  {"alpha_r", weights.alpha_r},
                  {"alpha_p", weights.alpha_p},
                  {"alpha_g", weights.alpha_g},
                  {"alpha_i", weights.alpha_i}};
  j["optim"] = {{"lr_generator", optim.lr_generator},
                {"lr_discriminator", optim.lr_discriminator},
                {"adam_beta1", optim.adam_beta1},
                {"adam_beta2", optim.adam_beta2},
                {"batch_size", optim.batch_size},
                {"max_steps", optim.max_steps},
                {"fusion_steps", optim.fusion_steps},
                {"seed", optim.seed}};
  j["plugins"] = {{"perceptual", plugins.perceptual},
                  {"identity", plugins.identity},
                  {"seed", plugins.seed},
                  {"perceptual_layer_weights", plugins.perceptual_layer_weights}};
  j["checkpoint_every"] = checkpoint_every;
  j["log_every"] = log_every;
  j["k_shot"] = k_shot;
  return j.dump(2);
}

ExperimentConfig ExperimentConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid config json: ") + e.what());
  }
  ExperimentConfig c;
  try {
    const auto& d = j.at("data");
    c.data.resolution = d.at("resolution").get<int>();
    c.data.use_gaze = d.at("use_gaze").get<bool>();
    c.data.p_swap = d.at("p_swap").get<double>();
    c.data.split_ratio = d.at("split_ratio").get<double>();
    c.data.seed = d.at("seed").get<std::uint64_t>();
    const auto& n = j.at("net");
    c.net.encoder_channels_256 = n.at("encoder_channels_256").get<std::vector<int>>();
    c.net.channel_divisor = n.at("channel_divisor").get<int>();
    c.net.spade_on_last = n.at("spade_on_last").get<int>();
    c.net.spade_hidden_256 = n.at("spade_hidden_256").get<int>();
    c.net.disc_scales = n.at("disc_scales").get<int>();
    c.net.disc_base_channels_256 = n.at("disc_base_channels_256").get<int>();
    c.net.concat_pyramid = n.at("concat_pyramid").get<bool>();
    c.net.with_fusion = n.at("with_fusion").get<bool>();
    const auto& w = j.at("weights");
    c.weights.lambda_app = w.at("lambda_app").get<double>();
    c.weights.alpha_r = w.at("alpha_r").get<double>();
    c.weights.alpha_p = w.at("alpha_p").get<double>();
    c.weights.alpha_g = w.at("alpha_g").get<double>();
    c.weights.alpha_i = w.at("alpha_i").get<double>();
    const auto& o = j.at("optim");
    c.optim.lr_generator = o.at("lr_generator").get<double>();
    c.optim.lr_discriminator = o.at("lr_discriminator").get<double>();
    c.optim.adam_beta1 = o.at("adam_beta1").get<double>();
    c.optim.adam_beta2 = o.at("adam_beta2").get<double>();
    c.optim.batch_size = o.at("batch_size").get<int>();
    c.optim.max_steps = o.at("max_steps").get<int>();
    c.optim.fusion_steps = o.at("fusion_steps").get<int>();
    c.optim.seed = o.at("seed").get<std::uint64_t>();
    const auto& p = j.at("plugins");
    c.plugins.perceptual = p.at("perceptual").get<std::string>();
    c.plugins.identity = p.at("identity").get<std::string>();
    c.plugins.seed = p.at("seed").get<std::uint64_t>();
    c.plugins.perceptual_layer_weights = p.at("perceptual_layer_weights").get<std::vector<double>>();
    c.checkpoint_every = j.at("checkpoint_every").get<int>();
    c.log_every = j.at("log_every").get<int>();
    c.k_shot = j.at("k_shot").get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config json missing field: ") + e.what());
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::config_hash() const {
  // FNV-1a over the canonical echo.
  const std::string text = to_json();
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf, 12);
}

}  // namespace oneshot
