#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mlvse/error.hpp"
#include "mlvse/numerics/param_block.hpp"

namespace mlvse {

struct ModelConfig {
  std::size_t vocab_size = 0;
  std::size_t embed_dim = 300;
  std::size_t hidden_dim = 1024;
  std::size_t image_dim = 2048;
  bool image_bias = true;
  std::uint64_t seed = 0;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Index of each parameter block inside ModelParams::blocks.
enum BlockId : std::size_t {
  kEmbedding,
  kUpdateInput,
  kUpdateRecurrent,
  kUpdateBias,
  kResetInput,
  kResetRecurrent,
  kResetBias,
  kCandidateInput,
  kCandidateRecurrent,
  kCandidateBias,
  kImageProjection,
  kImageBias,
  kBlockCount
};

inline constexpr std::array<const char*, kBlockCount> kBlockNames = {
    "embedding",          "gru.update.input",    "gru.update.recurrent", "gru.update.bias",
    "gru.reset.input",    "gru.reset.recurrent", "gru.reset.bias",       "gru.candidate.input",
    "gru.candidate.recurrent", "gru.candidate.bias", "image.projection",   "image.bias"};

inline bool is_text_block(std::size_t id) { return id < kImageProjection; }

// All trainable parameters: one shared caption encoder (embedding + GRU) and
// one image projection. Row-vector convention: h' = x W + h U + b.
template <typename T>
struct ModelParams {
  ModelConfig config;
  std::vector<ParamBlock<T>> blocks;

  ParamBlock<T>& operator[](BlockId id) { return blocks[id]; }
  const ParamBlock<T>& operator[](BlockId id) const { return blocks[id]; }

  void zero_grad() {
    for (auto& b : blocks) b.zero_grad();
  }

  template <typename U>
  ModelParams<U> cast() const {
    ModelParams<U> out;
    out.config = config;
    for (const auto& b : blocks) out.blocks.push_back(b.template cast<U>());
    return out;
  }

  std::vector<ParamBlock<T>*> block_pointers(bool include_image_bias = true) {
    std::vector<ParamBlock<T>*> out;
    for (std::size_t i = 0; i < blocks.size(); ++i)
      if (i != kImageBias || include_image_bias) out.push_back(&blocks[i]);
    return out;
  }
};

inline std::vector<std::pair<std::size_t, std::size_t>> block_shapes(const ModelConfig& c) {
  const auto e = c.embed_dim, h = c.hidden_dim;
  return {{c.vocab_size, e}, {e, h}, {h, h}, {1, h}, {e, h}, {h, h}, {1, h},
          {e, h},          {h, h}, {1, h}, {c.image_dim, h}, {1, h}};
}

// Weights and embeddings uniform in [-0.1, 0.1], biases zero.
template <typename T>
ModelParams<T> init_params(const ModelConfig& config) {
  if (config.vocab_size == 0 || config.embed_dim == 0 || config.hidden_dim == 0 || config.image_dim == 0)
    throw ConfigError("model dimensions must be positive (vocab " + std::to_string(config.vocab_size) + ", embed " +
                      std::to_string(config.embed_dim) + ", hidden " + std::to_string(config.hidden_dim) +
                      ", image " + std::to_string(config.image_dim) + ")");
  ModelParams<T> p;
  p.config = config;
  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> uni(-0.1, 0.1);
  const auto shapes = block_shapes(config);
  for (std::size_t i = 0; i < kBlockCount; ++i) {
    Matrix<T> v(shapes[i].first, shapes[i].second);
    const bool bias = i == kUpdateBias || i == kResetBias || i == kCandidateBias || i == kImageBias;
    if (!bias)
      for (auto& x : v.values()) x = static_cast<T>(uni(rng));
    p.blocks.emplace_back(kBlockNames[i], std::move(v));
  }
  return p;
}

}  // namespace mlvse
