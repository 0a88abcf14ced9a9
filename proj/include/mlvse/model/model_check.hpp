#pragma once

#include <cstddef>
#include <cstdint>

#include "mlvse/numerics/gradcheck.hpp"
#include "mlvse/objective/ranking_loss.hpp"

namespace mlvse {

struct ModelCheckOptions {
  std::size_t vocab_size = 20;
  std::size_t embed_dim = 8;
  std::size_t hidden_dim = 12;
  std::size_t image_dim = 16;
  std::size_t batch = 4;
  std::size_t max_length = 5;
  // Caption-caption loss instead of caption-image.
  bool caption_pairs = false;
  LossConfig loss;
  std::uint64_t seed = 0;
  GradCheckOptions check;
};

// Runs the full forward/backward pass (embedding, GRU, image projection,
// normalization, cosine similarity, ranking loss) in double precision on a
// random batch and checks every parameter block by finite differences.
GradCheckReport model_gradient_check(const ModelCheckOptions& opts = {});

}  // namespace mlvse
