#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include "mlvse/model/params.hpp"

namespace mlvse {

// A checkpoint is two files: <stem>.manifest (text: configuration, vocabulary
// hash and one "block <name> <rows> <cols>" line per parameter block) and
// <stem>.bin (float32 little-endian values of every block in manifest order).
struct Checkpoint {
  ModelParams<float> params;
  std::uint64_t vocab_hash = 0;
  std::size_t min_count = 0;
};

void save_checkpoint(const std::filesystem::path& stem, const ModelParams<float>& params, std::uint64_t vocab_hash,
                     std::size_t min_count);
Checkpoint load_checkpoint(const std::filesystem::path& stem);

}  // namespace mlvse
