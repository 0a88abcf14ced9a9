#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "mlvse/data/vocabulary.hpp"
#include "mlvse/training/trainer.hpp"

namespace mlvse::cli {

// Everything `train` needs, as read from a JSON config file and then
// overridden by flags.
struct TrainRunConfig {
  std::filesystem::path corpus;
  std::size_t embed_dim = 300;
  std::size_t hidden_dim = 1024;
  bool image_bias = true;
  std::size_t min_count = kDefaultMinCount;
  TrainConfig train;

  nlohmann::json to_json() const;
};

// Parses a JSON document. Syntax errors are reported as
// "<source>:<line>:<column>: ..." and unknown keys or wrong types as
// "<source>: key '<name>': ...", both as ConfigError.
nlohmann::json parse_json_document(std::string_view text, const std::string& source);

// Recognized keys: corpus, languages, c2c, p_c2i, batch_size, lr, margin,
// loss, patience, eval_every ("auto", "epoch" or an iteration count),
// max_iterations, seed, embed_dim, hidden_dim, image_bias, min_count.
TrainRunConfig train_config_from_json(const nlohmann::json& doc, const std::string& source,
                                      TrainRunConfig base = {});

void apply_eval_every(TrainConfig& config, const std::string& value);
std::string eval_every_string(const TrainConfig& config);

std::vector<std::string> split_list(const std::string& s);
std::vector<std::size_t> parse_size_list(const std::string& s);

// MLVSE_OUT when set, otherwise "mlvse_out".
std::filesystem::path default_output_dir();

}  // namespace mlvse::cli
