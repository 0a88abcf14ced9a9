#include "mlvse/cli/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "mlvse/error.hpp"

namespace mlvse::cli {

namespace {

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

[[noreturn]] void key_error(const std::string& source, const std::string& key, const std::string& what) {
  throw ConfigError(source + ": key '" + key + "': " + what);
}

std::size_t get_count(const nlohmann::json& v, const std::string& source, const std::string& key) {
  if (!v.is_number_unsigned()) key_error(source, key, "expected a non-negative integer");
  return v.get<std::size_t>();
}

double get_real(const nlohmann::json& v, const std::string& source, const std::string& key) {
  if (!v.is_number()) key_error(source, key, "expected a number");
  return v.get<double>();
}

std::string get_string(const nlohmann::json& v, const std::string& source, const std::string& key) {
  if (!v.is_string()) key_error(source, key, "expected a string");
  return v.get<std::string>();
}

bool get_bool(const nlohmann::json& v, const std::string& source, const std::string& key) {
  if (!v.is_boolean()) key_error(source, key, "expected true or false");
  return v.get<bool>();
}

}  // namespace

nlohmann::json parse_json_document(std::string_view text, const std::string& source) {
  try {
    return nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const auto [line, col] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ConfigError(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

TrainRunConfig train_config_from_json(const nlohmann::json& doc, const std::string& source, TrainRunConfig cfg) {
  if (!doc.is_object()) throw ConfigError(source + ": top level must be a JSON object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "corpus") {
      cfg.corpus = get_string(v, source, key);
    } else if (key == "languages") {
      if (!v.is_array()) key_error(source, key, "expected an array of language codes");
      cfg.train.languages.clear();
      for (const auto& l : v) cfg.train.languages.push_back(get_string(l, source, key));
    } else if (key == "c2c") {
      cfg.train.c2c = get_bool(v, source, key);
    } else if (key == "p_c2i") {
      cfg.train.p_c2i = get_real(v, source, key);
    } else if (key == "batch_size") {
      cfg.train.batch_size = get_count(v, source, key);
    } else if (key == "lr") {
      cfg.train.lr = get_real(v, source, key);
    } else if (key == "margin") {
      cfg.train.loss.margin = get_real(v, source, key);
    } else if (key == "loss") {
      try {
        cfg.train.loss.variant = parse_loss_variant(get_string(v, source, key));
      } catch (const ConfigError& e) {
        key_error(source, key, e.what());
      }
    } else if (key == "patience") {
      cfg.train.patience = get_count(v, source, key);
    } else if (key == "eval_every") {
      if (v.is_number_unsigned()) {
        apply_eval_every(cfg.train, std::to_string(v.get<std::size_t>()));
      } else {
        try {
          apply_eval_every(cfg.train, get_string(v, source, key));
        } catch (const ConfigError& e) {
          key_error(source, key, e.what());
        }
      }
    } else if (key == "max_iterations") {
      cfg.train.max_iterations = get_count(v, source, key);
    } else if (key == "seed") {
      cfg.train.seed = get_count(v, source, key);
    } else if (key == "embed_dim") {
      cfg.embed_dim = get_count(v, source, key);
    } else if (key == "hidden_dim") {
      cfg.hidden_dim = get_count(v, source, key);
    } else if (key == "image_bias") {
      cfg.image_bias = get_bool(v, source, key);
    } else if (key == "min_count") {
      cfg.min_count = get_count(v, source, key);
    } else {
      key_error(source, key, "unknown key");
    }
  }
  return cfg;
}

void apply_eval_every(TrainConfig& config, const std::string& value) {
  if (value == "auto") {
    config.cadence = EvalCadence::Auto;
  } else if (value == "epoch") {
    config.cadence = EvalCadence::PerEpoch;
  } else {
    std::size_t n = 0;
    std::istringstream in(value);
    if (!(in >> n) || !in.eof() || n == 0)
      throw ConfigError("eval_every must be 'auto', 'epoch' or a positive iteration count, got '" + value + "'");
    config.cadence = EvalCadence::EveryN;
    config.eval_interval = n;
  }
}

std::string eval_every_string(const TrainConfig& config) {
  switch (config.cadence) {
    case EvalCadence::Auto: return "auto";
    case EvalCadence::PerEpoch: return "epoch";
    case EvalCadence::EveryN: return std::to_string(config.eval_interval);
  }
  return "auto";
}

nlohmann::json TrainRunConfig::to_json() const {
  return {{"corpus", corpus.string()},
          {"languages", train.languages},
          {"c2c", train.c2c},
          {"p_c2i", train.p_c2i},
          {"batch_size", train.batch_size},
          {"lr", train.lr},
          {"margin", train.loss.margin},
          {"loss", to_string(train.loss.variant)},
          {"patience", train.patience},
          {"eval_every", eval_every_string(train)},
          {"eval_interval", train.eval_interval},
          {"max_iterations", train.max_iterations},
          {"seed", train.seed},
          {"embed_dim", embed_dim},
          {"hidden_dim", hidden_dim},
          {"image_bias", image_bias},
          {"min_count", min_count}};
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, ','))
    if (!cur.empty()) out.push_back(cur);
  return out;
}

std::vector<std::size_t> parse_size_list(const std::string& s) {
  std::vector<std::size_t> out;
  for (const auto& item : split_list(s)) {
    std::size_t v = 0;
    std::istringstream in(item);
    if (!(in >> v) || !in.eof()) throw ConfigError("expected a comma-separated list of integers, got '" + s + "'");
    out.push_back(v);
  }
  return out;
}

std::filesystem::path default_output_dir() {
  if (const char* env = std::getenv("MLVSE_OUT"); env && *env) return env;
  return "mlvse_out";
}

}  // namespace mlvse::cli
