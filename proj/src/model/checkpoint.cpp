#include "mlvse/model/checkpoint.hpp"

#include <cstring>
#include <sstream>

#include "mlvse/data/corpus_io.hpp"
#include "mlvse/error.hpp"

namespace mlvse {

namespace {

std::filesystem::path with_suffix(std::filesystem::path stem, const char* suffix) {
  stem += suffix;
  return stem;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& stem, const ModelParams<float>& params, std::uint64_t vocab_hash,
                     std::size_t min_count) {
  const auto& c = params.config;
  std::ostringstream manifest;
  manifest << "mlvse-checkpoint 1\n"
           << "vocab_size " << c.vocab_size << "\n"
           << "embed_dim " << c.embed_dim << "\n"
           << "hidden_dim " << c.hidden_dim << "\n"
           << "image_dim " << c.image_dim << "\n"
           << "image_bias " << (c.image_bias ? 1 : 0) << "\n"
           << "seed " << c.seed << "\n"
           << "min_count " << min_count << "\n"
           << "vocab_hash " << std::hex << vocab_hash << std::dec << "\n";
  std::string payload;
  for (const auto& b : params.blocks) {
    manifest << "block " << b.name << " " << b.value.rows() << " " << b.value.cols() << "\n";
    payload.append(reinterpret_cast<const char*>(b.value.data()), b.value.size() * sizeof(float));
  }
  write_file_atomic(with_suffix(stem, ".bin"), payload);
  write_file_atomic(with_suffix(stem, ".manifest"), manifest.str());
}

Checkpoint load_checkpoint(const std::filesystem::path& stem) {
  const auto manifest_path = with_suffix(stem, ".manifest");
  std::istringstream in(read_file(manifest_path));
  const std::string payload = read_file(with_suffix(stem, ".bin"));

  Checkpoint ck;
  auto& cfg = ck.params.config;
  std::string line;
  std::size_t lineno = 0;
  std::size_t offset = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    const auto where = manifest_path.string() + ":" + std::to_string(lineno) + ": ";
    if (key == "mlvse-checkpoint") {
      int version = 0;
      ls >> version;
      if (version != 1) throw ParseError(where + "unsupported checkpoint version");
      header = true;
    } else if (key == "vocab_size") {
      ls >> cfg.vocab_size;
    } else if (key == "embed_dim") {
      ls >> cfg.embed_dim;
    } else if (key == "hidden_dim") {
      ls >> cfg.hidden_dim;
    } else if (key == "image_dim") {
      ls >> cfg.image_dim;
    } else if (key == "image_bias") {
      int v = 1;
      ls >> v;
      cfg.image_bias = v != 0;
    } else if (key == "seed") {
      ls >> cfg.seed;
    } else if (key == "min_count") {
      ls >> ck.min_count;
    } else if (key == "vocab_hash") {
      ls >> std::hex >> ck.vocab_hash >> std::dec;
    } else if (key == "block") {
      std::string name;
      std::size_t rows = 0, cols = 0;
      ls >> name >> rows >> cols;
      const std::size_t bytes = rows * cols * sizeof(float);
      if (offset + bytes > payload.size()) throw ParseError(where + "payload too short for block '" + name + "'");
      std::vector<float> values(rows * cols);
      std::memcpy(values.data(), payload.data() + offset, bytes);
      offset += bytes;
      ck.params.blocks.emplace_back(name, MatrixF::from_values(rows, cols, std::move(values)));
    } else {
      throw ParseError(where + "unknown manifest key '" + key + "'");
    }
    if (!ls && !ls.eof()) throw ParseError(where + "malformed value");
  }
  if (!header) throw ParseError(manifest_path.string() + ": missing 'mlvse-checkpoint' header");
  if (offset != payload.size()) throw ParseError("checkpoint payload has " + std::to_string(payload.size() - offset) +
                                                 " trailing bytes");
  const auto shapes = block_shapes(cfg);
  if (ck.params.blocks.size() != kBlockCount) throw ParseError("checkpoint has the wrong number of blocks");
  for (std::size_t i = 0; i < kBlockCount; ++i) {
    const auto& b = ck.params.blocks[i];
    if (b.name != kBlockNames[i] || b.value.rows() != shapes[i].first || b.value.cols() != shapes[i].second)
      throw ParseError("checkpoint block " + std::to_string(i) + " ('" + b.name + "', " + b.value.shape_string() +
                       ") does not match the configured shapes");
  }
  return ck;
}

}  // namespace mlvse
