#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "mlvse/data/corpus.hpp"

namespace mlvse {

// On-disk corpus:
//   captions  UTF-8, one line per caption: split \t image_id \t language \t tokens...
//   features  "IMGF", u32 N, u32 D, then N*D little-endian float32, row-major
//   index     N lines, line i = image_id of feature row i
// Images without captions load with the train split.
struct CorpusPaths {
  std::filesystem::path captions;
  std::filesystem::path features;
  std::filesystem::path index;

  // <dir>/captions.tsv, <dir>/features.bin, <dir>/index.txt
  static CorpusPaths in_directory(const std::filesystem::path& dir);
};

Corpus load_corpus(const CorpusPaths& paths);
void save_corpus(const Corpus& corpus, const CorpusPaths& paths);

// Writes to a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);
std::string read_file(const std::filesystem::path& path);

}  // namespace mlvse
