#include "mlvse/data/corpus_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "mlvse/error.hpp"

namespace mlvse {

namespace {

static_assert(std::endian::native == std::endian::little, "feature files assume a little-endian host");

constexpr char kMagic[4] = {'I', 'M', 'G', 'F'};

void put_u32(std::string& out, std::uint32_t v) {
  char buf[4];
  std::memcpy(buf, &v, 4);
  out.append(buf, 4);
}

std::uint32_t get_u32(const std::string& in, std::size_t offset) {
  std::uint32_t v;
  std::memcpy(&v, in.data() + offset, 4);
  return v;
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> split_tokens(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

}  // namespace

CorpusPaths CorpusPaths::in_directory(const std::filesystem::path& dir) {
  return {dir / "captions.tsv", dir / "features.bin", dir / "index.txt"};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("short write to '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

Corpus load_corpus(const CorpusPaths& paths) {
  // index
  std::vector<std::string> ids;
  std::unordered_map<std::string, std::size_t> id_row;
  {
    std::istringstream in(read_file(paths.index));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) throw ParseError(paths.index.string() + ":" + std::to_string(lineno) + ": empty image id");
      if (!id_row.emplace(line, ids.size()).second)
        throw ParseError(paths.index.string() + ":" + std::to_string(lineno) + ": duplicate image id '" + line + "'");
      ids.push_back(line);
    }
  }

  // features
  MatrixF features;
  {
    const std::string bytes = read_file(paths.features);
    const auto where = [&](std::size_t off) { return paths.features.string() + "@" + std::to_string(off) + ": "; };
    if (bytes.size() < 12) throw ParseError(where(0) + "truncated header");
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) throw ParseError(where(0) + "bad magic (expected IMGF)");
    const std::uint32_t n = get_u32(bytes, 4);
    const std::uint32_t d = get_u32(bytes, 8);
    if (n != ids.size())
      throw ParseError(where(4) + "feature count " + std::to_string(n) + " disagrees with index file (" +
                       std::to_string(ids.size()) + " ids)");
    const std::size_t expected = 12 + std::size_t{n} * d * sizeof(float);
    if (bytes.size() != expected)
      throw ParseError(where(12) + "payload is " + std::to_string(bytes.size()) + " bytes, expected " +
                       std::to_string(expected));
    std::vector<float> values(std::size_t{n} * d);
    std::memcpy(values.data(), bytes.data() + 12, values.size() * sizeof(float));
    features = MatrixF::from_values(n, d, std::move(values));
  }

  // captions
  std::vector<Caption> captions;
  std::vector<std::optional<Split>> splits(ids.size());
  {
    std::istringstream in(read_file(paths.captions));
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const auto where = paths.captions.string() + ":" + std::to_string(lineno) + ": ";
      if (line.empty()) throw ParseError(where + "empty line");
      auto fields = split_on(line, '\t');
      if (fields.size() != 4) throw ParseError(where + "expected 4 tab-separated fields, got " +
                                               std::to_string(fields.size()));
      Split split;
      try {
        split = parse_split(fields[0]);
      } catch (const ParseError& e) {
        throw ParseError(where + e.what());
      }
      auto it = id_row.find(fields[1]);
      if (it == id_row.end()) throw ParseError(where + "unknown image id '" + fields[1] + "'");
      if (fields[2].empty()) throw ParseError(where + "empty language code");
      auto tokens = split_tokens(fields[3]);
      if (tokens.empty()) throw ParseError(where + "caption has no tokens");
      auto& s = splits[it->second];
      if (s && *s != split) throw ParseError(where + "image '" + fields[1] + "' appears in two splits");
      s = split;
      captions.push_back(Caption{it->second, fields[2], std::move(tokens)});
    }
  }
  if (captions.empty()) throw EmptyCorpusError("caption file '" + paths.captions.string() + "' holds no captions");

  std::vector<Split> image_splits;
  image_splits.reserve(ids.size());
  for (const auto& s : splits) image_splits.push_back(s.value_or(Split::Train));
  return Corpus(std::move(ids), std::move(image_splits), std::move(features), std::move(captions));
}

void save_corpus(const Corpus& corpus, const CorpusPaths& paths) {
  std::string index;
  for (const auto& id : corpus.image_ids()) index += id + "\n";

  std::string features(kMagic, 4);
  put_u32(features, static_cast<std::uint32_t>(corpus.image_count()));
  put_u32(features, static_cast<std::uint32_t>(corpus.feature_dim()));
  const auto* raw = reinterpret_cast<const char*>(corpus.features().data());
  features.append(raw, corpus.features().size() * sizeof(float));

  std::string captions;
  for (const auto& c : corpus.captions()) {
    captions += to_string(corpus.split_of(c.image));
    captions += '\t';
    captions += corpus.image_ids()[c.image];
    captions += '\t';
    captions += c.language;
    captions += '\t';
    for (std::size_t i = 0; i < c.tokens.size(); ++i) {
      if (i) captions += ' ';
      captions += c.tokens[i];
    }
    captions += '\n';
  }

  write_file_atomic(paths.index, index);
  write_file_atomic(paths.features, features);
  write_file_atomic(paths.captions, captions);
}

}  // namespace mlvse
