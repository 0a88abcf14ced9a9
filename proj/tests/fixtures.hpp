#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "mlvse/data/corpus.hpp"

namespace fixtures {

inline std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

struct CaptionSpec {
  std::size_t image;
  std::string language;
  std::string text;
};

// Images img0..img{n-1}, all in `split` unless listed in `splits`; feature row i
// is (i, i + 0.5).
inline mlvse::Corpus make_corpus(std::size_t n_images, const std::vector<CaptionSpec>& captions,
                                 std::vector<mlvse::Split> splits = {}) {
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n_images; ++i) ids.push_back("img" + std::to_string(i));
  if (splits.empty()) splits.assign(n_images, mlvse::Split::Train);
  mlvse::MatrixF features(n_images, 2);
  for (std::size_t i = 0; i < n_images; ++i) {
    features(i, 0) = static_cast<float>(i);
    features(i, 1) = static_cast<float>(i) + 0.5f;
  }
  std::vector<mlvse::Caption> caps;
  for (const auto& c : captions) caps.push_back(mlvse::Caption{c.image, c.language, words(c.text)});
  return mlvse::Corpus(ids, splits, features, caps);
}

}  // namespace fixtures
