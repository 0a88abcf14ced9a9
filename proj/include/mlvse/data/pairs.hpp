#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "mlvse/data/corpus.hpp"

namespace mlvse {

// Cross-language caption pairs describing the same image (the c2c dataset).
struct CaptionPairSet {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;

  std::size_t size() const { return pairs.size(); }
  bool empty() const { return pairs.empty(); }
};

// For every image and every unordered pair of distinct selected languages
// (m, n) with m < n, emits the Cartesian product C_m x C_n of that image's
// captions. Order: image index, then language pair, then caption order.
// Only captions from `split` are used (all splits when nullopt).
CaptionPairSet generate_c2c_pairs(const Corpus& corpus, const std::vector<Language>& languages,
                                  std::optional<Split> split = Split::Train);

}  // namespace mlvse
