#include "mlvse/data/pairs.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "mlvse/error.hpp"

namespace mlvse {

CaptionPairSet generate_c2c_pairs(const Corpus& corpus, const std::vector<Language>& languages,
                                  std::optional<Split> split) {
  const std::set<Language> selected(languages.begin(), languages.end());
  if (selected.size() < 2)
    throw ConfigError("c2c pairs need at least 2 distinct languages, got " + std::to_string(selected.size()));
  const std::vector<Language> langs(selected.begin(), selected.end());
  std::map<Language, std::size_t> slot;
  for (std::size_t i = 0; i < langs.size(); ++i) slot[langs[i]] = i;

  // per image, per language slot: caption ids in corpus order
  std::vector<std::vector<std::vector<std::size_t>>> by_image(
      corpus.image_count(), std::vector<std::vector<std::size_t>>(langs.size()));
  const auto& caps = corpus.captions();
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (split && corpus.split_of(caps[i].image) != *split) continue;
    auto it = slot.find(caps[i].language);
    if (it == slot.end()) continue;
    by_image[caps[i].image][it->second].push_back(i);
  }

  CaptionPairSet out;
  for (const auto& per_lang : by_image) {
    for (std::size_t m = 0; m < langs.size(); ++m)
      for (std::size_t n = m + 1; n < langs.size(); ++n)
        for (auto a : per_lang[m])
          for (auto b : per_lang[n]) out.pairs.emplace_back(a, b);
  }
  return out;
}

}  // namespace mlvse
