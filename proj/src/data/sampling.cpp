#include "mlvse/data/sampling.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <set>

#include "mlvse/error.hpp"

namespace mlvse {

Corpus sample_one_caption_per_language(const Corpus& corpus, const std::vector<Language>& languages,
                                       std::uint64_t seed) {
  const std::set<Language> selected(languages.begin(), languages.end());
  const auto& caps = corpus.captions();

  // image -> language -> caption ids (training split, selected languages)
  std::vector<std::map<Language, std::vector<std::size_t>>> groups(corpus.image_count());
  for (std::size_t i = 0; i < caps.size(); ++i) {
    if (corpus.split_of(caps[i].image) == Split::Train && selected.contains(caps[i].language))
      groups[caps[i].image][caps[i].language].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<bool> keep(caps.size(), true);
  for (std::size_t img = 0; img < corpus.image_count(); ++img) {
    if (corpus.split_of(img) != Split::Train) continue;
    for (const auto& lang : selected) {
      auto it = groups[img].find(lang);
      if (it == groups[img].end())
        throw MissingCaptionError("image '" + corpus.image_ids()[img] + "' has no training caption in '" + lang + "'");
      const auto& ids = it->second;
      std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
      const std::size_t chosen = pick(rng);
      for (std::size_t k = 0; k < ids.size(); ++k) keep[ids[k]] = (k == chosen);
    }
  }
  return corpus.filter_captions([&](std::size_t i, const Caption&) { return keep[i]; });
}

HalfMode parse_half_mode(const std::string& s) {
  if (s == "half-mono") return HalfMode::HalfMono;
  if (s == "overlap") return HalfMode::Overlap;
  if (s == "disjoint") return HalfMode::Disjoint;
  throw ConfigError("unknown half-split mode '" + s + "' (expected half-mono, overlap or disjoint)");
}

Corpus split_half_overlap_disjoint(const Corpus& corpus, HalfMode mode, const Language& lang_a,
                                   const Language& lang_b, std::uint64_t seed) {
  if (!corpus.has_language(lang_a, Split::Train))
    throw ConfigError("language '" + lang_a + "' has no training captions");
  if (mode != HalfMode::HalfMono) {
    if (lang_a == lang_b) throw ConfigError("overlap/disjoint splits need two different languages");
    if (!corpus.has_language(lang_b, Split::Train))
      throw ConfigError("language '" + lang_b + "' has no training captions");
  }

  auto train = corpus.images_in(Split::Train);
  std::mt19937_64 rng(seed);
  std::shuffle(train.begin(), train.end(), rng);
  const std::size_t half = (train.size() + 1) / 2;
  std::vector<int> side(corpus.image_count(), -1);  // 0 = half A, 1 = half B
  for (std::size_t i = 0; i < train.size(); ++i) side[train[i]] = i < half ? 0 : 1;

  return corpus.filter_captions([&](std::size_t, const Caption& c) {
    if (corpus.split_of(c.image) != Split::Train) return true;
    const int s = side[c.image];
    switch (mode) {
      case HalfMode::HalfMono: return s == 0 && c.language == lang_a;
      case HalfMode::Overlap: return s == 0 && (c.language == lang_a || c.language == lang_b);
      case HalfMode::Disjoint: return (s == 0 && c.language == lang_a) || (s == 1 && c.language == lang_b);
    }
    return false;
  });
}

Corpus restrict_languages(const Corpus& corpus, const std::vector<Language>& languages) {
  const std::set<Language> keep(languages.begin(), languages.end());
  return corpus.filter_captions([&](std::size_t, const Caption& c) { return keep.contains(c.language); });
}

}  // namespace mlvse
