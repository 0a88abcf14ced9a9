#include "mlvse/data/corpus.hpp"

#include <algorithm>
#include <set>

#include "mlvse/error.hpp"

namespace mlvse {

std::string to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "train";
}

Split parse_split(const std::string& s) {
  if (s == "train") return Split::Train;
  if (s == "val") return Split::Val;
  if (s == "test") return Split::Test;
  throw ParseError("unknown split '" + s + "' (expected train, val or test)");
}

Corpus::Corpus(std::vector<std::string> image_ids, std::vector<Split> splits, MatrixF features,
               std::vector<Caption> captions)
    : image_ids_(std::move(image_ids)),
      splits_(std::move(splits)),
      features_(std::move(features)),
      captions_(std::move(captions)) {
  index_.reserve(image_ids_.size());
  for (std::size_t i = 0; i < image_ids_.size(); ++i) {
    if (!index_.emplace(image_ids_[i], i).second) throw ConfigError("duplicate image id '" + image_ids_[i] + "'");
  }
  validate();
}

void Corpus::validate() const {
  if (splits_.size() != image_ids_.size())
    throw DimensionError("split labels (" + std::to_string(splits_.size()) + ") do not match image count (" +
                         std::to_string(image_ids_.size()) + ")");
  if (features_.rows() != image_ids_.size())
    throw DimensionError("feature rows (" + std::to_string(features_.rows()) + ") do not match image count (" +
                         std::to_string(image_ids_.size()) + ")");
  for (std::size_t i = 0; i < captions_.size(); ++i) {
    const auto& c = captions_[i];
    if (c.image >= image_ids_.size())
      throw ConfigError("caption " + std::to_string(i) + " references missing image " + std::to_string(c.image));
    if (c.tokens.empty()) throw DegenerateError("caption " + std::to_string(i) + " has no tokens");
    if (c.language.empty()) throw ConfigError("caption " + std::to_string(i) + " has no language");
  }
}

std::optional<std::size_t> Corpus::find_image(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<Language> Corpus::languages(std::optional<Split> split) const {
  std::set<Language> langs;
  for (const auto& c : captions_)
    if (!split || splits_[c.image] == *split) langs.insert(c.language);
  return {langs.begin(), langs.end()};
}

bool Corpus::has_language(const Language& lang, std::optional<Split> split) const {
  return std::any_of(captions_.begin(), captions_.end(), [&](const Caption& c) {
    return c.language == lang && (!split || splits_[c.image] == *split);
  });
}

std::vector<std::size_t> Corpus::images_in(Split split) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < splits_.size(); ++i)
    if (splits_[i] == split) out.push_back(i);
  return out;
}

std::vector<std::size_t> Corpus::captions_in(Split split, const Language& lang) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < captions_.size(); ++i)
    if (captions_[i].language == lang && splits_[captions_[i].image] == split) out.push_back(i);
  return out;
}

Corpus merge_corpora(const Corpus& base, const Corpus& extra) {
  if (base.image_ids() != extra.image_ids() || base.image_splits() != extra.image_splits() ||
      !(base.features() == extra.features()))
    throw ConfigError("merge_corpora: corpora do not describe the same images");
  const auto base_eval_langs = [&] {
    std::set<Language> langs;
    for (const auto& c : base.captions())
      if (base.split_of(c.image) != Split::Train) langs.insert(c.language);
    return langs;
  }();
  std::vector<Caption> captions = base.captions();
  for (const auto& c : extra.captions()) {
    if (extra.split_of(c.image) == Split::Train || !base_eval_langs.contains(c.language)) captions.push_back(c);
  }
  return base.with_captions(std::move(captions));
}

}  // namespace mlvse
