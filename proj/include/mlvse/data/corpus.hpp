#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlvse/numerics/matrix.hpp"

namespace mlvse {

enum class Split { Train, Val, Test };

std::string to_string(Split s);
Split parse_split(const std::string& s);

using Language = std::string;

struct Caption {
  std::size_t image = 0;  // row into Corpus::features
  Language language;
  std::vector<std::string> tokens;

  friend bool operator==(const Caption&, const Caption&) = default;
};

// Images with precomputed feature vectors plus the captions that describe them.
// A caption's id is its position in `captions`.
class Corpus {
 public:
  Corpus() = default;
  Corpus(std::vector<std::string> image_ids, std::vector<Split> splits, MatrixF features,
         std::vector<Caption> captions);

  const std::vector<std::string>& image_ids() const { return image_ids_; }
  const std::vector<Split>& image_splits() const { return splits_; }
  const MatrixF& features() const { return features_; }
  const std::vector<Caption>& captions() const { return captions_; }

  std::size_t image_count() const { return image_ids_.size(); }
  std::size_t feature_dim() const { return features_.cols(); }
  Split split_of(std::size_t image) const { return splits_[image]; }
  Split caption_split(std::size_t caption) const { return splits_[captions_[caption].image]; }

  std::optional<std::size_t> find_image(const std::string& id) const;

  // Sorted, de-duplicated languages, optionally restricted to one split.
  std::vector<Language> languages(std::optional<Split> split = std::nullopt) const;
  bool has_language(const Language& lang, std::optional<Split> split = std::nullopt) const;

  std::vector<std::size_t> images_in(Split split) const;
  std::vector<std::size_t> captions_in(Split split, const Language& lang) const;

  // New corpus with the same images and only the captions accepted by `keep`.
  template <typename Pred>
  Corpus filter_captions(Pred keep) const {
    std::vector<Caption> kept;
    for (std::size_t i = 0; i < captions_.size(); ++i)
      if (keep(i, captions_[i])) kept.push_back(captions_[i]);
    return Corpus(image_ids_, splits_, features_, std::move(kept));
  }

  Corpus with_captions(std::vector<Caption> captions) const {
    return Corpus(image_ids_, splits_, features_, std::move(captions));
  }

  friend bool operator==(const Corpus& a, const Corpus& b) {
    return a.image_ids_ == b.image_ids_ && a.splits_ == b.splits_ && a.features_ == b.features_ &&
           a.captions_ == b.captions_;
  }

 private:
  void validate() const;

  std::vector<std::string> image_ids_;
  std::vector<Split> splits_;
  MatrixF features_;
  std::vector<Caption> captions_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Adds `extra`'s captions to `base`. Both corpora must hold the same images.
// Training captions of `extra` are always added; its val/test captions only
// for languages that `base` does not already evaluate on.
Corpus merge_corpora(const Corpus& base, const Corpus& extra);

}  // namespace mlvse
