#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlvse/data/corpus.hpp"
#include "mlvse/numerics/matrix.hpp"

namespace mlvse::synth {

enum class Regime { Translation, Comparable, Disjoint };

std::string to_string(Regime r);
Regime parse_regime(const std::string& s);

struct SynthConfig {
  std::size_t n_train = 500;
  std::size_t n_val = 100;
  std::size_t n_test = 100;
  std::vector<Language> languages{"en", "de"};
  std::size_t concept_dim = 16;
  std::size_t concepts_per_image = 4;
  std::size_t tokens_per_concept = 3;
  std::size_t image_dim = 64;
  double noise = 0.1;
  // 0 selects the regime default: 1 for translation, 5 otherwise.
  std::size_t captions_per_image = 0;
  Regime regime = Regime::Translation;
  std::uint64_t seed = 0;

  void validate() const;
  std::size_t resolved_captions_per_image() const;
};

// Latent structure shared by every corpus generated from one seed. Image
// content and per-language lexicons depend only on the seed (and, for a
// lexicon, the language code), so corpora of different regimes or language
// sets drawn from the same seed describe the same images with the same words.
class WorldModel {
 public:
  explicit WorldModel(const SynthConfig& config);

  const SynthConfig& config() const { return config_; }
  std::size_t image_count() const { return concepts_.size(); }
  const std::vector<std::size_t>& concepts(std::size_t image) const { return concepts_[image]; }
  const std::vector<double>& weights(std::size_t image) const { return weights_[image]; }
  const MatrixD& projection() const { return projection_; }
  const MatrixF& features() const { return features_; }
  Split split_of(std::size_t image) const;
  std::string image_id(std::size_t image) const;

  // lexicon(lang)[concept] lists that concept's surface forms.
  const std::vector<std::vector<std::string>>& lexicon(const Language& lang) const;
  // Inverse lexicon lookup; nullopt for tokens outside the language.
  std::optional<std::size_t> concept_of(const Language& lang, const std::string& token) const;
  // Per-language order of concept slots.
  const std::vector<std::size_t>& slot_order(const Language& lang) const;

  // Verbalizes `mentioned` (a subset of the image's concepts) in `lang`.
  std::vector<std::string> realize(std::size_t image, const std::vector<std::size_t>& mentioned,
                                   const Language& lang, std::uint64_t stream) const;

 private:
  struct LanguageModel {
    std::vector<std::vector<std::string>> lexicon;
    std::unordered_map<std::string, std::size_t> inverse;
    std::vector<std::size_t> slots;
  };
  const LanguageModel& language(const Language& lang) const;

  SynthConfig config_;
  std::vector<std::vector<std::size_t>> concepts_;
  std::vector<std::vector<double>> weights_;
  MatrixD projection_;
  MatrixF features_;
  std::map<Language, LanguageModel> languages_;
};

// Builds a corpus in the configured regime:
//   translation - every caption tuple mentions all of the image's concepts,
//                 verbalized once per language
//   comparable  - each caption independently mentions m-1 of the m concepts
//   disjoint    - comparable captions, but training images are partitioned
//                 across languages and captioned in one language only
// Val/test images are captioned in every language.
Corpus generate(const SynthConfig& config);
Corpus generate(const WorldModel& world, Regime regime, const std::vector<Language>& languages,
                std::size_t captions_per_image);

// Retrieval ceiling of the synthetic test split: images are decoded back to
// concept space through the true projection and matched against each
// caption's true concept set. Returns the mean R@k over languages and both
// retrieval directions.
double oracle_recall_bound(const SynthConfig& config, std::size_t k = 10);

// Mixes a 64-bit seed with a tag; used to split independent random streams.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);
std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag);

}  // namespace mlvse::synth
