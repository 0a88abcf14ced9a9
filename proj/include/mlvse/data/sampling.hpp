#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mlvse/data/corpus.hpp"

namespace mlvse {

// Keeps exactly one randomly chosen training caption per (image, language) for
// the selected languages. Other languages and the val/test splits are untouched.
Corpus sample_one_caption_per_language(const Corpus& corpus, const std::vector<Language>& languages,
                                       std::uint64_t seed);

enum class HalfMode { HalfMono, Overlap, Disjoint };

HalfMode parse_half_mode(const std::string& s);

// Splits the training images into two seeded random halves A and B (A gets the
// extra image when the count is odd):
//   HalfMono  - A with lang_a captions only
//   Overlap   - A with lang_a and lang_b captions
//   Disjoint  - A with lang_a captions plus B with lang_b captions
// All other training captions are dropped; val/test are untouched.
Corpus split_half_overlap_disjoint(const Corpus& corpus, HalfMode mode, const Language& lang_a,
                                   const Language& lang_b, std::uint64_t seed);

// Drops every caption whose language is not listed.
Corpus restrict_languages(const Corpus& corpus, const std::vector<Language>& languages);

}  // namespace mlvse
