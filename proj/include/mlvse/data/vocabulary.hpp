#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mlvse/data/corpus.hpp"

namespace mlvse {

inline constexpr std::size_t kDefaultMinCount = 4;
inline const std::string kUnkToken = "UNK";

// One index space shared by every language. Tokens are counted jointly over
// the training split; tokens seen fewer than min_count times map to UNK.
class Vocabulary {
 public:
  static Vocabulary build(const Corpus& corpus, std::size_t min_count = kDefaultMinCount);

  std::size_t size() const { return index_to_token_.size(); }
  std::size_t unk_index() const { return unk_index_; }
  std::size_t min_count() const { return min_count_; }

  std::size_t index_of(const std::string& token) const;
  bool contains(const std::string& token) const { return token_to_index_.contains(token); }
  const std::string& token(std::size_t index) const { return index_to_token_.at(index); }
  const std::vector<std::string>& tokens() const { return index_to_token_; }

  std::vector<std::size_t> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const std::size_t> indices) const;

  // Raw (pre-UNK) training-split token sets per language.
  const std::map<Language, std::set<std::string>>& language_tokens() const { return language_tokens_; }

  // FNV-1a over the ordered token list; identifies the index space in checkpoints.
  std::uint64_t hash() const;

 private:
  std::unordered_map<std::string, std::size_t> token_to_index_;
  std::vector<std::string> index_to_token_;
  std::size_t unk_index_ = 0;
  std::size_t min_count_ = kDefaultMinCount;
  std::map<Language, std::set<std::string>> language_tokens_;
};

// |A ∩ B| / |A ∪ B| over the raw token sets of two languages.
double jaccard_overlap(const Vocabulary& vocab, const Language& a, const Language& b);

struct VocabUnionStats {
  std::size_t total_tokens = 0;  // sum of per-language vocabulary sizes
  std::size_t union_tokens = 0;  // size of the union of those vocabularies
  double reduction = 0.0;        // 1 - union / total
};

// Per-language vocabularies are thresholded on that language's own training
// counts; UNK is not counted.
VocabUnionStats vocab_union_stats(const Corpus& corpus, std::size_t min_count = kDefaultMinCount);

}  // namespace mlvse
