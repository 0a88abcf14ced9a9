#include "mlvse/data/vocabulary.hpp"

#include <algorithm>

#include "mlvse/error.hpp"

namespace mlvse {

Vocabulary Vocabulary::build(const Corpus& corpus, std::size_t min_count) {
  std::map<std::string, std::size_t> counts;
  Vocabulary v;
  v.min_count_ = min_count;
  bool any_train = false;
  for (const auto& c : corpus.captions()) {
    if (corpus.split_of(c.image) != Split::Train) continue;
    any_train = true;
    auto& lang_set = v.language_tokens_[c.language];
    for (const auto& t : c.tokens) {
      ++counts[t];
      lang_set.insert(t);
    }
  }
  if (!any_train) throw EmptyCorpusError("cannot build a vocabulary: the training split has no captions");

  // std::map iterates in lexicographic order.
  for (const auto& [tok, n] : counts) {
    if (n < min_count || tok == kUnkToken) continue;
    v.token_to_index_.emplace(tok, v.index_to_token_.size());
    v.index_to_token_.push_back(tok);
  }
  v.unk_index_ = v.index_to_token_.size();
  v.token_to_index_.emplace(kUnkToken, v.unk_index_);
  v.index_to_token_.push_back(kUnkToken);
  return v;
}

std::size_t Vocabulary::index_of(const std::string& token) const {
  auto it = token_to_index_.find(token);
  return it == token_to_index_.end() ? unk_index_ : it->second;
}

std::vector<std::size_t> Vocabulary::encode(std::span<const std::string> tokens) const {
  if (tokens.empty()) throw DegenerateError("cannot encode an empty token sequence");
  std::vector<std::size_t> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(index_of(t));
  return out;
}

std::vector<std::string> Vocabulary::decode(std::span<const std::size_t> indices) const {
  std::vector<std::string> out;
  out.reserve(indices.size());
  for (auto i : indices) {
    if (i >= size()) throw VocabularyError("index " + std::to_string(i) + " outside vocabulary of size " +
                                           std::to_string(size()));
    out.push_back(index_to_token_[i]);
  }
  return out;
}

std::uint64_t Vocabulary::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](unsigned char c) {
    h ^= c;
    h *= 1099511628211ULL;
  };
  for (const auto& t : index_to_token_) {
    for (unsigned char c : t) mix(c);
    mix(0);
  }
  return h;
}

double jaccard_overlap(const Vocabulary& vocab, const Language& a, const Language& b) {
  const auto& sets = vocab.language_tokens();
  auto ia = sets.find(a);
  auto ib = sets.find(b);
  if (ia == sets.end()) throw UnknownLanguageError("language '" + a + "' not present in the vocabulary");
  if (ib == sets.end()) throw UnknownLanguageError("language '" + b + "' not present in the vocabulary");
  const auto& sa = ia->second;
  const auto& sb = ib->second;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.contains(t) ? 1 : 0;
  const std::size_t uni = sa.size() + sb.size() - inter;
  return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

VocabUnionStats vocab_union_stats(const Corpus& corpus, std::size_t min_count) {
  std::map<Language, std::map<std::string, std::size_t>> counts;
  for (const auto& c : corpus.captions()) {
    if (corpus.split_of(c.image) != Split::Train) continue;
    auto& lc = counts[c.language];
    for (const auto& t : c.tokens) ++lc[t];
  }
  if (counts.empty()) throw EmptyCorpusError("vocab_union_stats: the training split has no captions");
  VocabUnionStats stats;
  std::set<std::string> joint;
  for (const auto& [lang, lc] : counts) {
    for (const auto& [tok, n] : lc) {
      if (n < min_count || tok == kUnkToken) continue;
      ++stats.total_tokens;
      joint.insert(tok);
    }
  }
  stats.union_tokens = joint.size();
  stats.reduction = stats.total_tokens == 0
                        ? 0.0
                        : 1.0 - static_cast<double>(stats.union_tokens) / static_cast<double>(stats.total_tokens);
  return stats;
}

}  // namespace mlvse
