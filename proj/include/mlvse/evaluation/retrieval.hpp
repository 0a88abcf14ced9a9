#pragma once

#include <compare>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mlvse/data/corpus.hpp"
#include "mlvse/data/vocabulary.hpp"
#include "mlvse/model/params.hpp"
#include "mlvse/numerics/matrix.hpp"

namespace mlvse {

enum class Direction { ImageToText, TextToImage };

std::string to_string(Direction d);
Direction parse_direction(const std::string& s);

// Percentage of queries whose top-k candidates (descending similarity, ties
// broken by ascending candidate index) contain at least one correct candidate.
// scores is queries x candidates; truth[q] lists the correct candidates of q.
double recall_at_k(const MatrixF& scores, const std::vector<std::vector<std::size_t>>& truth, std::size_t k);

// 0-based rank of the best-placed correct candidate for every query.
std::vector<std::size_t> first_hit_ranks(const MatrixF& scores, const std::vector<std::vector<std::size_t>>& truth);

struct MetricKey {
  Language language;
  Direction direction = Direction::TextToImage;
  std::size_t k = 10;

  auto operator<=>(const MetricKey&) const = default;
};

struct MetricValue {
  double mean = 0.0;
  double stddev = 0.0;
  std::vector<double> samples;  // one per seed
};

struct RetrievalReport {
  std::map<MetricKey, MetricValue> metrics;
  std::size_t seeds = 1;

  double get(const Language& lang, Direction dir, std::size_t k) const;
  // Sum of the mean recalls over every (language, direction, k).
  double recall_sum() const;
  bool same_protocol(const RetrievalReport& other) const;
};

struct RetrievalProtocol {
  std::vector<Language> languages;
  std::vector<Direction> directions{Direction::ImageToText, Direction::TextToImage};
  std::vector<std::size_t> ks{1, 5, 10};
};

// Encodes every image and caption of `split` once, then scores I->T (images
// against that language's captions, any of the image's captions counts as a
// hit) and T->I (captions against images, one correct image) for each language.
RetrievalReport evaluate_model(const ModelParams<float>& params, const Vocabulary& vocab, const Corpus& corpus,
                               Split split, const RetrievalProtocol& protocol);

// Per-metric mean and sample standard deviation across seed reports.
RetrievalReport aggregate_seeds(const std::vector<RetrievalReport>& reports);

// Line-delimited JSON: {"language","direction","k","mean","std","seeds"} per metric.
std::string report_to_jsonl(const RetrievalReport& report);

// Aligned text table with one row per language: I->T R@k... then T->I R@k...
std::string report_to_table(const RetrievalReport& report);

}  // namespace mlvse
