#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mlvse/data/corpus.hpp"
#include "mlvse/data/corpus_io.hpp"
#include "mlvse/data/sampling.hpp"
#include "mlvse/evaluation/retrieval.hpp"
#include "mlvse/synth/generator.hpp"
#include "mlvse/training/trainer.hpp"

namespace mlvse::experiments {

// The two caption collections every recipe draws from. Both describe the same
// images: `translation` holds one caption per image in each of en/de/fr/cs,
// `comparable` holds several independent en/de captions per image.
enum class Source { Translation, Comparable };

std::string to_string(Source s);

struct SourceCorpora {
  Corpus translation;
  Corpus comparable;

  const Corpus& get(Source s) const { return s == Source::Translation ? translation : comparable; }
};

struct HalfSpec {
  HalfMode mode = HalfMode::Overlap;
  Language lang_a;
  Language lang_b;
};

// How an arm's training corpus is derived from the sources. Operations apply
// in field order: restrict, keep one caption per image, halve, then merge.
struct CorpusDirective {
  Source source = Source::Comparable;
  std::vector<Language> languages;
  std::vector<Language> one_caption;
  std::optional<HalfSpec> half;
  std::vector<CorpusDirective> merge;
};

struct Arm {
  std::string label;
  CorpusDirective corpus;
  std::vector<Language> train_languages;
  bool c2c = false;
  // Trains one model per evaluated language on that language alone.
  bool monolingual = false;
};

struct ExperimentRecipe {
  std::string name;
  std::string title;
  std::vector<Arm> arms;
  Source eval_source = Source::Comparable;
  std::vector<Language> eval_languages;
  std::vector<Direction> directions{Direction::ImageToText, Direction::TextToImage};
  std::vector<std::size_t> ks{1, 5, 10};
  std::string baseline;

  void validate() const;
};

const std::vector<ExperimentRecipe>& recipes();
const ExperimentRecipe& find_recipe(const std::string& name);
std::vector<std::string> recipe_names();

struct ExperimentSettings {
  synth::SynthConfig synth;
  std::size_t embed_dim = 32;
  std::size_t hidden_dim = 64;
  std::size_t min_count = kDefaultMinCount;
  TrainConfig train;
  // Real corpora replace the synthetic ones when set.
  std::optional<SourceCorpora> corpora;

  ExperimentSettings();
};

// Synthetic sources for one seed: a four-language world rendered once as
// translation tuples and once as comparable en/de captions.
SourceCorpora synthetic_sources(const synth::SynthConfig& base, std::uint64_t seed);

Corpus build_corpus(const SourceCorpora& sources, const CorpusDirective& directive, std::uint64_t seed);

struct ArmRun {
  RetrievalReport report;
  std::vector<TrainHistory> histories;
};

ArmRun run_arm(const ExperimentRecipe& recipe, const Arm& arm, const SourceCorpora& sources,
               const ExperimentSettings& settings, std::uint64_t seed);

struct ArmResult {
  std::string label;
  std::vector<RetrievalReport> per_seed;
  RetrievalReport aggregate;
};

struct RecipeResult {
  std::string recipe;
  std::vector<std::uint64_t> seeds;
  std::vector<ArmResult> arms;

  const ArmResult& arm(const std::string& label) const;
};

using Progress = std::function<void(const std::string& arm, std::uint64_t seed, const RetrievalReport&)>;

RecipeResult run_recipe(const ExperimentRecipe& recipe, const ExperimentSettings& settings,
                        const std::vector<std::uint64_t>& seeds, const Progress& progress = {});

// Rows are arms, columns every (language, direction, k) cell, mean±std.
std::string format_table(const ExperimentRecipe& recipe, const RecipeResult& result);
std::string result_to_jsonl(const RecipeResult& result);

// Mean over the listed cells of one arm's aggregated report.
double mean_recall(const RetrievalReport& report, const std::vector<Language>& languages,
                   const std::vector<Direction>& directions, std::size_t k);

}  // namespace mlvse::experiments
