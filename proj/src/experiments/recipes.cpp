#include "mlvse/experiments/recipes.hpp"

#include <algorithm>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mlvse/data/pairs.hpp"
#include "mlvse/data/vocabulary.hpp"
#include "mlvse/error.hpp"
#include "mlvse/model/params.hpp"

namespace mlvse::experiments {

std::string to_string(Source s) { return s == Source::Translation ? "translation" : "comparable"; }

namespace {

const std::vector<Language> kBi{"en", "de"};
const std::vector<Language> kMulti{"en", "de", "fr", "cs"};
const std::vector<Language> kLow{"fr", "cs"};

CorpusDirective translation(std::vector<Language> langs) {
  CorpusDirective d;
  d.source = Source::Translation;
  d.languages = std::move(langs);
  return d;
}

CorpusDirective comparable(std::vector<Language> langs) {
  CorpusDirective d;
  d.source = Source::Comparable;
  d.languages = std::move(langs);
  return d;
}

CorpusDirective one_caption(CorpusDirective d) {
  d.one_caption = d.languages;
  return d;
}

CorpusDirective merged(CorpusDirective base, CorpusDirective extra) {
  base.merge.push_back(std::move(extra));
  return base;
}

Arm arm(std::string label, CorpusDirective corpus, std::vector<Language> langs, bool c2c, bool mono = false) {
  return Arm{std::move(label), std::move(corpus), std::move(langs), c2c, mono};
}

std::vector<ExperimentRecipe> build_recipes() {
  std::vector<ExperimentRecipe> out;

  {
    ExperimentRecipe r;
    r.name = "E1";
    r.title = "Monolingual vs. bilingual vs. bilingual + c2c on comparable captions";
    r.arms = {arm("Monolingual", comparable(kBi), kBi, false, true), arm("Bilingual", comparable(kBi), kBi, false),
              arm("+ c2c", comparable(kBi), kBi, true)};
    r.eval_source = Source::Comparable;
    r.eval_languages = kBi;
    r.baseline = "Monolingual";
    out.push_back(r);
  }
  {
    ExperimentRecipe r;
    r.name = "E2";
    r.title = "Bilingual training on translations vs. comparable captions";
    r.arms = {arm("Monolingual", translation(kBi), kBi, false, true),
              arm("Bi-translation", translation(kBi), kBi, false),
              arm("+ c2c (translation)", translation(kBi), kBi, true),
              arm("Bi-comparable", one_caption(comparable(kBi)), kBi, false),
              arm("+ c2c (comparable)", one_caption(comparable(kBi)), kBi, true)};
    r.eval_source = Source::Comparable;
    r.eval_languages = kBi;
    r.ks = {10};
    r.baseline = "Monolingual";
    out.push_back(r);
  }
  {
    ExperimentRecipe r;
    r.name = "E3";
    r.title = "Overlapping vs. disjoint images for a second language";
    auto half = [](HalfMode mode) {
      auto d = comparable(kBi);
      d.half = HalfSpec{mode, "en", "de"};
      return d;
    };
    r.arms = {arm("Full Monolingual", comparable(kBi), kBi, false, true),
              arm("Half Monolingual", half(HalfMode::Overlap), kBi, false, true),
              arm("Bi-overlap", half(HalfMode::Overlap), kBi, false),
              arm("+ c2c", half(HalfMode::Overlap), kBi, true),
              arm("Bi-disjoint", half(HalfMode::Disjoint), kBi, false)};
    r.eval_source = Source::Comparable;
    r.eval_languages = kBi;
    r.ks = {10};
    r.baseline = "Half Monolingual";
    out.push_back(r);
  }
  {
    ExperimentRecipe r;
    r.name = "E4";
    r.title = "Multilingual training on translations vs. comparable captions";
    const auto multi_comparable = merged(one_caption(comparable(kBi)), translation(kLow));
    r.arms = {arm("Monolingual", translation(kMulti), kMulti, false, true),
              arm("Multi-translation", translation(kMulti), kMulti, false),
              arm("+ c2c (translation)", translation(kMulti), kMulti, true),
              arm("Multi-comparable", multi_comparable, kMulti, false),
              arm("+ c2c (comparable)", multi_comparable, kMulti, true)};
    r.eval_source = Source::Translation;
    r.eval_languages = kMulti;
    r.directions = {Direction::TextToImage};
    r.ks = {10};
    r.baseline = "Monolingual";
    out.push_back(r);
  }
  {
    ExperimentRecipe r;
    r.name = "E5";
    r.title = "High-to-low resource transfer";
    const auto plus_comparable = merged(translation(kMulti), comparable(kBi));
    r.arms = {arm("Monolingual", translation(kMulti), kLow, false, true),
              arm("Multilingual", translation(kMulti), kMulti, false),
              arm("+ Comparable", plus_comparable, kMulti, false), arm("+ c2c", plus_comparable, kMulti, true)};
    r.eval_source = Source::Translation;
    r.eval_languages = kLow;
    r.directions = {Direction::TextToImage};
    r.ks = {10};
    r.baseline = "Multilingual";
    out.push_back(r);
  }
  {
    ExperimentRecipe r;
    r.name = "E6";
    r.title = "Monolingual vs. bilingual vs. multilingual";
    const auto bi = one_caption(comparable(kBi));
    r.arms = {arm("Monolingual", bi, kBi, false, true), arm("Bilingual", bi, kBi, true),
              arm("Multilingual", merged(bi, translation(kLow)), kMulti, true)};
    r.eval_source = Source::Comparable;
    r.eval_languages = kBi;
    r.ks = {10};
    r.baseline = "Monolingual";
    out.push_back(r);
  }
  for (const auto& rec : out) rec.validate();
  return out;
}

void validate_directive(const CorpusDirective& d) {
  if (d.languages.empty()) throw ConfigError("corpus directive selects no languages");
  for (const auto& l : d.one_caption)
    if (std::find(d.languages.begin(), d.languages.end(), l) == d.languages.end())
      throw ConfigError("one-caption sampling names unselected language '" + l + "'");
  for (const auto& m : d.merge) validate_directive(m);
}

Corpus restrict_to(const Corpus& c, const Language& lang) { return restrict_languages(c, {lang}); }

}  // namespace

void ExperimentRecipe::validate() const {
  if (arms.empty()) throw ConfigError("recipe " + name + " has no arms");
  if (eval_languages.empty() || directions.empty() || ks.empty())
    throw ConfigError("recipe " + name + " has an empty evaluation protocol");
  bool has_baseline = baseline.empty();
  for (const auto& a : arms) {
    validate_directive(a.corpus);
    if (a.train_languages.empty()) throw ConfigError("arm '" + a.label + "' trains on no language");
    if (a.monolingual && a.c2c) throw ConfigError("arm '" + a.label + "' cannot use c2c with a single language");
    if (a.monolingual)
      for (const auto& l : eval_languages)
        if (std::find(a.train_languages.begin(), a.train_languages.end(), l) == a.train_languages.end())
          throw ConfigError("monolingual arm '" + a.label + "' does not train evaluated language '" + l + "'");
    has_baseline = has_baseline || a.label == baseline;
  }
  if (!has_baseline) throw ConfigError("recipe " + name + " names unknown baseline '" + baseline + "'");
}

const std::vector<ExperimentRecipe>& recipes() {
  static const std::vector<ExperimentRecipe> all = build_recipes();
  return all;
}

const ExperimentRecipe& find_recipe(const std::string& name) {
  for (const auto& r : recipes())
    if (r.name == name) return r;
  std::string known;
  for (const auto& n : recipe_names()) known += (known.empty() ? "" : ", ") + n;
  throw ConfigError("unknown recipe '" + name + "' (available: " + known + ")");
}

std::vector<std::string> recipe_names() {
  std::vector<std::string> out;
  for (const auto& r : recipes()) out.push_back(r.name);
  return out;
}

ExperimentSettings::ExperimentSettings() {
  // Desk scale: 32-caption batches over a few hundred images, evaluated about
  // every two single-caption passes.
  train.batch_size = 32;
  train.eval_interval = 32;
  train.max_iterations = 20000;
}

SourceCorpora synthetic_sources(const synth::SynthConfig& base, std::uint64_t seed) {
  synth::SynthConfig cfg = base;
  cfg.seed = seed;
  cfg.languages = kMulti;
  cfg.regime = synth::Regime::Translation;
  const synth::WorldModel world(cfg);
  SourceCorpora out;
  out.translation = synth::generate(world, synth::Regime::Translation, kMulti, 1);
  cfg.regime = synth::Regime::Comparable;
  cfg.captions_per_image = base.captions_per_image;
  out.comparable = synth::generate(world, synth::Regime::Comparable, kBi, cfg.resolved_captions_per_image());
  return out;
}

Corpus build_corpus(const SourceCorpora& sources, const CorpusDirective& d, std::uint64_t seed) {
  Corpus c = restrict_languages(sources.get(d.source), d.languages);
  if (!d.one_caption.empty()) c = sample_one_caption_per_language(c, d.one_caption, synth::derive_seed(seed, "one"));
  if (d.half) c = split_half_overlap_disjoint(c, d.half->mode, d.half->lang_a, d.half->lang_b,
                                              synth::derive_seed(seed, "half"));
  for (std::size_t i = 0; i < d.merge.size(); ++i)
    c = merge_corpora(c, build_corpus(sources, d.merge[i], synth::derive_seed(seed, 100 + i)));
  return c;
}

namespace {

RetrievalReport train_and_score(const Corpus& train_corpus, const std::vector<Language>& train_langs, bool c2c,
                                const Corpus& eval_corpus, const RetrievalProtocol& protocol,
                                const ExperimentSettings& settings, std::uint64_t seed, TrainHistory& history) {
  const Vocabulary vocab = Vocabulary::build(train_corpus, settings.min_count);
  ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.embed_dim = settings.embed_dim;
  mc.hidden_dim = settings.hidden_dim;
  mc.image_dim = train_corpus.feature_dim();
  mc.seed = synth::derive_seed(seed, "model");
  TrainConfig tc = settings.train;
  tc.languages = train_langs;
  tc.c2c = c2c;
  if (!c2c) tc.p_c2i = 1.0;
  tc.seed = synth::derive_seed(seed, "train");
  const CaptionPairSet pairs = c2c ? generate_c2c_pairs(train_corpus, train_langs) : CaptionPairSet{};
  auto result = train(train_corpus, vocab, pairs, init_params<float>(mc), tc);
  history = std::move(result.history);
  return evaluate_model(result.best, vocab, eval_corpus, Split::Test, protocol);
}

}  // namespace

ArmRun run_arm(const ExperimentRecipe& recipe, const Arm& arm, const SourceCorpora& sources,
               const ExperimentSettings& settings, std::uint64_t seed) {
  const Corpus full = build_corpus(sources, arm.corpus, seed);
  const Corpus& eval_corpus = sources.get(recipe.eval_source);
  ArmRun run;
  if (arm.monolingual) {
    for (const auto& lang : recipe.eval_languages) {
      RetrievalProtocol protocol{{lang}, recipe.directions, recipe.ks};
      TrainHistory h;
      auto rep = train_and_score(restrict_to(full, lang), {lang}, false, eval_corpus, protocol, settings,
                                 synth::derive_seed(seed, "mono:" + lang), h);
      for (auto& [k, v] : rep.metrics) run.report.metrics[k] = v;
      run.histories.push_back(std::move(h));
    }
  } else {
    RetrievalProtocol protocol{recipe.eval_languages, recipe.directions, recipe.ks};
    TrainHistory h;
    run.report = train_and_score(full, arm.train_languages, arm.c2c, eval_corpus, protocol, settings,
                                 synth::derive_seed(seed, "joint"), h);
    run.histories.push_back(std::move(h));
  }
  return run;
}

const ArmResult& RecipeResult::arm(const std::string& label) const {
  for (const auto& a : arms)
    if (a.label == label) return a;
  throw ConfigError("result has no arm '" + label + "'");
}

RecipeResult run_recipe(const ExperimentRecipe& recipe, const ExperimentSettings& settings,
                        const std::vector<std::uint64_t>& seeds, const Progress& progress) {
  recipe.validate();
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  RecipeResult result;
  result.recipe = recipe.name;
  result.seeds = seeds;
  for (const auto& a : recipe.arms) result.arms.push_back(ArmResult{a.label, {}, {}});
  for (auto seed : seeds) {
    const SourceCorpora sources = settings.corpora ? *settings.corpora : synthetic_sources(settings.synth, seed);
    for (std::size_t i = 0; i < recipe.arms.size(); ++i) {
      auto run = run_arm(recipe, recipe.arms[i], sources, settings, seed);
      if (progress) progress(recipe.arms[i].label, seed, run.report);
      result.arms[i].per_seed.push_back(std::move(run.report));
    }
  }
  for (auto& a : result.arms) a.aggregate = aggregate_seeds(a.per_seed);
  return result;
}

std::string format_table(const ExperimentRecipe& recipe, const RecipeResult& result) {
  std::vector<MetricKey> cols;
  for (const auto& l : recipe.eval_languages)
    for (auto d : recipe.directions)
      for (auto k : recipe.ks) cols.push_back(MetricKey{l, d, k});
  std::size_t label_w = 12;
  for (const auto& a : result.arms) label_w = std::max(label_w, a.label.size() + 2);

  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(label_w)) << "";
  for (const auto& c : cols)
    out << std::right << std::setw(16) << (c.language + " " + to_string(c.direction) + " R@" + std::to_string(c.k));
  out << "\n";
  for (const auto& a : result.arms) {
    out << std::left << std::setw(static_cast<int>(label_w)) << a.label;
    for (const auto& c : cols) {
      std::ostringstream cell;
      cell << std::fixed << std::setprecision(1);
      auto it = a.aggregate.metrics.find(c);
      if (it == a.aggregate.metrics.end()) {
        cell << "-";
      } else {
        cell << it->second.mean;
        if (a.aggregate.seeds > 1) cell << "±" << it->second.stddev;
      }
      // setw counts bytes; "±" takes two.
      const int pad = a.aggregate.seeds > 1 ? 17 : 16;
      out << std::right << std::setw(pad) << cell.str();
    }
    out << "\n";
  }
  return out.str();
}

std::string result_to_jsonl(const RecipeResult& result) {
  std::string out;
  for (const auto& a : result.arms)
    for (const auto& [key, v] : a.aggregate.metrics) {
      nlohmann::json j = {{"recipe", result.recipe}, {"arm", a.label},     {"language", key.language},
                          {"direction", to_string(key.direction)},        {"k", key.k},
                          {"mean", v.mean},          {"std", v.stddev},    {"samples", v.samples},
                          {"seeds", result.seeds}};
      out += j.dump() + "\n";
    }
  return out;
}

double mean_recall(const RetrievalReport& report, const std::vector<Language>& languages,
                   const std::vector<Direction>& directions, std::size_t k) {
  if (languages.empty() || directions.empty()) throw ProtocolError("mean_recall needs at least one cell");
  double s = 0.0;
  for (const auto& l : languages)
    for (auto d : directions) s += report.get(l, d, k);
  return s / static_cast<double>(languages.size() * directions.size());
}

}  // namespace mlvse::experiments
