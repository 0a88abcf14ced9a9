#include "mlvse/synth/generator.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "mlvse/error.hpp"
#include "mlvse/evaluation/retrieval.hpp"
#include "mlvse/numerics/ops.hpp"

namespace mlvse::synth {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t tag_of(Regime r) {
  switch (r) {
    case Regime::Translation: return 11;
    case Regime::Comparable: return 23;
    case Regime::Disjoint: return 37;
  }
  return 0;
}

constexpr const char* kOnsets[] = {"b", "d", "f", "g", "k", "l", "m", "n", "p", "r", "s", "t", "v", "z", "ch", "sh"};
constexpr const char* kVowels[] = {"a", "e", "i", "o", "u", "ai", "ou"};

std::string pseudo_word(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> syllables(2, 3);
  std::uniform_int_distribution<std::size_t> onset(0, std::size(kOnsets) - 1);
  std::uniform_int_distribution<std::size_t> vowel(0, std::size(kVowels) - 1);
  std::string w;
  const auto n = syllables(rng);
  for (std::size_t i = 0; i < n; ++i) {
    w += kOnsets[onset(rng)];
    w += kVowels[vowel(rng)];
  }
  return w;
}

// Solves the symmetric positive definite system A x = b in place (Cholesky).
std::vector<double> solve_spd(MatrixD a, std::vector<double> b) {
  const std::size_t n = a.rows();
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= a(j, k) * a(j, k);
    if (d <= 0.0) throw DegenerateError("synthetic projection is rank deficient");
    a(j, j) = std::sqrt(d);
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= a(i, k) * a(j, k);
      a(i, j) = s / a(j, j);
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < i; ++k) b[i] -= a(i, k) * b[k];
    b[i] /= a(i, i);
  }
  for (std::size_t i = n; i-- > 0;) {
    for (std::size_t k = i + 1; k < n; ++k) b[i] -= a(k, i) * b[k];
    b[i] /= a(i, i);
  }
  return b;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) { return splitmix64(splitmix64(seed) ^ tag); }

std::uint64_t derive_seed(std::uint64_t seed, const std::string& tag) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : tag) h = (h ^ c) * 1099511628211ULL;
  return derive_seed(seed, h);
}

std::string to_string(Regime r) {
  switch (r) {
    case Regime::Translation: return "translation";
    case Regime::Comparable: return "comparable";
    case Regime::Disjoint: return "disjoint";
  }
  return "translation";
}

Regime parse_regime(const std::string& s) {
  if (s == "translation") return Regime::Translation;
  if (s == "comparable") return Regime::Comparable;
  if (s == "disjoint") return Regime::Disjoint;
  throw ConfigError("unknown regime '" + s + "' (expected translation, comparable or disjoint)");
}

void SynthConfig::validate() const {
  if (n_train == 0 || n_val == 0 || n_test == 0) throw ConfigError("image counts must be positive");
  if (languages.empty()) throw ConfigError("at least one language is required");
  if (std::set<Language>(languages.begin(), languages.end()).size() != languages.size())
    throw ConfigError("languages must be distinct");
  for (const auto& l : languages)
    if (l.empty() || l.find_first_of(" \t\n") != std::string::npos) throw ConfigError("invalid language code '" + l + "'");
  if (concept_dim == 0 || concepts_per_image == 0 || tokens_per_concept == 0 || image_dim == 0)
    throw ConfigError("synthetic dimensions must be positive");
  if (concepts_per_image > concept_dim) throw ConfigError("concepts per image cannot exceed the concept dimension");
  if (!(noise >= 0.0)) throw ConfigError("feature noise must be non-negative");
  if (regime != Regime::Translation && concepts_per_image < 2)
    throw ConfigError("comparable and disjoint captions need at least 2 concepts per image");
  if (regime == Regime::Disjoint && languages.size() < 2)
    throw ConfigError("the disjoint regime needs at least 2 languages");
  if (regime == Regime::Disjoint && n_train < languages.size())
    throw ConfigError("the disjoint regime needs at least one training image per language");
}

std::size_t SynthConfig::resolved_captions_per_image() const {
  if (captions_per_image > 0) return captions_per_image;
  return regime == Regime::Translation ? 1 : 5;
}

WorldModel::WorldModel(const SynthConfig& config) : config_(config) {
  config_.validate();
  const std::size_t n = config_.n_train + config_.n_val + config_.n_test;
  const std::size_t dc = config_.concept_dim;
  const std::size_t m = config_.concepts_per_image;

  {
    std::mt19937_64 rng(derive_seed(config_.seed, "projection"));
    // Each concept direction has unit expected norm.
    std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(static_cast<double>(config_.image_dim)));
    projection_ = MatrixD(dc, config_.image_dim);
    for (auto& v : projection_.values()) v = gauss(rng);
  }

  const std::uint64_t image_seed = derive_seed(config_.seed, "images");
  concepts_.resize(n);
  weights_.resize(n);
  features_ = MatrixF(n, config_.image_dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::mt19937_64 rng(derive_seed(image_seed, i));
    std::vector<std::size_t> all(dc);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::size_t> chosen(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m));
    std::sort(chosen.begin(), chosen.end());
    std::uniform_real_distribution<double> weight(0.5, 1.5);
    std::vector<double> w(m);
    for (auto& x : w) x = weight(rng);
    std::normal_distribution<double> noise(0.0, 1.0);
    for (std::size_t d = 0; d < config_.image_dim; ++d) {
      double v = 0.0;
      for (std::size_t c = 0; c < m; ++c) v += w[c] * projection_(chosen[c], d);
      v += config_.noise * noise(rng);
      features_(i, d) = static_cast<float>(v);
    }
    concepts_[i] = std::move(chosen);
    weights_[i] = std::move(w);
  }

  for (const auto& lang : config_.languages) {
    std::mt19937_64 rng(derive_seed(config_.seed, "lexicon:" + lang));
    LanguageModel lm;
    lm.lexicon.assign(dc, {});
    std::set<std::string> used;
    for (std::size_t c = 0; c < dc; ++c) {
      for (std::size_t s = 0; s < config_.tokens_per_concept; ++s) {
        std::string w;
        do {
          w = lang + "_" + pseudo_word(rng);
        } while (!used.insert(w).second);
        lm.inverse.emplace(w, c);
        lm.lexicon[c].push_back(std::move(w));
      }
    }
    lm.slots.resize(m);
    std::iota(lm.slots.begin(), lm.slots.end(), std::size_t{0});
    std::shuffle(lm.slots.begin(), lm.slots.end(), rng);
    languages_.emplace(lang, std::move(lm));
  }
}

Split WorldModel::split_of(std::size_t image) const {
  if (image < config_.n_train) return Split::Train;
  if (image < config_.n_train + config_.n_val) return Split::Val;
  return Split::Test;
}

std::string WorldModel::image_id(std::size_t image) const {
  std::ostringstream s;
  s << "img" << std::setw(6) << std::setfill('0') << image;
  return s.str();
}

const WorldModel::LanguageModel& WorldModel::language(const Language& lang) const {
  auto it = languages_.find(lang);
  if (it == languages_.end()) throw UnknownLanguageError("synthetic world has no language '" + lang + "'");
  return it->second;
}

const std::vector<std::vector<std::string>>& WorldModel::lexicon(const Language& lang) const {
  return language(lang).lexicon;
}

std::optional<std::size_t> WorldModel::concept_of(const Language& lang, const std::string& token) const {
  const auto& inv = language(lang).inverse;
  auto it = inv.find(token);
  if (it == inv.end()) return std::nullopt;
  return it->second;
}

const std::vector<std::size_t>& WorldModel::slot_order(const Language& lang) const { return language(lang).slots; }

std::vector<std::string> WorldModel::realize(std::size_t image, const std::vector<std::size_t>& mentioned,
                                             const Language& lang, std::uint64_t stream) const {
  const auto& lm = language(lang);
  const auto& own = concepts_[image];
  const auto& w = weights_[image];
  // Most salient concept first, then the language's slot permutation.
  std::vector<std::pair<double, std::size_t>> ranked;
  for (auto c : mentioned) {
    auto pos = std::find(own.begin(), own.end(), c);
    if (pos == own.end()) throw ConfigError("concept not present in image");
    ranked.emplace_back(w[static_cast<std::size_t>(pos - own.begin())], c);
  }
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
  std::vector<std::size_t> order(ranked.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return lm.slots[a] < lm.slots[b]; });

  std::mt19937_64 rng(stream);
  std::uniform_int_distribution<std::size_t> synonym(0, config_.tokens_per_concept - 1);
  std::vector<std::string> tokens;
  for (auto slot : order) tokens.push_back(lm.lexicon[ranked[slot].second][synonym(rng)]);
  return tokens;
}

Corpus generate(const WorldModel& world, Regime regime, const std::vector<Language>& languages,
                std::size_t captions_per_image) {
  const auto& cfg = world.config();
  if (languages.empty()) throw ConfigError("at least one language is required");
  if (regime == Regime::Disjoint && languages.size() < 2)
    throw ConfigError("the disjoint regime needs at least 2 languages");
  if (captions_per_image == 0) throw ConfigError("captions per image must be positive");
  const std::size_t n = world.image_count();
  const std::size_t m = cfg.concepts_per_image;

  // Disjoint: contiguous blocks of a seeded shuffle of the training images.
  std::vector<std::size_t> owner(n, SIZE_MAX);
  if (regime == Regime::Disjoint) {
    std::vector<std::size_t> train(cfg.n_train);
    std::iota(train.begin(), train.end(), std::size_t{0});
    std::mt19937_64 rng(derive_seed(cfg.seed, "disjoint"));
    std::shuffle(train.begin(), train.end(), rng);
    for (std::size_t i = 0; i < train.size(); ++i) owner[train[i]] = i * languages.size() / train.size();
  }

  const std::uint64_t regime_seed = derive_seed(cfg.seed, tag_of(regime));
  std::vector<std::string> ids;
  std::vector<Split> splits;
  std::vector<Caption> captions;
  for (std::size_t i = 0; i < n; ++i) {
    ids.push_back(world.image_id(i));
    splits.push_back(world.split_of(i));
    const auto& own = world.concepts(i);
    for (std::size_t li = 0; li < languages.size(); ++li) {
      if (owner[i] != SIZE_MAX && owner[i] != li) continue;
      const auto& lang = languages[li];
      const std::uint64_t lang_seed = derive_seed(derive_seed(regime_seed, i), "lang:" + lang);
      for (std::size_t k = 0; k < captions_per_image; ++k) {
        std::vector<std::size_t> mentioned = own;
        if (regime != Regime::Translation) {
          std::mt19937_64 rng(derive_seed(lang_seed, 2 * k));
          std::uniform_int_distribution<std::size_t> drop(0, m - 1);
          mentioned.erase(mentioned.begin() + static_cast<std::ptrdiff_t>(drop(rng)));
        }
        captions.push_back(Caption{i, lang, world.realize(i, mentioned, lang, derive_seed(lang_seed, 2 * k + 1))});
      }
    }
  }
  return Corpus(std::move(ids), std::move(splits), world.features(), std::move(captions));
}

Corpus generate(const SynthConfig& config) {
  const WorldModel world(config);
  return generate(world, config.regime, config.languages, config.resolved_captions_per_image());
}

double oracle_recall_bound(const SynthConfig& config, std::size_t k) {
  const WorldModel world(config);
  const Corpus corpus = generate(world, config.regime, config.languages, config.resolved_captions_per_image());
  const std::size_t dc = config.concept_dim;
  const std::size_t m = config.concepts_per_image;
  const auto& proj = world.projection();

  // Least-squares decode of every test image: c = f P^T (P P^T)^-1.
  MatrixD gram(dc, dc);
  for (std::size_t a = 0; a < dc; ++a)
    for (std::size_t b = 0; b < dc; ++b) {
      double s = 0.0;
      for (std::size_t d = 0; d < proj.cols(); ++d) s += proj(a, d) * proj(b, d);
      gram(a, b) = s;
    }
  const auto test_images = corpus.images_in(Split::Test);
  std::vector<std::vector<double>> decoded;
  std::vector<std::set<std::size_t>> top_sets;
  for (auto img : test_images) {
    std::vector<double> rhs(dc, 0.0);
    for (std::size_t a = 0; a < dc; ++a)
      for (std::size_t d = 0; d < proj.cols(); ++d) rhs[a] += proj(a, d) * corpus.features()(img, d);
    auto c = solve_spd(gram, rhs);
    std::vector<std::size_t> idx(dc);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return c[a] > c[b]; });
    top_sets.emplace_back(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(m));
    decoded.push_back(std::move(c));
  }

  double total = 0.0;
  std::size_t count = 0;
  for (const auto& lang : config.languages) {
    const auto caps = corpus.captions_in(Split::Test, lang);
    std::vector<std::size_t> local(corpus.image_count(), SIZE_MAX);
    for (std::size_t i = 0; i < test_images.size(); ++i) local[test_images[i]] = i;
    MatrixF scores(caps.size(), test_images.size());
    for (std::size_t q = 0; q < caps.size(); ++q) {
      std::set<std::size_t> said;
      for (const auto& t : corpus.captions()[caps[q]].tokens)
        if (auto c = world.concept_of(lang, t)) said.insert(*c);
      for (std::size_t i = 0; i < test_images.size(); ++i) {
        double overlap = 0.0, dot = 0.0, norm = 0.0;
        for (auto c : said) {
          overlap += top_sets[i].contains(c) ? 1.0 : 0.0;
          dot += decoded[i][c];
        }
        for (double v : decoded[i]) norm += v * v;
        const double cosine = norm > 0 ? dot / (std::sqrt(norm) * std::sqrt(static_cast<double>(said.size()))) : 0.0;
        scores(q, i) = static_cast<float>(overlap + 0.5 * cosine);
      }
    }
    std::vector<std::vector<std::size_t>> t2i(caps.size()), i2t(test_images.size());
    for (std::size_t q = 0; q < caps.size(); ++q) {
      const auto img = local[corpus.captions()[caps[q]].image];
      t2i[q] = {img};
      i2t[img].push_back(q);
    }
    total += recall_at_k(scores, t2i, std::min(k, test_images.size()));
    total += recall_at_k(transpose(scores), i2t, std::min(k, caps.size()));
    count += 2;
  }
  return total / static_cast<double>(count);
}

}  // namespace mlvse::synth
