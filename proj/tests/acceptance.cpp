// Acceptance suite: one [PASS]/[FAIL]/[SKIP] line per criterion.
// Exit status is non-zero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "mlvse/data/corpus_io.hpp"
#include "mlvse/data/pairs.hpp"
#include "mlvse/data/vocabulary.hpp"
#include "mlvse/evaluation/retrieval.hpp"
#include "mlvse/experiments/recipes.hpp"
#include "mlvse/model/model_check.hpp"
#include "mlvse/objective/ranking_loss.hpp"
#include "mlvse/synth/generator.hpp"
#include "mlvse/training/trainer.hpp"

using namespace mlvse;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;

void report(int id, const std::string& name, bool pass, const std::string& detail) {
  std::cout << "[" << (pass ? "PASS" : "FAIL") << "] " << std::setw(2) << id << " " << name << ": " << detail
            << std::endl;
  failures += !pass;
}

void skip(int id, const std::string& name, const std::string& why) {
  std::cout << "[SKIP] " << std::setw(2) << id << " " << name << ": " << why << std::endl;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream o;
  o << std::fixed << std::setprecision(digits) << v;
  return o.str();
}

// ---------------------------------------------------------------- 1

void gradient_correctness() {
  const auto t0 = Clock::now();
  ModelCheckOptions o;  // vocab 20, embed 8, hidden 12, image 16, batch 4
  double worst = 0.0;
  bool pass = true;
  for (bool pairs : {false, true}) {
    o.caption_pairs = pairs;
    const auto r = model_gradient_check(o);
    worst = std::max(worst, r.max_relative_error());
    pass = pass && r.max_relative_error() < 1e-4;
  }
  const double secs = seconds_since(t0);
  report(1, "full-model gradient check", pass && secs < 60.0,
         "max relative error " + [&] {
           std::ostringstream s;
           s << std::scientific << std::setprecision(2) << worst;
           return s.str();
         }() + " (< 1e-4), " + fmt(secs) + " s (< 60 s)");
}

// ---------------------------------------------------------------- 2

double brute_loss(const MatrixD& s, double margin, bool use_max) {
  double total = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) {
    double ml = 0, mr = 0, sl = 0, sr = 0;
    for (std::size_t j = 0; j < s.rows(); ++j) {
      if (j == i) continue;
      const double l = std::max(0.0, margin - s(i, i) + s(j, i));
      const double r = std::max(0.0, margin - s(i, i) + s(i, j));
      ml = std::max(ml, l);
      mr = std::max(mr, r);
      sl += l;
      sr += r;
    }
    total += use_max ? ml + mr : sl + sr;
  }
  return total;
}

void ranking_loss_properties() {
  const MatrixD example{{0.5, 0.6}, {0.0, 0.5}};
  const double ex_max = ranking_loss(example, {0.2, LossVariant::MaxOfHinges}).value;
  const double ex_sum = ranking_loss(example, {0.2, LossVariant::SumOfHinges}).value;
  bool pass = std::abs(ex_max - 0.6) < 1e-15 && std::abs(ex_sum - 0.6) < 1e-15;

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> size(2, 6);
  std::size_t violations = 0, zero_cases = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = size(rng);
    MatrixD s(n, n);
    for (auto& v : s.values()) v = u(rng);
    if (trial % 3 == 0)
      for (std::size_t i = 0; i < n; ++i) s(i, i) += 2.3;
    const auto mx = ranking_loss(s, {0.2, LossVariant::MaxOfHinges}).value;
    const auto sm = ranking_loss(s, {0.2, LossVariant::SumOfHinges}).value;
    bool ok = std::abs(mx - brute_loss(s, 0.2, true)) < 1e-12 && std::abs(sm - brute_loss(s, 0.2, false)) < 1e-12;
    ok = ok && mx <= sm + 1e-12 && mx >= 0.0;

    bool separated = true;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j && (s(i, i) - s(j, i) < 0.2 || s(i, i) - s(i, j) < 0.2)) separated = false;
    ok = ok && ((mx == 0.0) == separated) && ((sm == 0.0) == separated);
    zero_cases += separated;

    // Raising a negative never lowers the loss; raising a positive never raises it.
    std::uniform_int_distribution<std::size_t> idx(0, n - 1);
    const std::size_t a = idx(rng);
    std::size_t b = idx(rng);
    if (b == a) b = (a + 1) % n;
    auto up_neg = s;
    up_neg(a, b) += 0.25;
    auto up_pos = s;
    up_pos(a, a) += 0.25;
    for (auto v : {LossVariant::MaxOfHinges, LossVariant::SumOfHinges}) {
      const double base = ranking_loss(s, {0.2, v}).value;
      ok = ok && ranking_loss(up_neg, {0.2, v}).value >= base - 1e-12;
      ok = ok && ranking_loss(up_pos, {0.2, v}).value <= base + 1e-12;
    }

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    MatrixD p(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p(i, j) = s(perm[i], perm[j]);
    ok = ok && std::abs(ranking_loss(p, {0.2, LossVariant::MaxOfHinges}).value - mx) < 1e-12;
    ok = ok && std::abs(ranking_loss(p, {0.2, LossVariant::SumOfHinges}).value - sm) < 1e-12;
    violations += !ok;
  }
  pass = pass && violations == 0 && zero_cases > 0;
  report(2, "ranking loss", pass,
         "example " + fmt(ex_max, 15) + " / " + fmt(ex_sum, 15) + " (0.6), " + std::to_string(violations) +
             " violations in 1000 random batches (" + std::to_string(zero_cases) + " separated)");
}

// ---------------------------------------------------------------- 3

void recall_oracle() {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<float> u(-1.0f, 1.0f);
  std::vector<std::vector<std::size_t>> truth(50);
  for (std::size_t i = 0; i < 50; ++i)
    for (std::size_t c = 0; c < 5; ++c) truth[i].push_back(i * 5 + c);
  std::size_t mismatches = 0, monotone = 0;
  for (int trial = 0; trial < 100; ++trial) {
    MatrixF s(50, 250);
    for (auto& v : s.values()) v = u(rng);
    // Plant some hits near the top so recall is not near zero.
    for (std::size_t i = 0; i < 50; i += 3) s(i, truth[i][trial % 5]) += 1.2f;
    double prev = -1.0;
    for (std::size_t k : {1, 5, 10}) {
      std::size_t hits = 0;
      for (std::size_t q = 0; q < 50; ++q) {
        std::vector<std::size_t> order(250);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s(q, a) > s(q, b); });
        bool hit = false;
        for (std::size_t r = 0; r < k; ++r)
          hit = hit || std::find(truth[q].begin(), truth[q].end(), order[r]) != truth[q].end();
        hits += hit;
      }
      const double oracle = 100.0 * static_cast<double>(hits) / 50.0;
      const double got = recall_at_k(s, truth, k);
      mismatches += got != oracle;
      monotone += got < prev;
      prev = got;
    }
  }
  report(3, "recall oracle", mismatches == 0 && monotone == 0,
         std::to_string(mismatches) + " mismatches vs brute force over 100 instances, " + std::to_string(monotone) +
             " monotonicity violations");
}

// ---------------------------------------------------------------- 4

void pair_counts() {
  std::mt19937_64 rng(404);
  const std::vector<Language> all{"en", "de", "fr", "cs"};
  std::size_t mismatches = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng() % 5;
    std::vector<std::string> ids;
    std::vector<Caption> caps;
    for (std::size_t i = 0; i < n; ++i) {
      ids.push_back("i" + std::to_string(i));
      for (const auto& l : all) {
        const std::size_t c = rng() % 4;
        for (std::size_t k = 0; k < c; ++k) caps.push_back({i, l, {l + std::to_string(k)}});
      }
    }
    std::shuffle(caps.begin(), caps.end(), rng);
    const Corpus corpus(ids, std::vector<Split>(n, Split::Train), MatrixF(n, 1), caps);
    std::vector<Language> langs = all;
    std::shuffle(langs.begin(), langs.end(), rng);
    langs.resize(2 + rng() % 3);

    // Formula: sum over images of sum over language pairs of |C_m| |C_n|.
    std::size_t formula = 0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t a = 0; a < langs.size(); ++a)
        for (std::size_t b = a + 1; b < langs.size(); ++b) {
          std::size_t ca = 0, cb = 0;
          for (const auto& c : caps) {
            ca += c.image == i && c.language == langs[a];
            cb += c.image == i && c.language == langs[b];
          }
          formula += ca * cb;
        }
    // Enumeration over every unordered caption pair.
    std::set<std::pair<std::size_t, std::size_t>> expected;
    const std::set<Language> chosen(langs.begin(), langs.end());
    for (std::size_t x = 0; x < caps.size(); ++x)
      for (std::size_t y = x + 1; y < caps.size(); ++y)
        if (caps[x].image == caps[y].image && caps[x].language != caps[y].language &&
            chosen.count(caps[x].language) && chosen.count(caps[y].language))
          expected.insert(std::minmax(x, y));
    const auto got = generate_c2c_pairs(corpus, langs);
    std::set<std::pair<std::size_t, std::size_t>> got_set;
    for (const auto& [a, b] : got.pairs) got_set.insert(std::minmax(a, b));
    mismatches += got.size() != formula || got_set != expected || got_set.size() != got.size();
  }

  std::vector<std::string> ids{"a", "b", "c"};
  std::vector<Caption> caps;
  for (std::size_t i = 0; i < 3; ++i)
    for (const auto& l : all) caps.push_back({i, l, {"w"}});
  const Corpus four(ids, std::vector<Split>(3, Split::Train), MatrixF(3, 1), caps);
  const auto per_image = generate_c2c_pairs(four, all).size() / 3;
  report(4, "c2c pair counts", mismatches == 0 && per_image == 6,
         std::to_string(mismatches) + " mismatches over 100 random corpora; 4 languages x 1 caption -> " +
             std::to_string(per_image) + " pairs per image (6)");
}

// ---------------------------------------------------------------- 5

void scheduler_statistics() {
  synth::SynthConfig sc;
  sc.languages = {"en", "de", "fr", "cs"};
  sc.n_train = 100;
  sc.n_val = 20;
  sc.n_test = 20;
  sc.seed = 5;
  const auto corpus = synth::generate(sc);
  const auto vocab = Vocabulary::build(corpus);
  const auto pairs = generate_c2c_pairs(corpus, sc.languages);
  ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.embed_dim = 4;
  mc.hidden_dim = 4;
  mc.image_dim = corpus.feature_dim();
  TrainConfig tc;
  tc.languages = sc.languages;
  tc.c2c = true;
  tc.p_c2i = 0.5;
  tc.batch_size = 4;
  tc.cadence = EvalCadence::EveryN;
  tc.eval_interval = 1000000;
  tc.max_iterations = 10000;
  tc.seed = 55;
  const auto a = train(corpus, vocab, pairs, init_params<float>(mc), tc);
  const auto b = train(corpus, vocab, pairs, init_params<float>(mc), tc);

  const double n = 10000.0;
  const double c2i = static_cast<double>(a.history.c2i_steps);
  const double task_z = (c2i - n * 0.5) / std::sqrt(n * 0.25);
  std::map<Language, std::size_t> per_lang;
  for (const auto& it : a.history.iterations)
    if (it.task == Task::C2I) ++per_lang[it.language];
  double worst_lang_z = 0.0, chi2 = 0.0;
  for (const auto& l : sc.languages) {
    const double e = c2i / 4.0;
    const double z = (static_cast<double>(per_lang[l]) - e) / std::sqrt(c2i * 0.25 * 0.75);
    worst_lang_z = std::max(worst_lang_z, std::abs(z));
    chi2 += (per_lang[l] - e) * (per_lang[l] - e) / e;
  }
  const bool identical = a.history.to_jsonl() == b.history.to_jsonl();
  report(5, "scheduler statistics",
         std::abs(task_z) < 5.0 && worst_lang_z < 5.0 && identical && a.history.iterations.size() == 10000,
         "c2i " + std::to_string(a.history.c2i_steps) + "/10000 (z " + fmt(task_z) + "), language |z| max " +
             fmt(worst_lang_z) + " (chi2 " + fmt(chi2) + ", 3 dof), histories " +
             (identical ? "byte-identical" : "DIFFER"));
}

// ---------------------------------------------------------------- 6

void data_round_trip() {
  bool pass = true;
  std::string detail;
  const auto dir = fs::temp_directory_path() / "mlvse_acceptance_roundtrip";
  fs::remove_all(dir);
  std::size_t checked = 0;
  for (auto regime : {synth::Regime::Translation, synth::Regime::Comparable, synth::Regime::Disjoint}) {
    synth::SynthConfig sc;
    sc.regime = regime;
    sc.seed = 6;
    const auto corpus = synth::generate(sc);
    const auto paths = CorpusPaths::in_directory(dir / synth::to_string(regime));
    save_corpus(corpus, paths);
    const auto back = load_corpus(paths);
    pass = pass && back == corpus;
    checked += corpus.captions().size();
  }
  detail = std::to_string(checked) + " captions round-tripped " + (pass ? "bit-exactly" : "WITH DIFFERENCES");

  // Threshold 4 over {a:5, b:3, c:4} keeps a and c, then UNK.
  std::vector<Caption> caps;
  for (int i = 0; i < 5; ++i) caps.push_back({0, "en", {"a"}});
  for (int i = 0; i < 3; ++i) caps.push_back({0, "en", {"b"}});
  for (int i = 0; i < 4; ++i) caps.push_back({0, "de", {"c"}});
  const Corpus fixture({"x"}, {Split::Train}, MatrixF(1, 1), caps);
  const auto v = Vocabulary::build(fixture, 4);
  const bool threshold = v.tokens() == std::vector<std::string>{"a", "c", kUnkToken} && v.index_of("b") == v.unk_index();

  // Two languages sharing 10 tokens: total 20, union 10.
  std::vector<Caption> shared;
  for (int w = 0; w < 10; ++w)
    for (int k = 0; k < 4; ++k)
      for (const char* l : {"en", "de"}) shared.push_back({0, l, {"w" + std::to_string(w)}});
  const auto st = vocab_union_stats(Corpus({"x"}, {Split::Train}, MatrixF(1, 1), shared), 4);
  const bool unions = st.total_tokens == 20 && st.union_tokens == 10 && std::abs(st.reduction - 0.5) < 1e-12;

  pass = pass && threshold && unions;
  report(6, "data round trip and vocabulary", pass,
         detail + "; threshold fixture " + (threshold ? "ok" : "WRONG") + "; union fixture " +
             std::to_string(st.total_tokens) + "/" + std::to_string(st.union_tokens));
  fs::remove_all(dir);
}

// ---------------------------------------------------------------- 7-10

struct TrendRun {
  experiments::RecipeResult result;
  double max_arm_seconds = 0.0;
};

TrendRun run_trend(const std::string& name, const std::vector<std::uint64_t>& seeds) {
  const auto& recipe = experiments::find_recipe(name);
  experiments::ExperimentSettings settings;
  std::map<std::string, double> arm_seconds;
  auto last = Clock::now();
  TrendRun run;
  run.result = experiments::run_recipe(recipe, settings, seeds,
                                       [&](const std::string& arm, std::uint64_t seed, const RetrievalReport& r) {
                                         const auto now = Clock::now();
                                         arm_seconds[arm] += std::chrono::duration<double>(now - last).count();
                                         last = now;
                                         std::cout << "  # " << name << " " << arm << " seed " << seed
                                                   << ": recall sum " << fmt(r.recall_sum()) << std::endl;
                                       });
  for (const auto& [arm, s] : arm_seconds) run.max_arm_seconds = std::max(run.max_arm_seconds, s);
  std::cout << experiments::format_table(recipe, run.result);
  return run;
}

double best_cell_mean(const experiments::RecipeResult& r, const experiments::ExperimentRecipe& recipe) {
  double best = 0.0;
  for (const auto& a : r.arms)
    best = std::max(best, experiments::mean_recall(a.aggregate, recipe.eval_languages, recipe.directions, 10));
  return best;
}

}  // namespace

int main() {
  std::cout << "acceptance suite" << std::endl;
  gradient_correctness();
  ranking_loss_properties();
  recall_oracle();
  pair_counts();
  scheduler_statistics();
  data_round_trip();

  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  const std::vector<Direction> t2i{Direction::TextToImage};
  const std::vector<Direction> both{Direction::ImageToText, Direction::TextToImage};

  // 7: English T->I R@10, mean over seeds.
  const auto e1 = run_trend("E1", seeds);
  {
    const auto m = experiments::mean_recall(e1.result.arm("Monolingual").aggregate, {"en"}, t2i, 10);
    const auto b = experiments::mean_recall(e1.result.arm("Bilingual").aggregate, {"en"}, t2i, 10);
    const auto c = experiments::mean_recall(e1.result.arm("+ c2c").aggregate, {"en"}, t2i, 10);
    const auto de_m = experiments::mean_recall(e1.result.arm("Monolingual").aggregate, {"de"}, t2i, 10);
    const auto de_b = experiments::mean_recall(e1.result.arm("Bilingual").aggregate, {"de"}, t2i, 10);
    report(7, "E1 trend", m < b && b <= c && b - m >= 2.0 && e1.max_arm_seconds <= 300.0,
           "en T->I R@10 mono " + fmt(m) + ", bi " + fmt(b) + ", +c2c " + fmt(c) + " (need mono < bi <= +c2c, gain >= 2); de mono " +
               fmt(de_m) + ", bi " + fmt(de_b) + "; slowest arm " + fmt(e1.max_arm_seconds, 0) + " s");
  }

  // 8: R@10 averaged over en/de and both directions.
  const auto e6 = run_trend("E6", seeds);
  {
    const auto m = experiments::mean_recall(e6.result.arm("Monolingual").aggregate, {"en", "de"}, both, 10);
    const auto b = experiments::mean_recall(e6.result.arm("Bilingual").aggregate, {"en", "de"}, both, 10);
    const auto u = experiments::mean_recall(e6.result.arm("Multilingual").aggregate, {"en", "de"}, both, 10);
    report(8, "E6 trend", m <= b && b <= u && u - m >= 3.0 && e6.max_arm_seconds <= 300.0,
           "mean R@10 mono " + fmt(m) + ", bi " + fmt(b) + ", multi " + fmt(u) +
               " (need non-decreasing, gain >= 3); slowest arm " + fmt(e6.max_arm_seconds, 0) + " s");
  }

  // 9: low-resource fr/cs T->I R@10 with and without the comparable data.
  const auto e5 = run_trend("E5", seeds);
  {
    const auto base = experiments::mean_recall(e5.result.arm("Multilingual").aggregate, {"fr", "cs"}, t2i, 10);
    const auto plus = experiments::mean_recall(e5.result.arm("+ Comparable").aggregate, {"fr", "cs"}, t2i, 10);
    report(9, "E5 trend", plus - base >= 2.0 && e5.max_arm_seconds <= 300.0,
           "fr/cs T->I R@10 multilingual " + fmt(base) + ", + comparable " + fmt(plus) + " (need gain >= 2); slowest arm " +
               fmt(e5.max_arm_seconds, 0) + " s");
  }

  // 10: chance floor, oracle ceiling, and the best trained arm against it.
  {
    synth::SynthConfig sc;
    sc.seed = 10;
    const auto corpus = synth::generate(sc);
    const auto vocab = Vocabulary::build(corpus);
    double r1 = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      ModelConfig mc;
      mc.vocab_size = vocab.size();
      mc.embed_dim = 32;
      mc.hidden_dim = 64;
      mc.image_dim = corpus.feature_dim();
      mc.seed = s;
      const auto r =
          evaluate_model(init_params<float>(mc), vocab, corpus, Split::Test, {{"en"}, {Direction::TextToImage}, {1}});
      r1 += r.get("en", Direction::TextToImage, 1) / 10.0;
    }
    const double chance = 100.0 / static_cast<double>(sc.n_test);
    const double sigma = 100.0 * std::sqrt(0.01 * 0.99 / (10.0 * static_cast<double>(sc.n_test)));
    const double z = (r1 - chance) / sigma;

    synth::SynthConfig oc;
    const double ceiling_t = synth::oracle_recall_bound(oc, 10);
    oc.regime = synth::Regime::Comparable;
    const double ceiling_c = synth::oracle_recall_bound(oc, 10);

    double best_ratio = 0.0;
    std::string best_name;
    for (const auto* run : {&e1, &e6, &e5}) {
      const auto& recipe = experiments::find_recipe(run->result.recipe);
      const double ceiling = recipe.eval_source == experiments::Source::Translation ? ceiling_t : ceiling_c;
      const double ratio = best_cell_mean(run->result, recipe) / ceiling;
      if (ratio > best_ratio) {
        best_ratio = ratio;
        best_name = recipe.name;
      }
    }
    report(10, "floor and ceiling", std::abs(z) < 5.0 && std::min(ceiling_t, ceiling_c) >= 90.0 && best_ratio >= 0.6,
           "untrained T->I R@1 " + fmt(r1) + " vs chance " + fmt(chance) + " (z " + fmt(z) + "); oracle R@10 " +
               fmt(ceiling_t) + " translation / " + fmt(ceiling_c) + " comparable (>= 90); best arm (" + best_name +
               ") at " + fmt(100.0 * best_ratio, 1) + "% of ceiling (>= 60%)");
  }

  // 11-12 need Multi30K-format corpora: $MLVSE_MULTI30K/{translation,comparable}.
  const char* real = std::getenv("MLVSE_MULTI30K");
  if (!real || !*real) {
    skip(11, "vocabulary union on Multi30K", "set MLVSE_MULTI30K to run");
    skip(12, "Jaccard matrix on Multi30K", "set MLVSE_MULTI30K to run");
  } else {
    const fs::path root(real);
    const auto translation = load_corpus(CorpusPaths::in_directory(root / "translation"));
    const auto comparable = load_corpus(CorpusPaths::in_directory(root / "comparable"));
    const auto st = vocab_union_stats(restrict_languages(translation, {"en", "de"}));
    const auto sc = vocab_union_stats(restrict_languages(comparable, {"en", "de"}));
    report(11, "vocabulary union on Multi30K",
           st.total_tokens == 17571 && st.union_tokens == 16553 && sc.total_tokens == 18337 && sc.union_tokens == 17667,
           "translation " + std::to_string(st.total_tokens) + "/" + std::to_string(st.union_tokens) +
               " (17571/16553), comparable " + std::to_string(sc.total_tokens) + "/" + std::to_string(sc.union_tokens) +
               " (18337/17667)");
    const auto vocab = Vocabulary::build(translation);
    const std::vector<std::tuple<Language, Language, double>> expected{
        {"en", "de", 0.04}, {"en", "fr", 0.06}, {"en", "cs", 0.02},
        {"de", "fr", 0.03}, {"de", "cs", 0.01}, {"fr", "cs", 0.01}};
    bool ok = true;
    std::string detail;
    for (const auto& [a, b, want] : expected) {
      const double got = jaccard_overlap(vocab, a, b);
      ok = ok && std::abs(std::round(got * 100.0) / 100.0 - want) < 1e-9;
      detail += a + "-" + b + " " + fmt(got) + " ";
    }
    report(12, "Jaccard matrix on Multi30K", ok, detail);
  }

  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
