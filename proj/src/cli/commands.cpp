#include "mlvse/cli/commands.hpp"

#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlvse/cli/config.hpp"
#include "mlvse/data/corpus_io.hpp"
#include "mlvse/data/pairs.hpp"
#include "mlvse/data/vocabulary.hpp"
#include "mlvse/error.hpp"
#include "mlvse/evaluation/retrieval.hpp"
#include "mlvse/experiments/recipes.hpp"
#include "mlvse/model/checkpoint.hpp"
#include "mlvse/synth/generator.hpp"
#include "mlvse/training/trainer.hpp"

namespace mlvse::cli {

namespace fs = std::filesystem;

namespace {

Corpus load_corpus_dir(const fs::path& dir) {
  const auto paths = CorpusPaths::in_directory(dir);
  for (const auto& p : {paths.captions, paths.features, paths.index})
    if (!fs::exists(p)) throw ConfigError("corpus file '" + p.string() + "' does not exist");
  return load_corpus(paths);
}

std::vector<Direction> parse_directions(const std::string& s) {
  if (s == "both") return {Direction::ImageToText, Direction::TextToImage};
  return {parse_direction(s)};
}

// ---------------------------------------------------------------- synth

struct SynthOptions {
  synth::SynthConfig config;
  std::string regime = "translation";
  std::string langs = "en,de";
  fs::path out;
};

void add_synth_flags(CLI::App& cmd, SynthOptions& o) {
  cmd.add_option("--regime", o.regime, "translation, comparable or disjoint")->capture_default_str();
  cmd.add_option("--langs", o.langs, "comma-separated language codes")->capture_default_str();
  cmd.add_option("--seed", o.config.seed)->capture_default_str();
  cmd.add_option("--n-train", o.config.n_train)->capture_default_str();
  cmd.add_option("--n-val", o.config.n_val)->capture_default_str();
  cmd.add_option("--n-test", o.config.n_test)->capture_default_str();
  cmd.add_option("--concept-dim", o.config.concept_dim)->capture_default_str();
  cmd.add_option("--concepts-per-image", o.config.concepts_per_image)->capture_default_str();
  cmd.add_option("--tokens-per-concept", o.config.tokens_per_concept)->capture_default_str();
  cmd.add_option("--image-dim", o.config.image_dim)->capture_default_str();
  cmd.add_option("--noise", o.config.noise)->capture_default_str();
  cmd.add_option("--captions-per-image", o.config.captions_per_image, "0 picks the regime default")
      ->capture_default_str();
}

synth::SynthConfig resolve_synth(const SynthOptions& o) {
  synth::SynthConfig c = o.config;
  c.regime = synth::parse_regime(o.regime);
  c.languages = split_list(o.langs);
  c.validate();
  return c;
}

int cmd_synth(const SynthOptions& o, std::ostream& out) {
  const auto config = resolve_synth(o);
  const fs::path dir = o.out.empty() ? default_output_dir() : o.out;
  fs::create_directories(dir);
  const Corpus corpus = synth::generate(config);
  save_corpus(corpus, CorpusPaths::in_directory(dir));
  out << "wrote " << corpus.image_count() << " images and " << corpus.captions().size() << " captions ("
      << synth::to_string(config.regime) << ") to " << dir.string() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- train

struct TrainOptions {
  fs::path config_file;
  fs::path corpus;
  fs::path out;
  std::optional<std::uint64_t> seed;
  std::optional<double> p_c2i, lr, margin;
  std::optional<std::size_t> batch_size, patience, max_iterations, embed_dim, hidden_dim, min_count;
  std::optional<std::string> langs, loss, eval_every;
  std::optional<bool> c2c;
};

void add_train_flags(CLI::App& cmd, TrainOptions& o) {
  cmd.add_option("--config", o.config_file, "JSON training configuration");
  cmd.add_option("--corpus", o.corpus, "corpus directory (overrides the config)");
  cmd.add_option("--out", o.out, "output directory (default: $MLVSE_OUT or mlvse_out)");
  cmd.add_option("--seed", o.seed);
  cmd.add_option("--p-c2i", o.p_c2i);
  cmd.add_option("--lr", o.lr);
  cmd.add_option("--margin", o.margin);
  cmd.add_option("--batch-size", o.batch_size);
  cmd.add_option("--patience", o.patience);
  cmd.add_option("--max-iterations", o.max_iterations);
  cmd.add_option("--embed-dim", o.embed_dim);
  cmd.add_option("--hidden-dim", o.hidden_dim);
  cmd.add_option("--min-count", o.min_count);
  cmd.add_option("--langs", o.langs, "comma-separated training languages");
  cmd.add_option("--loss", o.loss, "max or sum");
  cmd.add_option("--eval-every", o.eval_every, "auto, epoch or an iteration count");
  cmd.add_option("--c2c", o.c2c, "enable the caption-caption task (true/false)");
}

TrainRunConfig resolve_train(const TrainOptions& o) {
  TrainRunConfig cfg;
  if (!o.config_file.empty()) {
    if (!fs::exists(o.config_file)) throw ConfigError("config file '" + o.config_file.string() + "' does not exist");
    const auto text = read_file(o.config_file);
    cfg = train_config_from_json(parse_json_document(text, o.config_file.string()), o.config_file.string());
    if (!cfg.corpus.empty() && cfg.corpus.is_relative()) cfg.corpus = o.config_file.parent_path() / cfg.corpus;
  }
  if (!o.corpus.empty()) cfg.corpus = o.corpus;
  if (o.seed) cfg.train.seed = *o.seed;
  if (o.p_c2i) cfg.train.p_c2i = *o.p_c2i;
  if (o.lr) cfg.train.lr = *o.lr;
  if (o.margin) cfg.train.loss.margin = *o.margin;
  if (o.batch_size) cfg.train.batch_size = *o.batch_size;
  if (o.patience) cfg.train.patience = *o.patience;
  if (o.max_iterations) cfg.train.max_iterations = *o.max_iterations;
  if (o.embed_dim) cfg.embed_dim = *o.embed_dim;
  if (o.hidden_dim) cfg.hidden_dim = *o.hidden_dim;
  if (o.min_count) cfg.min_count = *o.min_count;
  if (o.langs) cfg.train.languages = split_list(*o.langs);
  if (o.loss) cfg.train.loss.variant = parse_loss_variant(*o.loss);
  if (o.eval_every) apply_eval_every(cfg.train, *o.eval_every);
  if (o.c2c) cfg.train.c2c = *o.c2c;
  if (cfg.corpus.empty()) throw ConfigError("no corpus given (--corpus or \"corpus\" in the config file)");
  if (cfg.embed_dim == 0 || cfg.hidden_dim == 0) throw ConfigError("model dimensions must be positive");
  return cfg;
}

int cmd_train(const TrainOptions& o, std::ostream& out) {
  TrainRunConfig cfg = resolve_train(o);
  const Corpus corpus = load_corpus_dir(cfg.corpus);
  if (cfg.train.languages.empty()) cfg.train.languages = corpus.languages(Split::Train);
  cfg.train.validate();
  const Vocabulary vocab = Vocabulary::build(corpus, cfg.min_count);
  ModelConfig mc;
  mc.vocab_size = vocab.size();
  mc.embed_dim = cfg.embed_dim;
  mc.hidden_dim = cfg.hidden_dim;
  mc.image_dim = corpus.feature_dim();
  mc.image_bias = cfg.image_bias;
  mc.seed = cfg.train.seed;
  const CaptionPairSet pairs =
      cfg.train.c2c ? generate_c2c_pairs(corpus, cfg.train.languages) : CaptionPairSet{};

  const fs::path dir = o.out.empty() ? default_output_dir() : o.out;
  fs::create_directories(dir);
  nlohmann::json resolved = cfg.to_json();
  resolved["vocab_size"] = vocab.size();
  resolved["vocab_hash"] = vocab.hash();
  resolved["c2c_pairs"] = pairs.size();
  write_file_atomic(dir / "config.json", resolved.dump(2) + "\n");
  out << "# config: " << resolved.dump() << "\n";

  TrainHooks hooks;
  hooks.on_new_best = [&](const ModelParams<float>& p, const EvalRecord& rec) {
    save_checkpoint(dir / "model", p, vocab.hash(), cfg.min_count);
    out << "iteration " << rec.iteration << ": new best validation recall sum " << std::fixed
        << std::setprecision(2) << rec.recall_sum << "\n";
  };
  const TrainResult result = train(corpus, vocab, pairs, init_params<float>(mc), cfg.train, hooks);
  write_file_atomic(dir / "history.jsonl", result.history.to_jsonl());
  out << "stopped (" << result.history.stop_reason << ") after " << result.history.iterations.size()
      << " iterations: " << result.history.c2i_steps << " c2i, " << result.history.c2c_steps << " c2c; best "
      << std::fixed << std::setprecision(2) << result.history.best_recall_sum() << " at iteration "
      << result.history.evaluations[result.history.best_evaluation].iteration << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- eval

struct EvalOptions {
  fs::path checkpoint;
  fs::path corpus;
  fs::path out;
  std::string split = "test";
  std::string langs;
  std::string direction = "both";
  std::string ks = "1,5,10";
};

int cmd_eval(const EvalOptions& o, std::ostream& out) {
  fs::path manifest = o.checkpoint;
  manifest += ".manifest";
  if (!fs::exists(manifest)) throw ConfigError("checkpoint '" + manifest.string() + "' does not exist");
  const Split split = parse_split(o.split);
  RetrievalProtocol protocol;
  protocol.directions = parse_directions(o.direction);
  protocol.ks = parse_size_list(o.ks);
  const Corpus corpus = load_corpus_dir(o.corpus);
  const Checkpoint ck = load_checkpoint(o.checkpoint);
  const Vocabulary vocab = Vocabulary::build(corpus, ck.min_count);
  if (vocab.hash() != ck.vocab_hash) {
    std::ostringstream msg;
    msg << "checkpoint vocabulary hash " << std::hex << ck.vocab_hash << " does not match the corpus vocabulary "
        << vocab.hash() << "; was the checkpoint trained on this corpus?";
    throw IncompatibleError(msg.str());
  }
  protocol.languages = o.langs.empty() ? corpus.languages(split) : split_list(o.langs);
  const RetrievalReport report = evaluate_model(ck.params, vocab, corpus, split, protocol);
  const fs::path dir = o.out.empty() ? default_output_dir() : o.out;
  fs::create_directories(dir);
  write_file_atomic(dir / "report.jsonl", report_to_jsonl(report));
  const std::string table = report_to_table(report);
  write_file_atomic(dir / "report.txt", table);
  out << table;
  out << "recall sum " << std::fixed << std::setprecision(2) << report.recall_sum() << "\n";
  return kExitOk;
}

// ---------------------------------------------------------------- experiment

struct ExperimentOptions {
  std::string recipe;
  std::string seeds = "1,2,3,4,5";
  fs::path corpus;
  fs::path out;
  bool list = false;
  SynthOptions synth;
  std::optional<std::size_t> embed_dim, hidden_dim, batch_size, patience, max_iterations, min_count;
  std::optional<std::string> eval_every;
  std::optional<double> lr, p_c2i;
};

int cmd_experiment(const ExperimentOptions& o, std::ostream& out) {
  if (o.list || o.recipe.empty()) {
    for (const auto& r : experiments::recipes()) out << r.name << "  " << r.title << "\n";
    if (o.recipe.empty() && !o.list) throw ConfigError("no recipe given; choose one of the recipes listed above");
    return kExitOk;
  }
  const auto& recipe = experiments::find_recipe(o.recipe);
  experiments::ExperimentSettings s;
  s.synth = o.synth.config;
  if (o.embed_dim) s.embed_dim = *o.embed_dim;
  if (o.hidden_dim) s.hidden_dim = *o.hidden_dim;
  if (o.batch_size) s.train.batch_size = *o.batch_size;
  if (o.patience) s.train.patience = *o.patience;
  if (o.max_iterations) s.train.max_iterations = *o.max_iterations;
  if (o.min_count) s.min_count = *o.min_count;
  if (o.eval_every) apply_eval_every(s.train, *o.eval_every);
  if (o.lr) s.train.lr = *o.lr;
  if (o.p_c2i) s.train.p_c2i = *o.p_c2i;
  s.synth.validate();
  std::vector<std::uint64_t> seeds;
  for (auto v : parse_size_list(o.seeds)) seeds.push_back(v);
  if (seeds.empty()) throw ConfigError("at least one seed is required");
  if (!o.corpus.empty()) {
    experiments::SourceCorpora real;
    real.translation = load_corpus_dir(o.corpus / "translation");
    real.comparable = load_corpus_dir(o.corpus / "comparable");
    s.corpora = std::move(real);
  }

  nlohmann::json header = {{"recipe", recipe.name},
                           {"title", recipe.title},
                           {"seeds", seeds},
                           {"corpus", o.corpus.empty() ? "synthetic" : o.corpus.string()},
                           {"embed_dim", s.embed_dim},
                           {"hidden_dim", s.hidden_dim},
                           {"min_count", s.min_count},
                           {"batch_size", s.train.batch_size},
                           {"lr", s.train.lr},
                           {"p_c2i", s.train.p_c2i},
                           {"margin", s.train.loss.margin},
                           {"loss", to_string(s.train.loss.variant)},
                           {"patience", s.train.patience},
                           {"eval_every", eval_every_string(s.train)},
                           {"eval_interval", s.train.eval_interval},
                           {"max_iterations", s.train.max_iterations}};
  if (o.corpus.empty())
    header["synth"] = {{"n_train", s.synth.n_train},
                       {"n_val", s.synth.n_val},
                       {"n_test", s.synth.n_test},
                       {"concept_dim", s.synth.concept_dim},
                       {"concepts_per_image", s.synth.concepts_per_image},
                       {"tokens_per_concept", s.synth.tokens_per_concept},
                       {"image_dim", s.synth.image_dim},
                       {"noise", s.synth.noise},
                       {"captions_per_image", s.synth.captions_per_image}};
  out << "# config: " << header.dump() << "\n";
  const auto result = experiments::run_recipe(
      recipe, s, seeds, [&](const std::string& arm, std::uint64_t seed, const RetrievalReport& r) {
        out << "# " << arm << " seed " << seed << ": recall sum " << std::fixed << std::setprecision(2)
            << r.recall_sum() << "\n";
      });
  const std::string table = "# " + recipe.name + ": " + recipe.title + "\n" + experiments::format_table(recipe, result);
  out << table;
  const fs::path dir = o.out.empty() ? default_output_dir() : o.out;
  fs::create_directories(dir);
  write_file_atomic(dir / (recipe.name + ".txt"), "# config: " + header.dump() + "\n" + table);
  write_file_atomic(dir / (recipe.name + ".jsonl"), experiments::result_to_jsonl(result));
  return kExitOk;
}

// ---------------------------------------------------------------- vocab-stats

int cmd_vocab_stats(const fs::path& corpus_dir, std::size_t min_count, std::ostream& out) {
  const Corpus corpus = load_corpus_dir(corpus_dir);
  const auto stats = vocab_union_stats(corpus, min_count);
  const Vocabulary vocab = Vocabulary::build(corpus, min_count);
  out << "total " << stats.total_tokens << "\nunion " << stats.union_tokens << "\nreduction " << std::fixed
      << std::setprecision(4) << stats.reduction << "\njoint vocabulary " << vocab.size() << " (including "
      << kUnkToken << ")\n";
  const auto langs = corpus.languages(Split::Train);
  out << "jaccard\n" << std::setw(6) << "";
  for (const auto& l : langs) out << std::setw(8) << l;
  out << "\n";
  for (std::size_t i = 0; i < langs.size(); ++i) {
    out << std::setw(6) << langs[i];
    for (std::size_t j = 0; j < langs.size(); ++j) {
      if (j < i)
        out << std::setw(8) << "-";
      else
        out << std::setw(8) << std::setprecision(2) << jaccard_overlap(vocab, langs[i], langs[j]);
    }
    out << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- pairs

int cmd_pairs(const fs::path& corpus_dir, const std::string& langs, const std::string& split, const fs::path& out_dir,
              std::ostream& out) {
  const Corpus corpus = load_corpus_dir(corpus_dir);
  const auto languages = langs.empty() ? corpus.languages() : split_list(langs);
  std::optional<Split> s;
  if (split != "all") s = parse_split(split);
  const auto pairs = generate_c2c_pairs(corpus, languages, s);
  std::map<std::pair<Language, Language>, std::size_t> counts;
  std::string dump;
  for (const auto& [a, b] : pairs.pairs) {
    const auto& ca = corpus.captions()[a];
    const auto& cb = corpus.captions()[b];
    ++counts[{ca.language, cb.language}];
    auto join = [](const std::vector<std::string>& t) {
      std::string r;
      for (const auto& w : t) r += (r.empty() ? "" : " ") + w;
      return r;
    };
    dump += corpus.image_ids()[ca.image] + "\t" + std::to_string(a) + "\t" + std::to_string(b) + "\t" +
            ca.language + "\t" + cb.language + "\t" + join(ca.tokens) + "\t" + join(cb.tokens) + "\n";
  }
  const fs::path dir = out_dir.empty() ? default_output_dir() : out_dir;
  fs::create_directories(dir);
  write_file_atomic(dir / "pairs.tsv", dump);
  for (const auto& [k, n] : counts) out << k.first << "-" << k.second << "\t" << n << "\n";
  out << "total\t" << pairs.size() << "\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multilingual visual-semantic embeddings: synthetic data, training, evaluation and experiments"};
  app.require_subcommand(1);

  SynthOptions synth_opts;
  auto* synth_cmd = app.add_subcommand("synth", "generate a synthetic multilingual corpus");
  add_synth_flags(*synth_cmd, synth_opts);
  synth_cmd->add_option("--out", synth_opts.out, "output directory (default: $MLVSE_OUT or mlvse_out)");

  TrainOptions train_opts;
  auto* train_cmd = app.add_subcommand("train", "train a model and keep the best checkpoint");
  add_train_flags(*train_cmd, train_opts);

  EvalOptions eval_opts;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on a corpus split");
  eval_cmd->add_option("--checkpoint", eval_opts.checkpoint, "checkpoint stem (without .manifest/.bin)")
      ->required();
  eval_cmd->add_option("--corpus", eval_opts.corpus, "corpus directory")->required();
  eval_cmd->add_option("--out", eval_opts.out);
  eval_cmd->add_option("--split", eval_opts.split)->capture_default_str();
  eval_cmd->add_option("--langs", eval_opts.langs, "default: every language in the split");
  eval_cmd->add_option("--direction", eval_opts.direction, "i2t, t2i or both")->capture_default_str();
  eval_cmd->add_option("--ks", eval_opts.ks)->capture_default_str();

  ExperimentOptions exp_opts;
  auto* exp_cmd = app.add_subcommand("experiment", "run a named experiment recipe over several seeds");
  exp_cmd->add_option("recipe", exp_opts.recipe, "recipe name (E1..E6)");
  exp_cmd->add_flag("--list", exp_opts.list, "list the available recipes");
  exp_cmd->add_option("--seeds", exp_opts.seeds)->capture_default_str();
  exp_cmd->add_option("--corpus", exp_opts.corpus,
                      "directory with translation/ and comparable/ corpora (default: synthetic)");
  exp_cmd->add_option("--out", exp_opts.out);
  exp_cmd->add_option("--embed-dim", exp_opts.embed_dim);
  exp_cmd->add_option("--hidden-dim", exp_opts.hidden_dim);
  exp_cmd->add_option("--batch-size", exp_opts.batch_size);
  exp_cmd->add_option("--patience", exp_opts.patience);
  exp_cmd->add_option("--max-iterations", exp_opts.max_iterations);
  exp_cmd->add_option("--min-count", exp_opts.min_count);
  exp_cmd->add_option("--eval-every", exp_opts.eval_every);
  exp_cmd->add_option("--lr", exp_opts.lr);
  exp_cmd->add_option("--p-c2i", exp_opts.p_c2i);
  exp_cmd->add_option("--n-train", exp_opts.synth.config.n_train);
  exp_cmd->add_option("--n-val", exp_opts.synth.config.n_val);
  exp_cmd->add_option("--n-test", exp_opts.synth.config.n_test);
  exp_cmd->add_option("--noise", exp_opts.synth.config.noise);

  fs::path stats_corpus;
  std::size_t stats_min_count = kDefaultMinCount;
  auto* stats_cmd = app.add_subcommand("vocab-stats", "vocabulary union and cross-language Jaccard overlap");
  stats_cmd->add_option("--corpus", stats_corpus)->required();
  stats_cmd->add_option("--min-count", stats_min_count)->capture_default_str();

  fs::path pairs_corpus, pairs_out;
  std::string pairs_langs, pairs_split = "train";
  auto* pairs_cmd = app.add_subcommand("pairs", "dump the caption-caption pair set with counts");
  pairs_cmd->add_option("--corpus", pairs_corpus)->required();
  pairs_cmd->add_option("--langs", pairs_langs, "default: every language");
  pairs_cmd->add_option("--split", pairs_split, "train, val, test or all")->capture_default_str();
  pairs_cmd->add_option("--out", pairs_out);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  if (!rev.empty()) rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*synth_cmd) return cmd_synth(synth_opts, out);
    if (*train_cmd) return cmd_train(train_opts, out);
    if (*eval_cmd) return cmd_eval(eval_opts, out);
    if (*exp_cmd) return cmd_experiment(exp_opts, out);
    if (*stats_cmd) return cmd_vocab_stats(stats_corpus, stats_min_count, out);
    if (*pairs_cmd) return cmd_pairs(pairs_corpus, pairs_langs, pairs_split, pairs_out, out);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const IncompatibleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const UnknownLanguageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace mlvse::cli
