#include "mlvse/training/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include <json.hpp>

#include "mlvse/error.hpp"
#include "mlvse/model/encoders.hpp"
#include "mlvse/numerics/ops.hpp"

namespace mlvse {

BatchCursor::BatchCursor(std::size_t size) : order_(size) {
  if (size == 0) throw EmptyCorpusError("cannot draw batches from an empty dataset");
  std::iota(order_.begin(), order_.end(), std::size_t{0});
}

std::vector<std::size_t> BatchCursor::next(Rng& rng, std::size_t batch_size) {
  if (batch_size == 0) throw ConfigError("batch size must be positive");
  const std::size_t n = order_.size();
  const std::size_t remaining = n - pos_;
  if (!started_ || remaining == 0 || (remaining < 2 && n >= 2)) {
    std::shuffle(order_.begin(), order_.end(), rng);
    pos_ = 0;
    ++epoch_;
    started_ = true;
  }
  const std::size_t take = std::min(batch_size, n - pos_);
  std::vector<std::size_t> out(order_.begin() + static_cast<std::ptrdiff_t>(pos_),
                               order_.begin() + static_cast<std::ptrdiff_t>(pos_ + take));
  pos_ += take;
  return out;
}

std::size_t BatchCursor::batches_per_pass(std::size_t size, std::size_t batch_size) {
  const std::size_t rem = size % batch_size;
  return size / batch_size + ((rem >= 2 || (rem == 1 && size == 1)) ? 1 : 0);
}

StopDecision evaluate_stopping(const std::vector<double>& recall_sums, std::size_t patience) {
  if (recall_sums.empty()) return StopDecision::Continue;
  std::size_t best = 0;
  for (std::size_t i = 1; i < recall_sums.size(); ++i)
    if (recall_sums[i] > recall_sums[best]) best = i;
  return recall_sums.size() - 1 - best >= patience ? StopDecision::Stop : StopDecision::Continue;
}

std::string to_string(Task t) { return t == Task::C2I ? "c2i" : "c2c"; }

void TrainConfig::validate() const {
  if (!(p_c2i >= 0.0 && p_c2i <= 1.0)) throw ConfigError("p_c2i must lie in [0, 1]");
  if (patience < 1) throw ConfigError("patience must be at least 1");
  if (batch_size < 2) throw ConfigError("batch size must be at least 2");
  if (!(lr >= 0.0)) throw ConfigError("learning rate must be non-negative");
  if (!(loss.margin > 0.0)) throw ConfigError("margin must be positive");
  if (eval_interval == 0) throw ConfigError("evaluation interval must be positive");
  if (languages.empty()) throw ConfigError("at least one training language is required");
}

std::string TrainHistory::to_jsonl() const {
  std::string out;
  for (const auto& r : iterations) {
    nlohmann::json j = {{"iteration", r.iteration}, {"task", to_string(r.task)}, {"loss", r.loss}};
    if (!r.language.empty()) j["language"] = r.language;
    out += j.dump() + "\n";
  }
  for (std::size_t e = 0; e < evaluations.size(); ++e) {
    const auto& r = evaluations[e];
    nlohmann::json metrics = nlohmann::json::array();
    for (const auto& [key, v] : r.metrics.metrics)
      metrics.push_back({{"language", key.language}, {"direction", to_string(key.direction)}, {"k", key.k},
                         {"recall", v.mean}});
    out += nlohmann::json{{"evaluation", e},
                          {"iteration", r.iteration},
                          {"recall_sum", r.recall_sum},
                          {"c2i_steps", r.c2i_steps},
                          {"c2c_steps", r.c2c_steps},
                          {"best", e == best_evaluation},
                          {"metrics", metrics}}
               .dump() +
           "\n";
  }
  out += nlohmann::json{{"stop_reason", stop_reason}, {"best_evaluation", best_evaluation},
                        {"c2i_steps", c2i_steps},     {"c2c_steps", c2c_steps}}
             .dump() +
         "\n";
  return out;
}

namespace {

struct C2IDataset {
  Language language;
  std::vector<std::size_t> captions;  // corpus caption ids
  BatchCursor cursor;
};

void adam_update(ModelParams<float>& params, bool include_image, const AdamConfig& adam) {
  for (std::size_t i = 0; i < params.blocks.size(); ++i) {
    if (!include_image && !is_text_block(i)) continue;
    if (i == kImageBias && !params.config.image_bias) continue;
    adam_step(params.blocks[i], adam);
  }
}

}  // namespace

TrainResult train(const Corpus& corpus, const Vocabulary& vocab, const CaptionPairSet& pairs,
                  ModelParams<float> params, const TrainConfig& config, const TrainHooks& hooks) {
  config.validate();
  if (params.config.vocab_size != vocab.size())
    throw IncompatibleError("model vocabulary size " + std::to_string(params.config.vocab_size) +
                            " differs from vocabulary size " + std::to_string(vocab.size()));
  if (params.config.image_dim != corpus.feature_dim())
    throw DimensionError("model expects image features of dimension " + std::to_string(params.config.image_dim) +
                         ", corpus has " + std::to_string(corpus.feature_dim()));
  const bool c2c_active = config.c2c && config.p_c2i < 1.0;
  if (config.c2c && pairs.empty()) throw ConfigError("c2c training is enabled but the caption pair set is empty");

  // Every caption encoded once up front.
  std::vector<TokenSequence> encoded;
  encoded.reserve(corpus.captions().size());
  for (const auto& c : corpus.captions()) encoded.push_back(vocab.encode(c.tokens));

  std::vector<C2IDataset> datasets;
  for (const auto& lang : std::set<Language>(config.languages.begin(), config.languages.end())) {
    auto ids = corpus.captions_in(Split::Train, lang);
    if (ids.empty()) throw ConfigError("language '" + lang + "' has no training captions");
    const std::size_t n = ids.size();
    datasets.push_back(C2IDataset{lang, std::move(ids), BatchCursor(n)});
  }
  std::optional<BatchCursor> pair_cursor;
  if (c2c_active) pair_cursor.emplace(pairs.size());

  std::vector<Language> stop_langs;
  for (const auto& d : datasets)
    if (corpus.has_language(d.language, config.stopping_split)) stop_langs.push_back(d.language);
  if (stop_langs.empty())
    throw ConfigError("no training language has captions in the '" + to_string(config.stopping_split) +
                      "' split used for early stopping");
  RetrievalProtocol protocol;
  protocol.languages = stop_langs;

  std::size_t interval = config.eval_interval;
  const bool per_epoch = config.cadence == EvalCadence::PerEpoch ||
                         (config.cadence == EvalCadence::Auto && datasets.size() == 1 && !c2c_active);
  if (per_epoch) {
    interval = 0;
    for (const auto& d : datasets) interval += BatchCursor::batches_per_pass(d.captions.size(), config.batch_size);
  }

  const AdamConfig adam{config.lr, 0.9, 0.999, 1e-8};
  Rng rng(config.seed);
  std::bernoulli_distribution task_draw(config.p_c2i);
  std::uniform_int_distribution<std::size_t> lang_draw(0, datasets.size() - 1);

  TrainResult result;
  auto& hist = result.history;
  std::vector<double> sums;
  auto evaluate = [&](std::size_t iteration) {
    EvalRecord rec;
    rec.iteration = iteration;
    rec.metrics = evaluate_model(params, vocab, corpus, config.stopping_split, protocol);
    rec.recall_sum = rec.metrics.recall_sum();
    rec.c2i_steps = hist.c2i_steps;
    rec.c2c_steps = hist.c2c_steps;
    const bool improved = sums.empty() || rec.recall_sum > sums[hist.best_evaluation];
    sums.push_back(rec.recall_sum);
    hist.evaluations.push_back(std::move(rec));
    if (improved) {
      hist.best_evaluation = hist.evaluations.size() - 1;
      result.best = params;
      if (hooks.on_new_best) hooks.on_new_best(params, hist.evaluations.back());
    }
  };

  evaluate(0);
  hist.stop_reason = "max-iterations";
  for (std::size_t it = 1; it <= config.max_iterations; ++it) {
    const bool c2i = !c2c_active || task_draw(rng);
    IterationRecord rec;
    rec.iteration = it;
    rec.task = c2i ? Task::C2I : Task::C2C;
    params.zero_grad();
    if (c2i) {
      auto& ds = datasets[datasets.size() == 1 ? 0 : lang_draw(rng)];
      rec.language = ds.language;
      const auto picks = ds.cursor.next(rng, config.batch_size);
      std::vector<TokenSequence> seqs;
      MatrixF feats(picks.size(), corpus.feature_dim());
      for (std::size_t b = 0; b < picks.size(); ++b) {
        const auto cap = ds.captions[picks[b]];
        seqs.push_back(encoded[cap]);
        const auto src = corpus.features().row(corpus.captions()[cap].image);
        std::copy(src.begin(), src.end(), feats.row(b).begin());
      }
      CaptionBatchCache<float> text_cache;
      ImageBatchCache<float> image_cache;
      const MatrixF a = encode_captions(params, seqs, &text_cache);
      const MatrixF b = encode_images(params, feats, &image_cache);
      const auto loss = ranking_loss(cosine_similarity_matrix(a, b), config.loss);
      rec.loss = loss.value;
      if (!std::isfinite(rec.loss)) throw DivergenceError("non-finite loss at iteration " + std::to_string(it));
      MatrixF grad_a(a.rows(), a.cols()), grad_b(b.rows(), b.cols());
      cosine_similarity_backward(a, b, loss.grad, grad_a, grad_b);
      encode_captions_backward(params, text_cache, grad_a);
      encode_images_backward(params, image_cache, grad_b);
      adam_update(params, true, adam);
      ++hist.c2i_steps;
    } else {
      const auto picks = pair_cursor->next(rng, config.batch_size);
      std::vector<TokenSequence> left, right;
      for (auto p : picks) {
        left.push_back(encoded[pairs.pairs[p].first]);
        right.push_back(encoded[pairs.pairs[p].second]);
      }
      CaptionBatchCache<float> left_cache, right_cache;
      const MatrixF a = encode_captions(params, left, &left_cache);
      const MatrixF b = encode_captions(params, right, &right_cache);
      const auto loss = ranking_loss(cosine_similarity_matrix(a, b), config.loss);
      rec.loss = loss.value;
      if (!std::isfinite(rec.loss)) throw DivergenceError("non-finite loss at iteration " + std::to_string(it));
      MatrixF grad_a(a.rows(), a.cols()), grad_b(b.rows(), b.cols());
      cosine_similarity_backward(a, b, loss.grad, grad_a, grad_b);
      encode_captions_backward(params, left_cache, grad_a);
      encode_captions_backward(params, right_cache, grad_b);
      adam_update(params, false, adam);
      ++hist.c2c_steps;
    }
    hist.iterations.push_back(std::move(rec));

    if (it % interval == 0) {
      evaluate(it);
      if (evaluate_stopping(sums, config.patience) == StopDecision::Stop) {
        hist.stop_reason = "early-stopping";
        break;
      }
    }
  }
  return result;
}

}  // namespace mlvse
