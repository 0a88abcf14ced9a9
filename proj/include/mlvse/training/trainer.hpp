#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mlvse/data/corpus.hpp"
#include "mlvse/data/pairs.hpp"
#include "mlvse/data/vocabulary.hpp"
#include "mlvse/evaluation/retrieval.hpp"
#include "mlvse/model/params.hpp"
#include "mlvse/objective/ranking_loss.hpp"

namespace mlvse {

using Rng = std::mt19937_64;

// Walks a shuffled permutation of [0, size) batch by batch and reshuffles once
// a pass is exhausted. A trailing batch with fewer than 2 items is folded into
// the next pass unless it is the whole dataset.
class BatchCursor {
 public:
  explicit BatchCursor(std::size_t size);

  std::vector<std::size_t> next(Rng& rng, std::size_t batch_size);

  std::size_t size() const { return order_.size(); }
  // Number of passes started so far.
  std::size_t epoch() const { return epoch_; }
  // Batches emitted per pass for a given batch size.
  static std::size_t batches_per_pass(std::size_t size, std::size_t batch_size);

 private:
  std::vector<std::size_t> order_;
  std::size_t pos_ = 0;
  std::size_t epoch_ = 0;
  bool started_ = false;
};

enum class StopDecision { Continue, Stop };

// Stop iff the last `patience` evaluations all failed to beat the best earlier
// recall sum (the first evaluation reaching the maximum counts as the best).
StopDecision evaluate_stopping(const std::vector<double>& recall_sums, std::size_t patience);

enum class EvalCadence { Auto, PerEpoch, EveryN };

enum class Task { C2I, C2C };
std::string to_string(Task t);

struct TrainConfig {
  double p_c2i = 0.5;
  std::size_t batch_size = 128;
  double lr = 2e-4;
  LossConfig loss;
  std::size_t patience = 10;
  // Auto: per epoch for single-language c2i-only runs, every eval_interval iterations otherwise.
  EvalCadence cadence = EvalCadence::Auto;
  std::size_t eval_interval = 500;
  std::size_t max_iterations = 100000;
  std::uint64_t seed = 0;
  std::vector<Language> languages;
  bool c2c = false;
  // Evaluation split used for early stopping.
  Split stopping_split = Split::Val;

  void validate() const;
};

struct IterationRecord {
  std::size_t iteration = 0;
  Task task = Task::C2I;
  Language language;  // empty for c2c steps
  double loss = 0.0;
};

struct EvalRecord {
  std::size_t iteration = 0;
  double recall_sum = 0.0;
  RetrievalReport metrics;
  std::size_t c2i_steps = 0;
  std::size_t c2c_steps = 0;
};

struct TrainHistory {
  std::vector<IterationRecord> iterations;
  std::vector<EvalRecord> evaluations;
  std::size_t best_evaluation = 0;
  std::string stop_reason;
  std::size_t c2i_steps = 0;
  std::size_t c2c_steps = 0;

  double best_recall_sum() const { return evaluations.empty() ? 0.0 : evaluations[best_evaluation].recall_sum; }
  // One JSON object per line: iteration records, then evaluation records.
  std::string to_jsonl() const;
};

struct TrainResult {
  ModelParams<float> best;
  TrainHistory history;
};

struct TrainHooks {
  // Called whenever an evaluation sets a new best recall sum.
  std::function<void(const ModelParams<float>&, const EvalRecord&)> on_new_best;
};

// Alternates c2i and c2c updates: each iteration draws the c2i task with
// probability p_c2i (then a language uniformly and a batch of that language's
// caption/image pairs) or else a batch of cross-language caption pairs, and
// applies one Adam step to every parameter reachable from that loss. A single
// random stream seeded from config.seed drives every draw.
TrainResult train(const Corpus& corpus, const Vocabulary& vocab, const CaptionPairSet& pairs,
                  ModelParams<float> params, const TrainConfig& config, const TrainHooks& hooks = {});

}  // namespace mlvse
