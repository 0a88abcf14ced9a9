#include "mlvse/evaluation/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mlvse/error.hpp"
#include "mlvse/model/encoders.hpp"
#include "mlvse/numerics/ops.hpp"

namespace mlvse {

std::string to_string(Direction d) { return d == Direction::ImageToText ? "i2t" : "t2i"; }

Direction parse_direction(const std::string& s) {
  if (s == "i2t" || s == "I->T") return Direction::ImageToText;
  if (s == "t2i" || s == "T->I") return Direction::TextToImage;
  throw ConfigError("unknown retrieval direction '" + s + "' (expected i2t or t2i)");
}

std::vector<std::size_t> first_hit_ranks(const MatrixF& scores, const std::vector<std::vector<std::size_t>>& truth) {
  if (truth.size() != scores.rows())
    throw ProtocolError("truth has " + std::to_string(truth.size()) + " queries, scores have " +
                        std::to_string(scores.rows()));
  std::vector<std::size_t> ranks(scores.rows());
  for (std::size_t q = 0; q < scores.rows(); ++q) {
    const auto& t = truth[q];
    if (t.empty()) throw ProtocolError("query " + std::to_string(q) + " has no correct candidate");
    // Best-placed correct candidate under (score desc, index asc).
    std::size_t best = t.front();
    for (auto c : t) {
      if (c >= scores.cols()) throw ProtocolError("truth index " + std::to_string(c) + " out of range");
      if (scores(q, c) > scores(q, best) || (scores(q, c) == scores(q, best) && c < best)) best = c;
    }
    const float bs = scores(q, best);
    std::size_t ahead = 0;
    for (std::size_t c = 0; c < scores.cols(); ++c) {
      const float v = scores(q, c);
      if (v > bs || (v == bs && c < best)) ++ahead;
    }
    ranks[q] = ahead;
  }
  return ranks;
}

double recall_at_k(const MatrixF& scores, const std::vector<std::vector<std::size_t>>& truth, std::size_t k) {
  if (k == 0 || k > scores.cols())
    throw ProtocolError("k=" + std::to_string(k) + " invalid for " + std::to_string(scores.cols()) + " candidates");
  if (scores.rows() == 0) throw ProtocolError("recall_at_k needs at least one query");
  const auto ranks = first_hit_ranks(scores, truth);
  const auto hits = std::count_if(ranks.begin(), ranks.end(), [&](std::size_t r) { return r < k; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double RetrievalReport::get(const Language& lang, Direction dir, std::size_t k) const {
  auto it = metrics.find(MetricKey{lang, dir, k});
  if (it == metrics.end())
    throw ProtocolError("report has no " + to_string(dir) + " R@" + std::to_string(k) + " for '" + lang + "'");
  return it->second.mean;
}

double RetrievalReport::recall_sum() const {
  double s = 0.0;
  for (const auto& [key, v] : metrics) s += v.mean;
  return s;
}

bool RetrievalReport::same_protocol(const RetrievalReport& other) const {
  if (metrics.size() != other.metrics.size()) return false;
  return std::equal(metrics.begin(), metrics.end(), other.metrics.begin(),
                    [](const auto& a, const auto& b) { return a.first == b.first; });
}

namespace {

MatrixF encode_caption_set(const ModelParams<float>& params, const Vocabulary& vocab, const Corpus& corpus,
                           const std::vector<std::size_t>& ids) {
  constexpr std::size_t kChunk = 256;
  MatrixF out(ids.size(), params.config.hidden_dim);
  for (std::size_t start = 0; start < ids.size(); start += kChunk) {
    const std::size_t end = std::min(ids.size(), start + kChunk);
    std::vector<TokenSequence> batch;
    for (std::size_t i = start; i < end; ++i) batch.push_back(vocab.encode(corpus.captions()[ids[i]].tokens));
    const MatrixF enc = encode_captions(params, batch);
    std::copy(enc.values().begin(), enc.values().end(), out.values().begin() + start * out.cols());
  }
  return out;
}

}  // namespace

RetrievalReport evaluate_model(const ModelParams<float>& params, const Vocabulary& vocab, const Corpus& corpus,
                               Split split, const RetrievalProtocol& protocol) {
  if (!std::is_sorted(protocol.ks.begin(), protocol.ks.end()) || protocol.ks.empty())
    throw ConfigError("recall cut-offs must be a non-empty ascending list");
  const auto images = corpus.images_in(split);
  if (images.empty()) throw EmptyCorpusError("split '" + to_string(split) + "' has no images");

  RetrievalReport report;
  for (const auto& lang : protocol.languages) {
    const auto caps = corpus.captions_in(split, lang);
    if (caps.empty())
      throw UnknownLanguageError("language '" + lang + "' has no captions in split '" + to_string(split) + "'");
    if (params.config.vocab_size != vocab.size())
      throw IncompatibleError("model vocabulary size " + std::to_string(params.config.vocab_size) +
                              " differs from corpus vocabulary size " + std::to_string(vocab.size()));

    // Only images described in this language take part.
    std::vector<std::size_t> local_of(corpus.image_count(), SIZE_MAX);
    std::vector<std::size_t> lang_images;
    for (auto c : caps) {
      const auto img = corpus.captions()[c].image;
      if (local_of[img] == SIZE_MAX) {
        local_of[img] = lang_images.size();
        lang_images.push_back(img);
      }
    }
    std::sort(lang_images.begin(), lang_images.end());
    for (std::size_t i = 0; i < lang_images.size(); ++i) local_of[lang_images[i]] = i;

    MatrixF feats(lang_images.size(), corpus.feature_dim());
    for (std::size_t i = 0; i < lang_images.size(); ++i) {
      const auto src = corpus.features().row(lang_images[i]);
      std::copy(src.begin(), src.end(), feats.row(i).begin());
    }
    const MatrixF img = encode_images(params, feats);
    const MatrixF txt = encode_caption_set(params, vocab, corpus, caps);

    for (auto dir : protocol.directions) {
      MatrixF scores;
      std::vector<std::vector<std::size_t>> truth;
      if (dir == Direction::ImageToText) {
        scores = cosine_similarity_matrix(img, txt);
        truth.resize(lang_images.size());
        for (std::size_t c = 0; c < caps.size(); ++c) truth[local_of[corpus.captions()[caps[c]].image]].push_back(c);
      } else {
        scores = cosine_similarity_matrix(txt, img);
        truth.resize(caps.size());
        for (std::size_t c = 0; c < caps.size(); ++c) truth[c] = {local_of[corpus.captions()[caps[c]].image]};
      }
      const auto ranks = first_hit_ranks(scores, truth);
      for (auto k : protocol.ks) {
        const auto hits = std::count_if(ranks.begin(), ranks.end(), [&](std::size_t r) { return r < k; });
        const double r = 100.0 * static_cast<double>(hits) / static_cast<double>(ranks.size());
        report.metrics[MetricKey{lang, dir, k}] = MetricValue{r, 0.0, {r}};
      }
    }
  }
  return report;
}

RetrievalReport aggregate_seeds(const std::vector<RetrievalReport>& reports) {
  if (reports.empty()) throw ProtocolError("aggregate_seeds needs at least one report");
  for (const auto& r : reports)
    if (!r.same_protocol(reports.front())) throw ProtocolError("cannot aggregate reports with different protocols");
  RetrievalReport out;
  out.seeds = reports.size();
  for (const auto& [key, _] : reports.front().metrics) {
    MetricValue v;
    for (const auto& r : reports) v.samples.push_back(r.metrics.at(key).mean);
    const double n = static_cast<double>(v.samples.size());
    double sum = 0.0;
    for (double x : v.samples) sum += x;
    v.mean = sum / n;
    if (v.samples.size() > 1) {
      double ss = 0.0;
      for (double x : v.samples) ss += (x - v.mean) * (x - v.mean);
      v.stddev = std::sqrt(ss / (n - 1.0));
    }
    out.metrics[key] = std::move(v);
  }
  return out;
}

std::string report_to_jsonl(const RetrievalReport& report) {
  std::string out;
  for (const auto& [key, v] : report.metrics) {
    nlohmann::json j = {{"language", key.language}, {"direction", to_string(key.direction)},
                        {"k", key.k},               {"mean", v.mean},
                        {"std", v.stddev},          {"seeds", report.seeds}};
    out += j.dump() + "\n";
  }
  return out;
}

std::string report_to_table(const RetrievalReport& report) {
  std::set<Language> langs;
  std::set<std::size_t> ks;
  std::set<Direction> dirs;
  for (const auto& [key, _] : report.metrics) {
    langs.insert(key.language);
    ks.insert(key.k);
    dirs.insert(key.direction);
  }
  std::ostringstream out;
  out << std::left << std::setw(10) << "lang";
  for (auto d : dirs)
    for (auto k : ks) out << std::right << std::setw(14) << (to_string(d) + " R@" + std::to_string(k));
  out << "\n";
  out << std::fixed << std::setprecision(1);
  for (const auto& lang : langs) {
    out << std::left << std::setw(10) << lang;
    for (auto d : dirs)
      for (auto k : ks) {
        auto it = report.metrics.find(MetricKey{lang, d, k});
        std::ostringstream cell;
        cell << std::fixed << std::setprecision(1);
        if (it == report.metrics.end()) {
          cell << "-";
        } else {
          cell << it->second.mean;
          if (report.seeds > 1) cell << "±" << it->second.stddev;
        }
        out << std::right << std::setw(14) << cell.str();
      }
    out << "\n";
  }
  return out.str();
}

}  // namespace mlvse
