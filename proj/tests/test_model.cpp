#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "mlvse/error.hpp"
#include "mlvse/model/checkpoint.hpp"
#include "mlvse/model/encoders.hpp"
#include "mlvse/model/model_check.hpp"
#include "mlvse/model/params.hpp"

using namespace mlvse;

namespace {

ModelConfig small_config(std::uint64_t seed = 1) {
  ModelConfig c;
  c.vocab_size = 7;
  c.embed_dim = 3;
  c.hidden_dim = 4;
  c.image_dim = 5;
  c.seed = seed;
  return c;
}

// Plain scalar GRU written out element by element.
std::vector<double> reference_gru(const ModelParams<double>& p, const TokenSequence& seq) {
  const auto e = p.config.embed_dim, hd = p.config.hidden_dim;
  std::vector<double> h(hd, 0.0);
  auto affine = [&](BlockId in, BlockId rec, BlockId bias, const std::vector<double>& x,
                    const std::vector<double>& s, std::size_t j) {
    double a = p[bias].value(0, j);
    for (std::size_t k = 0; k < e; ++k) a += x[k] * p[in].value(k, j);
    for (std::size_t k = 0; k < hd; ++k) a += s[k] * p[rec].value(k, j);
    return a;
  };
  for (auto tok : seq) {
    std::vector<double> x(e);
    for (std::size_t k = 0; k < e; ++k) x[k] = p[kEmbedding].value(tok, k);
    std::vector<double> z(hd), r(hd), rh(hd), next(hd);
    for (std::size_t j = 0; j < hd; ++j) {
      z[j] = 1.0 / (1.0 + std::exp(-affine(kUpdateInput, kUpdateRecurrent, kUpdateBias, x, h, j)));
      r[j] = 1.0 / (1.0 + std::exp(-affine(kResetInput, kResetRecurrent, kResetBias, x, h, j)));
    }
    for (std::size_t j = 0; j < hd; ++j) rh[j] = r[j] * h[j];
    for (std::size_t j = 0; j < hd; ++j) {
      const double cand = std::tanh(affine(kCandidateInput, kCandidateRecurrent, kCandidateBias, x, rh, j));
      next[j] = (1.0 - z[j]) * h[j] + z[j] * cand;
    }
    h = next;
  }
  return h;
}

void randomize_biases(ModelParams<double>& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 0.3);
  for (auto id : {kUpdateBias, kResetBias, kCandidateBias, kImageBias})
    for (auto& v : p[id].value.values()) v = n(rng);
}

}  // namespace

TEST_CASE("gru cell at zero parameters") {
  auto p = init_params<double>(small_config());
  for (auto& b : p.blocks) b.value.set_zero();
  GruStepCache<double> cache;
  const MatrixD x(1, 3, 0.7), h(1, 4);
  const auto out = gru_step(p, x, h, nullptr, &cache);
  for (auto v : cache.update.values()) CHECK(v == doctest::Approx(0.5));
  for (auto v : cache.reset.values()) CHECK(v == doctest::Approx(0.5));
  for (auto v : out.values()) CHECK(v == 0.0);
  CHECK(gru_cell(p, x, h) == out);
}

TEST_CASE("single-token caption equals one gru step from zero") {
  auto p = init_params<double>(small_config());
  randomize_biases(p, 3);
  MatrixD x(1, 3);
  for (std::size_t k = 0; k < 3; ++k) x(0, k) = p[kEmbedding].value(2, k);
  const auto h = gru_cell(p, x, MatrixD(1, 4));
  const auto enc = encode_captions(p, {{2}});
  const auto expected = l2_normalize_rows(h);
  for (std::size_t j = 0; j < 4; ++j) CHECK(enc(0, j) == doctest::Approx(expected(0, j)).epsilon(1e-12));
}

TEST_CASE("caption encoder matches a scalar reference and ignores batch padding") {
  auto p = init_params<double>(small_config(5));
  randomize_biases(p, 9);
  const std::vector<TokenSequence> batch{{1, 2, 3, 4, 5}, {6}, {0, 0, 1}, {3, 2}};
  const auto enc = encode_captions(p, batch);
  for (std::size_t b = 0; b < batch.size(); ++b) {
    auto ref = reference_gru(p, batch[b]);
    double norm = 0.0;
    for (auto v : ref) norm += v * v;
    norm = std::sqrt(norm);
    for (std::size_t j = 0; j < ref.size(); ++j) CHECK(enc(b, j) == doctest::Approx(ref[j] / norm).epsilon(1e-12));
    const auto alone = encode_captions(p, {batch[b]});
    for (std::size_t j = 0; j < ref.size(); ++j) CHECK(alone(0, j) == enc(b, j));
  }
}

TEST_CASE("image encoder with identity projection normalizes the features") {
  auto cfg = small_config();
  cfg.image_dim = 3;
  auto p = init_params<double>(cfg);
  p[kImageProjection].value.set_zero();
  for (std::size_t k = 0; k < 3; ++k) p[kImageProjection].value(k, k) = 1.0;
  const MatrixD f{{3, 0, 4}, {0, 2, 0}};
  const auto out = encode_images(p, f);
  CHECK(out(0, 0) == doctest::Approx(0.6));
  CHECK(out(0, 2) == doctest::Approx(0.8));
  CHECK(out(0, 3) == 0.0);
  CHECK(out(1, 1) == doctest::Approx(1.0));
  CHECK_THROWS_AS(encode_images(p, MatrixD(1, 4)), DimensionError);
}

TEST_CASE("initialization") {
  const auto a = init_params<float>(small_config(11));
  const auto b = init_params<float>(small_config(11));
  const auto c = init_params<float>(small_config(12));
  CHECK(a.blocks.size() == kBlockCount);
  bool same = true, differ = false;
  for (std::size_t i = 0; i < kBlockCount; ++i) {
    same = same && a.blocks[i].value == b.blocks[i].value;
    differ = differ || !(a.blocks[i].value == c.blocks[i].value);
    for (auto v : a.blocks[i].value.values()) CHECK(std::abs(v) <= 0.1f);
  }
  CHECK(same);
  CHECK(differ);
  for (auto id : {kUpdateBias, kResetBias, kCandidateBias, kImageBias})
    for (auto v : a[id].value.values()) CHECK(v == 0.0f);
  auto bad = small_config();
  bad.hidden_dim = 0;
  CHECK_THROWS_AS(init_params<float>(bad), ConfigError);
}

TEST_CASE("caption encoder input validation") {
  const auto p = init_params<double>(small_config());
  CHECK_THROWS_AS(encode_captions(p, {{}}), DegenerateError);
  CHECK_THROWS_AS(encode_captions(p, {{7}}), VocabularyError);
}

TEST_CASE("gru step gradients match finite differences") {
  for (std::uint64_t seed : {1, 2, 3}) {
    auto p = init_params<double>(small_config(seed));
    randomize_biases(p, seed + 10);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0.0, 0.5);
    MatrixD x(3, 3), h(3, 4), w(3, 4);
    for (auto* m : {&x, &h, &w})
      for (auto& v : m->values()) v = n(rng);
    const std::vector<char> active{1, 0, 1};
    auto loss = [&] {
      const auto out = gru_step(p, x, h, &active);
      double s = 0.0;
      for (std::size_t i = 0; i < out.size(); ++i) s += out.values()[i] * w.values()[i];
      return s;
    };
    p.zero_grad();
    GruStepCache<double> cache;
    gru_step(p, x, h, &active, &cache);
    MatrixD grad_x;
    const auto grad_h = gru_step_backward(p, cache, w, grad_x);

    std::vector<ParamBlock<double>*> blocks;
    for (std::size_t i = kUpdateInput; i <= kCandidateBias; ++i) blocks.push_back(&p.blocks[i]);
    const auto report = finite_difference_check(blocks, loss, {1e-5, 1e-5});
    CHECK_MESSAGE(report.passed, "max rel err " << report.max_relative_error());

    // Inputs and previous state through a wrapper block.
    ParamBlock<double> xb("x", x), hb("h", h);
    xb.grad = grad_x;
    hb.grad = grad_h;
    auto loss_inputs = [&] {
      x = xb.value;
      h = hb.value;
      return loss();
    };
    const auto in_report = finite_difference_check({&xb, &hb}, loss_inputs, {1e-5, 1e-5});
    CHECK_MESSAGE(in_report.passed, "max rel err " << in_report.max_relative_error());
  }
}

TEST_CASE("full model gradient check") {
  SUBCASE("caption-image, max of hinges") {
    ModelCheckOptions o;
    o.seed = 4;
    const auto r = model_gradient_check(o);
    CHECK(r.blocks.size() == kBlockCount);
    CHECK_MESSAGE(r.passed, "max rel err " << r.max_relative_error());
  }
  SUBCASE("caption-image, sum of hinges") {
    ModelCheckOptions o;
    o.seed = 5;
    o.loss.variant = LossVariant::SumOfHinges;
    const auto r = model_gradient_check(o);
    CHECK_MESSAGE(r.passed, "max rel err " << r.max_relative_error());
  }
  SUBCASE("caption-caption touches only text blocks") {
    ModelCheckOptions o;
    o.seed = 6;
    o.caption_pairs = true;
    const auto r = model_gradient_check(o);
    CHECK(r.blocks.size() == kImageProjection);
    for (const auto& b : r.blocks) CHECK(b.name.rfind("image", 0) != 0);
    CHECK_MESSAGE(r.passed, "max rel err " << r.max_relative_error());
  }
}

TEST_CASE("checkpoint round trip") {
  const auto dir = std::filesystem::temp_directory_path() / "mlvse_test_ckpt";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  auto p = init_params<float>(small_config(21));
  p[kImageBias].value(0, 1) = 0.25f;
  save_checkpoint(dir / "m", p, 0xABCDEFull, 4);
  const auto c = load_checkpoint(dir / "m");
  CHECK(c.vocab_hash == 0xABCDEFull);
  CHECK(c.min_count == 4);
  CHECK(c.params.config == p.config);
  for (std::size_t i = 0; i < kBlockCount; ++i) {
    CHECK(c.params.blocks[i].name == p.blocks[i].name);
    CHECK(c.params.blocks[i].value == p.blocks[i].value);
  }
  CHECK_THROWS_AS(load_checkpoint(dir / "missing"), ParseError);
  std::filesystem::remove_all(dir);
}
