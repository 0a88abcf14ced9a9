#include "mlvse/model/model_check.hpp"

#include <random>
#include <vector>

#include "mlvse/model/encoders.hpp"

namespace mlvse {

GradCheckReport model_gradient_check(const ModelCheckOptions& opts) {
  ModelConfig mc;
  mc.vocab_size = opts.vocab_size;
  mc.embed_dim = opts.embed_dim;
  mc.hidden_dim = opts.hidden_dim;
  mc.image_dim = opts.image_dim;
  mc.seed = opts.seed;
  auto params = init_params<float>(mc).cast<double>();
  // Non-zero biases so their gradients are exercised away from the origin.
  std::mt19937_64 rng(opts.seed ^ 0x5eedULL);
  std::uniform_real_distribution<double> unif(-0.1, 0.1);
  for (auto id : {kUpdateBias, kResetBias, kCandidateBias, kImageBias})
    for (auto& v : params[id].value.values()) v = unif(rng);

  std::uniform_int_distribution<std::size_t> token(0, opts.vocab_size - 1);
  std::uniform_int_distribution<std::size_t> length(1, opts.max_length);
  auto random_batch = [&] {
    std::vector<TokenSequence> b(opts.batch);
    for (auto& s : b) {
      s.resize(length(rng));
      for (auto& t : s) t = token(rng);
    }
    return b;
  };
  const auto left = random_batch();
  const auto right = random_batch();
  std::normal_distribution<double> gauss(0.0, 1.0);
  MatrixD features(opts.batch, opts.image_dim);
  for (auto& v : features.values()) v = gauss(rng);

  auto forward = [&](bool backward) {
    CaptionBatchCache<double> lc, rc;
    ImageBatchCache<double> ic;
    const MatrixD a = encode_captions(params, left, backward ? &lc : nullptr);
    const MatrixD b = opts.caption_pairs ? encode_captions(params, right, backward ? &rc : nullptr)
                                         : encode_images(params, features, backward ? &ic : nullptr);
    const auto loss = ranking_loss(cosine_similarity_matrix(a, b), opts.loss);
    if (backward) {
      MatrixD ga(a.rows(), a.cols()), gb(b.rows(), b.cols());
      cosine_similarity_backward(a, b, loss.grad, ga, gb);
      encode_captions_backward(params, lc, ga);
      if (opts.caption_pairs)
        encode_captions_backward(params, rc, gb);
      else
        encode_images_backward(params, ic, gb);
    }
    return loss.value;
  };

  params.zero_grad();
  forward(true);
  auto blocks = params.block_pointers();
  if (opts.caption_pairs) blocks.resize(kImageProjection);
  return finite_difference_check(blocks, [&] { return forward(false); }, opts.check);
}

}  // namespace mlvse
