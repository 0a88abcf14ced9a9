#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mlvse/error.hpp"
#include "mlvse/model/params.hpp"
#include "mlvse/numerics/ops.hpp"

namespace mlvse {

using TokenSequence = std::vector<std::size_t>;

// Activations of one batched GRU step, kept for the backward pass.
template <typename T>
struct GruStepCache {
  Matrix<T> input;
  Matrix<T> h_prev;
  Matrix<T> update;     // z
  Matrix<T> reset;      // r
  Matrix<T> candidate;  // h~
  Matrix<T> reset_h;    // r * h_prev
  std::vector<char> active;
};

// One GRU step over a batch of row vectors:
//   z = sigmoid(x Wz + h Uz + bz)
//   r = sigmoid(x Wr + h Ur + br)
//   h~ = tanh(x Wh + (r*h) Uh + bh)
//   h' = (1 - z) * h + z * h~
// Rows with active[b] == 0 pass h through unchanged.
template <typename T>
Matrix<T> gru_step(const ModelParams<T>& p, const Matrix<T>& x, const Matrix<T>& h,
                   const std::vector<char>* active = nullptr, GruStepCache<T>* cache = nullptr) {
  const std::size_t batch = x.rows();
  const std::size_t hid = p.config.hidden_dim;
  if (x.cols() != p.config.embed_dim || h.cols() != hid || h.rows() != batch)
    throw DimensionError("gru_step: input " + x.shape_string() + " / state " + h.shape_string() +
                         " incompatible with embed " + std::to_string(p.config.embed_dim) + ", hidden " +
                         std::to_string(hid));
  auto gate = [&](BlockId in, BlockId rec, BlockId bias, const Matrix<T>& state) {
    Matrix<T> a(batch, hid);
    matmul_acc(x, p[in].value, a);
    matmul_acc(state, p[rec].value, a);
    add_row_broadcast(a, p[bias].value);
    return a;
  };
  Matrix<T> z = gate(kUpdateInput, kUpdateRecurrent, kUpdateBias, h);
  Matrix<T> r = gate(kResetInput, kResetRecurrent, kResetBias, h);
  for (auto& v : z.values()) v = sigmoid(v);
  for (auto& v : r.values()) v = sigmoid(v);
  Matrix<T> rh(batch, hid);
  for (std::size_t i = 0; i < rh.size(); ++i) rh.values()[i] = r.values()[i] * h.values()[i];
  Matrix<T> cand = gate(kCandidateInput, kCandidateRecurrent, kCandidateBias, rh);
  for (auto& v : cand.values()) v = std::tanh(v);

  Matrix<T> out(batch, hid);
  for (std::size_t b = 0; b < batch; ++b) {
    const bool on = !active || (*active)[b];
    for (std::size_t j = 0; j < hid; ++j) {
      const T hp = h(b, j);
      out(b, j) = on ? (T{1} - z(b, j)) * hp + z(b, j) * cand(b, j) : hp;
    }
  }
  if (cache) {
    cache->input = x;
    cache->h_prev = h;
    cache->update = std::move(z);
    cache->reset = std::move(r);
    cache->candidate = std::move(cand);
    cache->reset_h = std::move(rh);
    cache->active = active ? *active : std::vector<char>(batch, 1);
  }
  return out;
}

// Single-vector convenience form of gru_step.
template <typename T>
Matrix<T> gru_cell(const ModelParams<T>& p, const Matrix<T>& x, const Matrix<T>& h) {
  if (x.rows() != 1 || h.rows() != 1) throw DimensionError("gru_cell expects 1-row input and state");
  return gru_step(p, x, h);
}

// Accumulates parameter gradients for one step into p and returns dL/dh_prev.
// dL/dx is written to grad_input.
template <typename T>
Matrix<T> gru_step_backward(ModelParams<T>& p, const GruStepCache<T>& c, const Matrix<T>& grad_h,
                            Matrix<T>& grad_input) {
  const std::size_t batch = grad_h.rows();
  const std::size_t hid = grad_h.cols();
  Matrix<T> grad_prev(batch, hid);
  Matrix<T> da_z(batch, hid), da_r(batch, hid), da_h(batch, hid);
  for (std::size_t b = 0; b < batch; ++b) {
    const bool on = c.active[b];
    for (std::size_t j = 0; j < hid; ++j) {
      const T g = grad_h(b, j);
      if (!on) {
        grad_prev(b, j) = g;
        continue;
      }
      const T z = c.update(b, j), hc = c.candidate(b, j), hp = c.h_prev(b, j);
      grad_prev(b, j) = g * (T{1} - z);
      da_z(b, j) = g * (hc - hp) * z * (T{1} - z);
      da_h(b, j) = g * z * (T{1} - hc * hc);
    }
  }

  // candidate path: a_h = x Wh + (r*h) Uh + bh
  matmul_tn_acc(c.input, da_h, p[kCandidateInput].grad);
  matmul_tn_acc(c.reset_h, da_h, p[kCandidateRecurrent].grad);
  sum_rows_acc(da_h, p[kCandidateBias].grad);
  Matrix<T> grad_rh(batch, hid);
  matmul_nt_acc(da_h, p[kCandidateRecurrent].value, grad_rh);
  for (std::size_t b = 0; b < batch; ++b) {
    if (!c.active[b]) continue;
    for (std::size_t j = 0; j < hid; ++j) {
      const T r = c.reset(b, j);
      da_r(b, j) = grad_rh(b, j) * c.h_prev(b, j) * r * (T{1} - r);
      grad_prev(b, j) += grad_rh(b, j) * r;
    }
  }

  matmul_tn_acc(c.input, da_r, p[kResetInput].grad);
  matmul_tn_acc(c.h_prev, da_r, p[kResetRecurrent].grad);
  sum_rows_acc(da_r, p[kResetBias].grad);
  matmul_tn_acc(c.input, da_z, p[kUpdateInput].grad);
  matmul_tn_acc(c.h_prev, da_z, p[kUpdateRecurrent].grad);
  sum_rows_acc(da_z, p[kUpdateBias].grad);

  matmul_nt_acc(da_r, p[kResetRecurrent].value, grad_prev);
  matmul_nt_acc(da_z, p[kUpdateRecurrent].value, grad_prev);

  grad_input = Matrix<T>(batch, c.input.cols());
  matmul_nt_acc(da_z, p[kUpdateInput].value, grad_input);
  matmul_nt_acc(da_r, p[kResetInput].value, grad_input);
  matmul_nt_acc(da_h, p[kCandidateInput].value, grad_input);
  return grad_prev;
}

template <typename T>
struct CaptionBatchCache {
  std::vector<TokenSequence> sequences;
  std::vector<GruStepCache<T>> steps;
  std::vector<T> norms;
  Matrix<T> output;  // l2-normalized final states
};

template <typename T>
void check_sequences(const ModelParams<T>& p, const std::vector<TokenSequence>& batch) {
  for (std::size_t b = 0; b < batch.size(); ++b) {
    if (batch[b].empty()) throw DegenerateError("caption " + std::to_string(b) + " in batch is empty");
    for (auto idx : batch[b])
      if (idx >= p.config.vocab_size)
        throw VocabularyError("token index " + std::to_string(idx) + " outside vocabulary of size " +
                              std::to_string(p.config.vocab_size));
  }
}

// Final GRU state at each caption's own last token, l2-normalized. Each row is
// computed independently of the others, so batching and padding never change it.
template <typename T>
Matrix<T> encode_captions(const ModelParams<T>& p, const std::vector<TokenSequence>& batch,
                          CaptionBatchCache<T>* cache = nullptr) {
  check_sequences(p, batch);
  const std::size_t n = batch.size();
  const std::size_t emb = p.config.embed_dim;
  std::size_t max_len = 0;
  for (const auto& s : batch) max_len = std::max(max_len, s.size());

  Matrix<T> h(n, p.config.hidden_dim);
  if (cache) {
    cache->sequences = batch;
    cache->steps.assign(max_len, {});
  }
  const auto& table = p[kEmbedding].value;
  for (std::size_t t = 0; t < max_len; ++t) {
    std::vector<char> active(n, 0);
    Matrix<T> x(n, emb);
    for (std::size_t b = 0; b < n; ++b) {
      if (t >= batch[b].size()) continue;
      active[b] = 1;
      const auto src = table.row(batch[b][t]);
      std::copy(src.begin(), src.end(), x.row(b).begin());
    }
    h = gru_step(p, x, h, &active, cache ? &cache->steps[t] : nullptr);
  }
  std::vector<T> norms;
  Matrix<T> out = l2_normalize_rows(h, &norms);
  if (cache) {
    cache->norms = std::move(norms);
    cache->output = out;
  }
  return out;
}

template <typename T>
void encode_captions_backward(ModelParams<T>& p, const CaptionBatchCache<T>& cache, const Matrix<T>& grad_out) {
  Matrix<T> grad_h = l2_normalize_rows_backward(cache.output, cache.norms, grad_out);
  Matrix<T> grad_x;
  auto& emb_grad = p[kEmbedding].grad;
  for (std::size_t t = cache.steps.size(); t-- > 0;) {
    const auto& step = cache.steps[t];
    grad_h = gru_step_backward(p, step, grad_h, grad_x);
    for (std::size_t b = 0; b < grad_x.rows(); ++b) {
      if (!step.active[b]) continue;
      auto dst = emb_grad.row(cache.sequences[b][t]);
      const auto src = grad_x.row(b);
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    }
  }
}

template <typename T>
struct ImageBatchCache {
  Matrix<T> features;
  std::vector<T> norms;
  Matrix<T> output;
};

// Affine projection of image features into the joint space, l2-normalized.
template <typename T>
Matrix<T> encode_images(const ModelParams<T>& p, const Matrix<T>& features, ImageBatchCache<T>* cache = nullptr) {
  if (features.cols() != p.config.image_dim)
    throw DimensionError("image features have dimension " + std::to_string(features.cols()) +
                         ", projection expects " + std::to_string(p.config.image_dim));
  Matrix<T> proj = matmul(features, p[kImageProjection].value);
  if (p.config.image_bias) add_row_broadcast(proj, p[kImageBias].value);
  std::vector<T> norms;
  Matrix<T> out = l2_normalize_rows(proj, &norms);
  if (cache) {
    cache->features = features;
    cache->norms = std::move(norms);
    cache->output = out;
  }
  return out;
}

template <typename T>
void encode_images_backward(ModelParams<T>& p, const ImageBatchCache<T>& cache, const Matrix<T>& grad_out) {
  Matrix<T> grad_proj = l2_normalize_rows_backward(cache.output, cache.norms, grad_out);
  matmul_tn_acc(cache.features, grad_proj, p[kImageProjection].grad);
  if (p.config.image_bias) sum_rows_acc(grad_proj, p[kImageBias].grad);
}

}  // namespace mlvse
