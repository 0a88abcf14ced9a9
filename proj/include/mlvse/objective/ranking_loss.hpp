#pragma once

#include <cstddef>
#include <string>

#include "mlvse/error.hpp"
#include "mlvse/numerics/matrix.hpp"

namespace mlvse {

enum class LossVariant { MaxOfHinges, SumOfHinges };

LossVariant parse_loss_variant(const std::string& s);
std::string to_string(LossVariant v);

struct LossConfig {
  double margin = 0.2;
  LossVariant variant = LossVariant::MaxOfHinges;
};

template <typename T>
struct LossOutput {
  T value{0};
  Matrix<T> grad;  // dLoss/dS
};

// Bidirectional hinge ranking loss over an in-batch similarity matrix S where
// S(i, j) = s(a_i, b_j) and the diagonal holds the true pairs. For every pair i:
//   left  = hinges margin - S(i,i) + S(j,i) over contrastive a_j, j != i
//   right = hinges margin - S(i,i) + S(i,j) over contrastive b_j, j != i
// MaxOfHinges keeps only the largest hinge per direction (ties go to the lowest
// j); SumOfHinges adds them all. The loss is summed over the batch.
template <typename T>
LossOutput<T> ranking_loss(const Matrix<T>& s, const LossConfig& cfg = {}) {
  if (s.rows() != s.cols()) throw DimensionError("ranking loss needs a square similarity matrix, got " + s.shape_string());
  if (!(cfg.margin > 0.0)) throw ConfigError("ranking loss margin must be positive");
  const std::size_t n = s.rows();
  const T margin = static_cast<T>(cfg.margin);
  LossOutput<T> out;
  out.grad = Matrix<T>(n, n);
  const bool use_max = cfg.variant == LossVariant::MaxOfHinges;

  for (std::size_t i = 0; i < n; ++i) {
    const T pos = s(i, i);
    for (int dir = 0; dir < 2; ++dir) {
      // dir 0: contrastive captions S(j, i); dir 1: contrastive images S(i, j)
      auto neg = [&](std::size_t j) { return dir == 0 ? s(j, i) : s(i, j); };
      auto neg_grad = [&](std::size_t j) -> T& { return dir == 0 ? out.grad(j, i) : out.grad(i, j); };
      if (use_max) {
        T best{0};
        std::size_t best_j = n;
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const T h = margin - pos + neg(j);
          if (h > best) {
            best = h;
            best_j = j;
          }
        }
        if (best_j < n) {
          out.value += best;
          out.grad(i, i) -= T{1};
          neg_grad(best_j) += T{1};
        }
      } else {
        for (std::size_t j = 0; j < n; ++j) {
          if (j == i) continue;
          const T h = margin - pos + neg(j);
          if (h > T{0}) {
            out.value += h;
            out.grad(i, i) -= T{1};
            neg_grad(j) += T{1};
          }
        }
      }
    }
  }
  return out;
}

}  // namespace mlvse
