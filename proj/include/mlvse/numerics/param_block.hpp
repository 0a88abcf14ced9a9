#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "mlvse/error.hpp"
#include "mlvse/numerics/matrix.hpp"

namespace mlvse {

struct AdamConfig {
  double lr = 2e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// A trainable tensor with its gradient accumulator and Adam moment estimates.
template <typename T>
struct ParamBlock {
  std::string name;
  Matrix<T> value;
  Matrix<T> grad;
  Matrix<T> adam_m;
  Matrix<T> adam_v;
  std::uint64_t step = 0;

  ParamBlock() = default;
  ParamBlock(std::string n, Matrix<T> v)
      : name(std::move(n)),
        value(std::move(v)),
        grad(value.rows(), value.cols()),
        adam_m(value.rows(), value.cols()),
        adam_v(value.rows(), value.cols()) {}

  void zero_grad() { grad.set_zero(); }

  template <typename U>
  ParamBlock<U> cast() const {
    ParamBlock<U> out(name, value.template cast<U>());
    out.grad = grad.template cast<U>();
    out.adam_m = adam_m.template cast<U>();
    out.adam_v = adam_v.template cast<U>();
    out.step = step;
    return out;
  }
};

// Bias-corrected Adam update. Consumes and zeroes the gradient.
template <typename T>
void adam_step(ParamBlock<T>& block, const AdamConfig& cfg = {}) {
  if (!block.grad.all_finite()) throw DivergenceError("non-finite gradient in parameter block '" + block.name + "'");
  block.step += 1;
  const double t = static_cast<double>(block.step);
  const double bc1 = 1.0 - std::pow(cfg.beta1, t);
  const double bc2 = 1.0 - std::pow(cfg.beta2, t);
  const T b1 = static_cast<T>(cfg.beta1);
  const T b2 = static_cast<T>(cfg.beta2);
  auto value = block.value.values();
  auto grad = block.grad.values();
  auto m = block.adam_m.values();
  auto v = block.adam_v.values();
  for (std::size_t i = 0; i < value.size(); ++i) {
    const T g = grad[i];
    m[i] = b1 * m[i] + (T{1} - b1) * g;
    v[i] = b2 * v[i] + (T{1} - b2) * g * g;
    const double m_hat = static_cast<double>(m[i]) / bc1;
    const double v_hat = static_cast<double>(v[i]) / bc2;
    value[i] -= static_cast<T>(cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps));
    grad[i] = T{0};
  }
}

}  // namespace mlvse
