#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "mlvse/error.hpp"
#include "mlvse/numerics/matrix.hpp"

namespace mlvse {

// Rows whose norm falls below this are treated as a collapsed encoder.
inline constexpr double kDegenerateNorm = 1e-12;

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DimensionError(what);
}

}  // namespace detail

template <typename T>
Matrix<T> transpose(const Matrix<T>& m) {
  Matrix<T> out(m.cols(), m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t c = 0; c < m.cols(); ++c) out(c, r) = m(r, c);
  return out;
}

// out += a * b
template <typename T>
void matmul_acc(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out) {
  detail::require(a.cols() == b.rows() && out.rows() == a.rows() && out.cols() == b.cols(),
                  "matmul shape mismatch: " + a.shape_string() + " x " + b.shape_string() + " -> " +
                      out.shape_string());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    T* __restrict o = out.data() + i * n;
    const T* arow = a.data() + i * a.cols();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const T av = arow[p];
      if (av == T{0}) continue;
      const T* __restrict brow = b.data() + p * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += av * brow[j];
    }
  }
}

// out += transpose(a) * b
template <typename T>
void matmul_tn_acc(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out) {
  detail::require(a.rows() == b.rows() && out.rows() == a.cols() && out.cols() == b.cols(),
                  "matmul_tn shape mismatch: " + a.shape_string() + "^T x " + b.shape_string());
  const std::size_t n = b.cols();
  for (std::size_t p = 0; p < a.rows(); ++p) {
    const T* arow = a.data() + p * a.cols();
    const T* __restrict brow = b.data() + p * n;
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const T av = arow[i];
      if (av == T{0}) continue;
      T* __restrict o = out.data() + i * n;
      for (std::size_t j = 0; j < n; ++j) o[j] += av * brow[j];
    }
  }
}

// out += a * transpose(b)
template <typename T>
void matmul_nt_acc(const Matrix<T>& a, const Matrix<T>& b, Matrix<T>& out) {
  detail::require(a.cols() == b.cols() && out.rows() == a.rows() && out.cols() == b.rows(),
                  "matmul_nt shape mismatch: " + a.shape_string() + " x " + b.shape_string() + "^T");
  matmul_acc(a, transpose(b), out);
}

template <typename T>
Matrix<T> matmul(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.rows())
    throw DimensionError("matmul shape mismatch: " + a.shape_string() + " x " + b.shape_string());
  Matrix<T> out(a.rows(), b.cols());
  matmul_acc(a, b, out);
  return out;
}

// Accumulates d(a*b) into grad_a and grad_b given the upstream gradient.
template <typename T>
void matmul_backward(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& grad_out,
                     Matrix<T>& grad_a, Matrix<T>& grad_b) {
  matmul_nt_acc(grad_out, b, grad_a);
  matmul_tn_acc(a, grad_out, grad_b);
}

// Adds the 1 x cols row vector `bias` to every row of m.
template <typename T>
void add_row_broadcast(Matrix<T>& m, const Matrix<T>& bias) {
  detail::require(bias.rows() == 1 && bias.cols() == m.cols(),
                  "bias shape " + bias.shape_string() + " does not broadcast over " + m.shape_string());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    T* o = m.data() + r * m.cols();
    for (std::size_t c = 0; c < m.cols(); ++c) o[c] += bias.data()[c];
  }
}

// grad_bias += column sums of grad_out.
template <typename T>
void sum_rows_acc(const Matrix<T>& grad_out, Matrix<T>& grad_bias) {
  detail::require(grad_bias.rows() == 1 && grad_bias.cols() == grad_out.cols(), "bias gradient shape mismatch");
  for (std::size_t r = 0; r < grad_out.rows(); ++r)
    for (std::size_t c = 0; c < grad_out.cols(); ++c) grad_bias(0, c) += grad_out(r, c);
}

template <typename T>
std::vector<T> row_norms(const Matrix<T>& m) {
  std::vector<T> norms(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    T acc{0};
    for (T v : m.row(r)) acc += v * v;
    norms[r] = std::sqrt(acc);
  }
  return norms;
}

template <typename T>
Matrix<T> l2_normalize_rows(const Matrix<T>& m, std::vector<T>* norms_out = nullptr) {
  auto norms = row_norms(m);
  Matrix<T> out(m.rows(), m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    if (!(static_cast<double>(norms[r]) >= kDegenerateNorm))
      throw DegenerateError("row " + std::to_string(r) + " has norm below 1e-12; encoder output collapsed");
    const T inv = T{1} / norms[r];
    for (std::size_t c = 0; c < m.cols(); ++c) out(r, c) = m(r, c) * inv;
  }
  if (norms_out) *norms_out = std::move(norms);
  return out;
}

// Given y = x / |x| and dL/dy, returns dL/dx = (dy - y (y . dy)) / |x|.
template <typename T>
Matrix<T> l2_normalize_rows_backward(const Matrix<T>& normalized, const std::vector<T>& norms,
                                     const Matrix<T>& grad_out) {
  detail::require(normalized.same_shape(grad_out) && norms.size() == normalized.rows(),
                  "l2_normalize backward shape mismatch");
  Matrix<T> grad_in(normalized.rows(), normalized.cols());
  for (std::size_t r = 0; r < normalized.rows(); ++r) {
    T proj{0};
    for (std::size_t c = 0; c < normalized.cols(); ++c) proj += normalized(r, c) * grad_out(r, c);
    const T inv = T{1} / norms[r];
    for (std::size_t c = 0; c < normalized.cols(); ++c)
      grad_in(r, c) = (grad_out(r, c) - normalized(r, c) * proj) * inv;
  }
  return grad_in;
}

// S[i][j] = a_i . b_j. Rows are expected to be unit length already, which makes
// S the cosine similarity matrix.
template <typename T>
Matrix<T> cosine_similarity_matrix(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols() != b.cols())
    throw DimensionError("cosine similarity column mismatch: " + a.shape_string() + " vs " + b.shape_string());
  Matrix<T> s(a.rows(), b.rows());
  matmul_nt_acc(a, b, s);
  return s;
}

template <typename T>
void cosine_similarity_backward(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& grad_s,
                                Matrix<T>& grad_a, Matrix<T>& grad_b) {
  detail::require(grad_s.rows() == a.rows() && grad_s.cols() == b.rows(), "similarity gradient shape mismatch");
  matmul_acc(grad_s, b, grad_a);
  matmul_tn_acc(grad_s, a, grad_b);
}

template <typename T>
T sigmoid(T x) {
  return T{1} / (T{1} + std::exp(-x));
}

}  // namespace mlvse
