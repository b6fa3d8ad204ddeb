//------------------------------------------------------------------------------
//
//   Copyright 2026 The spnn Authors
//
//   Licensed under the Apache License, Version 2.0 (the "License");
//   you may not use this file except in compliance with the License.
//   You may obtain a copy of the License at
//
//       http://www.apache.org/licenses/LICENSE-2.0
//
//   Unless required by applicable law or agreed to in writing, software
//   distributed under the License is distributed on an "AS IS" BASIS,
//   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//   See the License for the specific language governing permissions and
//   limitations under the License.
//
//------------------------------------------------------------------------------

#pragma once

#include "spnn/core/error.hpp"
#include "spnn/numerics/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace spnn {

enum class Activation : std::uint8_t
{
  kIdentity = 0,
  kRelu     = 1,
  kSigmoid  = 2,
  kTanh     = 3,
};

inline std::string_view to_string(Activation a)
{
  switch (a)
  {
  case Activation::kIdentity:
    return "identity";
  case Activation::kRelu:
    return "relu";
  case Activation::kSigmoid:
    return "sigmoid";
  case Activation::kTanh:
    return "tanh";
  }
  return "unknown";
}

inline Activation activation_from_code(std::uint8_t code)
{
  if (code > static_cast<std::uint8_t>(Activation::kTanh))
  {
    throw ParameterError("unknown activation code " + std::to_string(code));
  }
  return static_cast<Activation>(code);
}

template <typename T>
T sigmoid(T x)
{
  // split on sign so exp never overflows
  if (x >= T(0))
  {
    return T(1) / (T(1) + std::exp(-x));
  }
  T const e = std::exp(x);
  return e / (T(1) + e);
}

template <typename T>
T activate(Activation kind, T x)
{
  switch (kind)
  {
  case Activation::kIdentity:
    return x;
  case Activation::kRelu:
    return x > T(0) ? x : T(0);
  case Activation::kSigmoid:
    return sigmoid(x);
  case Activation::kTanh:
    return std::tanh(x);
  }
  return x;
}

/// Derivative expressed through the pre-activation z and the output y = act(z).
template <typename T>
T activate_derivative(Activation kind, T z, T y)
{
  switch (kind)
  {
  case Activation::kIdentity:
    return T(1);
  case Activation::kRelu:
    return z > T(0) ? T(1) : T(0);
  case Activation::kSigmoid:
    return y * (T(1) - y);
  case Activation::kTanh:
    return T(1) - y * y;
  }
  return T(1);
}

template <typename T>
Vector<T> activation(Activation kind, std::span<T const> x)
{
  Vector<T> y(x.size());
  std::transform(x.begin(), x.end(), y.begin(), [kind](T v) { return activate(kind, v); });
  return y;
}

/// Dot product with four interleaved partial sums, combined as (s0 + s1) + (s2 + s3). All linear
/// kernels share this order.
template <typename T>
T dot(T const *a, T const *x, std::size_t n)
{
  T           s[4] = {T(0), T(0), T(0), T(0)};
  std::size_t i    = 0;
  for (; i + 4 <= n; i += 4)
  {
    s[0] += a[i] * x[i];
    s[1] += a[i + 1] * x[i + 1];
    s[2] += a[i + 2] * x[i + 2];
    s[3] += a[i + 3] * x[i + 3];
  }
  for (; i < n; ++i)
  {
    s[i % 4] += a[i] * x[i];
  }
  return (s[0] + s[1]) + (s[2] + s[3]);
}

/// dot() over the masked row: dormant positions contribute 0 * x exactly as a zeroed entry would.
template <typename T>
T masked_dot(T const *w, std::uint8_t const *mask, T const *x, std::size_t n)
{
  T           s[4] = {T(0), T(0), T(0), T(0)};
  std::size_t i    = 0;
  for (; i + 4 <= n; i += 4)
  {
    s[0] += (mask[i] != 0 ? w[i] : T(0)) * x[i];
    s[1] += (mask[i + 1] != 0 ? w[i + 1] : T(0)) * x[i + 1];
    s[2] += (mask[i + 2] != 0 ? w[i + 2] : T(0)) * x[i + 2];
    s[3] += (mask[i + 3] != 0 ? w[i + 3] : T(0)) * x[i + 3];
  }
  for (; i < n; ++i)
  {
    s[i % 4] += (mask[i] != 0 ? w[i] : T(0)) * x[i];
  }
  return (s[0] + s[1]) + (s[2] + s[3]);
}

/// y = W x + b with a plain dense matrix.
template <typename T>
Vector<T> dense_linear(Matrix<T> const &w, std::span<T const> bias, std::span<T const> x)
{
  if (x.size() != w.cols())
  {
    throw ShapeError("dense_linear input length", w.cols(), x.size());
  }
  if (bias.size() != w.rows())
  {
    throw ShapeError("dense_linear bias length", w.rows(), bias.size());
  }
  Vector<T> y(w.rows());
  for (std::size_t m = 0; m < w.rows(); ++m)
  {
    y[m] = dot(w.row(m).data(), x.data(), w.cols()) + bias[m];
  }
  return y;
}

/// y = (W * Msk) x + b. Bit-identical to dense_linear on the zeroed matrix.
template <typename T>
Vector<T> masked_linear(MaskedMatrix<T> const &layer, std::span<T const> bias, std::span<T const> x)
{
  if (x.size() != layer.cols())
  {
    throw ShapeError("masked_linear input length", layer.cols(), x.size());
  }
  if (bias.size() != layer.rows())
  {
    throw ShapeError("masked_linear bias length", layer.rows(), bias.size());
  }
  std::size_t const cols = layer.cols();
  Vector<T>         y(layer.rows());
  for (std::size_t m = 0; m < layer.rows(); ++m)
  {
    y[m] = masked_dot(layer.values().row(m).data(), layer.mask().data() + m * cols, x.data(), cols) + bias[m];
  }
  return y;
}

/// dx += (W * Msk)^T delta
template <typename T>
void masked_transpose_accumulate(MaskedMatrix<T> const &layer, std::span<T const> delta, std::span<T> dx)
{
  auto const &w    = layer.values();
  auto const &mask = layer.mask();
  std::size_t const cols = layer.cols();
  for (std::size_t m = 0; m < layer.rows(); ++m)
  {
    T const d = delta[m];
    if (d == T(0))
    {
      continue;
    }
    T const            *wr = w.row(m).data();
    std::uint8_t const *mr = mask.data() + m * cols;
    for (std::size_t n = 0; n < cols; ++n)
    {
      dx[n] += (mr[n] != 0 ? wr[n] : T(0)) * d;
    }
  }
}

/// dx += W^T delta
template <typename T>
void dense_transpose_accumulate(Matrix<T> const &w, std::span<T const> delta, std::span<T> dx)
{
  for (std::size_t m = 0; m < w.rows(); ++m)
  {
    T const d   = delta[m];
    auto const row = w.row(m);
    for (std::size_t n = 0; n < row.size(); ++n)
    {
      dx[n] += row[n] * d;
    }
  }
}

/// grad(m, n) += delta[m] * x[n], over every position including dormant ones.
template <typename T>
void outer_accumulate(std::span<T> grad, std::size_t cols, std::span<T const> delta, std::span<T const> x)
{
  for (std::size_t m = 0; m < delta.size(); ++m)
  {
    T const d = delta[m];
    if (d == T(0))
    {
      continue;
    }
    T *g = grad.data() + m * cols;
    for (std::size_t n = 0; n < cols; ++n)
    {
      g[n] += d * x[n];
    }
  }
}

template <typename T>
struct SoftmaxLoss
{
  Vector<T> probabilities;
  T         loss{};
};

/// Max-shifted softmax and cross-entropy -ln p[label].
template <typename T>
SoftmaxLoss<T> softmax_cross_entropy(std::span<T const> logits, std::size_t label)
{
  if (logits.size() < 2)
  {
    throw ShapeError("softmax_cross_entropy needs at least two logits, got " + std::to_string(logits.size()));
  }
  if (label >= logits.size())
  {
    throw IndexError("label " + std::to_string(label) + " out of range for " + std::to_string(logits.size()) +
                     " classes");
  }
  T const max = *std::max_element(logits.begin(), logits.end());

  SoftmaxLoss<T> out;
  out.probabilities.resize(logits.size());
  T sum = T(0);
  for (std::size_t i = 0; i < logits.size(); ++i)
  {
    out.probabilities[i] = std::exp(logits[i] - max);
    sum += out.probabilities[i];
  }
  for (auto &p : out.probabilities)
  {
    p /= sum;
  }
  out.loss = std::log(sum) - (logits[label] - max);
  return out;
}

template <typename T>
std::size_t argmax(std::span<T const> v)
{
  return static_cast<std::size_t>(std::distance(v.begin(), std::max_element(v.begin(), v.end())));
}

}  // namespace spnn
