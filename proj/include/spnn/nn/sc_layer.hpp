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

#include "spnn/nn/dropout.hpp"
#include "spnn/numerics/kernels.hpp"
#include "spnn/numerics/matrix.hpp"

#include <cmath>
#include <random>
#include <span>

namespace spnn {

/// Sparsely connected layer: activation(masked_linear(x)), then inverted dropout in train mode.
template <typename T>
struct ScLayer
{
  MaskedMatrix<T> weights;
  Vector<T>       bias;
  Activation      activation{Activation::kRelu};
  double          dropout_rate{0.0};

  std::size_t in_width() const { return weights.cols(); }
  std::size_t out_width() const { return weights.rows(); }
};

template <typename T>
struct ScCache
{
  Vector<T> input;
  Vector<T> pre;
  Vector<T> post;  // before dropout
  Vector<T> drop;  // empty when no dropout was applied
};

template <typename T>
Vector<T> sc_forward(ScLayer<T> const &layer, std::span<T const> x, Mode mode, Rng &rng, ScCache<T> *cache = nullptr)
{
  auto pre  = masked_linear<T>(layer.weights, layer.bias, x);
  auto post = activation<T>(layer.activation, pre);
  auto drop = dropout_mask<T>(post.size(), layer.dropout_rate, mode, rng);
  Vector<T> out = post;
  apply_dropout_mask<T>(out, drop);
  if (cache != nullptr)
  {
    cache->input.assign(x.begin(), x.end());
    cache->pre  = std::move(pre);
    cache->post = std::move(post);
    cache->drop = std::move(drop);
  }
  return out;
}

/// Back-propagates `upstream` (gradient w.r.t. the layer output) and returns the gradient w.r.t. the
/// input (empty when `input_grad` is false). Weight gradients are accumulated densely, dormant
/// positions included.
template <typename T>
Vector<T> sc_backward(ScLayer<T> const &layer, ScCache<T> const &cache, std::span<T const> upstream,
                      std::span<T> grad_weights, std::span<T> grad_bias, bool input_grad = true)
{
  std::size_t const out = layer.out_width();
  if (upstream.size() != out)
  {
    throw ShapeError("sc_backward upstream length", out, upstream.size());
  }
  Vector<T> delta(out);
  for (std::size_t m = 0; m < out; ++m)
  {
    T d = upstream[m];
    if (!cache.drop.empty())
    {
      d *= cache.drop[m];
    }
    delta[m] = d * activate_derivative(layer.activation, cache.pre[m], cache.post[m]);
    grad_bias[m] += delta[m];
  }
  outer_accumulate<T>(grad_weights, layer.in_width(), delta, cache.input);
  if (!input_grad)
  {
    return {};
  }
  Vector<T> dx(layer.in_width(), T(0));
  masked_transpose_accumulate<T>(layer.weights, delta, dx);
  return dx;
}

/// Uniform initialisation in [-1/sqrt(fan_in), 1/sqrt(fan_in)], re-masked afterwards.
template <typename T>
void init_uniform(MaskedMatrix<T> &m, Rng &rng)
{
  double const                           bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto &v : m.values().flat())
  {
    v = static_cast<T>(dist(rng));
  }
  m.apply_mask();
}

template <typename T>
void init_uniform(Matrix<T> &m, Rng &rng)
{
  double const                           bound = 1.0 / std::sqrt(static_cast<double>(m.cols()));
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (auto &v : m.flat())
  {
    v = static_cast<T>(dist(rng));
  }
}

}  // namespace spnn
