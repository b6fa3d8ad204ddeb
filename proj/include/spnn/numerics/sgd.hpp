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
#include "spnn/numerics/params.hpp"

#include <string>
#include <vector>

namespace spnn {

/// Momentum SGD state: v <- mu v + g; theta <- theta - eta v.
template <typename T>
struct OptimizerState
{
  T                           learning_rate{T(0.01)};
  T                           momentum{T(0.9)};
  std::vector<std::vector<T>> velocity;

  OptimizerState() = default;

  OptimizerState(std::vector<ParamRef<T>> const &params, T lr, T mu)
    : learning_rate(lr)
    , momentum(mu)
  {
    if (!(lr > T(0)))
    {
      throw ParameterError("learning rate must be positive");
    }
    if (mu < T(0) || mu >= T(1))
    {
      throw ParameterError("momentum must lie in [0, 1)");
    }
    reset(params);
  }

  void reset(std::vector<ParamRef<T>> const &params)
  {
    velocity.clear();
    velocity.reserve(params.size());
    for (auto const &p : params)
    {
      velocity.emplace_back(p.values.size(), T(0));
    }
  }
};

/// One momentum step from the (already averaged) gradients. Masked tensors are re-masked
/// afterwards, and their velocity is cleared at dormant positions so a later growth starts fresh.
template <typename T>
void sgd_step(std::vector<ParamRef<T>> const &params, GradientBuffer<T> const &grads, OptimizerState<T> &opt)
{
  if (grads.size() != params.size())
  {
    throw ShapeError("sgd_step gradient tensor count", params.size(), grads.size());
  }
  if (opt.velocity.size() != params.size())
  {
    throw ShapeError("sgd_step velocity tensor count", params.size(), opt.velocity.size());
  }
  T const lr = opt.learning_rate;
  T const mu = opt.momentum;
  for (std::size_t i = 0; i < params.size(); ++i)
  {
    auto const &p = params[i];
    auto const  g = grads[i];
    auto       &v = opt.velocity[i];
    if (g.size() != p.values.size() || v.size() != p.values.size())
    {
      throw ShapeError("sgd_step tensor " + p.name, p.values.size(), g.size());
    }
    bool const masked = !p.mask.empty();
    for (std::size_t j = 0; j < p.values.size(); ++j)
    {
      v[j] = mu * v[j] + g[j];
      p.values[j] -= lr * v[j];
      if (masked && p.mask[j] == 0)
      {
        p.values[j] = T(0);
        v[j]        = T(0);
      }
    }
  }
}

}  // namespace spnn
