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
#include "spnn/core/random.hpp"
#include "spnn/numerics/matrix.hpp"

#include <random>
#include <span>
#include <string>

namespace spnn {

enum class Mode
{
  kTrain,
  kEval,
};

inline void check_dropout_rate(double rate)
{
  if (!(rate >= 0.0 && rate < 1.0))
  {
    throw ParameterError("dropout rate must lie in [0, 1), got " + std::to_string(rate));
  }
}

/// Inverted-dropout multipliers: 0 with probability `rate`, 1/(1-rate) otherwise.
/// Empty when dropout is inactive (eval mode or rate 0); no random draws are consumed then.
template <typename T>
Vector<T> dropout_mask(std::size_t n, double rate, Mode mode, Rng &rng)
{
  check_dropout_rate(rate);
  if (mode == Mode::kEval || rate == 0.0)
  {
    return {};
  }
  std::bernoulli_distribution keep(1.0 - rate);
  T const                     scale = T(1) / static_cast<T>(1.0 - rate);
  Vector<T>                   mask(n);
  for (auto &m : mask)
  {
    m = keep(rng) ? scale : T(0);
  }
  return mask;
}

template <typename T>
void apply_dropout_mask(std::span<T> x, std::span<T const> mask)
{
  if (mask.empty())
  {
    return;
  }
  for (std::size_t i = 0; i < x.size(); ++i)
  {
    x[i] *= mask[i];
  }
}

template <typename T>
Vector<T> dropout(std::span<T const> x, double rate, Mode mode, Rng &rng)
{
  Vector<T> y(x.begin(), x.end());
  auto const mask = dropout_mask<T>(x.size(), rate, mode, rng);
  apply_dropout_mask<T>(y, mask);
  return y;
}

}  // namespace spnn
