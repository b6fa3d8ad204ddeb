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
#include "spnn/nn/model.hpp"
#include "spnn/numerics/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

namespace spnn {

/// Activates exactly round(fill_rate * M * N) positions chosen uniformly at random and zeroes the rest.
template <typename T>
void seed_mask(MaskedMatrix<T> &m, double fill_rate, Rng &rng)
{
  if (!(fill_rate > 0.0 && fill_rate <= 1.0))
  {
    throw ParameterError("fill rate must lie in (0, 1], got " + std::to_string(fill_rate));
  }
  std::size_t const n      = m.size();
  auto const        active = static_cast<std::size_t>(std::llround(fill_rate * static_cast<double>(n)));
  auto             &mask   = m.mask();
  if (active == n)
  {
    std::fill(mask.begin(), mask.end(), std::uint8_t{1});
  }
  else
  {
    // partial Fisher-Yates over positions
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t k = 0; k < active; ++k)
    {
      std::uniform_int_distribution<std::size_t> pick(k, n - 1);
      std::swap(idx[k], idx[pick(rng)]);
    }
    std::fill(mask.begin(), mask.end(), std::uint8_t{0});
    for (std::size_t k = 0; k < active; ++k)
    {
      mask[idx[k]] = 1;
    }
  }
  m.apply_mask();
}

/// Seeds every growable matrix of the model independently.
template <typename T>
void seed_init(Model<T> &model, double fill_rate, Rng &rng)
{
  for (auto *m : model.growable())
  {
    seed_mask(*m, fill_rate, rng);
  }
}

/// How growth updates the weights after the mask is extended. Newly grown connections always start
/// at +eta * grad. kLiteral also adds +eta * grad to already-active weights; kDescentOnActive
/// subtracts it instead.
enum class GrowthUpdate
{
  kDescentOnActive,
  kLiteral,
};

/// k-th largest value (1-based) of `values`.
template <typename T>
T kth_largest(std::vector<T> values, std::size_t k)
{
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end(),
                   std::greater<T>{});
  return values[k - 1];
}

template <typename T>
T kth_smallest(std::vector<T> values, std::size_t k)
{
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(k - 1), values.end());
  return values[k - 1];
}

struct MaskDelta
{
  std::size_t changed{0};  // connections activated (grow) or removed (prune)
  std::size_t nnz_before{0};
  std::size_t nnz_after{0};
};

/// Gradient-based growth. The threshold is the ceil(alpha * M * N)-th largest |avg_grad| over the whole
/// matrix; every position strictly above it becomes active. Then the weights move by eta * avg_grad
/// on the (new) mask.
template <typename T>
MaskDelta grow(MaskedMatrix<T> &m, std::span<T const> avg_grad, double alpha, T learning_rate,
               GrowthUpdate update = GrowthUpdate::kDescentOnActive)
{
  if (!(alpha > 0.0 && alpha < 1.0))
  {
    throw ParameterError("growth ratio must lie in (0, 1), got " + std::to_string(alpha));
  }
  if (avg_grad.size() != m.size())
  {
    throw ShapeError("grow gradient size", m.size(), avg_grad.size());
  }
  std::size_t const n = m.size();
  MaskDelta         delta;
  delta.nnz_before = m.nnz();
  if (n == 0)
  {
    return delta;
  }

  std::vector<T> mags(n);
  std::transform(avg_grad.begin(), avg_grad.end(), mags.begin(), [](T g) { return std::abs(g); });
  auto const k = std::max<std::size_t>(
    1, std::min<std::size_t>(n, static_cast<std::size_t>(std::ceil(alpha * static_cast<double>(n) - 1e-9))));
  T const thres = kth_largest(mags, k);

  auto &mask   = m.mask();
  auto  values = m.values().flat();
  for (std::size_t i = 0; i < n; ++i)
  {
    bool const was_active = mask[i] != 0;
    if (!was_active && mags[i] > thres)
    {
      mask[i] = 1;
      values[i] += learning_rate * avg_grad[i];
      ++delta.changed;
    }
    else if (was_active)
    {
      if (update == GrowthUpdate::kLiteral)
      {
        values[i] += learning_rate * avg_grad[i];
      }
      else
      {
        values[i] -= learning_rate * avg_grad[i];
      }
    }
  }
  delta.nnz_after = delta.nnz_before + delta.changed;
  return delta;
}

/// Magnitude-based pruning over the active weights: the threshold is the ceil(beta * nnz)-th smallest
/// active |W|, and every active weight strictly below it is removed.
template <typename T>
MaskDelta prune(MaskedMatrix<T> &m, double beta)
{
  if (!(beta > 0.0 && beta < 1.0))
  {
    throw ParameterError("pruning ratio must lie in (0, 1), got " + std::to_string(beta));
  }
  MaskDelta delta;
  auto     &mask   = m.mask();
  auto      values = m.values().flat();

  std::vector<T> active;
  active.reserve(m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
  {
    if (mask[i] != 0)
    {
      active.push_back(std::abs(values[i]));
    }
  }
  delta.nnz_before = active.size();
  delta.nnz_after  = active.size();
  if (active.empty())
  {
    return delta;
  }
  auto const k = std::max<std::size_t>(
    1, std::min<std::size_t>(active.size(),
                             static_cast<std::size_t>(std::ceil(beta * static_cast<double>(active.size()) - 1e-9))));
  T const thres = kth_smallest(std::move(active), k);
  for (std::size_t i = 0; i < m.size(); ++i)
  {
    if (mask[i] != 0 && std::abs(values[i]) < thres)
    {
      mask[i]   = 0;
      values[i] = T(0);
      ++delta.changed;
    }
  }
  delta.nnz_after = delta.nnz_before - delta.changed;
  return delta;
}

}  // namespace spnn
