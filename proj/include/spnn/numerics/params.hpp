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

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spnn {

/// Non-owning view of one trainable tensor. `mask` is empty for unmasked tensors (biases, dense heads).
/// `growable` marks the matrices that grow-and-prune operates on.
template <typename T>
struct ParamRef
{
  std::string                    name;
  std::span<T>                   values;
  std::span<std::uint8_t const>  mask;
  std::size_t                    rows{0};
  std::size_t                    cols{0};
  MaskedMatrix<T>               *matrix{nullptr};
  bool                           growable{false};
};

template <typename T>
ParamRef<T> masked_param(std::string name, MaskedMatrix<T> &m, bool growable = true)
{
  return {std::move(name), m.values().flat(), m.mask(), m.rows(), m.cols(), &m, growable};
}

template <typename T>
ParamRef<T> dense_param(std::string name, Matrix<T> &m)
{
  return {std::move(name), m.flat(), {}, m.rows(), m.cols(), nullptr, false};
}

template <typename T>
ParamRef<T> bias_param(std::string name, std::vector<T> &b)
{
  return {std::move(name), b, {}, b.size(), 1, nullptr, false};
}

/// Per-parameter gradient accumulators mirroring a parameter list.
template <typename T>
class GradientBuffer
{
public:
  GradientBuffer() = default;

  explicit GradientBuffer(std::vector<ParamRef<T>> const &params)
  {
    grads_.reserve(params.size());
    for (auto const &p : params)
    {
      grads_.emplace_back(p.values.size(), T(0));
    }
  }

  std::size_t size() const noexcept { return grads_.size(); }
  std::size_t sample_count() const noexcept { return samples_; }
  void        add_samples(std::size_t n) noexcept { samples_ += n; }

  std::span<T>       operator[](std::size_t i) { return grads_[i]; }
  std::span<T const> operator[](std::size_t i) const { return grads_[i]; }

  void zero()
  {
    for (auto &g : grads_)
    {
      std::fill(g.begin(), g.end(), T(0));
    }
    samples_ = 0;
  }

  /// Adds the accumulated sums (and sample counts) of another buffer.
  void accumulate(GradientBuffer const &other)
  {
    check_same_shape(other);
    for (std::size_t i = 0; i < grads_.size(); ++i)
    {
      for (std::size_t j = 0; j < grads_[i].size(); ++j)
      {
        grads_[i][j] += other.grads_[i][j];
      }
    }
    samples_ += other.samples_;
  }

  /// Accumulated sum divided by sample_count.
  GradientBuffer mean() const
  {
    if (samples_ == 0)
    {
      throw StateError("average gradient undefined: no samples accumulated");
    }
    GradientBuffer out = *this;
    T const        inv = T(1) / static_cast<T>(samples_);
    for (auto &g : out.grads_)
    {
      for (auto &v : g)
      {
        v *= inv;
      }
    }
    out.samples_ = 1;
    return out;
  }

  bool all_zero() const
  {
    for (auto const &g : grads_)
    {
      for (auto v : g)
      {
        if (v != T(0))
        {
          return false;
        }
      }
    }
    return true;
  }

  void check_same_shape(GradientBuffer const &other) const
  {
    if (other.grads_.size() != grads_.size())
    {
      throw ShapeError("gradient buffer tensor count", grads_.size(), other.grads_.size());
    }
    for (std::size_t i = 0; i < grads_.size(); ++i)
    {
      if (other.grads_[i].size() != grads_[i].size())
      {
        throw ShapeError("gradient buffer tensor " + std::to_string(i), grads_[i].size(), other.grads_[i].size());
      }
    }
  }

private:
  std::vector<std::vector<T>> grads_;
  std::size_t                 samples_{0};
};

}  // namespace spnn
