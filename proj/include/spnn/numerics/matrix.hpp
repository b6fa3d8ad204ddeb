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

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spnn {

template <typename T>
using Vector = std::vector<T>;

/// Dense row-major matrix.
template <typename T>
class Matrix
{
public:
  Matrix() = default;

  Matrix(std::size_t rows, std::size_t cols, T fill = T(0))
    : rows_(rows)
    , cols_(cols)
    , data_(rows * cols, fill)
  {}

  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
    : rows_(rows)
    , cols_(cols)
    , data_(std::move(data))
  {
    if (data_.size() != rows * cols)
    {
      throw ShapeError("matrix data size", rows * cols, data_.size());
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  T       &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  T const &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  T       &operator[](std::size_t i) { return data_[i]; }
  T const &operator[](std::size_t i) const { return data_[i]; }

  std::span<T>       row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<T const> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<T>       flat() { return data_; }
  std::span<T const> flat() const { return data_; }

  void fill(T value) { std::fill(data_.begin(), data_.end(), value); }

  bool operator==(Matrix const &) const = default;

private:
  std::size_t    rows_{0};
  std::size_t    cols_{0};
  std::vector<T> data_;
};

/// Weight matrix paired with a same-shape binary mask. Invariant: mask == 0 implies value == 0.
template <typename T>
class MaskedMatrix
{
public:
  using Mask = std::vector<std::uint8_t>;

  MaskedMatrix() = default;

  /// All-dormant matrix of the given shape.
  MaskedMatrix(std::size_t rows, std::size_t cols)
    : values_(rows, cols)
    , mask_(rows * cols, 0)
  {}

  MaskedMatrix(Matrix<T> values, Mask mask)
    : values_(std::move(values))
    , mask_(std::move(mask))
  {
    if (mask_.size() != values_.size())
    {
      throw ShapeError("mask size", values_.size(), mask_.size());
    }
    apply_mask();
  }

  std::size_t rows() const noexcept { return values_.rows(); }
  std::size_t cols() const noexcept { return values_.cols(); }
  std::size_t size() const noexcept { return values_.size(); }

  Matrix<T>       &values() noexcept { return values_; }
  Matrix<T> const &values() const noexcept { return values_; }
  Mask            &mask() noexcept { return mask_; }
  Mask const      &mask() const noexcept { return mask_; }

  bool active(std::size_t i) const { return mask_[i] != 0; }

  std::size_t nnz() const
  {
    return static_cast<std::size_t>(std::count_if(mask_.begin(), mask_.end(), [](std::uint8_t m) { return m != 0; }));
  }

  double density() const { return size() == 0 ? 0.0 : static_cast<double>(nnz()) / static_cast<double>(size()); }

  /// Zeroes every dormant entry.
  void apply_mask()
  {
    auto v = values_.flat();
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      if (mask_[i] == 0)
      {
        v[i] = T(0);
      }
    }
  }

  void set_all_active() { std::fill(mask_.begin(), mask_.end(), std::uint8_t{1}); }

  bool consistent() const
  {
    auto v = values_.flat();
    for (std::size_t i = 0; i < v.size(); ++i)
    {
      if (mask_[i] == 0 && v[i] != T(0))
      {
        return false;
      }
    }
    return true;
  }

  bool operator==(MaskedMatrix const &) const = default;

private:
  Matrix<T> values_;
  Mask      mask_;
};

/// Throws StateError when a dormant entry carries a nonzero weight.
template <typename T>
void check_mask_consistency(MaskedMatrix<T> const &m, std::string const &name = "matrix")
{
  if (!m.consistent())
  {
    throw StateError("mask consistency violated in " + name + ": dormant entry with nonzero weight");
  }
}

}  // namespace spnn
