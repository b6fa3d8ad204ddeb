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
#include "spnn/data/stream.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace spnn::data {

/// Per-channel min-max scaler over the streams followed by the demographic features.
/// Values outside the fitted range extrapolate linearly; constant channels map to 0.
class Scaler
{
public:
  Scaler() = default;
  Scaler(std::vector<double> min, std::vector<double> max)
    : min_(std::move(min))
    , max_(std::move(max))
  {
    if (min_.size() != max_.size())
    {
      throw ShapeError("scaler min/max length", min_.size(), max_.size());
    }
    for (std::size_t i = 0; i < min_.size(); ++i)
    {
      if (max_[i] < min_[i])
      {
        throw DataError("scaler channel " + std::to_string(i) + " has max < min");
      }
    }
  }

  bool        fitted() const { return !min_.empty(); }
  std::size_t channels() const { return min_.size(); }

  std::vector<double> const &min() const { return min_; }
  std::vector<double> const &max() const { return max_; }

  double scale(std::size_t channel, double x) const
  {
    double const lo = min_[channel];
    double const hi = max_[channel];
    return hi == lo ? 0.0 : (x - lo) / (hi - lo);
  }

  bool operator==(Scaler const &) const = default;

private:
  std::vector<double> min_;
  std::vector<double> max_;
};

/// Fits on the given instances only (callers pass the training split).
inline Scaler fit_scaler(std::vector<Instance const *> const &train)
{
  if (train.empty())
  {
    throw DataError("cannot fit a scaler on an empty training split");
  }
  std::size_t const streams = train.front()->channels.size();
  std::size_t const demo    = train.front()->demographics.size();
  std::vector<double> lo(streams + demo, std::numeric_limits<double>::infinity());
  std::vector<double> hi(streams + demo, -std::numeric_limits<double>::infinity());
  for (auto const *inst : train)
  {
    if (inst->channels.size() != streams || inst->demographics.size() != demo)
    {
      throw DataError("inconsistent channel layout while fitting scaler");
    }
    for (std::size_t c = 0; c < streams; ++c)
    {
      for (double v : inst->channels[c])
      {
        lo[c] = std::min(lo[c], v);
        hi[c] = std::max(hi[c], v);
      }
    }
    for (std::size_t d = 0; d < demo; ++d)
    {
      lo[streams + d] = std::min(lo[streams + d], inst->demographics[d]);
      hi[streams + d] = std::max(hi[streams + d], inst->demographics[d]);
    }
  }
  for (std::size_t c = 0; c < lo.size(); ++c)
  {
    if (lo[c] > hi[c])  // channel without samples
    {
      lo[c] = hi[c] = 0.0;
    }
  }
  return Scaler(std::move(lo), std::move(hi));
}

inline Scaler fit_scaler(std::vector<Instance> const &instances, SplitTag only = SplitTag::kTrain)
{
  std::vector<Instance const *> train;
  for (auto const &i : instances)
  {
    if (i.split == only)
    {
      train.push_back(&i);
    }
  }
  return fit_scaler(train);
}

inline Instance apply_scaler(Scaler const &scaler, Instance inst)
{
  if (!scaler.fitted())
  {
    throw StateError("scaler applied before being fitted");
  }
  std::size_t const streams = inst.channels.size();
  if (streams + inst.demographics.size() != scaler.channels())
  {
    throw ShapeError("scaler channel count", scaler.channels(), streams + inst.demographics.size());
  }
  for (std::size_t c = 0; c < streams; ++c)
  {
    for (double &v : inst.channels[c])
    {
      v = scaler.scale(c, v);
    }
  }
  for (std::size_t d = 0; d < inst.demographics.size(); ++d)
  {
    inst.demographics[d] = scaler.scale(streams + d, inst.demographics[d]);
  }
  return inst;
}

}  // namespace spnn::data
