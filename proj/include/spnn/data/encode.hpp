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
#include "spnn/data/schema.hpp"
#include "spnn/data/stream.hpp"
#include "spnn/nn/model.hpp"

#include <cmath>
#include <vector>

namespace spnn::data {

inline void check_window_samples(SensorSchema const &schema, Instance const &inst)
{
  if (inst.channels.size() != schema.size())
  {
    throw DataError("window has " + std::to_string(inst.channels.size()) + " channels, schema has " +
                    std::to_string(schema.size()));
  }
  for (std::size_t c = 0; c < schema.size(); ++c)
  {
    auto const want = schema.samples_per_window(c, inst.length_s);
    if (inst.channels[c].size() != want)
    {
      throw DataError("channel '" + schema.channels[c].name + "' has " + std::to_string(inst.channels[c].size()) +
                      " samples, expected " + std::to_string(want));
    }
  }
  if (inst.demographics.size() != kDemographicCount)
  {
    throw DataError("expected 7 demographic values");
  }
}

/// Flattened server input: watch channels, then phone channels (each channel contiguous in time),
/// then the demographic features.
template <typename T = double>
Sample<T> flatten_server(SensorSchema const &schema, Instance const &inst)
{
  check_window_samples(schema, inst);
  Sample<T> out;
  out.steps = 1;
  out.width = schema.flat_width(inst.length_s);
  out.label = inst.label;
  out.values.reserve(out.width);
  for (auto src : {Source::kWatch, Source::kPhone})
  {
    for (std::size_t c = 0; c < schema.size(); ++c)
    {
      if (schema.channels[c].source == src)
      {
        for (double v : inst.channels[c])
        {
          out.values.push_back(static_cast<T>(v));
        }
      }
    }
  }
  for (double v : inst.demographics)
  {
    out.values.push_back(static_cast<T>(v));
  }
  return out;
}

/// Index of the reading at or before `tau` seconds into the window for a channel sampled at `rate`.
inline std::size_t held_index(double tau, double rate, std::size_t count)
{
  double const pos = std::floor(tau * rate + 1e-9);
  if (pos < 0.0)
  {
    return 0;  // no earlier reading: use the first one
  }
  return std::min(static_cast<std::size_t>(pos), count - 1);
}

/// Edge input: `steps_per_second` vectors per second, each holding one value per stream (the latest
/// reading at or before the step time) followed by the demographic features.
template <typename T = double>
Sample<T> step_encode_edge(SensorSchema const &schema, Instance const &inst, double steps_per_second = 4.0)
{
  check_window_samples(schema, inst);
  Sample<T> out;
  out.steps = static_cast<std::size_t>(std::llround(steps_per_second * inst.length_s));
  out.width = schema.step_width();
  out.label = inst.label;
  out.values.reserve(out.steps * out.width);
  for (std::size_t t = 0; t < out.steps; ++t)
  {
    double const tau = static_cast<double>(t) / steps_per_second;
    for (auto src : {Source::kWatch, Source::kPhone})
    {
      for (std::size_t c = 0; c < schema.size(); ++c)
      {
        if (schema.channels[c].source == src)
        {
          auto const &ch = inst.channels[c];
          out.values.push_back(static_cast<T>(ch[held_index(tau, schema.channels[c].rate_hz, ch.size())]));
        }
      }
    }
    for (double v : inst.demographics)
    {
      out.values.push_back(static_cast<T>(v));
    }
  }
  return out;
}

template <typename T>
Sample<T> encode_for(ModelKind kind, SensorSchema const &schema, Instance const &inst)
{
  return kind == ModelKind::kServer ? flatten_server<T>(schema, inst) : step_encode_edge<T>(schema, inst);
}

}  // namespace spnn::data
