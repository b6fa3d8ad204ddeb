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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace spnn::data {

/// Uniformly sampled stream; sample i is taken at start_ms + 1000 * i / rate_hz.
struct Stream
{
  std::string         name;
  double              rate_hz{1.0};
  std::int64_t        start_ms{0};
  std::vector<double> samples;

  double duration_s() const { return static_cast<double>(samples.size()) / rate_hz; }

  bool operator==(Stream const &) const = default;
};

struct Subject
{
  std::string         id;
  std::vector<Stream> streams;       // schema order
  std::vector<double> demographics;  // kDemographicCount values
  std::size_t         label{0};

  bool operator==(Subject const &) const = default;
};

/// Re-bases all streams to the latest (offset-corrected) start time, dropping leading samples taken
/// before it. `offsets_ms` may be empty (no correction) or hold one clock offset per stream.
inline std::vector<Stream> synchronize(std::vector<Stream> streams, std::vector<std::int64_t> const &offsets_ms = {})
{
  if (!offsets_ms.empty() && offsets_ms.size() != streams.size())
  {
    throw ShapeError("synchronize offset count", streams.size(), offsets_ms.size());
  }
  if (streams.empty())
  {
    return streams;
  }
  for (std::size_t i = 0; i < offsets_ms.size(); ++i)
  {
    streams[i].start_ms += offsets_ms[i];
  }
  std::int64_t origin = streams.front().start_ms;
  for (auto const &s : streams)
  {
    origin = std::max(origin, s.start_ms);
  }
  for (auto &s : streams)
  {
    double const lag  = static_cast<double>(origin - s.start_ms) / 1000.0;
    auto const   drop = static_cast<std::size_t>(std::ceil(lag * s.rate_hz - 1e-9));
    if (drop >= s.samples.size())
    {
      throw DataError("stream '" + s.name + "' is empty after synchronization");
    }
    s.samples.erase(s.samples.begin(), s.samples.begin() + static_cast<std::ptrdiff_t>(drop));
    s.start_ms = origin;
  }
  return streams;
}

struct WindowSpec
{
  double length_s{15.0};
  double gap_s{30.0};

  double stride_s() const { return length_s + gap_s; }

  /// floor((D - t) / (t + s)) + 1 for D >= t, else 0.
  std::size_t count_for(double duration_s) const
  {
    if (duration_s < length_s)
    {
      return 0;
    }
    return static_cast<std::size_t>(std::floor((duration_s - length_s) / stride_s() + 1e-9)) + 1;
  }
};

struct Window
{
  double                           start_s{0};
  std::vector<std::vector<double>> channels;
};

/// Window k covers [k (t + s), k (t + s) + t) seconds after the common origin; incomplete trailing
/// windows are dropped.
inline std::vector<Window> window(std::vector<Stream> const &streams, WindowSpec const &spec = {})
{
  std::vector<Window> out;
  if (streams.empty())
  {
    return out;
  }
  double duration = streams.front().duration_s();
  for (auto const &s : streams)
  {
    duration = std::min(duration, s.duration_s());
  }
  std::size_t const n = spec.count_for(duration);
  out.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
  {
    Window w;
    w.start_s = static_cast<double>(k) * spec.stride_s();
    w.channels.reserve(streams.size());
    for (auto const &s : streams)
    {
      auto const begin = static_cast<std::size_t>(std::llround(w.start_s * s.rate_hz));
      auto const count = static_cast<std::size_t>(std::llround(spec.length_s * s.rate_hz));
      if (begin + count > s.samples.size())
      {
        throw DataError("stream '" + s.name + "' too short for window " + std::to_string(k));
      }
      w.channels.emplace_back(s.samples.begin() + static_cast<std::ptrdiff_t>(begin),
                              s.samples.begin() + static_cast<std::ptrdiff_t>(begin + count));
    }
    out.push_back(std::move(w));
  }
  return out;
}

enum class SplitTag : std::uint8_t
{
  kTrain = 0,
  kVal   = 1,
  kTest  = 2,
};

/// One analysis window of one subject.
struct Instance
{
  std::string                      subject;
  std::size_t                      label{0};
  double                           start_s{0};
  double                           length_s{15.0};
  std::vector<std::vector<double>> channels;
  std::vector<double>              demographics;
  SplitTag                         split{SplitTag::kTrain};

  double end_s() const { return start_s + length_s; }

  bool operator==(Instance const &) const = default;
};

/// Checks the stream names and rates against the schema.
inline void check_schema(SensorSchema const &schema, std::vector<Stream> const &streams, std::string const &who)
{
  if (streams.size() != schema.size())
  {
    throw ConfigError(who + ": expected " + std::to_string(schema.size()) + " streams, found " +
                      std::to_string(streams.size()));
  }
  for (std::size_t i = 0; i < streams.size(); ++i)
  {
    if (streams[i].name != schema.channels[i].name || streams[i].rate_hz != schema.channels[i].rate_hz)
    {
      throw ConfigError(who + ": stream " + std::to_string(i) + " is '" + streams[i].name + "' at " +
                        std::to_string(streams[i].rate_hz) + " Hz, schema expects '" + schema.channels[i].name +
                        "' at " + std::to_string(schema.channels[i].rate_hz) + " Hz");
    }
  }
}

/// Synchronizes and windows one subject into instances.
inline std::vector<Instance> subject_instances(Subject const &subject, SensorSchema const &schema,
                                               WindowSpec const &spec = {})
{
  check_schema(schema, subject.streams, "subject " + subject.id);
  if (subject.demographics.size() != kDemographicCount)
  {
    throw DataError("subject " + subject.id + ": expected 7 demographic values");
  }
  auto                  windows = window(synchronize(subject.streams), spec);
  std::vector<Instance> out;
  out.reserve(windows.size());
  for (auto &w : windows)
  {
    out.push_back({subject.id, subject.label, w.start_s, spec.length_s, std::move(w.channels), subject.demographics,
                   SplitTag::kTrain});
  }
  return out;
}

}  // namespace spnn::data
