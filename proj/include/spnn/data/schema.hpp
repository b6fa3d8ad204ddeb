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

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace spnn::data {

enum class Source
{
  kWatch,
  kPhone,
};

struct ChannelSpec
{
  std::string name;
  double      rate_hz{1.0};
  Source      source{Source::kWatch};
};

inline constexpr std::size_t kDemographicCount = 7;

inline constexpr std::array<std::string_view, kDemographicCount> kDemographicNames{
  "age", "gender", "height", "weight", "relatives_with_diabetes", "smoking", "drinking"};

/// Channel layout shared by every stage of the pipeline: watch channels first, then phone channels,
/// each multi-axis sensor expanded in x, y, z order.
struct SensorSchema
{
  std::vector<ChannelSpec> channels;

  std::size_t size() const { return channels.size(); }

  std::size_t count(Source s) const
  {
    std::size_t n = 0;
    for (auto const &c : channels)
    {
      n += c.source == s ? 1 : 0;
    }
    return n;
  }

  /// Samples of channel i in a window of `seconds`.
  std::size_t samples_per_window(std::size_t i, double seconds) const
  {
    return static_cast<std::size_t>(channels[i].rate_hz * seconds + 0.5);
  }

  std::size_t readings_per_window(Source s, double seconds) const
  {
    std::size_t n = 0;
    for (std::size_t i = 0; i < channels.size(); ++i)
    {
      if (channels[i].source == s)
      {
        n += samples_per_window(i, seconds);
      }
    }
    return n;
  }

  /// Scaled channels: every stream followed by the demographic features.
  std::size_t scaler_channels() const { return channels.size() + kDemographicCount; }

  std::size_t flat_width(double seconds) const
  {
    return readings_per_window(Source::kWatch, seconds) + readings_per_window(Source::kPhone, seconds) +
           kDemographicCount;
  }

  std::size_t step_width() const { return channels.size() + kDemographicCount; }

  /// Smartwatch (7 streams: 1 x 64 Hz, 3 x 32 Hz, 2 x 4 Hz, 1 x 1 Hz) and smartphone (26 streams at 3 Hz).
  static SensorSchema standard()
  {
    SensorSchema s;
    auto         watch = [&](std::string n, double r) { s.channels.push_back({std::move(n), r, Source::kWatch}); };
    auto         phone = [&](std::string n) { s.channels.push_back({std::move(n), 3.0, Source::kPhone}); };

    watch("gsr", 4.0);
    watch("skin_temperature", 4.0);
    watch("watch_acceleration_x", 32.0);
    watch("watch_acceleration_y", 32.0);
    watch("watch_acceleration_z", 32.0);
    watch("inter_beat_interval", 1.0);
    watch("blood_volume_pulse", 64.0);

    phone("humidity");
    phone("ambient_illuminance");
    phone("light_color_r");
    phone("light_color_g");
    phone("light_color_b");
    phone("light_color_w");
    phone("ambient_temperature");
    for (auto const *base : {"gravity", "angular_velocity", "orientation", "phone_acceleration", "linear_acceleration"})
    {
      for (auto const *axis : {"_x", "_y", "_z"})
      {
        phone(std::string(base) + axis);
      }
    }
    phone("air_pressure");
    phone("proximity");
    phone("wifi_strength");
    phone("magnetic_field");
    return s;
  }
};

}  // namespace spnn::data
