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
#include "spnn/data/schema.hpp"
#include "spnn/data/stream.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

namespace spnn::data {

/// Synthetic stand-in for the clinical recordings. Every stream is a class-conditional AR(1) process
/// x_i = mu + phi (x_{i-1} - mu) + sigma sqrt(1 - phi^2) e_i around a nominal level, plus a slow
/// subject-level latent shared by all channels. `separation` scales the class-dependent shift of
/// means, spreads and demographics; at 0 all classes are identically distributed.
struct SynthConfig
{
  std::size_t              num_classes{2};
  std::vector<std::size_t> subjects_per_class{27, 25};
  double                   duration_min_h{1.0};
  double                   duration_max_h{1.5};
  double                   separation{1.0};
  double                   ar_coefficient{0.9};
  double                   shared_noise{0.3};       // latent loading, in channel sd units
  double                   subject_offset{0.2};     // per-subject mean offset sd, in channel sd units
  double                   demographic_jitter{1.0}; // 0 puts every subject at its class centre
  std::int64_t             start_jitter_ms{2000};
  std::int64_t             base_timestamp_ms{1'600'000'000'000};
  double                   quantum{1e-4};           // samples are rounded to this resolution
  std::uint64_t            effect_seed{20191};      // fixes the class-effect directions

  /// Binary defaults; three classes split the positives into 14 type-1 and 13 type-2 subjects.
  static SynthConfig defaults(std::size_t num_classes)
  {
    SynthConfig c;
    c.num_classes = num_classes;
    if (num_classes == 3)
    {
      c.subjects_per_class = {14, 13, 25};
    }
    return c;
  }

  std::size_t total_subjects() const
  {
    std::size_t n = 0;
    for (auto k : subjects_per_class)
    {
      n += k;
    }
    return n;
  }

  void validate() const
  {
    if (num_classes < 2)
    {
      throw ParameterError("synthetic data needs at least two classes");
    }
    if (subjects_per_class.size() != num_classes)
    {
      throw ParameterError("subjects_per_class must list one count per class");
    }
    if (!(duration_min_h > 0.0) || !(duration_max_h >= duration_min_h))
    {
      throw ParameterError("recording duration must be positive (and max >= min)");
    }
    if (separation < 0.0)
    {
      throw ParameterError("separation must be non-negative");
    }
    if (!(ar_coefficient >= 0.0 && ar_coefficient < 1.0))
    {
      throw ParameterError("ar_coefficient must lie in [0, 1)");
    }
    if (!(quantum > 0.0))
    {
      throw ParameterError("quantum must be positive");
    }
  }
};

namespace detail {

struct ChannelLevel
{
  double mean;
  double sd;
};

inline ChannelLevel nominal_level(std::string const &name)
{
  if (name == "gsr")
  {
    return {2.0, 0.5};
  }
  if (name == "skin_temperature")
  {
    return {33.0, 0.6};
  }
  if (name == "inter_beat_interval")
  {
    return {0.8, 0.08};
  }
  if (name == "blood_volume_pulse")
  {
    return {0.0, 40.0};
  }
  if (name == "air_pressure")
  {
    return {1010.0, 2.0};
  }
  if (name == "ambient_temperature")
  {
    return {22.0, 1.5};
  }
  if (name == "humidity")
  {
    return {45.0, 5.0};
  }
  return {0.0, 1.0};
}

struct DemographicRange
{
  double lo;
  double hi;
  bool   discrete;
};

inline constexpr std::array<DemographicRange, kDemographicCount> kDemographicRanges{{
  {20.0, 70.0, false},   // age
  {0.0, 1.0, true},      // gender
  {150.0, 195.0, false}, // height, cm
  {50.0, 110.0, false},  // weight, kg
  {0.0, 1.0, true},      // relatives with diabetes
  {0.0, 2.0, true},      // smoking
  {0.0, 2.0, true},      // drinking
}};

/// Class-effect directions in [-1, 1], fixed by the effect seed and shared by all subjects.
struct ClassEffects
{
  std::vector<std::vector<double>> mean;    // [class][channel]
  std::vector<std::vector<double>> spread;  // [class][channel]
  std::vector<std::vector<double>> demo;    // [class][demographic]

  ClassEffects(SynthConfig const &cfg, std::size_t channels)
  {
    Rng                                    rng(cfg.effect_seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t c = 0; c < cfg.num_classes; ++c)
    {
      std::vector<double> m(channels);
      std::vector<double> s(channels);
      std::vector<double> d(kDemographicCount);
      for (auto &v : m)
      {
        v = u(rng);
      }
      for (auto &v : s)
      {
        v = u(rng);
      }
      for (auto &v : d)
      {
        v = u(rng);
      }
      mean.push_back(std::move(m));
      spread.push_back(std::move(s));
      demo.push_back(std::move(d));
    }
  }
};

/// Nearest multiple of q, computed as integer / (1/q) so that the result prints as a short decimal.
inline double quantize(double v, double q)
{
  double const inv = std::round(1.0 / q);
  return std::round(v * inv) / inv;
}

}  // namespace detail

/// Class label of the subject with the given global index (subjects are ordered class by class).
inline std::size_t synth_label(SynthConfig const &cfg, std::size_t index)
{
  std::size_t acc = 0;
  for (std::size_t c = 0; c < cfg.subjects_per_class.size(); ++c)
  {
    acc += cfg.subjects_per_class[c];
    if (index < acc)
    {
      return c;
    }
  }
  throw IndexError("subject index " + std::to_string(index) + " out of range");
}

/// Generates one subject from its own stream of the master seed, so subjects can be produced one at a time.
inline Subject synth_subject(SynthConfig const &cfg, SensorSchema const &schema, std::size_t index,
                             std::uint64_t seed)
{
  cfg.validate();
  Rng                                    rng(derive_seed(seed, index));
  std::normal_distribution<double>       normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  detail::ClassEffects const             effects(cfg, schema.size());

  Subject subject;
  subject.label = synth_label(cfg, index);
  char id[32];
  std::snprintf(id, sizeof id, "s%03zu", index);
  subject.id = id;

  double const duration_h = cfg.duration_min_h + (cfg.duration_max_h - cfg.duration_min_h) * unit(rng);
  double const duration_s = duration_h * 3600.0;
  double const phi        = cfg.ar_coefficient;
  double const innovation = std::sqrt(1.0 - phi * phi);
  std::int64_t const base = cfg.base_timestamp_ms + static_cast<std::int64_t>(index) * 10'000'000;

  // slow latent shared by all channels, one value per second
  std::vector<double> latent(static_cast<std::size_t>(duration_s) + 2);
  {
    double x = normal(rng);
    for (auto &v : latent)
    {
      x = 0.98 * x + std::sqrt(1.0 - 0.98 * 0.98) * normal(rng);
      v = x;
    }
  }

  auto const &cls_mean   = effects.mean[subject.label];
  auto const &cls_spread = effects.spread[subject.label];
  for (std::size_t c = 0; c < schema.size(); ++c)
  {
    auto const &spec  = schema.channels[c];
    auto const  level = detail::nominal_level(spec.name);
    double const mu   = level.mean + level.sd * (cfg.separation * cls_mean[c] + cfg.subject_offset * normal(rng));
    double const sd   = level.sd * std::max(0.2, 1.0 + 0.25 * cfg.separation * cls_spread[c]);
    double const load = cfg.shared_noise * level.sd * (0.5 + 0.5 * unit(rng));

    Stream s;
    s.name     = spec.name;
    s.rate_hz  = spec.rate_hz;
    s.start_ms = base + (cfg.start_jitter_ms > 0
                           ? static_cast<std::int64_t>(unit(rng) * static_cast<double>(cfg.start_jitter_ms))
                           : 0);
    auto const n = static_cast<std::size_t>(std::floor(duration_s * spec.rate_hz));
    s.samples.resize(n);
    double x = normal(rng);  // stationary start
    for (std::size_t i = 0; i < n; ++i)
    {
      x                = phi * x + innovation * normal(rng);
      double const sec = static_cast<double>(i) / spec.rate_hz;
      double const v   = mu + sd * x + load * latent[static_cast<std::size_t>(sec)];
      s.samples[i]     = detail::quantize(v, cfg.quantum);
    }
    subject.streams.push_back(std::move(s));
  }

  auto const &cls_demo = effects.demo[subject.label];
  subject.demographics.resize(kDemographicCount);
  for (std::size_t d = 0; d < kDemographicCount; ++d)
  {
    auto const   r      = detail::kDemographicRanges[d];
    double const width  = r.hi - r.lo;
    double const centre = 0.5 * (r.lo + r.hi) + cfg.separation * cls_demo[d] * 0.25 * width;
    double       v      = centre + cfg.demographic_jitter * (unit(rng) - 0.5) * 0.5 * width;
    v                   = std::clamp(v, r.lo, r.hi);
    subject.demographics[d] = r.discrete ? std::round(v) : detail::quantize(v, 0.1);
  }
  return subject;
}

inline std::vector<Subject> synth_generate(SynthConfig const &cfg, SensorSchema const &schema, std::uint64_t seed)
{
  cfg.validate();
  std::vector<Subject> out;
  for (std::size_t i = 0; i < cfg.total_subjects(); ++i)
  {
    out.push_back(synth_subject(cfg, schema, i, seed));
  }
  return out;
}

}  // namespace spnn::data
