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
#include "spnn/data/synth.hpp"
#include "spnn/growprune/report.hpp"
#include "spnn/growprune/schedule.hpp"
#include "spnn/nn/model.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace spnn::app {

/// Raw settings, key -> value text. Later sources override earlier ones.
using ConfigMap = std::map<std::string, std::string>;

inline constexpr std::array<std::string_view, 40> kConfigKeys{
  // run
  "seed", "kind", "classes", "precision", "data", "out", "model", "split", "format", "stop_after", "checkpoint",
  "resume",
  // architecture
  "server_hidden", "edge_state", "edge_hidden",
  // schedule
  "seed_fill_rate", "growth_ratio", "growth_epochs", "initial_pruning_ratio", "pruning_ratio_floor", "learning_rate",
  "lr_decay_factor", "plateau_patience", "max_epochs", "max_lr_decays", "batch_size", "dropout_rate", "momentum",
  "recovery_tolerance", "growth_update",
  // synthetic data
  "subjects", "duration_min_h", "duration_max_h", "separation", "ar_coefficient", "shared_noise", "subject_offset",
  "demographic_jitter", "start_jitter_ms", "effect_seed"};

inline bool is_config_key(std::string_view key)
{
  return std::find(kConfigKeys.begin(), kConfigKeys.end(), key) != kConfigKeys.end();
}

namespace detail {

inline std::string trim(std::string_view s)
{
  auto const b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
  {
    return {};
  }
  auto const e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace detail

/// Parses `key = value` lines; blank lines and lines starting with '#' are skipped.
inline ConfigMap parse_config_text(std::string_view text, std::string const &origin = "config")
{
  ConfigMap          out;
  std::size_t        line_no = 0;
  std::istringstream is{std::string(text)};
  std::string        line;
  while (std::getline(is, line))
  {
    ++line_no;
    auto const t = detail::trim(line);
    if (t.empty() || t.front() == '#')
    {
      continue;
    }
    auto const eq = t.find('=');
    if (eq == std::string::npos)
    {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": expected key=value");
    }
    auto key = detail::trim(std::string_view(t).substr(0, eq));
    if (!is_config_key(key))
    {
      throw ConfigError(origin + ":" + std::to_string(line_no) + ": unknown key '" + key + "'");
    }
    out[key] = detail::trim(std::string_view(t).substr(eq + 1));
  }
  return out;
}

inline ConfigMap read_config_file(std::filesystem::path const &path)
{
  std::ifstream is(path);
  if (!is)
  {
    throw ConfigError("cannot read config file " + path.string());
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

/// Settings of every command. Schedule defaults follow the model kind unless overridden.
struct RunConfig
{
  std::uint64_t seed{1};
  ModelKind     kind{ModelKind::kServer};
  std::size_t   classes{2};
  int           precision{64};
  std::string   data;
  std::string   out;
  std::string   model;
  std::string   split{"test"};
  std::string   format{"text"};
  std::string   stop_after;
  std::string   checkpoint;
  std::string   resume;

  std::vector<std::size_t> server_hidden{1024, 512, 256, 128, 64};
  std::size_t              edge_state{96};
  std::size_t              edge_hidden{96};

  GrowPruneSchedule schedule;
  data::SynthConfig synth;

  void validate() const
  {
    if (precision != 32 && precision != 64)
    {
      throw ConfigError("precision must be 32 or 64");
    }
    if (format != "text" && format != "csv")
    {
      throw ConfigError("format must be text or csv");
    }
    if (split != "train" && split != "val" && split != "test")
    {
      throw ConfigError("split must be train, val or test");
    }
    if (!stop_after.empty() && stop_after != "growth")
    {
      throw ConfigError("stop_after accepts only 'growth'");
    }
    if (server_hidden.empty())
    {
      throw ConfigError("server_hidden needs at least one width");
    }
    try
    {
      check_class_count(classes);
      schedule.validate();
      synth.validate();
    }
    catch (ParameterError const &e)
    {
      throw ConfigError(e.what());
    }
  }
};

namespace detail {

template <typename F>
auto convert(std::string const &key, std::string const &value, F &&f)
{
  try
  {
    return f(value);
  }
  catch (Error const &)
  {
    throw ConfigError("bad value '" + value + "' for " + key);
  }
}

inline std::vector<std::size_t> parse_size_list(std::string const &key, std::string const &value)
{
  std::vector<std::size_t> out;
  for (auto const &f : split_csv_line(value))
  {
    out.push_back(convert(key, detail::trim(f), [](std::string const &s) { return parse_size(s); }));
  }
  if (out.empty())
  {
    throw ConfigError(key + " needs at least one value");
  }
  return out;
}

inline std::uint64_t parse_u64(std::string const &key, std::string const &value)
{
  std::uint64_t v{};
  auto          res = std::from_chars(value.data(), value.data() + value.size(), v);
  if (res.ec != std::errc{} || res.ptr != value.data() + value.size())
  {
    throw ConfigError("bad value '" + value + "' for " + key);
  }
  return v;
}

}  // namespace detail

inline RunConfig resolve_config(ConfigMap const &m)
{
  RunConfig c;
  auto      get = [&](char const *key) -> std::string const * {
    auto it = m.find(key);
    return it == m.end() ? nullptr : &it->second;
  };
  auto num = [&](char const *key, double &dst) {
    if (auto const *v = get(key))
    {
      dst = detail::convert(key, *v, [](std::string const &s) { return parse_double(s); });
    }
  };
  auto size = [&](char const *key, std::size_t &dst) {
    if (auto const *v = get(key))
    {
      dst = detail::convert(key, *v, [](std::string const &s) { return parse_size(s); });
    }
  };
  auto text = [&](char const *key, std::string &dst) {
    if (auto const *v = get(key))
    {
      dst = *v;
    }
  };

  for (auto const &[k, v] : m)
  {
    if (!is_config_key(k))
    {
      throw ConfigError("unknown key '" + k + "'");
    }
  }

  if (auto const *v = get("seed"))
  {
    c.seed = detail::parse_u64("seed", *v);
  }
  if (auto const *v = get("kind"))
  {
    c.kind = model_kind_from_string(*v);
  }
  size("classes", c.classes);
  if (auto const *v = get("precision"))
  {
    c.precision = *v == "32" ? 32 : *v == "64" ? 64 : 0;
  }
  text("data", c.data);
  text("out", c.out);
  text("model", c.model);
  text("split", c.split);
  text("format", c.format);
  text("stop_after", c.stop_after);
  text("checkpoint", c.checkpoint);
  text("resume", c.resume);

  if (auto const *v = get("server_hidden"))
  {
    c.server_hidden = detail::parse_size_list("server_hidden", *v);
  }
  size("edge_state", c.edge_state);
  size("edge_hidden", c.edge_hidden);

  c.schedule = GrowPruneSchedule::defaults_for(c.kind);
  auto &s    = c.schedule;
  num("seed_fill_rate", s.seed_fill_rate);
  num("growth_ratio", s.growth_ratio);
  size("growth_epochs", s.growth_epochs);
  num("initial_pruning_ratio", s.initial_pruning_ratio);
  num("pruning_ratio_floor", s.pruning_ratio_floor);
  num("learning_rate", s.learning_rate);
  num("lr_decay_factor", s.lr_decay_factor);
  size("plateau_patience", s.plateau_patience);
  size("max_epochs", s.max_epochs);
  size("max_lr_decays", s.max_lr_decays);
  size("batch_size", s.batch_size);
  num("dropout_rate", s.dropout_rate);
  num("momentum", s.momentum);
  num("recovery_tolerance", s.recovery_tolerance);
  if (auto const *v = get("growth_update"))
  {
    if (*v == "descent")
    {
      s.growth_update = GrowthUpdate::kDescentOnActive;
    }
    else if (*v == "literal")
    {
      s.growth_update = GrowthUpdate::kLiteral;
    }
    else
    {
      throw ConfigError("growth_update must be descent or literal");
    }
  }

  c.synth = data::SynthConfig::defaults(c.classes);
  if (auto const *v = get("subjects"))
  {
    c.synth.subjects_per_class = detail::parse_size_list("subjects", *v);
  }
  num("duration_min_h", c.synth.duration_min_h);
  num("duration_max_h", c.synth.duration_max_h);
  num("separation", c.synth.separation);
  num("ar_coefficient", c.synth.ar_coefficient);
  num("shared_noise", c.synth.shared_noise);
  num("subject_offset", c.synth.subject_offset);
  num("demographic_jitter", c.synth.demographic_jitter);
  if (auto const *v = get("start_jitter_ms"))
  {
    c.synth.start_jitter_ms = static_cast<std::int64_t>(detail::parse_u64("start_jitter_ms", *v));
  }
  if (auto const *v = get("effect_seed"))
  {
    c.synth.effect_seed = detail::parse_u64("effect_seed", *v);
  }

  c.validate();
  return c;
}

}  // namespace spnn::app
