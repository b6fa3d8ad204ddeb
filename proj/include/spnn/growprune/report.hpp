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
#include "spnn/nn/model.hpp"

#include <charconv>
#include <cmath>
#include <cstddef>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

namespace spnn {

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v)
{
  if (std::isnan(v))
  {
    return "nan";
  }
  char buf[64];
  auto res = std::to_chars(std::begin(buf), std::end(buf), v);
  return std::string(buf, res.ptr);
}

inline double parse_double(std::string_view s)
{
  if (s == "nan")
  {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double v{};
  auto   res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
  {
    throw DataError("not a number: '" + std::string(s) + "'");
  }
  return v;
}

inline std::size_t parse_size(std::string_view s)
{
  std::size_t v{};
  auto        res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
  {
    throw DataError("not a non-negative integer: '" + std::string(s) + "'");
  }
  return v;
}

inline std::vector<std::string> split_csv_line(std::string const &line)
{
  std::vector<std::string> out;
  std::string              field;
  std::istringstream       is(line);
  while (std::getline(is, field, ','))
  {
    out.push_back(field);
  }
  if (!line.empty() && line.back() == ',')
  {
    out.emplace_back();
  }
  return out;
}

struct EpochRecord
{
  std::string phase;
  std::size_t epoch{0};        // global, strictly increasing
  std::size_t phase_epoch{0};
  double      train_loss{0};
  double      train_accuracy{0};
  double      val_loss{0};
  double      val_accuracy{0};
  double      sparsity{0};
  double      learning_rate{0};
  double      pruning_ratio{0};
  double      seconds{0};

  bool operator==(EpochRecord const &) const = default;
};

/// Outcome of one growth epoch or one pruning iteration.
struct PhaseRecord
{
  std::string phase;  // "grow" or "prune"
  std::size_t iteration{0};
  double      ratio{0};
  std::size_t changed{0};
  double      sparsity_before{0};
  double      sparsity_after{0};
  double      val_accuracy{0};
  bool        accepted{true};

  bool operator==(PhaseRecord const &) const = default;
};

struct LayerCensus
{
  std::string name;
  std::size_t dense{0};
  std::size_t nnz{0};

  bool operator==(LayerCensus const &) const = default;
};

struct TrainReport
{
  std::vector<EpochRecord> epochs;
  std::vector<PhaseRecord> phases;
  std::vector<LayerCensus> census;
  double                   pre_prune_peak{std::numeric_limits<double>::quiet_NaN()};
  double                   final_val_accuracy{std::numeric_limits<double>::quiet_NaN()};
  double                   final_test_accuracy{std::numeric_limits<double>::quiet_NaN()};
  double                   final_sparsity{std::numeric_limits<double>::quiet_NaN()};

  std::size_t next_epoch() const { return epochs.empty() ? 1 : epochs.back().epoch + 1; }
};

template <typename T>
std::vector<LayerCensus> mask_census(Model<T> const &model)
{
  std::vector<LayerCensus> out;
  auto                     names = model.growable_names();
  auto                     mats  = model.growable();
  for (std::size_t i = 0; i < mats.size(); ++i)
  {
    out.push_back({names[i], mats[i]->size(), mats[i]->nnz()});
  }
  return out;
}

/// 1 - nnz / dense over the growable matrices.
template <typename T>
double sparsity(Model<T> const &model)
{
  std::size_t dense = 0;
  std::size_t nnz   = 0;
  for (auto const *m : model.growable())
  {
    dense += m->size();
    nnz += m->nnz();
  }
  return dense == 0 ? 0.0 : 1.0 - static_cast<double>(nnz) / static_cast<double>(dense);
}

inline constexpr char const *kEpochCsvHeader =
  "phase,epoch,phase_epoch,train_loss,train_accuracy,val_loss,val_accuracy,sparsity,learning_rate,pruning_ratio";

/// Per-epoch rows. Wall-clock time is written only on request so reports stay byte-reproducible.
inline void write_epoch_csv(std::ostream &os, TrainReport const &r, bool with_timing = false)
{
  os << kEpochCsvHeader << (with_timing ? ",seconds" : "") << '\n';
  for (auto const &e : r.epochs)
  {
    os << e.phase << ',' << e.epoch << ',' << e.phase_epoch << ',' << format_double(e.train_loss) << ','
       << format_double(e.train_accuracy) << ',' << format_double(e.val_loss) << ',' << format_double(e.val_accuracy)
       << ',' << format_double(e.sparsity) << ',' << format_double(e.learning_rate) << ','
       << format_double(e.pruning_ratio);
    if (with_timing)
    {
      os << ',' << format_double(e.seconds);
    }
    os << '\n';
  }
}

inline std::vector<EpochRecord> read_epoch_csv(std::istream &is)
{
  std::vector<EpochRecord> out;
  std::string              line;
  if (!std::getline(is, line) || line.rfind(kEpochCsvHeader, 0) != 0)
  {
    throw DataError("epoch report: missing header");
  }
  bool const timing = line.size() > std::string(kEpochCsvHeader).size();
  while (std::getline(is, line))
  {
    if (line.empty())
    {
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != (timing ? 11U : 10U))
    {
      throw DataError("epoch report: bad row '" + line + "'");
    }
    EpochRecord e;
    e.phase          = f[0];
    e.epoch          = parse_size(f[1]);
    e.phase_epoch    = parse_size(f[2]);
    e.train_loss     = parse_double(f[3]);
    e.train_accuracy = parse_double(f[4]);
    e.val_loss       = parse_double(f[5]);
    e.val_accuracy   = parse_double(f[6]);
    e.sparsity       = parse_double(f[7]);
    e.learning_rate  = parse_double(f[8]);
    e.pruning_ratio  = parse_double(f[9]);
    if (timing)
    {
      e.seconds = parse_double(f[10]);
    }
    out.push_back(e);
  }
  return out;
}

inline constexpr char const *kPhaseCsvHeader =
  "phase,iteration,ratio,changed,sparsity_before,sparsity_after,val_accuracy,accepted";

inline void write_phase_csv(std::ostream &os, TrainReport const &r)
{
  os << kPhaseCsvHeader << '\n';
  for (auto const &p : r.phases)
  {
    os << p.phase << ',' << p.iteration << ',' << format_double(p.ratio) << ',' << p.changed << ','
       << format_double(p.sparsity_before) << ',' << format_double(p.sparsity_after) << ','
       << format_double(p.val_accuracy) << ',' << (p.accepted ? 1 : 0) << '\n';
  }
}

inline std::vector<PhaseRecord> read_phase_csv(std::istream &is)
{
  std::vector<PhaseRecord> out;
  std::string              line;
  if (!std::getline(is, line) || line != kPhaseCsvHeader)
  {
    throw DataError("phase report: missing header");
  }
  while (std::getline(is, line))
  {
    if (line.empty())
    {
      continue;
    }
    auto f = split_csv_line(line);
    if (f.size() != 8U)
    {
      throw DataError("phase report: bad row '" + line + "'");
    }
    PhaseRecord p;
    p.phase           = f[0];
    p.iteration       = parse_size(f[1]);
    p.ratio           = parse_double(f[2]);
    p.changed         = parse_size(f[3]);
    p.sparsity_before = parse_double(f[4]);
    p.sparsity_after  = parse_double(f[5]);
    p.val_accuracy    = parse_double(f[6]);
    p.accepted        = f[7] == "1";
    out.push_back(p);
  }
  return out;
}

/// Summary as `name,value` rows, including the per-layer census.
inline void write_summary_csv(std::ostream &os, TrainReport const &r)
{
  os << "name,value\n";
  os << "pre_prune_peak_val_accuracy," << format_double(r.pre_prune_peak) << '\n';
  os << "final_val_accuracy," << format_double(r.final_val_accuracy) << '\n';
  os << "final_test_accuracy," << format_double(r.final_test_accuracy) << '\n';
  os << "final_sparsity," << format_double(r.final_sparsity) << '\n';
  for (auto const &c : r.census)
  {
    os << "census." << c.name << ".dense," << c.dense << '\n';
    os << "census." << c.name << ".nnz," << c.nnz << '\n';
  }
}

}  // namespace spnn
