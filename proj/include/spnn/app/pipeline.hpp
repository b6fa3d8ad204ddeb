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
#include "spnn/data/dataset_io.hpp"
#include "spnn/data/encode.hpp"
#include "spnn/data/scaler.hpp"
#include "spnn/data/split.hpp"
#include "spnn/growprune/trainer.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace spnn::app {

/// A dataset directory turned into encoded, scaled train/val/test samples.
template <typename T>
struct PreparedData
{
  TrainData<T>      data;
  data::Scaler      scaler;
  data::SplitCounts counts;
  std::size_t       subjects{0};
  std::size_t       classes{0};
  std::size_t       steps{1};
  std::size_t       width{0};
};

inline std::vector<data::Subject> read_dataset(std::filesystem::path const &root, data::SensorSchema const &schema)
{
  if (!std::filesystem::is_directory(root))
  {
    throw DataError("dataset directory " + root.string() + " does not exist");
  }
  std::vector<data::Subject> out;
  for (auto const &id : data::read_manifest(root))
  {
    out.push_back(data::read_subject(root, id, schema));
  }
  return out;
}

/// Windows, splits, scales and encodes a dataset for the given model kind. The scaler is fitted on
/// the training split unless one is supplied (evaluation reuses the scaler stored with the model).
/// The dataset must carry exactly `classes` distinct label values 0..classes-1.
template <typename T>
PreparedData<T> prepare_dataset(std::filesystem::path const &root, ModelKind kind, std::size_t classes,
                                std::optional<data::Scaler> scaler = std::nullopt)
{
  auto const schema   = data::SensorSchema::standard();
  auto const subjects = read_dataset(root, schema);

  std::size_t max_label = 0;
  for (auto const &s : subjects)
  {
    max_label = std::max(max_label, s.label);
  }
  if (max_label + 1 != classes)
  {
    throw ConfigError("dataset has labels 0.." + std::to_string(max_label) + " but the model expects " +
                      std::to_string(classes) + " classes");
  }

  std::vector<data::Instance> instances;
  for (auto const &s : subjects)
  {
    auto w = data::subject_instances(s, schema);
    instances.insert(instances.end(), std::make_move_iterator(w.begin()), std::make_move_iterator(w.end()));
  }
  if (instances.empty())
  {
    throw DataError("dataset yields no windows");
  }
  auto ds = data::split(std::move(instances));

  PreparedData<T> out;
  out.subjects = subjects.size();
  out.classes  = classes;
  out.counts   = ds.counts();
  out.scaler   = scaler ? *scaler : data::fit_scaler(ds.instances);
  if (out.scaler.channels() != schema.scaler_channels())
  {
    throw ConfigError("scaler has " + std::to_string(out.scaler.channels()) + " channels, the sensor schema needs " +
                      std::to_string(schema.scaler_channels()));
  }
  for (auto &inst : ds.instances)
  {
    auto const tag = inst.split;
    auto       s   = data::encode_for<T>(kind, schema, data::apply_scaler(out.scaler, std::move(inst)));
    out.steps      = s.steps;
    out.width      = s.width;
    auto &dst      = tag == data::SplitTag::kTrain ? out.data.train : tag == data::SplitTag::kVal ? out.data.val : out.data.test;
    dst.push_back(std::move(s));
  }
  return out;
}

template <typename T>
std::vector<Sample<T>> const &select_split(TrainData<T> const &d, std::string const &split)
{
  if (split == "train")
  {
    return d.train;
  }
  if (split == "val")
  {
    return d.val;
  }
  if (split == "test")
  {
    return d.test;
  }
  throw ConfigError("unknown split '" + split + "'");
}

}  // namespace spnn::app
