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
#include "spnn/growprune/report.hpp"
#include "spnn/io/model_file.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

// Checkpoint directory written after the growth phase:
//
//   model.spnn   model file (weights, masks, scaler)
//   rng          textual engine state of the training stream
//   epochs.csv   epoch rows logged so far
//   phases.csv   phase rows logged so far

namespace spnn::io {

template <typename T>
struct Checkpoint
{
  ModelFile<T> file;
  Rng          rng;
  TrainReport  report;
};

namespace detail {

inline void write_text(std::filesystem::path const &p, std::string const &text)
{
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os || !(os << text))
  {
    throw IoError("cannot write " + p.string());
  }
}

inline std::string read_text(std::filesystem::path const &p)
{
  std::ifstream is(p, std::ios::binary);
  if (!is)
  {
    throw IoError("cannot read " + p.string());
  }
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace detail

template <typename T>
void save_checkpoint(std::filesystem::path const &dir, Model<T> const &model, data::Scaler const &scaler,
                     Rng const &rng, TrainReport const &report)
{
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec)
  {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }
  save_model<T>(dir / "model.spnn", model, scaler);
  detail::write_text(dir / "rng", rng_state(rng));
  std::ostringstream epochs;
  write_epoch_csv(epochs, report);
  detail::write_text(dir / "epochs.csv", epochs.str());
  std::ostringstream phases;
  write_phase_csv(phases, report);
  detail::write_text(dir / "phases.csv", phases.str());
}

template <typename T>
Checkpoint<T> load_checkpoint(std::filesystem::path const &dir)
{
  Checkpoint<T> ck;
  ck.file = load_model<T>(dir / "model.spnn");
  restore_rng_state(ck.rng, detail::read_text(dir / "rng"));
  std::istringstream epochs(detail::read_text(dir / "epochs.csv"));
  ck.report.epochs = read_epoch_csv(epochs);
  std::istringstream phases(detail::read_text(dir / "phases.csv"));
  ck.report.phases = read_phase_csv(phases);
  return ck;
}

}  // namespace spnn::io
