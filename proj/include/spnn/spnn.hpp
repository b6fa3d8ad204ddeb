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

#include "spnn/app/commands.hpp"
#include "spnn/app/config.hpp"
#include "spnn/app/pipeline.hpp"
#include "spnn/core/error.hpp"
#include "spnn/core/random.hpp"
#include "spnn/data/dataset_io.hpp"
#include "spnn/data/encode.hpp"
#include "spnn/data/scaler.hpp"
#include "spnn/data/schema.hpp"
#include "spnn/data/split.hpp"
#include "spnn/data/stream.hpp"
#include "spnn/data/synth.hpp"
#include "spnn/growprune/grow_prune.hpp"
#include "spnn/growprune/report.hpp"
#include "spnn/growprune/schedule.hpp"
#include "spnn/growprune/trainer.hpp"
#include "spnn/io/binary.hpp"
#include "spnn/io/checkpoint.hpp"
#include "spnn/io/encoded_io.hpp"
#include "spnn/io/model_file.hpp"
#include "spnn/metrics/confusion.hpp"
#include "spnn/metrics/cost.hpp"
#include "spnn/nn/dropout.hpp"
#include "spnn/nn/hlstm.hpp"
#include "spnn/nn/model.hpp"
#include "spnn/nn/sc_layer.hpp"
#include "spnn/numerics/kernels.hpp"
#include "spnn/numerics/matrix.hpp"
#include "spnn/numerics/params.hpp"
#include "spnn/numerics/sgd.hpp"
