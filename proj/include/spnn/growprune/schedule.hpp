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
#include "spnn/growprune/grow_prune.hpp"
#include "spnn/nn/model.hpp"

#include <cstddef>
#include <string>

namespace spnn {

/// Hyperparameters of the whole synthesis flow: seed, growth, plateau training and iterative pruning.
struct GrowPruneSchedule
{
  double       seed_fill_rate{0.2};
  double       growth_ratio{0.2};
  std::size_t  growth_epochs{3};
  double       initial_pruning_ratio{0.2};
  double       pruning_ratio_floor{0.01};
  double       learning_rate{0.005};
  double       lr_decay_factor{10.0};
  std::size_t  plateau_patience{50};
  std::size_t  max_epochs{200};     // per plateau-training phase
  std::size_t  max_lr_decays{2};    // a phase ends at the plateau after this many decays
  std::size_t  batch_size{256};
  double       dropout_rate{0.2};
  double       momentum{0.9};
  double       recovery_tolerance{0.001};  // fraction, i.e. 0.1 percentage points
  GrowthUpdate growth_update{GrowthUpdate::kDescentOnActive};

  static GrowPruneSchedule server_defaults() { return {}; }

  static GrowPruneSchedule edge_defaults()
  {
    GrowPruneSchedule s;
    s.learning_rate    = 0.001;
    s.batch_size       = 64;
    s.plateau_patience = 30;
    return s;
  }

  static GrowPruneSchedule defaults_for(ModelKind kind)
  {
    return kind == ModelKind::kServer ? server_defaults() : edge_defaults();
  }

  void validate() const
  {
    if (!(seed_fill_rate > 0.0 && seed_fill_rate <= 1.0))
    {
      throw ParameterError("seed_fill_rate must lie in (0, 1]");
    }
    if (!(growth_ratio > 0.0 && growth_ratio < 1.0))
    {
      throw ParameterError("growth_ratio must lie in (0, 1)");
    }
    if (!(initial_pruning_ratio > 0.0 && initial_pruning_ratio < 1.0))
    {
      throw ParameterError("initial_pruning_ratio must lie in (0, 1)");
    }
    if (!(pruning_ratio_floor > 0.0))
    {
      throw ParameterError("pruning_ratio_floor must be positive");
    }
    if (!(learning_rate > 0.0))
    {
      throw ParameterError("learning_rate must be positive");
    }
    if (!(lr_decay_factor > 0.0))
    {
      throw ParameterError("lr_decay_factor must be positive");
    }
    if (plateau_patience == 0 || batch_size == 0)
    {
      throw ParameterError("plateau_patience and batch_size must be positive");
    }
    if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    {
      throw ParameterError("dropout_rate must lie in [0, 1)");
    }
    if (!(momentum >= 0.0 && momentum < 1.0))
    {
      throw ParameterError("momentum must lie in [0, 1)");
    }
    if (recovery_tolerance < 0.0)
    {
      throw ParameterError("recovery_tolerance must be non-negative");
    }
  }
};

}  // namespace spnn
