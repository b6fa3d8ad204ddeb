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

#include "spnn/nn/model.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace spnn::metrics {

struct LayerCost
{
  std::string name;
  std::size_t rows{0};
  std::size_t cols{0};
  std::size_t dense{0};
  std::size_t nnz{0};
  std::size_t applications{1};  // times the matrix is applied per inference
  std::size_t flops{0};

  double sparsity() const { return dense == 0 ? 0.0 : 1.0 - static_cast<double>(nnz) / static_cast<double>(dense); }
};

/// Parameter and FLOP accounting. Totals cover the masked (growable) matrices only; biases and the
/// dense edge head are left out of the parameter count. FLOPs are 2 per nonzero weight per
/// application; activations, gate products and biases are not counted.
struct CostReport
{
  std::vector<LayerCost> layers;
  std::size_t            dense_params{0};
  std::size_t            nonzero_params{0};
  std::size_t            head_flops{0};
  std::size_t            total_flops{0};

  double sparsity() const
  {
    return dense_params == 0 ? 0.0 : 1.0 - static_cast<double>(nonzero_params) / static_cast<double>(dense_params);
  }
};

template <typename T>
CostReport count_params(Model<T> const &model)
{
  CostReport r;
  auto       names = model.growable_names();
  auto       mats  = model.growable();
  for (std::size_t i = 0; i < mats.size(); ++i)
  {
    LayerCost c;
    c.name  = names[i];
    c.rows  = mats[i]->rows();
    c.cols  = mats[i]->cols();
    c.dense = mats[i]->size();
    c.nnz   = mats[i]->nnz();
    r.dense_params += c.dense;
    r.nonzero_params += c.nnz;
    r.layers.push_back(c);
  }
  return r;
}

/// `steps` is the sequence length for edge models (defaults to the model's own); ignored for server models.
template <typename T>
CostReport count_flops(Model<T> const &model, std::size_t steps = 0)
{
  CostReport r = count_params(model);
  std::size_t const apps = model.kind() == ModelKind::kServer ? 1 : (steps == 0 ? model.input_steps() : steps);
  for (auto &c : r.layers)
  {
    c.applications = apps;
    c.flops         = 2 * c.nnz * apps;
    r.total_flops += c.flops;
  }
  if (model.kind() == ModelKind::kEdge)
  {
    r.head_flops = 2 * model.edge().head.size();
    r.total_flops += r.head_flops;
  }
  return r;
}

}  // namespace spnn::metrics
