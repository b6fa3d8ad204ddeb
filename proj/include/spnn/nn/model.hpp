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
#include "spnn/nn/hlstm.hpp"
#include "spnn/nn/sc_layer.hpp"
#include "spnn/numerics/kernels.hpp"
#include "spnn/numerics/params.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace spnn {

enum class ModelKind : std::uint8_t
{
  kServer = 0,
  kEdge   = 1,
};

inline std::string_view to_string(ModelKind k)
{
  return k == ModelKind::kServer ? "server" : "edge";
}

inline ModelKind model_kind_from_string(std::string_view s)
{
  if (s == "server")
  {
    return ModelKind::kServer;
  }
  if (s == "edge")
  {
    return ModelKind::kEdge;
  }
  throw ConfigError("unknown model kind '" + std::string(s) + "' (expected server or edge)");
}

/// One labelled model input, row-major `steps x width`. Server inputs have steps == 1.
template <typename T>
struct Sample
{
  std::vector<T> values;
  std::size_t    steps{1};
  std::size_t    width{0};
  std::size_t    label{0};

  std::span<T const> row(std::size_t t) const { return std::span<T const>(values).subspan(t * width, width); }

  bool operator==(Sample const &) const = default;
};

/// Reference architecture sizes; the defaults are the full-size models.
struct ServerShape
{
  std::size_t              input_width{3712};
  std::vector<std::size_t> hidden{1024, 512, 256, 128, 64};
  std::size_t              num_classes{2};
  double                   dropout_rate{0.2};
};

struct EdgeShape
{
  std::size_t input_width{40};
  std::size_t state_width{96};
  std::size_t hidden_width{96};
  std::size_t steps{60};
  std::size_t num_classes{2};
  double      dropout_rate{0.2};
};

template <typename T>
struct ServerNet
{
  std::vector<ScLayer<T>> layers;
};

template <typename T>
struct EdgeNet
{
  HlstmCell<T> cell;
  std::size_t  steps{60};
  Matrix<T>    head;  // dense classifier, excluded from grow/prune
  Vector<T>    head_bias;
};

template <typename T>
class Model
{
public:
  using Net = std::variant<ServerNet<T>, EdgeNet<T>>;

  Model() = default;
  explicit Model(Net net)
    : net_(std::move(net))
  {}

  ModelKind kind() const { return std::holds_alternative<ServerNet<T>>(net_) ? ModelKind::kServer : ModelKind::kEdge; }

  ServerNet<T>       &server() { return std::get<ServerNet<T>>(net_); }
  ServerNet<T> const &server() const { return std::get<ServerNet<T>>(net_); }
  EdgeNet<T>         &edge() { return std::get<EdgeNet<T>>(net_); }
  EdgeNet<T> const   &edge() const { return std::get<EdgeNet<T>>(net_); }

  std::size_t num_classes() const
  {
    return kind() == ModelKind::kServer ? server().layers.back().out_width() : edge().head.rows();
  }

  std::size_t input_steps() const { return kind() == ModelKind::kServer ? 1 : edge().steps; }

  std::size_t input_width() const
  {
    return kind() == ModelKind::kServer ? server().layers.front().in_width() : edge().cell.input_width;
  }

  /// Every trainable tensor in a fixed order shared by GradientBuffer, OptimizerState and the file format.
  std::vector<ParamRef<T>> params()
  {
    std::vector<ParamRef<T>> out;
    if (kind() == ModelKind::kServer)
    {
      auto &layers = server().layers;
      for (std::size_t l = 0; l < layers.size(); ++l)
      {
        out.push_back(masked_param("sc" + std::to_string(l) + ".weight", layers[l].weights));
        out.push_back(bias_param("sc" + std::to_string(l) + ".bias", layers[l].bias));
      }
    }
    else
    {
      auto &e = edge();
      for (std::size_t q = 0; q < kGateCount; ++q)
      {
        std::string const prefix = std::string("gate.") + kGateNames[q];
        auto             &g      = e.cell.gates[q];
        out.push_back(masked_param(prefix + ".hidden.weight", g.hidden));
        out.push_back(bias_param(prefix + ".hidden.bias", g.hidden_bias));
        out.push_back(masked_param(prefix + ".projection.weight", g.projection));
        out.push_back(bias_param(prefix + ".projection.bias", g.projection_bias));
      }
      out.push_back(dense_param("head.weight", e.head));
      out.push_back(bias_param("head.bias", e.head_bias));
    }
    return out;
  }

  /// The masked matrices subject to growth and pruning, in parameter order.
  std::vector<MaskedMatrix<T> *> growable()
  {
    std::vector<MaskedMatrix<T> *> out;
    for (auto &p : params())
    {
      if (p.growable)
      {
        out.push_back(p.matrix);
      }
    }
    return out;
  }

  std::vector<MaskedMatrix<T> const *> growable() const
  {
    std::vector<MaskedMatrix<T> const *> out;
    for (auto *m : const_cast<Model *>(this)->growable())
    {
      out.push_back(m);
    }
    return out;
  }

  std::vector<std::string> growable_names() const
  {
    std::vector<std::string> out;
    for (auto &p : const_cast<Model *>(this)->params())
    {
      if (p.growable)
      {
        out.push_back(p.name);
      }
    }
    return out;
  }

  void check_mask_consistency() const
  {
    auto names = growable_names();
    auto mats  = growable();
    for (std::size_t i = 0; i < mats.size(); ++i)
    {
      spnn::check_mask_consistency(*mats[i], names[i]);
    }
  }

  bool operator==(Model const &other) const;

private:
  Net net_;
};

template <typename T>
bool operator==(ScLayer<T> const &a, ScLayer<T> const &b)
{
  return a.weights == b.weights && a.bias == b.bias && a.activation == b.activation &&
         a.dropout_rate == b.dropout_rate;
}

template <typename T>
bool Model<T>::operator==(Model const &other) const
{
  if (kind() != other.kind())
  {
    return false;
  }
  if (kind() == ModelKind::kServer)
  {
    return server().layers == other.server().layers;
  }
  auto const &a = edge();
  auto const &b = other.edge();
  if (a.steps != b.steps || a.head != b.head || a.head_bias != b.head_bias ||
      a.cell.input_width != b.cell.input_width || a.cell.state_width != b.cell.state_width ||
      a.cell.hidden_width != b.cell.hidden_width || a.cell.dropout_rate != b.cell.dropout_rate)
  {
    return false;
  }
  for (std::size_t q = 0; q < kGateCount; ++q)
  {
    auto const &x = a.cell.gates[q];
    auto const &y = b.cell.gates[q];
    if (!(x.hidden == y.hidden && x.hidden_bias == y.hidden_bias && x.projection == y.projection &&
          x.projection_bias == y.projection_bias))
    {
      return false;
    }
  }
  return true;
}

inline void check_class_count(std::size_t num_classes)
{
  if (num_classes != 2 && num_classes != 3)
  {
    throw ParameterError("unsupported class count " + std::to_string(num_classes) + " (expected 2 or 3)");
  }
}

/// Stacked SC classifier: ReLU hidden layers with dropout, linear output layer. All masks start
/// fully active; seed_init sparsifies them.
template <typename T>
Model<T> build_server(ServerShape const &shape, Rng &rng)
{
  check_class_count(shape.num_classes);
  check_dropout_rate(shape.dropout_rate);
  if (shape.input_width == 0)
  {
    throw ParameterError("server input width must be positive");
  }
  ServerNet<T> net;
  std::size_t  in = shape.input_width;
  auto         add = [&](std::size_t out, Activation act, double rate) {
    ScLayer<T> layer;
    layer.weights = MaskedMatrix<T>(out, in);
    layer.weights.set_all_active();
    init_uniform(layer.weights, rng);
    layer.bias         = Vector<T>(out, T(0));
    layer.activation   = act;
    layer.dropout_rate = rate;
    net.layers.push_back(std::move(layer));
    in = out;
  };
  for (auto w : shape.hidden)
  {
    if (w == 0)
    {
      throw ParameterError("server hidden widths must be positive");
    }
    add(w, Activation::kRelu, shape.dropout_rate);
  }
  add(shape.num_classes, Activation::kIdentity, 0.0);
  return Model<T>(std::move(net));
}

template <typename T>
Model<T> build_server(std::size_t num_classes, Rng &rng)
{
  ServerShape shape;
  shape.num_classes = num_classes;
  return build_server<T>(shape, rng);
}

/// One H-LSTM layer unrolled over the input sequence plus a dense head on the final hidden state.
template <typename T>
Model<T> build_edge(EdgeShape const &shape, Rng &rng)
{
  check_class_count(shape.num_classes);
  if (shape.input_width == 0 || shape.state_width == 0 || shape.hidden_width == 0 || shape.steps == 0)
  {
    throw ParameterError("edge dimensions must be positive");
  }
  EdgeNet<T> net;
  net.cell  = make_hlstm_cell<T>(shape.input_width, shape.state_width, shape.hidden_width, shape.dropout_rate);
  net.steps = shape.steps;
  for (auto &g : net.cell.gates)
  {
    init_uniform(g.hidden, rng);
    init_uniform(g.projection, rng);
  }
  net.head = Matrix<T>(shape.num_classes, shape.state_width);
  init_uniform(net.head, rng);
  net.head_bias = Vector<T>(shape.num_classes, T(0));
  return Model<T>(std::move(net));
}

template <typename T>
Model<T> build_edge(std::size_t num_classes, Rng &rng)
{
  EdgeShape shape;
  shape.num_classes = num_classes;
  return build_edge<T>(shape, rng);
}

/// Everything backward needs from one forward pass.
template <typename T>
struct ForwardRecord
{
  bool                           recorded{false};
  std::vector<ScCache<T>>        sc;
  std::vector<HlstmStepCache<T>> steps;
  Vector<T>                      final_hidden;
};

template <typename T>
void check_input_shape(Model<T> const &model, Sample<T> const &x)
{
  if (x.width != model.input_width())
  {
    throw ShapeError("model input width", model.input_width(), x.width);
  }
  if (x.steps != model.input_steps())
  {
    throw ShapeError("model input steps", model.input_steps(), x.steps);
  }
  if (x.values.size() != x.steps * x.width)
  {
    throw ShapeError("sample value count", x.steps * x.width, x.values.size());
  }
}

/// Pre-softmax logits. Pass a record to keep the intermediates for backward.
template <typename T>
Vector<T> forward(Model<T> const &model, Sample<T> const &x, Mode mode, Rng &rng, ForwardRecord<T> *record = nullptr)
{
  check_input_shape(model, x);
  if (record != nullptr)
  {
    record->recorded = false;
    record->sc.clear();
    record->steps.clear();
  }
  Vector<T> out;
  if (model.kind() == ModelKind::kServer)
  {
    auto const &layers = model.server().layers;
    if (record != nullptr)
    {
      record->sc.resize(layers.size());
    }
    out = x.values;
    for (std::size_t l = 0; l < layers.size(); ++l)
    {
      out = sc_forward<T>(layers[l], out, mode, rng, record != nullptr ? &record->sc[l] : nullptr);
    }
  }
  else
  {
    auto const &e = model.edge();
    auto h = hlstm_unroll<T>(e.cell, x.values, x.steps, mode, rng, record != nullptr ? &record->steps : nullptr);
    out    = dense_linear<T>(e.head, e.head_bias, h);
    if (record != nullptr)
    {
      record->final_hidden = std::move(h);
    }
  }
  if (record != nullptr)
  {
    record->recorded = true;
  }
  return out;
}

/// Accumulates parameter gradients given dL/dlogits into `grads` (laid out as model.params()).
template <typename T>
void backward(Model<T> const &model, ForwardRecord<T> const &record, std::span<T const> grad_logits,
              GradientBuffer<T> &grads)
{
  if (!record.recorded)
  {
    throw StateError("backward called without a recorded forward pass");
  }
  if (grad_logits.size() != model.num_classes())
  {
    throw ShapeError("backward logit gradient length", model.num_classes(), grad_logits.size());
  }
  if (model.kind() == ModelKind::kServer)
  {
    auto const &layers = model.server().layers;
    if (grads.size() != 2 * layers.size())
    {
      throw ShapeError("gradient buffer tensor count", 2 * layers.size(), grads.size());
    }
    Vector<T> up(grad_logits.begin(), grad_logits.end());
    for (std::size_t l = layers.size(); l-- > 0;)
    {
      up = sc_backward<T>(layers[l], record.sc[l], up, grads[2 * l], grads[2 * l + 1], l > 0);
    }
  }
  else
  {
    auto const &e = model.edge();
    if (grads.size() != 4 * kGateCount + 2)
    {
      throw ShapeError("gradient buffer tensor count", 4 * kGateCount + 2, grads.size());
    }
    std::size_t const head_w = 4 * kGateCount;
    outer_accumulate<T>(grads[head_w], e.head.cols(), grad_logits, record.final_hidden);
    auto gb = grads[head_w + 1];
    for (std::size_t k = 0; k < grad_logits.size(); ++k)
    {
      gb[k] += grad_logits[k];
    }
    Vector<T> dh(e.cell.state_width, T(0));
    dense_transpose_accumulate<T>(e.head, grad_logits, dh);

    std::array<HlstmGateGrads<T>, kGateCount> gg;
    for (std::size_t q = 0; q < kGateCount; ++q)
    {
      gg[q] = {grads[4 * q], grads[4 * q + 1], grads[4 * q + 2], grads[4 * q + 3]};
    }
    hlstm_backward<T>(e.cell, record.steps, dh, gg);
  }
}

template <typename T>
struct SampleResult
{
  T           loss{};
  std::size_t prediction{0};
};

/// Forward, softmax cross-entropy and backward for one sample; adds one to the sample count.
template <typename T>
SampleResult<T> accumulate_sample_gradient(Model<T> const &model, Sample<T> const &x, Mode mode, Rng &rng,
                                           GradientBuffer<T> &grads, ForwardRecord<T> &record)
{
  auto logits = forward<T>(model, x, mode, rng, &record);
  auto sl     = softmax_cross_entropy<T>(logits, x.label);
  auto dlog   = sl.probabilities;
  dlog[x.label] -= T(1);
  backward<T>(model, record, dlog, grads);
  grads.add_samples(1);
  return {sl.loss, argmax<T>(logits)};
}

template <typename T>
std::size_t predict(Model<T> const &model, Sample<T> const &x)
{
  Rng  unused(0);
  auto logits = forward<T>(model, x, Mode::kEval, unused);
  return argmax<T>(logits);
}

}  // namespace spnn
