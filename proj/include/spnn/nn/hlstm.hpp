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

#include "spnn/nn/dropout.hpp"
#include "spnn/nn/sc_layer.hpp"
#include "spnn/numerics/kernels.hpp"
#include "spnn/numerics/matrix.hpp"

#include <array>
#include <cmath>
#include <span>
#include <vector>

namespace spnn {

enum GateIndex : std::size_t
{
  kForgetGate = 0,
  kInputGate  = 1,
  kOutputGate = 2,
  kUpdateGate = 3,
};

inline constexpr std::size_t kGateCount = 4;
inline constexpr std::array<char const *, kGateCount> kGateNames{"forget", "input", "output", "update"};

/// One deep control gate: a ReLU hidden layer over [x_t, h_{t-1}] followed by a sparse projection.
template <typename T>
struct HlstmGate
{
  MaskedMatrix<T> hidden;       // hidden_width x (input_width + state_width)
  Vector<T>       hidden_bias;
  MaskedMatrix<T> projection;   // state_width x hidden_width
  Vector<T>       projection_bias;
};

/// Hidden-layer LSTM cell. Gates f, i, o use a sigmoid output, the update vector g uses tanh.
template <typename T>
struct HlstmCell
{
  std::size_t                         input_width{0};
  std::size_t                         state_width{0};
  std::size_t                         hidden_width{0};
  double                              dropout_rate{0.0};
  std::array<HlstmGate<T>, kGateCount> gates;

  std::size_t concat_width() const { return input_width + state_width; }
};

template <typename T>
HlstmCell<T> make_hlstm_cell(std::size_t input_width, std::size_t state_width, std::size_t hidden_width,
                             double dropout_rate)
{
  check_dropout_rate(dropout_rate);
  HlstmCell<T> cell;
  cell.input_width  = input_width;
  cell.state_width  = state_width;
  cell.hidden_width = hidden_width;
  cell.dropout_rate = dropout_rate;
  for (auto &g : cell.gates)
  {
    g.hidden          = MaskedMatrix<T>(hidden_width, input_width + state_width);
    g.hidden_bias     = Vector<T>(hidden_width, T(0));
    g.projection      = MaskedMatrix<T>(state_width, hidden_width);
    g.projection_bias = Vector<T>(state_width, T(0));
    g.hidden.set_all_active();
    g.projection.set_all_active();
  }
  return cell;
}

template <typename T>
struct HlstmState
{
  Vector<T> h;
  Vector<T> c;
};

template <typename T>
struct HlstmStepCache
{
  Vector<T>                           u;  // [x_t, h_{t-1}]
  Vector<T>                           c_prev;
  std::array<Vector<T>, kGateCount>   hidden_pre;
  std::array<Vector<T>, kGateCount>   hidden_out;  // after ReLU and dropout
  std::array<Vector<T>, kGateCount>   drop;
  std::array<Vector<T>, kGateCount>   gate;        // f, i, o, g
  Vector<T>                           c;
  Vector<T>                           tanh_c;
};

template <typename T>
HlstmState<T> hlstm_step(HlstmCell<T> const &cell, std::span<T const> x, std::span<T const> h_prev,
                         std::span<T const> c_prev, Mode mode, Rng &rng, HlstmStepCache<T> *cache = nullptr)
{
  if (x.size() != cell.input_width)
  {
    throw ShapeError("hlstm_step input length", cell.input_width, x.size());
  }
  if (h_prev.size() != cell.state_width)
  {
    throw ShapeError("hlstm_step hidden state length", cell.state_width, h_prev.size());
  }
  if (c_prev.size() != cell.state_width)
  {
    throw ShapeError("hlstm_step cell state length", cell.state_width, c_prev.size());
  }

  Vector<T> u;
  u.reserve(cell.concat_width());
  u.insert(u.end(), x.begin(), x.end());
  u.insert(u.end(), h_prev.begin(), h_prev.end());

  std::array<Vector<T>, kGateCount> gate_out;
  for (std::size_t q = 0; q < kGateCount; ++q)
  {
    auto const &g   = cell.gates[q];
    auto        pre = masked_linear<T>(g.hidden, g.hidden_bias, u);
    auto        a   = activation<T>(Activation::kRelu, pre);
    auto        drop = dropout_mask<T>(a.size(), cell.dropout_rate, mode, rng);
    apply_dropout_mask<T>(a, drop);
    auto p = masked_linear<T>(g.projection, g.projection_bias, a);
    gate_out[q] = activation<T>(q == kUpdateGate ? Activation::kTanh : Activation::kSigmoid, p);
    if (cache != nullptr)
    {
      cache->hidden_pre[q] = std::move(pre);
      cache->hidden_out[q] = std::move(a);
      cache->drop[q]       = std::move(drop);
    }
  }

  auto const   &f = gate_out[kForgetGate];
  auto const   &i = gate_out[kInputGate];
  auto const   &o = gate_out[kOutputGate];
  auto const   &g = gate_out[kUpdateGate];
  HlstmState<T> next{Vector<T>(cell.state_width), Vector<T>(cell.state_width)};
  Vector<T>     tanh_c(cell.state_width);
  for (std::size_t k = 0; k < cell.state_width; ++k)
  {
    next.c[k] = f[k] * c_prev[k] + i[k] * g[k];
    tanh_c[k] = std::tanh(next.c[k]);
    next.h[k] = o[k] * tanh_c[k];
  }
  if (cache != nullptr)
  {
    cache->u = std::move(u);
    cache->c_prev.assign(c_prev.begin(), c_prev.end());
    cache->gate   = std::move(gate_out);
    cache->c      = next.c;
    cache->tanh_c = std::move(tanh_c);
  }
  return next;
}

/// Runs the cell over `steps` rows of `sequence` (row-major, steps x input_width) from zero state
/// and returns the final hidden state.
template <typename T>
Vector<T> hlstm_unroll(HlstmCell<T> const &cell, std::span<T const> sequence, std::size_t steps, Mode mode, Rng &rng,
                       std::vector<HlstmStepCache<T>> *caches = nullptr)
{
  if (steps == 0)
  {
    throw ParameterError("hlstm_unroll needs a non-empty sequence");
  }
  if (sequence.size() != steps * cell.input_width)
  {
    throw ShapeError("hlstm_unroll sequence size", steps * cell.input_width, sequence.size());
  }
  if (caches != nullptr)
  {
    caches->assign(steps, HlstmStepCache<T>{});
  }
  HlstmState<T> state{Vector<T>(cell.state_width, T(0)), Vector<T>(cell.state_width, T(0))};
  for (std::size_t t = 0; t < steps; ++t)
  {
    auto x = sequence.subspan(t * cell.input_width, cell.input_width);
    state  = hlstm_step<T>(cell, x, state.h, state.c, mode, rng, caches != nullptr ? &(*caches)[t] : nullptr);
  }
  return state.h;
}

/// Gradient slots for one gate, in parameter order: hidden W, hidden b, projection W, projection b.
template <typename T>
struct HlstmGateGrads
{
  std::span<T> hidden;
  std::span<T> hidden_bias;
  std::span<T> projection;
  std::span<T> projection_bias;
};

/// Back-propagation through time from the gradient of the final hidden state.
template <typename T>
void hlstm_backward(HlstmCell<T> const &cell, std::vector<HlstmStepCache<T>> const &caches,
                    std::span<T const> grad_h_final, std::array<HlstmGateGrads<T>, kGateCount> const &grads)
{
  std::size_t const S = cell.state_width;
  std::size_t const I = cell.input_width;
  if (grad_h_final.size() != S)
  {
    throw ShapeError("hlstm_backward hidden gradient length", S, grad_h_final.size());
  }
  Vector<T> dh(grad_h_final.begin(), grad_h_final.end());
  Vector<T> dc(S, T(0));
  std::array<Vector<T>, kGateCount> dp;
  for (auto &v : dp)
  {
    v.resize(S);
  }

  for (std::size_t step = caches.size(); step-- > 0;)
  {
    auto const &cc = caches[step];
    auto const &f  = cc.gate[kForgetGate];
    auto const &i  = cc.gate[kInputGate];
    auto const &o  = cc.gate[kOutputGate];
    auto const &g  = cc.gate[kUpdateGate];
    Vector<T>   dc_prev(S);
    for (std::size_t k = 0; k < S; ++k)
    {
      T const tc  = cc.tanh_c[k];
      T const d_o = dh[k] * tc;
      dc[k] += dh[k] * o[k] * (T(1) - tc * tc);
      T const d_f = dc[k] * cc.c_prev[k];
      T const d_i = dc[k] * g[k];
      T const d_g = dc[k] * i[k];
      dc_prev[k]  = dc[k] * f[k];
      dp[kForgetGate][k] = d_f * f[k] * (T(1) - f[k]);
      dp[kInputGate][k]  = d_i * i[k] * (T(1) - i[k]);
      dp[kOutputGate][k] = d_o * o[k] * (T(1) - o[k]);
      dp[kUpdateGate][k] = d_g * (T(1) - g[k] * g[k]);
    }

    Vector<T> du(cell.concat_width(), T(0));
    for (std::size_t q = 0; q < kGateCount; ++q)
    {
      auto const &gate = cell.gates[q];
      auto const &gg   = grads[q];
      for (std::size_t k = 0; k < S; ++k)
      {
        gg.projection_bias[k] += dp[q][k];
      }
      outer_accumulate<T>(gg.projection, cell.hidden_width, dp[q], cc.hidden_out[q]);
      Vector<T> da(cell.hidden_width, T(0));
      masked_transpose_accumulate<T>(gate.projection, dp[q], da);
      for (std::size_t j = 0; j < cell.hidden_width; ++j)
      {
        T d = da[j];
        if (!cc.drop[q].empty())
        {
          d *= cc.drop[q][j];
        }
        da[j] = cc.hidden_pre[q][j] > T(0) ? d : T(0);
        gg.hidden_bias[j] += da[j];
      }
      outer_accumulate<T>(gg.hidden, cell.concat_width(), da, cc.u);
      masked_transpose_accumulate<T>(gate.hidden, da, du);
    }
    for (std::size_t k = 0; k < S; ++k)
    {
      dh[k] = du[I + k];
    }
    dc = std::move(dc_prev);
  }
}

}  // namespace spnn
