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
#include "spnn/data/scaler.hpp"
#include "spnn/io/binary.hpp"
#include "spnn/nn/model.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

// Model file, version 1. All integers and floats little-endian.
//
//   magic        8 bytes  "SPNNMODL"
//   version      u32      1
//   kind         u8       0 server, 1 edge
//   classes      u32
//   layer table
//     server:    u32 layer count, then per layer: u32 rows, u32 cols, u8 activation, f64 dropout
//     edge:      u32 input width, u32 state width, u32 hidden width, u32 steps, f64 dropout
//   tensors, in parameter order
//     masked:    u8 0, u64 nnz, bitmap (row-major, LSB first, ceil(rows*cols/8) bytes, zero padding),
//                nnz f64 values in row-major order of the set bits
//     dense:     u8 1, rows*cols f64 values (biases are rows x 1)
//   scaler       u32 channels, then channels f64 minima, channels f64 maxima
//   checksum     u32 CRC-32 of every preceding byte

namespace spnn::io {

inline constexpr std::array<std::uint8_t, 8> kModelMagic{'S', 'P', 'N', 'N', 'M', 'O', 'D', 'L'};
inline constexpr std::uint32_t               kModelVersion = 1;

template <typename T>
struct ModelFile
{
  Model<T>     model;
  data::Scaler scaler;
};

namespace detail {

inline std::uint32_t checked_u32(std::size_t v, char const *what)
{
  if (v > 0xFFFFFFFFu)
  {
    throw ParameterError(std::string(what) + " does not fit the model file format");
  }
  return static_cast<std::uint32_t>(v);
}

template <typename T>
void write_tensor(ByteWriter &w, ParamRef<T> const &p)
{
  if (p.matrix != nullptr)
  {
    auto const &m = *p.matrix;
    w.u8(0);
    w.u64(m.nnz());
    std::vector<std::uint8_t> bits((m.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < m.size(); ++i)
    {
      if (m.active(i))
      {
        bits[i / 8] |= static_cast<std::uint8_t>(1u << (i % 8));
      }
    }
    w.raw(bits);
    for (std::size_t i = 0; i < m.size(); ++i)
    {
      if (m.active(i))
      {
        w.f64(static_cast<double>(m.values()[i]));
      }
    }
    return;
  }
  w.u8(1);
  for (auto v : p.values)
  {
    w.f64(static_cast<double>(v));
  }
}

template <typename T>
void read_tensor(ByteReader &r, ParamRef<T> const &p)
{
  auto const tag = r.u8();
  if (p.matrix != nullptr)
  {
    if (tag != 0)
    {
      throw CorruptionError(p.name + ": expected a masked tensor");
    }
    auto &m   = *p.matrix;
    auto  nnz = r.u64();
    if (nnz > m.size())
    {
      throw CorruptionError(p.name + ": nnz " + std::to_string(nnz) + " exceeds " + std::to_string(m.size()));
    }
    auto const  bits  = r.raw((m.size() + 7) / 8);
    std::size_t count = 0;
    for (auto b : bits)
    {
      count += static_cast<std::size_t>(std::popcount(b));
    }
    if (m.size() % 8 != 0 && (bits.back() >> (m.size() % 8)) != 0)
    {
      throw CorruptionError(p.name + ": bitmap padding bits are set");
    }
    if (count != nnz)
    {
      throw CorruptionError(p.name + ": bitmap popcount " + std::to_string(count) + " != stored nnz " +
                            std::to_string(nnz));
    }
    for (std::size_t i = 0; i < m.size(); ++i)
    {
      bool const on  = ((bits[i / 8] >> (i % 8)) & 1u) != 0;
      m.mask()[i]    = on ? 1 : 0;
      m.values()[i]  = on ? static_cast<T>(r.f64()) : T(0);
    }
    return;
  }
  if (tag != 1)
  {
    throw CorruptionError(p.name + ": expected a dense tensor");
  }
  for (auto &v : p.values)
  {
    v = static_cast<T>(r.f64());
  }
}

/// Rejects layer tables whose tensors could not possibly fit in the remaining bytes.
inline void check_capacity(ByteReader const &r, std::size_t dense_count)
{
  if (dense_count / 8 > r.remaining())
  {
    throw CorruptionError("truncated file: layer table needs more data than present");
  }
}

inline std::size_t read_dim(ByteReader &r, char const *what)
{
  auto const v = r.u32();
  if (v == 0)
  {
    throw CorruptionError(std::string("zero ") + what + " in layer table");
  }
  return v;
}

inline double read_dropout(ByteReader &r)
{
  double const d = r.f64();
  if (!(d >= 0.0 && d < 1.0))
  {
    throw CorruptionError("dropout rate out of range in layer table");
  }
  return d;
}

}  // namespace detail

template <typename T>
std::vector<std::uint8_t> save_model_bytes(Model<T> const &model, data::Scaler const &scaler)
{
  ByteWriter w;
  w.raw(kModelMagic);
  w.u32(kModelVersion);
  w.u8(static_cast<std::uint8_t>(model.kind()));
  w.u32(detail::checked_u32(model.num_classes(), "class count"));
  if (model.kind() == ModelKind::kServer)
  {
    auto const &layers = model.server().layers;
    w.u32(detail::checked_u32(layers.size(), "layer count"));
    for (auto const &l : layers)
    {
      w.u32(detail::checked_u32(l.out_width(), "layer rows"));
      w.u32(detail::checked_u32(l.in_width(), "layer cols"));
      w.u8(static_cast<std::uint8_t>(l.activation));
      w.f64(l.dropout_rate);
    }
  }
  else
  {
    auto const &e = model.edge();
    w.u32(detail::checked_u32(e.cell.input_width, "input width"));
    w.u32(detail::checked_u32(e.cell.state_width, "state width"));
    w.u32(detail::checked_u32(e.cell.hidden_width, "hidden width"));
    w.u32(detail::checked_u32(e.steps, "steps"));
    w.f64(e.cell.dropout_rate);
  }
  for (auto const &p : const_cast<Model<T> &>(model).params())
  {
    detail::write_tensor<T>(w, p);
  }
  w.u32(detail::checked_u32(scaler.channels(), "scaler channels"));
  for (double v : scaler.min())
  {
    w.f64(v);
  }
  for (double v : scaler.max())
  {
    w.f64(v);
  }
  w.u32(crc32_of(w.bytes()));
  return w.take();
}

template <typename T>
ModelFile<T> load_model_bytes(std::span<std::uint8_t const> bytes)
{
  ByteReader r(bytes);
  if (bytes.size() < kModelMagic.size())
  {
    throw FormatError("not a model file: too short for the magic bytes");
  }
  auto const magic = r.raw(kModelMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kModelMagic.begin()))
  {
    throw FormatError("not a model file: bad magic bytes");
  }
  auto const version = r.u32();
  if (version != kModelVersion)
  {
    throw UnsupportedVersionError("unsupported model file version " + std::to_string(version) + " (this build reads " +
                                  std::to_string(kModelVersion) + ")");
  }
  auto const kind_code = r.u8();
  if (kind_code > 1)
  {
    throw CorruptionError("unknown model kind code " + std::to_string(kind_code));
  }
  auto const classes = r.u32();

  ModelFile<T> out;
  if (static_cast<ModelKind>(kind_code) == ModelKind::kServer)
  {
    auto const   count = detail::read_dim(r, "layer count");
    ServerNet<T> net;
    std::size_t  dense = 0;
    for (std::size_t l = 0; l < count; ++l)
    {
      auto const rows = detail::read_dim(r, "layer rows");
      auto const cols = detail::read_dim(r, "layer cols");
      auto const act  = r.u8();
      auto const drop = detail::read_dropout(r);
      if (!net.layers.empty() && net.layers.back().out_width() != cols)
      {
        throw CorruptionError("layer " + std::to_string(l) + " input width does not match the previous layer");
      }
      dense += rows * cols;
      detail::check_capacity(r, dense);
      ScLayer<T> layer;
      layer.weights = MaskedMatrix<T>(rows, cols);
      layer.bias    = Vector<T>(rows, T(0));
      try
      {
        layer.activation = activation_from_code(act);
      }
      catch (Error const &)
      {
        throw CorruptionError("unknown activation code " + std::to_string(act));
      }
      layer.dropout_rate = drop;
      net.layers.push_back(std::move(layer));
    }
    if (net.layers.back().out_width() != classes)
    {
      throw CorruptionError("output layer width does not match the class count");
    }
    out.model = Model<T>(std::move(net));
  }
  else
  {
    auto const input  = detail::read_dim(r, "input width");
    auto const state  = detail::read_dim(r, "state width");
    auto const hidden = detail::read_dim(r, "hidden width");
    auto const steps  = detail::read_dim(r, "steps");
    auto const drop   = detail::read_dropout(r);
    if (classes == 0)
    {
      throw CorruptionError("zero class count");
    }
    detail::check_capacity(r, kGateCount * hidden * (input + state + state));
    EdgeNet<T> net;
    net.cell      = make_hlstm_cell<T>(input, state, hidden, drop);
    net.steps     = steps;
    net.head      = Matrix<T>(classes, state);
    net.head_bias = Vector<T>(classes, T(0));
    out.model     = Model<T>(std::move(net));
  }

  for (auto const &p : out.model.params())
  {
    detail::read_tensor<T>(r, p);
  }

  auto const channels = r.u32();
  if (static_cast<std::size_t>(channels) * 16 > r.remaining())
  {
    throw CorruptionError("truncated file: scaler section");
  }
  std::vector<double> lo(channels);
  std::vector<double> hi(channels);
  for (auto &v : lo)
  {
    v = r.f64();
  }
  for (auto &v : hi)
  {
    v = r.f64();
  }
  std::size_t const body = r.offset();
  auto const        crc  = r.u32();
  if (r.remaining() != 0)
  {
    throw CorruptionError("trailing bytes after the checksum");
  }
  if (crc != crc32_of(bytes.first(body)))
  {
    throw CorruptionError("checksum mismatch");
  }
  try
  {
    out.scaler = data::Scaler(std::move(lo), std::move(hi));
  }
  catch (Error const &e)
  {
    throw CorruptionError(std::string("bad scaler section: ") + e.what());
  }
  out.model.check_mask_consistency();
  return out;
}

template <typename T>
void save_model(std::filesystem::path const &path, Model<T> const &model, data::Scaler const &scaler)
{
  write_file(path, save_model_bytes<T>(model, scaler));
}

template <typename T>
ModelFile<T> load_model(std::filesystem::path const &path)
{
  auto const bytes = read_file(path);
  return load_model_bytes<T>(bytes);
}

}  // namespace spnn::io
