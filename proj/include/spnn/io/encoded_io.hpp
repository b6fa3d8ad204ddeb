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
#include "spnn/growprune/trainer.hpp"
#include "spnn/io/binary.hpp"
#include "spnn/io/model_file.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

// Encoded dataset cache, version 1, little-endian:
//
//   magic     8 bytes "SPNNDATA"
//   version   u32     1
//   steps     u32
//   width     u32
//   splits    train, val, test; each: u64 count, then per sample u32 label and steps*width f64 values
//   checksum  u32 CRC-32 of every preceding byte

namespace spnn::io {

inline constexpr std::array<std::uint8_t, 8> kDataMagic{'S', 'P', 'N', 'N', 'D', 'A', 'T', 'A'};
inline constexpr std::uint32_t               kDataVersion = 1;

template <typename T>
std::vector<std::uint8_t> save_encoded_bytes(TrainData<T> const &data, std::size_t steps, std::size_t width)
{
  ByteWriter w;
  w.raw(kDataMagic);
  w.u32(kDataVersion);
  w.u32(detail::checked_u32(steps, "steps"));
  w.u32(detail::checked_u32(width, "width"));
  for (auto const *set : {&data.train, &data.val, &data.test})
  {
    w.u64(set->size());
    for (auto const &s : *set)
    {
      if (s.steps != steps || s.width != width || s.values.size() != steps * width)
      {
        throw ShapeError("encoded sample size", steps * width, s.values.size());
      }
      w.u32(detail::checked_u32(s.label, "label"));
      for (auto v : s.values)
      {
        w.f64(static_cast<double>(v));
      }
    }
  }
  w.u32(crc32_of(w.bytes()));
  return w.take();
}

template <typename T>
TrainData<T> load_encoded_bytes(std::span<std::uint8_t const> bytes)
{
  ByteReader r(bytes);
  if (bytes.size() < kDataMagic.size())
  {
    throw FormatError("not an encoded dataset: too short for the magic bytes");
  }
  auto const magic = r.raw(kDataMagic.size());
  if (!std::equal(magic.begin(), magic.end(), kDataMagic.begin()))
  {
    throw FormatError("not an encoded dataset: bad magic bytes");
  }
  auto const version = r.u32();
  if (version != kDataVersion)
  {
    throw UnsupportedVersionError("unsupported encoded dataset version " + std::to_string(version));
  }
  std::size_t const steps = r.u32();
  std::size_t const width = r.u32();
  std::size_t const n     = steps * width;

  TrainData<T> out;
  for (auto *set : {&out.train, &out.val, &out.test})
  {
    auto const count = r.u64();
    if (count > r.remaining() / (4 + 8 * std::max<std::size_t>(n, 1)))
    {
      throw CorruptionError("truncated file: sample count exceeds the data present");
    }
    set->resize(count);
    for (auto &s : *set)
    {
      s.steps = steps;
      s.width = width;
      s.label = r.u32();
      s.values.resize(n);
      for (auto &v : s.values)
      {
        v = static_cast<T>(r.f64());
      }
    }
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
  return out;
}

template <typename T>
void save_encoded(std::filesystem::path const &path, TrainData<T> const &data, std::size_t steps, std::size_t width)
{
  write_file(path, save_encoded_bytes<T>(data, steps, width));
}

template <typename T>
TrainData<T> load_encoded(std::filesystem::path const &path)
{
  auto const bytes = read_file(path);
  return load_encoded_bytes<T>(bytes);
}

}  // namespace spnn::io
