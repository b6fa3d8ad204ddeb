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

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include <zlib.h>

namespace spnn::io {

/// Little-endian byte sink.
class ByteWriter
{
public:
  void u8(std::uint8_t v) { bytes_.push_back(v); }

  void u32(std::uint32_t v)
  {
    for (int i = 0; i < 4; ++i)
    {
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  void u64(std::uint64_t v)
  {
    for (int i = 0; i < 8; ++i)
    {
      bytes_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
  }

  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }

  void raw(std::span<std::uint8_t const> data) { bytes_.insert(bytes_.end(), data.begin(), data.end()); }

  void str(std::string const &s)
  {
    u32(static_cast<std::uint32_t>(s.size()));
    bytes_.insert(bytes_.end(), s.begin(), s.end());
  }

  std::vector<std::uint8_t> const &bytes() const { return bytes_; }
  std::vector<std::uint8_t>        take() { return std::move(bytes_); }

private:
  std::vector<std::uint8_t> bytes_;
};

/// Little-endian byte source; running past the end is reported as a truncated file.
class ByteReader
{
public:
  explicit ByteReader(std::span<std::uint8_t const> data)
    : data_(data)
  {}

  std::uint8_t u8() { return need(1)[0]; }

  std::uint32_t u32()
  {
    auto          b = need(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i)
    {
      v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    }
    return v;
  }

  std::uint64_t u64()
  {
    auto          b = need(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
    {
      v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    }
    return v;
  }

  double f64() { return std::bit_cast<double>(u64()); }

  std::span<std::uint8_t const> raw(std::size_t n) { return need(n); }

  std::string str()
  {
    auto const n = u32();
    auto       b = need(n);
    return std::string(b.begin(), b.end());
  }

  std::size_t offset() const { return pos_; }
  std::size_t remaining() const { return data_.size() - pos_; }

private:
  std::span<std::uint8_t const> need(std::size_t n)
  {
    if (n > remaining())
    {
      throw CorruptionError("truncated file: needed " + std::to_string(n) + " bytes at offset " +
                            std::to_string(pos_) + ", " + std::to_string(remaining()) + " left");
    }
    auto s = data_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  std::span<std::uint8_t const> data_;
  std::size_t                   pos_{0};
};

inline std::uint32_t crc32_of(std::span<std::uint8_t const> data)
{
  uLong crc = ::crc32(0L, Z_NULL, 0);
  crc       = ::crc32(crc, data.data(), static_cast<uInt>(data.size()));
  return static_cast<std::uint32_t>(crc);
}

inline std::vector<std::uint8_t> read_file(std::filesystem::path const &p)
{
  std::ifstream is(p, std::ios::binary);
  if (!is)
  {
    throw IoError("cannot read " + p.string());
  }
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

inline void write_file(std::filesystem::path const &p, std::span<std::uint8_t const> data)
{
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os)
  {
    throw IoError("cannot write " + p.string());
  }
  os.write(reinterpret_cast<char const *>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!os)
  {
    throw IoError("failed writing " + p.string());
  }
}

}  // namespace spnn::io
