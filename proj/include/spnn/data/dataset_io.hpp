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
#include "spnn/data/schema.hpp"
#include "spnn/data/stream.hpp"
#include "spnn/growprune/report.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

// On-disk dataset layout (text, one value per line):
//
//   <root>/manifest                 subject ids, one per line
//   <root>/<id>/<stream>.csv        first line "name,rate_hz,start_timestamp_ms", then one sample per line
//   <root>/<id>/demographics        "name,value" per line, in the fixed demographic order
//   <root>/<id>/label               class index

namespace spnn::data {

namespace fs = std::filesystem;

namespace detail {

inline std::ofstream open_out(fs::path const &p)
{
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  if (!os)
  {
    throw IoError("cannot write " + p.string());
  }
  return os;
}

inline std::string slurp(fs::path const &p)
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

inline std::vector<std::string_view> lines(std::string_view text)
{
  std::vector<std::string_view> out;
  std::size_t                   pos = 0;
  while (pos < text.size())
  {
    auto end = text.find('\n', pos);
    if (end == std::string_view::npos)
    {
      end = text.size();
    }
    auto line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r')
    {
      line.remove_suffix(1);
    }
    if (!line.empty())
    {
      out.push_back(line);
    }
    pos = end + 1;
  }
  return out;
}

}  // namespace detail

inline void write_stream(fs::path const &p, Stream const &s)
{
  auto os = detail::open_out(p);
  os << s.name << ',' << format_double(s.rate_hz) << ',' << s.start_ms << '\n';
  std::string buf;
  buf.reserve(s.samples.size() * 10);
  char tmp[64];
  for (double v : s.samples)
  {
    auto res = std::to_chars(std::begin(tmp), std::end(tmp), v);
    buf.append(tmp, res.ptr);
    buf.push_back('\n');
  }
  os << buf;
  if (!os)
  {
    throw IoError("failed writing " + p.string());
  }
}

inline Stream read_stream(fs::path const &p)
{
  auto const text = detail::slurp(p);
  auto const ls   = detail::lines(text);
  if (ls.empty())
  {
    throw DataError(p.string() + ": missing stream header");
  }
  auto header = split_csv_line(std::string(ls[0]));
  if (header.size() != 3)
  {
    throw DataError(p.string() + ": header must be name,rate_hz,start_timestamp_ms");
  }
  Stream s;
  s.name    = header[0];
  s.rate_hz = parse_double(header[1]);
  {
    auto const &f   = header[2];
    auto        res = std::from_chars(f.data(), f.data() + f.size(), s.start_ms);
    if (res.ec != std::errc{} || res.ptr != f.data() + f.size())
    {
      throw DataError(p.string() + ": bad start timestamp '" + f + "'");
    }
  }
  if (!(s.rate_hz > 0.0))
  {
    throw DataError(p.string() + ": rate must be positive");
  }
  s.samples.reserve(ls.size() - 1);
  for (std::size_t i = 1; i < ls.size(); ++i)
  {
    double v{};
    auto   res = std::from_chars(ls[i].data(), ls[i].data() + ls[i].size(), v);
    if (res.ec != std::errc{} || res.ptr != ls[i].data() + ls[i].size())
    {
      throw DataError(p.string() + ": bad sample on line " + std::to_string(i + 1));
    }
    s.samples.push_back(v);
  }
  return s;
}

inline void write_subject(fs::path const &root, Subject const &subject)
{
  fs::path const dir = root / subject.id;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec)
  {
    throw IoError("cannot create " + dir.string() + ": " + ec.message());
  }
  for (auto const &s : subject.streams)
  {
    write_stream(dir / (s.name + ".csv"), s);
  }
  {
    auto os = detail::open_out(dir / "demographics");
    for (std::size_t d = 0; d < subject.demographics.size(); ++d)
    {
      os << kDemographicNames[d] << ',' << format_double(subject.demographics[d]) << '\n';
    }
  }
  {
    auto os = detail::open_out(dir / "label");
    os << subject.label << '\n';
  }
}

inline void write_manifest(fs::path const &root, std::vector<std::string> const &ids)
{
  std::error_code ec;
  fs::create_directories(root, ec);
  if (ec)
  {
    throw IoError("cannot create " + root.string() + ": " + ec.message());
  }
  auto os = detail::open_out(root / "manifest");
  for (auto const &id : ids)
  {
    os << id << '\n';
  }
}

inline void write_dataset(fs::path const &root, std::vector<Subject> const &subjects)
{
  std::vector<std::string> ids;
  for (auto const &s : subjects)
  {
    write_subject(root, s);
    ids.push_back(s.id);
  }
  write_manifest(root, ids);
}

inline std::vector<std::string> read_manifest(fs::path const &root)
{
  auto const               text = detail::slurp(root / "manifest");
  std::vector<std::string> ids;
  for (auto l : detail::lines(text))
  {
    ids.emplace_back(l);
  }
  if (ids.empty())
  {
    throw DataError(root.string() + ": manifest lists no subjects");
  }
  return ids;
}

/// Reads one subject, with streams in schema order.
inline Subject read_subject(fs::path const &root, std::string const &id, SensorSchema const &schema)
{
  fs::path const dir = root / id;
  Subject        subject;
  subject.id = id;
  for (auto const &c : schema.channels)
  {
    fs::path const p = dir / (c.name + ".csv");
    if (!fs::exists(p))
    {
      throw ConfigError("subject " + id + ": missing stream '" + c.name + "' required by the sensor schema");
    }
    subject.streams.push_back(read_stream(p));
  }
  check_schema(schema, subject.streams, "subject " + id);

  auto const demo = detail::slurp(dir / "demographics");
  for (auto l : detail::lines(demo))
  {
    auto f = split_csv_line(std::string(l));
    if (f.size() != 2)
    {
      throw DataError("subject " + id + ": bad demographics line '" + std::string(l) + "'");
    }
    subject.demographics.push_back(parse_double(f[1]));
  }
  if (subject.demographics.size() != kDemographicCount)
  {
    throw DataError("subject " + id + ": expected 7 demographic values");
  }
  auto const label = detail::lines(detail::slurp(dir / "label"));
  if (label.size() != 1)
  {
    throw DataError("subject " + id + ": label file must hold one class index");
  }
  subject.label = parse_size(label[0]);
  return subject;
}

}  // namespace spnn::data
