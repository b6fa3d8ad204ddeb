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

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace spnn {

using Rng = std::mt19937_64;

/// Derives an independent stream seed from a master seed and a stream index.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
  std::seed_seq seq{static_cast<std::uint32_t>(master), static_cast<std::uint32_t>(master >> 32U),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32U)};
  std::uint32_t words[2];
  seq.generate(std::begin(words), std::end(words));
  return (static_cast<std::uint64_t>(words[0]) << 32U) | words[1];
}

inline std::string rng_state(Rng const &rng)
{
  std::ostringstream os;
  os << rng;
  return os.str();
}

inline void restore_rng_state(Rng &rng, std::string const &state)
{
  std::istringstream is(state);
  Rng                restored;
  if (!(is >> restored))
  {
    throw FormatError("unreadable random engine state");
  }
  rng = restored;
}

}  // namespace spnn
