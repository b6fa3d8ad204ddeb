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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace spnn {

class Error : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch between operands.
class ShapeError : public Error
{
public:
  using Error::Error;

  ShapeError(std::string const &what, std::size_t expected, std::size_t actual)
    : Error(what + ": expected " + std::to_string(expected) + ", got " + std::to_string(actual))
  {}
};

/// A hyperparameter or argument outside its admissible range.
class ParameterError : public Error
{
public:
  using Error::Error;
};

class IndexError : public Error
{
public:
  using Error::Error;
};

/// Operation invoked in the wrong state (e.g. backward without a recorded forward).
class StateError : public Error
{
public:
  using Error::Error;
};

class DataError : public Error
{
public:
  using Error::Error;
};

class ConfigError : public Error
{
public:
  using Error::Error;
};

class IoError : public Error
{
public:
  using Error::Error;
};

/// Malformed binary container: bad magic, wrong version, truncation, corruption.
class FormatError : public Error
{
public:
  using Error::Error;
};

class UnsupportedVersionError : public FormatError
{
public:
  using FormatError::FormatError;
};

class CorruptionError : public FormatError
{
public:
  using FormatError::FormatError;
};

}  // namespace spnn
