// Copyright 2026 The ipsketch Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef IPSKETCH_ERROR_H_
#define IPSKETCH_ERROR_H_

#include <stdexcept>
#include <string>

namespace ipsketch {

// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Vectors or sketches built over different universes / lengths.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// Caller violated an operation's precondition (mismatched seeds,
// incompatible sketch families, bad parameters).
class ContractError : public Error {
 public:
  using Error::Error;
};

// Invalid experiment / generator configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// The join of two tables is empty, so correlation is undefined.
class NoOverlapError : public Error {
 public:
  using Error::Error;
};

// Malformed serialized sketch or input file.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace ipsketch

#endif  // IPSKETCH_ERROR_H_
