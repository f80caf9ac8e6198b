// Copyright 2026 The fslsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace fsl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Operand shapes do not agree.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Differential-privacy parameters cannot produce a noise scale.
class CalibrationError : public Error {
 public:
  using Error::Error;
};

/// Invalid or unknown experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed or missing dataset files.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Protocol misuse, e.g. backward without a matching forward.
class ProtocolError : public Error {
 public:
  using Error::Error;
};

}  // namespace fsl
