// Copyright 2026 The jim Authors.
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

#ifndef JIM_ERRORS_H_
#define JIM_ERRORS_H_

#include <stdexcept>
#include <string>

namespace jim {

// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
  virtual const char* kind() const noexcept { return "error"; }
};

// Tensor shapes or vector lengths disagree.
class DimensionError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "dimension"; }
};

// A scalar argument is outside its domain (temperature <= 0, epsilon > 1...).
class ParameterError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "parameter"; }
};

// NaN or Inf produced or consumed.
class NumericError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "numeric"; }
};

// Invalid configuration. field() is the dotted path of the offending key.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& what)
      : Error(field.empty() ? what : field + ": " + what),
        field_(std::move(field)) {}
  const char* kind() const noexcept override { return "config"; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

// Malformed file contents (checkpoint, trajectory dump).
class FormatError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "format"; }
};

// An internal invariant was violated.
class InvariantError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "invariant"; }
};

// A size guard on an exponential-time routine was exceeded.
class GuardError : public Error {
 public:
  using Error::Error;
  const char* kind() const noexcept override { return "guard"; }
};

}  // namespace jim

#endif  // JIM_ERRORS_H_
