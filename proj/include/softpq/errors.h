/* Copyright 2026 The SoftPQ Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef SOFTPQ_ERRORS_H_
#define SOFTPQ_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace softpq {

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or truncated label image data. `offset()` is the byte position in
// the source stream where decoding failed.
class FormatError : public Error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : Error(what + " (at byte offset " + std::to_string(offset) + ")"),
        offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

// Two grids that must share a shape do not.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// A parameter set violates its documented range.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

}  // namespace softpq

#endif  // SOFTPQ_ERRORS_H_
