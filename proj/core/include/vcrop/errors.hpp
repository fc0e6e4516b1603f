// Copyright 2026 The vcrop Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace vcrop {

/// Precondition violation on a public entry point (bad dimensions, even
/// kernel sizes, out-of-bounds boxes, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or unsupported on-disk data (bad magic, truncated file,
/// non-finite gradient values, undecodable image).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Filesystem failure while reading or writing.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when a saliency pipeline finds no region to crop to.
class NoRegionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The scorer channel failed: the process died, timed out, replied with an
/// error, or broke the wire protocol.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ProtocolError : public TransportError {
 public:
  using TransportError::TransportError;
};

}  // namespace vcrop
