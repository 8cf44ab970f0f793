// Copyright 2026 The srattack Authors
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

namespace srattack {

/// Root of the library's error taxonomy. Everything thrown on a contract
/// violation or environment failure derives from this.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Caller violated an operation precondition (bad dimensions, empty input, ...).
class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

/// Scale factor K would shrink an image below 1x1.
class DegenerateScaleError : public Error {
 public:
  using Error::Error;
};

/// A backend was asked for a scale outside its supported set.
class UnsupportedScaleError : public Error {
 public:
  using Error::Error;
};

/// A pluggable backend (SR model, face detector, classifier) could not be
/// loaded or run. Distinct from benign outcomes such as "no face found".
class BackendUnavailableError : public Error {
 public:
  using Error::Error;
};

/// A file could not be decoded or does not satisfy the loader contract.
class IngestionError : public Error {
 public:
  using Error::Error;
};

/// A dataset directory does not match its declared layout.
class LayoutError : public Error {
 public:
  using Error::Error;
};

}  // namespace srattack
