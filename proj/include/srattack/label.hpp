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

#include <string>

#include "srattack/errors.hpp"

namespace srattack {

/// Binary ground truth; fake is the positive class everywhere.
enum class Label { kPristine = 0, kFake = 1 };

inline const char* label_name(Label l) {
  return l == Label::kFake ? "fake" : "pristine";
}

inline Label parse_label(const std::string& s) {
  if (s == "fake") return Label::kFake;
  if (s == "pristine") return Label::kPristine;
  throw InvalidArgumentError("unknown label '" + s + "'");
}

}  // namespace srattack
