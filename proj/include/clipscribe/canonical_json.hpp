// Copyright 2026 The clipscribe Authors
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

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

namespace clipscribe {

/// Deterministic JSON text: object keys in byte-lexicographic order, two-space
/// indentation, UTF-8 output (invalid sequences replaced with U+FFFD), reals
/// printed with at most 9 significant digits, trailing newline.
std::string canonical_dump(const nlohmann::json& value);

/// Writes canonical_dump(value) to `path`, or to standard output for "-".
/// Throws Error(kIoFailure).
void write_canonical_json(const nlohmann::json& value, const std::filesystem::path& path);

}  // namespace clipscribe
