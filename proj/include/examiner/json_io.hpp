/* Copyright 2026 The Examiner Authors. All Rights Reserved.

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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace examiner {

// Parses a JSON file; ConfigError on a missing file or a parse failure.
nlohmann::json read_json_file(const std::filesystem::path& path);

// Reads one JSON object per non-empty line.
std::vector<nlohmann::json> read_jsonl_file(const std::filesystem::path& path);

// Writes through a sibling temp file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

// Sorted keys, no whitespace. nlohmann::json objects are key-ordered already,
// so this is a plain dump; doubles use the shortest round-trip form.
std::string canonical_dump(const nlohmann::json& j);

std::string sha256_hex(std::string_view data);

// Typed accessors with ConfigError instead of nlohmann exceptions.
std::vector<double> json_to_vector(const nlohmann::json& j, std::string_view what);

template <typename T>
T json_value_or(const nlohmann::json& obj, const char* key, T fallback) {
  if (!obj.is_object() || !obj.contains(key) || obj.at(key).is_null()) return fallback;
  return obj.at(key).get<T>();
}

}  // namespace examiner
