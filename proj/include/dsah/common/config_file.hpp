// Copyright 2026-present the dsah project
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

#include <filesystem>
#include <map>
#include <string>

namespace dsah {

/// Flat `key = value` text. '#' starts a comment; blank lines are ignored.
/// Keys are unique. Throws ConfigError naming the line on malformed input.
std::map<std::string, std::string> parse_key_values(const std::string& text, const std::string& origin);

std::map<std::string, std::string> read_key_value_file(const std::filesystem::path& path);

std::string format_key_values(const std::map<std::string, std::string>& entries);

}  // namespace dsah
