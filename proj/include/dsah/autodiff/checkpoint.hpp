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

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dsah/autodiff/tensor.hpp"

namespace dsah {

// File layout, all integers little-endian:
//   "DSAHCKPT"  version:u8
//   metadata entries:u32, then per entry  key_len:u32 key  value_len:u32 value
//   parameters:u32, then per parameter    name_len:u32 name  rank:u32
//                                         dims:u64[rank]  payload:f64[prod(dims)]
inline constexpr char kCheckpointMagic[] = "DSAHCKPT";
inline constexpr std::uint8_t kCheckpointVersion = 1;

struct NamedArray {
    std::string name;
    Shape shape;
    std::vector<double> values;
};

struct Checkpoint {
    std::map<std::string, std::string> metadata;
    std::vector<NamedArray> arrays;

    const NamedArray* find(const std::string& name) const;
};

std::string encode_checkpoint(const Checkpoint& checkpoint);
Checkpoint decode_checkpoint(const std::string& bytes);

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_checkpoint(const std::filesystem::path& path);

}  // namespace dsah
