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
#include <span>
#include <vector>

namespace dsah {

/// Sorted, duplicate-free set of class ids attached to one image.
using LabelSet = std::vector<std::uint32_t>;

LabelSet make_label_set(std::vector<std::uint32_t> labels);

/// Two images are similar iff their label sets share at least one id.
bool labels_intersect(std::span<const std::uint32_t> a, std::span<const std::uint32_t> b);

}  // namespace dsah
