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

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "dsah/autodiff/tensor.hpp"
#include "dsah/common/image_shape.hpp"
#include "dsah/common/labels.hpp"

namespace dsah::data {

/// Images with labels and (optionally all-zero) ground-truth masks.
struct ImageSet {
    ImageShape shape;
    std::vector<double> pixels;        // size() * shape.numel(), CHW per image
    std::vector<LabelSet> labels;      // one per image
    std::vector<std::uint8_t> masks;   // size() * shape.pixels(), 0 or 1

    std::size_t size() const { return labels.size(); }
    std::span<const double> image(std::size_t i) const;
    std::span<const std::uint8_t> mask(std::size_t i) const;

    /// Stacks the selected images into [n, C, H, W].
    Tensor batch(std::span<const std::size_t> indices) const;
    Tensor all() const;

    /// Throws ShapeError if the buffers disagree with shape and count.
    void validate() const;
};

// Split file, little-endian:
//   count:u64  C:u32  H:u32  W:u32
//   images: f64[count*C*H*W]
//   labels: per image  n:u16  ids:u32[n]
//   masks:  u8[count*H*W]
std::string encode_image_set(const ImageSet& set);
ImageSet decode_image_set(const std::string& bytes);

void write_image_set(const std::filesystem::path& path, const ImageSet& set);
ImageSet read_image_set(const std::filesystem::path& path);

}  // namespace dsah::data
