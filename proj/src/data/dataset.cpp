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

#include "dsah/data/dataset.hpp"

#include <algorithm>
#include <limits>

#include "dsah/common/binary_io.hpp"
#include "dsah/common/error.hpp"

namespace dsah::data {

std::span<const double> ImageSet::image(std::size_t i) const {
    return std::span<const double>(pixels).subspan(i * shape.numel(), shape.numel());
}

std::span<const std::uint8_t> ImageSet::mask(std::size_t i) const {
    return std::span<const std::uint8_t>(masks).subspan(i * shape.pixels(), shape.pixels());
}

Tensor ImageSet::batch(std::span<const std::size_t> indices) const {
    std::vector<double> values;
    values.reserve(indices.size() * shape.numel());
    for (std::size_t i : indices) {
        if (i >= size()) throw ShapeError("ImageSet::batch: index " + std::to_string(i) + " out of range");
        auto img = image(i);
        values.insert(values.end(), img.begin(), img.end());
    }
    return Tensor({indices.size(), shape.channels, shape.height, shape.width}, std::move(values));
}

Tensor ImageSet::all() const {
    std::vector<std::size_t> idx(size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    return batch(idx);
}

void ImageSet::validate() const {
    if (pixels.size() != size() * shape.numel()) {
        throw ShapeError("ImageSet: " + std::to_string(pixels.size()) + " pixel values for " +
                         std::to_string(size()) + " images of " + shape.str());
    }
    if (masks.size() != size() * shape.pixels()) {
        throw ShapeError("ImageSet: mask buffer does not match " + std::to_string(size()) + " images of " +
                         shape.str());
    }
}

std::string encode_image_set(const ImageSet& set) {
    set.validate();
    io::ByteWriter w;
    w.put_u64(set.size());
    w.put_u32(static_cast<std::uint32_t>(set.shape.channels));
    w.put_u32(static_cast<std::uint32_t>(set.shape.height));
    w.put_u32(static_cast<std::uint32_t>(set.shape.width));
    for (double v : set.pixels) w.put_f64(v);
    for (const LabelSet& labels : set.labels) {
        if (labels.size() > std::numeric_limits<std::uint16_t>::max()) throw FormatError("too many labels");
        w.put_u16(static_cast<std::uint16_t>(labels.size()));
        for (std::uint32_t l : labels) w.put_u32(l);
    }
    for (std::uint8_t m : set.masks) w.put_u8(m);
    return w.bytes();
}

ImageSet decode_image_set(const std::string& bytes) {
    io::ByteReader r(bytes, "image set");
    ImageSet set;
    const std::uint64_t count = r.get_u64();
    set.shape.channels = r.get_u32();
    set.shape.height = r.get_u32();
    set.shape.width = r.get_u32();
    // Reject headers whose payload cannot possibly fit before allocating.
    const std::size_t numel = set.shape.numel();
    if (numel == 0 || count > r.remaining() / (8 * numel + 2 + set.shape.pixels())) {
        throw FormatError("image set: header (count " + std::to_string(count) + ", " + set.shape.str() +
                          ") inconsistent with file size");
    }
    set.pixels.resize(count * numel);
    for (double& v : set.pixels) v = r.get_f64();
    set.labels.resize(count);
    for (LabelSet& labels : set.labels) {
        labels.resize(r.get_u16());
        for (std::uint32_t& l : labels) l = r.get_u32();
        if (!std::is_sorted(labels.begin(), labels.end()) ||
            std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
            throw FormatError("image set: label ids must be sorted and unique");
        }
    }
    set.masks.resize(count * set.shape.pixels());
    for (std::uint8_t& m : set.masks) {
        m = r.get_u8();
        if (m > 1) throw FormatError("image set: mask values must be 0 or 1");
    }
    r.expect_end();
    return set;
}

void write_image_set(const std::filesystem::path& path, const ImageSet& set) {
    io::write_file(path, encode_image_set(set));
}

ImageSet read_image_set(const std::filesystem::path& path) { return decode_image_set(io::read_file(path)); }

}  // namespace dsah::data
