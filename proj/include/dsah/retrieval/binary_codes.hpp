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

#include "dsah/common/labels.hpp"
#include "dsah/losses/losses.hpp"

namespace dsah::retrieval {

using losses::SignVector;

/// Words needed for a k-bit row.
constexpr std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

/// +1 -> bit 1, -1 -> bit 0; bit t lives in word t/64 at position t%64.
/// Padding bits stay zero. Throws Error on entries other than +-1.
std::vector<std::uint64_t> pack(std::span<const std::int8_t> code);
SignVector unpack(std::span<const std::uint64_t> words, std::size_t bits);

/// Number of differing bits. Throws ShapeError when word counts differ.
std::uint32_t hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Packed k-bit codes with one label set per row. Append-only.
class BinaryCodeSet {
 public:
    explicit BinaryCodeSet(std::size_t bits);

    std::size_t bits() const { return bits_; }
    std::size_t words_per_row() const { return words_; }
    std::size_t size() const { return labels_.size(); }
    bool empty() const { return labels_.empty(); }

    /// Throws ShapeError if code.size() != bits().
    void add(std::span<const std::int8_t> code, LabelSet labels);
    void add_packed(std::span<const std::uint64_t> row, LabelSet labels);
    void append(const BinaryCodeSet& other);

    std::span<const std::uint64_t> row(std::size_t i) const;
    std::span<const std::uint64_t> rows() const { return words_buffer_; }
    const LabelSet& labels(std::size_t i) const { return labels_[i]; }
    SignVector code(std::size_t i) const { return unpack(row(i), bits_); }

 private:
    std::size_t bits_;
    std::size_t words_;
    std::vector<std::uint64_t> words_buffer_;
    std::vector<LabelSet> labels_;
};

// Code file, little-endian:
//   "DSAH"  version:u8  k:u16  count:u64
//   rows:   count * ceil(k/64) u64 words
//   labels: per row  n:u16  ids:u32[n]
inline constexpr char kCodeFileMagic[] = "DSAH";
inline constexpr std::uint8_t kCodeFileVersion = 1;

std::string encode_code_set(const BinaryCodeSet& set);
BinaryCodeSet decode_code_set(const std::string& bytes);

void write_code_file(const std::filesystem::path& path, const BinaryCodeSet& set);
BinaryCodeSet read_code_file(const std::filesystem::path& path);

}  // namespace dsah::retrieval
