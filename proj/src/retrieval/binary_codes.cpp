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

#include "dsah/retrieval/binary_codes.hpp"

#include <algorithm>
#include <string_view>

#include "dsah/common/binary_io.hpp"
#include "dsah/common/error.hpp"
#include "dsah/kernels/kernels.hpp"

namespace dsah::retrieval {

std::vector<std::uint64_t> pack(std::span<const std::int8_t> code) {
    std::vector<std::uint64_t> words(words_for(code.size()), 0);
    for (std::size_t t = 0; t < code.size(); ++t) {
        if (code[t] == 1) {
            words[t / 64] |= std::uint64_t{1} << (t % 64);
        } else if (code[t] != -1) {
            throw Error("pack: code entries must be +-1");
        }
    }
    return words;
}

SignVector unpack(std::span<const std::uint64_t> words, std::size_t bits) {
    if (words.size() != words_for(bits)) throw ShapeError("unpack: word count does not match bit width");
    SignVector code(bits);
    for (std::size_t t = 0; t < bits; ++t) code[t] = (words[t / 64] >> (t % 64)) & 1 ? 1 : -1;
    return code;
}

std::uint32_t hamming_distance(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
    if (a.size() != b.size()) {
        throw ShapeError("hamming_distance: " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) +
                         " words");
    }
    std::uint32_t d = 0;
    kernels::active().hamming_rows(a.data(), b.data(), a.size(), 1, &d);
    return d;
}

BinaryCodeSet::BinaryCodeSet(std::size_t bits) : bits_(bits), words_(words_for(bits)) {
    if (bits == 0 || bits > 0xffff) throw ShapeError("BinaryCodeSet: bit width must be in 1..65535");
}

void BinaryCodeSet::add(std::span<const std::int8_t> code, LabelSet labels) {
    if (code.size() != bits_) {
        throw ShapeError("BinaryCodeSet: code of length " + std::to_string(code.size()) + " in a " +
                         std::to_string(bits_) + "-bit set");
    }
    const std::vector<std::uint64_t> words = pack(code);
    words_buffer_.insert(words_buffer_.end(), words.begin(), words.end());
    labels_.push_back(make_label_set(std::move(labels)));
}

void BinaryCodeSet::add_packed(std::span<const std::uint64_t> row, LabelSet labels) {
    if (row.size() != words_) throw ShapeError("BinaryCodeSet: packed row has the wrong word count");
    if (bits_ % 64 != 0 && (row.back() >> (bits_ % 64)) != 0) {
        throw FormatError("BinaryCodeSet: padding bits must be zero");
    }
    words_buffer_.insert(words_buffer_.end(), row.begin(), row.end());
    labels_.push_back(make_label_set(std::move(labels)));
}

void BinaryCodeSet::append(const BinaryCodeSet& other) {
    if (other.bits_ != bits_) {
        throw ShapeError("BinaryCodeSet: cannot append " + std::to_string(other.bits_) + "-bit codes to " +
                         std::to_string(bits_) + "-bit codes");
    }
    words_buffer_.insert(words_buffer_.end(), other.words_buffer_.begin(), other.words_buffer_.end());
    labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

std::span<const std::uint64_t> BinaryCodeSet::row(std::size_t i) const {
    return std::span<const std::uint64_t>(words_buffer_).subspan(i * words_, words_);
}

std::string encode_code_set(const BinaryCodeSet& set) {
    io::ByteWriter w;
    w.put_bytes(std::string_view(kCodeFileMagic, 4));
    w.put_u8(kCodeFileVersion);
    w.put_u16(static_cast<std::uint16_t>(set.bits()));
    w.put_u64(set.size());
    for (std::uint64_t word : set.rows()) w.put_u64(word);
    for (std::size_t i = 0; i < set.size(); ++i) {
        const LabelSet& labels = set.labels(i);
        if (labels.size() > 0xffff) throw FormatError("code file: too many labels on one row");
        w.put_u16(static_cast<std::uint16_t>(labels.size()));
        for (std::uint32_t l : labels) w.put_u32(l);
    }
    return w.bytes();
}

BinaryCodeSet decode_code_set(const std::string& bytes) {
    io::ByteReader r(bytes, "code file");
    if (r.get_bytes(4) != std::string_view(kCodeFileMagic, 4)) throw FormatError("code file: bad magic");
    const std::uint8_t version = r.get_u8();
    if (version != kCodeFileVersion) throw FormatError("code file: unsupported version " + std::to_string(version));
    const std::uint16_t bits = r.get_u16();
    if (bits == 0) throw FormatError("code file: zero bit width");
    const std::uint64_t count = r.get_u64();
    const std::size_t words = words_for(bits);
    if (count > r.remaining() / (8 * words + 2)) throw FormatError("code file: count inconsistent with file size");
    BinaryCodeSet set(bits);
    std::vector<std::vector<std::uint64_t>> rows(count, std::vector<std::uint64_t>(words));
    for (auto& row : rows) {
        for (std::uint64_t& word : row) word = r.get_u64();
    }
    for (const auto& row : rows) {
        LabelSet labels(r.get_u16());
        for (std::uint32_t& l : labels) l = r.get_u32();
        if (!std::is_sorted(labels.begin(), labels.end()) ||
            std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
            throw FormatError("code file: label ids must be sorted and unique");
        }
        set.add_packed(row, std::move(labels));
    }
    r.expect_end();
    return set;
}

void write_code_file(const std::filesystem::path& path, const BinaryCodeSet& set) {
    io::write_file(path, encode_code_set(set));
}

BinaryCodeSet read_code_file(const std::filesystem::path& path) { return decode_code_set(io::read_file(path)); }

}  // namespace dsah::retrieval
