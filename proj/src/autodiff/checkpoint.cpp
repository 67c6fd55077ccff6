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

#include "dsah/autodiff/checkpoint.hpp"

#include <string_view>

#include "dsah/common/binary_io.hpp"
#include "dsah/common/error.hpp"

namespace dsah {

const NamedArray* Checkpoint::find(const std::string& name) const {
    for (const NamedArray& a : arrays) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

std::string encode_checkpoint(const Checkpoint& checkpoint) {
    io::ByteWriter w;
    w.put_bytes(std::string_view(kCheckpointMagic, 8));
    w.put_u8(kCheckpointVersion);
    w.put_u32(static_cast<std::uint32_t>(checkpoint.metadata.size()));
    for (const auto& [key, value] : checkpoint.metadata) {
        w.put_u32(static_cast<std::uint32_t>(key.size()));
        w.put_bytes(key);
        w.put_u32(static_cast<std::uint32_t>(value.size()));
        w.put_bytes(value);
    }
    w.put_u32(static_cast<std::uint32_t>(checkpoint.arrays.size()));
    for (const NamedArray& a : checkpoint.arrays) {
        if (a.values.size() != shape_numel(a.shape)) {
            throw ShapeError("checkpoint: array '" + a.name + "' does not fill shape " + shape_str(a.shape));
        }
        w.put_u32(static_cast<std::uint32_t>(a.name.size()));
        w.put_bytes(a.name);
        w.put_u32(static_cast<std::uint32_t>(a.shape.size()));
        for (std::size_t d : a.shape) w.put_u64(d);
        for (double v : a.values) w.put_f64(v);
    }
    return w.bytes();
}

Checkpoint decode_checkpoint(const std::string& bytes) {
    io::ByteReader r(bytes, "checkpoint");
    if (r.get_bytes(8) != std::string_view(kCheckpointMagic, 8)) throw FormatError("checkpoint: bad magic");
    const std::uint8_t version = r.get_u8();
    if (version != kCheckpointVersion) {
        throw FormatError("checkpoint: unsupported version " + std::to_string(version));
    }
    Checkpoint c;
    const std::uint32_t entries = r.get_u32();
    for (std::uint32_t i = 0; i < entries; ++i) {
        std::string key = r.get_bytes(r.get_u32());
        std::string value = r.get_bytes(r.get_u32());
        c.metadata.emplace(std::move(key), std::move(value));
    }
    const std::uint32_t count = r.get_u32();
    for (std::uint32_t i = 0; i < count; ++i) {
        NamedArray a;
        a.name = r.get_bytes(r.get_u32());
        const std::uint32_t rank = r.get_u32();
        for (std::uint32_t d = 0; d < rank; ++d) a.shape.push_back(r.get_u64());
        const std::size_t n = shape_numel(a.shape);
        if (n > r.remaining() / 8) throw FormatError("checkpoint: truncated payload for '" + a.name + "'");
        a.values.resize(n);
        for (double& v : a.values) v = r.get_f64();
        c.arrays.push_back(std::move(a));
    }
    r.expect_end();
    return c;
}

void write_checkpoint(const std::filesystem::path& path, const Checkpoint& checkpoint) {
    io::write_file(path, encode_checkpoint(checkpoint));
}

Checkpoint read_checkpoint(const std::filesystem::path& path) {
    return decode_checkpoint(io::read_file(path));
}

}  // namespace dsah
