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
#include <memory>
#include <vector>

#include "dsah/autodiff/checkpoint.hpp"
#include "dsah/networks/models.hpp"

namespace dsah::nn {

struct ModelConfig {
    ImageShape input;
    std::size_t bits = 12;
    /// False builds the no-attention variant: the hash net sees raw images.
    bool use_attention = true;
    AttentionNetOptions attention;
    std::size_t hash_hidden = 64;
    std::vector<std::size_t> hash_channels{8, 16, 16};

    HashNetOptions hash_options() const { return {hash_channels, hash_hidden, bits}; }
};

/// The trained artifact: an optional attention net plus the shared hash net.
class DsahModel {
 public:
    /// Fresh fan-in-uniform weights drawn from `seed`.
    DsahModel(const ModelConfig& config, std::uint64_t seed);

    const ModelConfig& config() const { return config_; }

    AttentionNet* attention() { return attention_.get(); }
    const AttentionNet* attention() const { return attention_.get(); }
    HashNet& hash() { return *hash_; }
    const HashNet& hash() const { return *hash_; }

    /// Parameters are named "attention.<layer>.<weight|bias>" and
    /// "hash.<layer>.<weight|bias>". Metadata records architecture and k.
    Checkpoint to_checkpoint() const;

    /// Throws FormatError on missing/unknown metadata and ShapeError when a
    /// stored array does not match the architecture it describes.
    static std::unique_ptr<DsahModel> from_checkpoint(const Checkpoint& checkpoint);

    void save(const std::filesystem::path& path) const;
    static std::unique_ptr<DsahModel> load(const std::filesystem::path& path);

 private:
    ModelConfig config_;
    std::unique_ptr<AttentionNet> attention_;
    std::unique_ptr<HashNet> hash_;
};

/// Writes module parameters into / reads them from checkpoint arrays.
void export_parameters(const Module& module, const std::string& prefix, Checkpoint& out);
void import_parameters(Module& module, const std::string& prefix, const Checkpoint& in);

}  // namespace dsah::nn
