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
#include <functional>
#include <memory>
#include <vector>

#include "dsah/common/rng.hpp"
#include "dsah/data/dataset.hpp"
#include "dsah/networks/model.hpp"
#include "dsah/trainer/config.hpp"

namespace dsah::train {

/// Binary targets b (from original images) and b' (from saliency images),
/// row-major [N, k], entries +-1. `saliency` is empty without attention.
struct BinaryTargets {
    std::size_t bits = 0;
    std::vector<std::int8_t> original;
    std::vector<std::int8_t> saliency;

    bool empty() const { return original.empty(); }
};

struct AttentionEpochStats {
    double objective = 0.0;
    double saliency = 0.0;
    double semantic_saliency = 0.0;
    double quantization = 0.0;
};

struct HashingEpochStats {
    double objective = 0.0;
    double semantic_original = 0.0;
    double semantic_saliency = 0.0;
    double quantization = 0.0;
};

/// One row of the loss-history CSV. Semantic and quantization terms come
/// from the hashing step, the saliency term from the attention step.
struct EpochRecord {
    std::size_t epoch = 0;
    double semantic_original = 0.0;
    double semantic_saliency = 0.0;
    double saliency = 0.0;
    double quantization = 0.0;
    double total_attention = 0.0;
    double total_hashing = 0.0;
};

/// Non-owning view of the two networks being trained; attention may be null.
struct Networks {
    nn::AttentionModel* attention = nullptr;
    nn::HashModel* hash = nullptr;
};

struct TrainState {
    TrainState(Networks nets_, std::uint64_t seed) : nets(nets_), rng(seed) {}

    Networks nets;
    /// Completed outer epochs.
    std::size_t epoch = 0;
    BinaryTargets targets;
    std::size_t target_refreshes = 0;
    Rng rng;
    std::vector<AttentionEpochStats> attention_history;
    std::vector<HashingEpochStats> hashing_history;
    std::vector<EpochRecord> history;
};

/// Subtracts the mean code over `set` (originals, plus saliency images when
/// an attention net is present) from the hash-layer bias. Throws Error if the
/// hash net has no output bias.
void center_hash_outputs(const data::ImageSet& set, const Networks& nets, std::size_t batch = 64);

/// b = sign(mu) per image, evaluated with frozen parameters.
BinaryTargets compute_binary_targets(const data::ImageSet& set, const Networks& nets, std::size_t batch = 64);

/// One shuffled pass updating only the attention parameters. Requires
/// populated targets. Appends one entry to attention_history.
AttentionEpochStats train_attention_epoch(TrainState& state, const data::ImageSet& set, const TrainConfig& config);

/// One shuffled pass updating only the hash parameters; the saliency images
/// enter as constants. Appends one entry to hashing_history.
HashingEpochStats train_hashing_epoch(TrainState& state, const data::ImageSet& set, const TrainConfig& config);

/// One outer epoch: refresh targets, attention step(s), hashing step.
EpochRecord run_epoch(TrainState& state, const data::ImageSet& set, const TrainConfig& config);

using EpochCallback = std::function<void(const EpochRecord&)>;

struct TrainResult {
    std::unique_ptr<nn::DsahModel> model;
    std::vector<EpochRecord> history;
};

/// Builds a model from config.seed and runs config.epochs outer epochs.
/// Throws NumericError if an objective becomes non-finite.
TrainResult alternating_train(const data::ImageSet& set, const TrainConfig& config, const EpochCallback& on_epoch = {});

std::string history_csv(const std::vector<EpochRecord>& history);
void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history);
std::vector<EpochRecord> read_history_csv(const std::filesystem::path& path);

}  // namespace dsah::train
