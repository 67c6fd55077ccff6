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
#include <optional>
#include <vector>

#include "dsah/common/image_shape.hpp"
#include "dsah/losses/losses.hpp"
#include "dsah/networks/model.hpp"

namespace dsah::train {

struct TrainConfig {
    std::size_t bits = 12;
    double lambda = 30.0;
    double alpha = 40.0;
    /// Defaults to bits / 4.
    std::optional<double> margin;
    std::size_t batch_size = 32;
    std::size_t epochs = 30;
    double lr_attention = 0.0003;
    double lr_hashing = 0.0003;
    /// Learning rates are multiplied by lr_decay every lr_decay_every epochs.
    double lr_decay = 0.5;
    std::size_t lr_decay_every = 10;
    double momentum = 0.9;
    double weight_decay = 0.0005;
    std::uint64_t seed = 1;
    /// Attention passes run before the first hashing pass.
    std::size_t warmup_attention_epochs = 1;

    ImageShape input{3, 32, 32};
    std::vector<std::size_t> attention_channels{8, 16, 16};
    std::vector<std::size_t> hash_channels{8, 16, 16};
    std::size_t hash_hidden = 64;

    /// Shift the hash-layer bias before the first epoch so that the mean
    /// training code is zero.
    bool center_codes = true;

    /// False trains the hash net alone on raw images (ablation baseline).
    bool use_attention = true;
    losses::AttentionTerms attention_terms;

    double effective_margin() const { return margin ? *margin : static_cast<double>(bits) / 4.0; }
    losses::LossWeights loss_weights() const { return {lambda, alpha, effective_margin()}; }
    nn::ModelConfig model_config() const;

    /// Learning rate for a 1-based epoch index.
    double attention_rate(std::size_t epoch) const;
    double hashing_rate(std::size_t epoch) const;

    /// Throws ConfigError on any violated invariant.
    void validate() const;
};

}  // namespace dsah::train
