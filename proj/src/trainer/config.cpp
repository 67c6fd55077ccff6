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

#include "dsah/trainer/config.hpp"

#include <cmath>

#include "dsah/common/error.hpp"

namespace dsah::train {

nn::ModelConfig TrainConfig::model_config() const {
    nn::ModelConfig m;
    m.input = input;
    m.bits = bits;
    m.use_attention = use_attention;
    m.attention.channels = attention_channels;
    m.hash_channels = hash_channels;
    m.hash_hidden = hash_hidden;
    return m;
}

double TrainConfig::attention_rate(std::size_t epoch) const {
    const std::size_t steps = epoch == 0 ? 0 : (epoch - 1) / lr_decay_every;
    return lr_attention * std::pow(lr_decay, static_cast<double>(steps));
}

double TrainConfig::hashing_rate(std::size_t epoch) const {
    const std::size_t steps = epoch == 0 ? 0 : (epoch - 1) / lr_decay_every;
    return lr_hashing * std::pow(lr_decay, static_cast<double>(steps));
}

void TrainConfig::validate() const {
    if (bits == 0) throw ConfigError("bits must be positive");
    if (batch_size < 2) throw ConfigError("batch_size must be at least 2 so that pairs exist");
    if (!(lr_attention > 0.0) || !(lr_hashing > 0.0)) throw ConfigError("learning rates must be positive");
    if (!(lr_decay > 0.0)) throw ConfigError("lr_decay must be positive");
    if (lr_decay_every == 0) throw ConfigError("lr_decay_every must be positive");
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum must lie in [0, 1)");
    if (!(weight_decay >= 0.0)) throw ConfigError("weight_decay must be non-negative");
    if (warmup_attention_epochs == 0) throw ConfigError("warmup_attention_epochs must be at least 1");
    if (use_attention && !attention_terms.semantic && !attention_terms.saliency) {
        throw ConfigError("the attention objective needs the semantic or the saliency term");
    }
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(effective_margin() > 0.0)) throw ConfigError("margin must be positive");
}

}  // namespace dsah::train
