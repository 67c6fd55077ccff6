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
#include <vector>

#include "dsah/networks/layers.hpp"

namespace dsah::nn {

/// Dense predictor: images [N,C,H,W] -> raw saliency scores [N,1,H,W].
class AttentionModel : public Module {
 public:
    virtual Tensor forward(Tape& tape, const Tensor& images) const = 0;
    virtual ImageShape input_shape() const = 0;
};

/// Encoder: images [N,C,H,W] -> real-valued codes [N,k], no output squashing.
class HashModel : public Module {
 public:
    virtual Tensor forward(Tape& tape, const Tensor& images) const = 0;
    virtual ImageShape input_shape() const = 0;
    virtual std::size_t bits() const = 0;
    /// Bias of the k-unit output layer, null when the layer has none.
    virtual Parameter* output_bias() = 0;
};

struct AttentionNetOptions {
    /// Output channels of the three conv/relu/pool stages.
    std::vector<std::size_t> channels{8, 16, 16};
};

/// Three-stage encoder with FCN-16s style two-scale fusion: the stage-3
/// score map is upsampled x2 and added to a score map read off the stage-2
/// features, then upsampled x4 back to input resolution.
class AttentionNet final : public AttentionModel {
 public:
    static constexpr std::size_t kTotalStride = 8;

    /// Throws ShapeError if H or W is not divisible by kTotalStride.
    AttentionNet(const ImageShape& input, const AttentionNetOptions& options, Rng& rng);

    Tensor forward(Tape& tape, const Tensor& images) const override;
    ImageShape input_shape() const override { return input_; }

 private:
    ImageShape input_;
    Conv2d conv1_, conv2_, conv3_;
    Conv2d score_coarse_, score_skip_;
};

struct HashNetOptions {
    std::vector<std::size_t> channels{8, 16, 16};
    std::size_t hidden = 64;
    std::size_t bits = 12;
};

/// Three conv/relu/pool stages, a hidden affine+relu layer, and a linear
/// k-unit hash layer.
class HashNet final : public HashModel {
 public:
    static constexpr std::size_t kTotalStride = 8;

    HashNet(const ImageShape& input, const HashNetOptions& options, Rng& rng);

    Tensor forward(Tape& tape, const Tensor& images) const override;
    ImageShape input_shape() const override { return input_; }
    std::size_t bits() const override { return bits_; }
    Parameter* output_bias() override { return &hash_.bias; }

 private:
    ImageShape input_;
    std::size_t bits_;
    Conv2d conv1_, conv2_, conv3_;
    Linear hidden_, hash_;
};

// Single affine layers over flattened pixels. Small enough to differentiate
// by hand, which makes them the probes for trainer tests.

class LinearAttention final : public AttentionModel {
 public:
    LinearAttention(const ImageShape& input, Rng& rng);

    Tensor forward(Tape& tape, const Tensor& images) const override;
    ImageShape input_shape() const override { return input_; }

    Linear& layer() { return layer_; }

 private:
    ImageShape input_;
    Linear layer_;
};

class LinearHash final : public HashModel {
 public:
    LinearHash(const ImageShape& input, std::size_t bits, Rng& rng, bool with_bias = true);

    Tensor forward(Tape& tape, const Tensor& images) const override;
    ImageShape input_shape() const override { return input_; }
    std::size_t bits() const override { return bits_; }
    Parameter* output_bias() override { return layer_.with_bias ? &layer_.bias : nullptr; }

    Linear& layer() { return layer_; }

 private:
    ImageShape input_;
    std::size_t bits_;
    Linear layer_;
};

}  // namespace dsah::nn
