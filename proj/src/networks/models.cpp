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

#include "dsah/networks/models.hpp"

#include "dsah/common/error.hpp"

namespace dsah::nn {
namespace {

void require_stride(std::string_view who, const ImageShape& input, std::size_t stride) {
    if (input.height == 0 || input.width == 0 || input.height % stride != 0 || input.width % stride != 0) {
        throw ShapeError(std::string(who) + ": input " + input.str() + " must have H and W divisible by " +
                         std::to_string(stride));
    }
}

void require_three(std::string_view who, const std::vector<std::size_t>& channels) {
    if (channels.size() != 3) throw ConfigError(std::string(who) + ": exactly three stage widths required");
    for (std::size_t c : channels) {
        if (c == 0) throw ConfigError(std::string(who) + ": stage widths must be positive");
    }
}

const std::vector<std::size_t>& checked(std::string_view who, const std::vector<std::size_t>& channels) {
    require_three(who, channels);
    return channels;
}

const ImageShape& checked(std::string_view who, const ImageShape& input, std::size_t stride) {
    require_stride(who, input, stride);
    return input;
}

}  // namespace

AttentionNet::AttentionNet(const ImageShape& input, const AttentionNetOptions& options, Rng& rng)
    : input_(checked("AttentionNet", input, kTotalStride)),
      conv1_("conv1", input.channels, checked("AttentionNet", options.channels)[0], 3, 1, rng),
      conv2_("conv2", options.channels[0], options.channels[1], 3, 1, rng),
      conv3_("conv3", options.channels[1], options.channels[2], 3, 1, rng),
      score_coarse_("score_coarse", options.channels[2], 1, 1, 0, rng),
      score_skip_("score_skip", options.channels[1], 1, 1, 0, rng) {
    for (Conv2d* c : {&conv1_, &conv2_, &conv3_, &score_coarse_, &score_skip_}) {
        register_parameter(c->weight);
        register_parameter(c->bias);
    }
}

Tensor AttentionNet::forward(Tape& tape, const Tensor& images) const {
    require_image_batch("AttentionNet", images, input_);
    Tensor s1 = ops::max_pool2d(tape, ops::relu(tape, conv1_.forward(tape, images)));
    Tensor s2 = ops::max_pool2d(tape, ops::relu(tape, conv2_.forward(tape, s1)));
    Tensor s3 = ops::max_pool2d(tape, ops::relu(tape, conv3_.forward(tape, s2)));
    Tensor coarse = ops::upsample_bilinear2x(tape, score_coarse_.forward(tape, s3));
    Tensor fused = ops::add(tape, coarse, score_skip_.forward(tape, s2));
    return ops::upsample_bilinear2x(tape, ops::upsample_bilinear2x(tape, fused));
}

HashNet::HashNet(const ImageShape& input, const HashNetOptions& options, Rng& rng)
    : input_(checked("HashNet", input, kTotalStride)),
      bits_(options.bits),
      conv1_("conv1", input.channels, checked("HashNet", options.channels)[0], 3, 1, rng),
      conv2_("conv2", options.channels[0], options.channels[1], 3, 1, rng),
      conv3_("conv3", options.channels[1], options.channels[2], 3, 1, rng),
      hidden_("fc1", options.channels[2], options.hidden, rng),
      hash_("hash", options.hidden, options.bits, rng) {
    if (options.bits == 0) throw ConfigError("HashNet: bits must be positive");
    if (options.hidden == 0) throw ConfigError("HashNet: hidden width must be positive");
    for (Conv2d* c : {&conv1_, &conv2_, &conv3_}) {
        register_parameter(c->weight);
        register_parameter(c->bias);
    }
    for (Linear* l : {&hidden_, &hash_}) {
        register_parameter(l->weight);
        register_parameter(l->bias);
    }
}

Tensor HashNet::forward(Tape& tape, const Tensor& images) const {
    require_image_batch("HashNet", images, input_);
    Tensor h = ops::max_pool2d(tape, ops::relu(tape, conv1_.forward(tape, images)));
    h = ops::max_pool2d(tape, ops::relu(tape, conv2_.forward(tape, h)));
    h = ops::reduce_max(tape, ops::relu(tape, conv3_.forward(tape, h)), 2);
    h = ops::relu(tape, hidden_.forward(tape, flatten(tape, h)));
    return hash_.forward(tape, h);
}

LinearAttention::LinearAttention(const ImageShape& input, Rng& rng)
    : input_(input), layer_("linear", input.numel(), input.pixels(), rng) {
    register_parameter(layer_.weight);
    register_parameter(layer_.bias);
}

Tensor LinearAttention::forward(Tape& tape, const Tensor& images) const {
    require_image_batch("LinearAttention", images, input_);
    Tensor scores = layer_.forward(tape, flatten(tape, images));
    return ops::reshape(tape, scores, {images.dim(0), 1, input_.height, input_.width});
}

LinearHash::LinearHash(const ImageShape& input, std::size_t bits, Rng& rng, bool with_bias)
    : input_(input), bits_(bits), layer_("linear", input.numel(), bits, rng, with_bias) {
    register_parameter(layer_.weight);
    if (with_bias) register_parameter(layer_.bias);
}

Tensor LinearHash::forward(Tape& tape, const Tensor& images) const {
    require_image_batch("LinearHash", images, input_);
    return layer_.forward(tape, flatten(tape, images));
}

}  // namespace dsah::nn
