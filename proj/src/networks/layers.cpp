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

#include "dsah/networks/layers.hpp"

#include "dsah/common/error.hpp"

namespace dsah::nn {

std::vector<const Parameter*> Module::parameters() const { return {params_.begin(), params_.end()}; }

void Module::set_trainable(bool trainable) {
    for (Parameter* p : params_) p->tensor.set_requires_grad(trainable);
}

std::size_t Module::parameter_count() const {
    std::size_t n = 0;
    for (const Parameter* p : params_) n += p->tensor.numel();
    return n;
}

Conv2d::Conv2d(const std::string& name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
               std::size_t padding_, Rng& rng)
    : weight(name + ".weight", {out_channels, in_channels, kernel, kernel}),
      bias(name + ".bias", {out_channels}),
      padding(padding_) {
    init_fan_in_uniform(weight, in_channels * kernel * kernel, rng);
}

Tensor Conv2d::forward(Tape& tape, const Tensor& x) const {
    return ops::conv2d(tape, x, weight.tensor, bias.tensor, {.stride = 1, .padding = padding});
}

Linear::Linear(const std::string& name, std::size_t in_features, std::size_t out_features, Rng& rng,
               bool with_bias_)
    : weight(name + ".weight", {out_features, in_features}),
      bias(with_bias_ ? Parameter(name + ".bias", {out_features}) : Parameter()),
      with_bias(with_bias_) {
    init_fan_in_uniform(weight, in_features, rng);
}

Tensor Linear::forward(Tape& tape, const Tensor& x) const {
    return ops::linear(tape, x, weight.tensor, with_bias ? bias.tensor : Tensor());
}

void require_image_batch(std::string_view who, const Tensor& x, const ImageShape& expected) {
    if (x.rank() != 4 || x.dim(1) != expected.channels || x.dim(2) != expected.height ||
        x.dim(3) != expected.width) {
        throw ShapeError(std::string(who) + ": expected images [N," + std::to_string(expected.channels) + "," +
                         std::to_string(expected.height) + "," + std::to_string(expected.width) + "], got " +
                         shape_str(x.shape()));
    }
}

Tensor flatten(Tape& tape, const Tensor& x) {
    const std::size_t n = x.dim(0);
    return ops::reshape(tape, x, {n, n == 0 ? 0 : x.numel() / n});
}

}  // namespace dsah::nn
