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
#include <string>
#include <vector>

#include "dsah/autodiff/ops.hpp"
#include "dsah/autodiff/parameter.hpp"
#include "dsah/common/image_shape.hpp"
#include "dsah/common/rng.hpp"

namespace dsah::nn {

/// A parameter container. Modules are pinned in memory (neither copyable nor
/// movable) so that the parameter registry can hold plain pointers.
class Module {
 public:
    Module() = default;
    Module(const Module&) = delete;
    Module& operator=(const Module&) = delete;
    virtual ~Module() = default;

    const std::vector<Parameter*>& parameters() { return params_; }
    std::vector<const Parameter*> parameters() const;

    /// Toggles requires_grad on every parameter.
    void set_trainable(bool trainable);

    std::size_t parameter_count() const;

 protected:
    void register_parameter(Parameter& p) { params_.push_back(&p); }

 private:
    std::vector<Parameter*> params_;
};

/// Square-kernel convolution, stride 1.
struct Conv2d {
    Conv2d(const std::string& name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel,
           std::size_t padding, Rng& rng);

    Tensor forward(Tape& tape, const Tensor& x) const;

    Parameter weight;
    Parameter bias;
    std::size_t padding;
};

struct Linear {
    Linear(const std::string& name, std::size_t in_features, std::size_t out_features, Rng& rng,
           bool with_bias = true);

    Tensor forward(Tape& tape, const Tensor& x) const;

    Parameter weight;
    Parameter bias;
    bool with_bias;
};

/// Throws ShapeError unless x is [N, C, H, W] with (C, H, W) == expected.
void require_image_batch(std::string_view who, const Tensor& x, const ImageShape& expected);

/// [N, ...] -> [N, prod(...)]
Tensor flatten(Tape& tape, const Tensor& x);

}  // namespace dsah::nn
