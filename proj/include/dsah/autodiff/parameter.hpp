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

#include <span>
#include <string>
#include <vector>

#include "dsah/autodiff/tensor.hpp"
#include "dsah/common/rng.hpp"

namespace dsah {

/// A trainable tensor plus its SGD momentum buffer.
struct Parameter {
    Parameter() = default;
    Parameter(std::string name, Shape shape);

    std::string name;
    Tensor tensor;
    std::vector<double> momentum;
};

/// Fills `p` with U(-b, b), b = sqrt(6 / fan_in).
void init_fan_in_uniform(Parameter& p, std::size_t fan_in, Rng& rng);

struct SgdOptions {
    double learning_rate = 0.01;
    double momentum = 0.9;
    double weight_decay = 0.0005;
};

/// v <- momentum * v + grad + weight_decay * theta;  theta <- theta - lr * v.
/// Clears the gradients afterwards. Throws Error if any parameter has no
/// gradient.
void sgd_step(std::span<Parameter* const> params, const SgdOptions& options);

}  // namespace dsah
