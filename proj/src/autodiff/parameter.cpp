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

#include "dsah/autodiff/parameter.hpp"

#include <cmath>

#include "dsah/common/error.hpp"

namespace dsah {

Parameter::Parameter(std::string name_, Shape shape)
    : name(std::move(name_)), tensor(std::move(shape), true), momentum(tensor.numel(), 0.0) {}

void init_fan_in_uniform(Parameter& p, std::size_t fan_in, Rng& rng) {
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    for (double& v : p.tensor.mutable_data()) v = rng.uniform(-bound, bound);
}

void sgd_step(std::span<Parameter* const> params, const SgdOptions& options) {
    for (const Parameter* p : params) {
        if (!p->tensor.has_grad()) throw Error("sgd_step: parameter '" + p->name + "' has no gradient");
    }
    for (Parameter* p : params) {
        std::span<double> theta = p->tensor.mutable_data();
        std::span<const double> grad = p->tensor.grad();
        if (p->momentum.size() != theta.size()) p->momentum.assign(theta.size(), 0.0);
        for (std::size_t i = 0; i < theta.size(); ++i) {
            double& v = p->momentum[i];
            v = options.momentum * v + grad[i] + options.weight_decay * theta[i];
            theta[i] -= options.learning_rate * v;
        }
        p->tensor.clear_grad();
    }
}

}  // namespace dsah
