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

#include "dsah/autodiff/grad_check.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace dsah {

double grad_check(const ScalarFunction& f, const Tensor& x, double eps) {
    Tensor probe = x.clone();
    probe.set_requires_grad(true);
    std::vector<double> analytic(probe.numel(), 0.0);
    {
        Tape tape;
        Tensor y = f(tape, probe);
        tape.backward(y);
        if (probe.has_grad()) {
            std::span<const double> g = probe.grad();
            analytic.assign(g.begin(), g.end());
        }
    }

    auto evaluate = [&](std::size_t i, double delta) {
        Tensor shifted = x.clone();
        shifted.mutable_data()[i] += delta;
        Tape tape(Tape::Mode::kInference);
        return f(tape, shifted).item();
    };

    double worst = 0.0;
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        const double numeric = (evaluate(i, eps) - evaluate(i, -eps)) / (2.0 * eps);
        const double err = std::abs(analytic[i] - numeric) / std::max(1.0, std::abs(numeric));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace dsah
