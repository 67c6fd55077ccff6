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

#include <string>
#include <string_view>

#include "dsah/autodiff/tensor.hpp"
#include "dsah/common/error.hpp"

namespace dsah::ops::detail {

[[noreturn]] inline void shape_error(std::string_view op, const Shape& a, const Shape& b,
                                     std::string_view why = {}) {
    std::string msg = std::string(op) + ": incompatible shapes " + shape_str(a) + " and " + shape_str(b);
    if (!why.empty()) msg += " (" + std::string(why) + ")";
    throw ShapeError(msg);
}

[[noreturn]] inline void shape_error(std::string_view op, const Shape& a, std::string_view why) {
    throw ShapeError(std::string(op) + ": invalid shape " + shape_str(a) + " (" + std::string(why) + ")");
}

inline void require_defined(std::string_view op, const Tensor& t) {
    if (!t.defined()) throw ShapeError(std::string(op) + ": undefined input tensor");
}

inline void accumulate(const Tensor& target, std::span<const double> delta) {
    std::span<double> g = target.grad_accumulator();
    for (std::size_t i = 0; i < g.size(); ++i) g[i] += delta[i];
}

}  // namespace dsah::ops::detail
