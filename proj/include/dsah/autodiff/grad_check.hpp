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

#include <functional>

#include "dsah/autodiff/tape.hpp"
#include "dsah/autodiff/tensor.hpp"

namespace dsah {

using ScalarFunction = std::function<Tensor(Tape&, const Tensor&)>;

/// Compares the tape gradient of `f` at `x` with central differences of step
/// `eps`. Returns max_i |analytic_i - numeric_i| / max(1, |numeric_i|).
double grad_check(const ScalarFunction& f, const Tensor& x, double eps = 1e-5);

}  // namespace dsah
