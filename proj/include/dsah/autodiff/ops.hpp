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
#include <span>

#include "dsah/autodiff/tape.hpp"
#include "dsah/autodiff/tensor.hpp"

// Differentiable primitives. Every function computes its forward result
// eagerly and records its backward rule on `tape` when any input requires a
// gradient. Shape violations throw ShapeError naming the primitive and both
// shapes.
//
// Subgradients at kinks are zero: relu'(0) = hinge'(0) = abs'(0) = 0. Max
// pooling and the min/max reductions route the gradient to the first extreme
// element in row-major order.
namespace dsah::ops {

struct Conv2dOptions {
    std::size_t stride = 1;
    std::size_t padding = 0;
};

/// x [N,C,H,W], weight [O,C,KH,KW], bias [O] or undefined -> [N,O,H',W'].
Tensor conv2d(Tape& tape, const Tensor& x, const Tensor& weight, const Tensor& bias,
              Conv2dOptions options = {});

/// Non-overlapping window; H and W must be divisible by `window`.
Tensor max_pool2d(Tape& tape, const Tensor& x, std::size_t window = 2);

/// x [N,F], weight [O,F], bias [O] or undefined -> [N,O].
Tensor linear(Tape& tape, const Tensor& x, const Tensor& weight, const Tensor& bias);

/// Doubles H and W of [N,C,H,W] with half-pixel-centre bilinear sampling
/// (edges clamped).
Tensor upsample_bilinear2x(Tape& tape, const Tensor& x);

Tensor relu(Tape& tape, const Tensor& x);
/// max(x, 0); the name used by margin losses.
Tensor hinge(Tape& tape, const Tensor& x);
Tensor abs(Tape& tape, const Tensor& x);
Tensor square(Tape& tape, const Tensor& x);

Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor sub(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor div(Tape& tape, const Tensor& a, const Tensor& b);

Tensor add_scalar(Tape& tape, const Tensor& x, double value);
Tensor mul_scalar(Tape& tape, const Tensor& x, double value);

/// Dot product over the last axis: [..., k] x [..., k] -> [...].
/// Two vectors give a rank-0 scalar.
Tensor inner_product(Tape& tape, const Tensor& a, const Tensor& b);

/// Reduces every axis from `first_axis` on: [d0..d{f-1}, ...] -> [d0..d{f-1}].
Tensor reduce_min(Tape& tape, const Tensor& x, std::size_t first_axis = 0);
Tensor reduce_max(Tape& tape, const Tensor& x, std::size_t first_axis = 0);

/// Full reductions to a rank-0 scalar.
Tensor sum(Tape& tape, const Tensor& x);
Tensor mean(Tape& tape, const Tensor& x);

Tensor reshape(Tape& tape, const Tensor& x, Shape shape);

/// Broadcasts axes of size 1 up to `shape`; ranks must match.
Tensor expand(Tape& tape, const Tensor& x, Shape shape);

/// Selects rows of the leading axis: [N, ...] -> [rows.size(), ...].
Tensor gather_rows(Tape& tape, const Tensor& x, std::span<const std::size_t> rows);

/// Same values, cut off from the tape.
Tensor detach(const Tensor& x);

}  // namespace dsah::ops
