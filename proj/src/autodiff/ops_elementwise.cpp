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

#include <cmath>

#include "dsah/autodiff/ops.hpp"
#include "ops_common.hpp"

namespace dsah::ops {
namespace {

using detail::require_defined;

// Unary op with derivative expressed through the input value.
template <typename Forward, typename Derivative>
Tensor unary(Tape& tape, std::string_view op, const Tensor& x, Forward f, Derivative df) {
    require_defined(op, x);
    Tensor out(x.shape());
    std::span<const double> in = x.data();
    std::span<double> o = out.mutable_data();
    for (std::size_t i = 0; i < in.size(); ++i) o[i] = f(in[i]);
    tape.record(op, {&x}, out, [x, df](std::span<const double> g) {
        std::span<const double> in = x.data();
        std::span<double> gx = x.grad_accumulator();
        for (std::size_t i = 0; i < g.size(); ++i) gx[i] += g[i] * df(in[i]);
    });
    return out;
}

void require_same_shape(std::string_view op, const Tensor& a, const Tensor& b) {
    require_defined(op, a);
    require_defined(op, b);
    if (a.shape() != b.shape()) detail::shape_error(op, a.shape(), b.shape(), "elementwise operands must match");
}

double positive_part(double v) { return v > 0.0 ? v : 0.0; }
double step(double v) { return v > 0.0 ? 1.0 : 0.0; }

}  // namespace

Tensor relu(Tape& tape, const Tensor& x) { return unary(tape, "relu", x, positive_part, step); }

Tensor hinge(Tape& tape, const Tensor& x) { return unary(tape, "hinge", x, positive_part, step); }

Tensor abs(Tape& tape, const Tensor& x) {
    return unary(
        tape, "abs", x, [](double v) { return std::abs(v); },
        [](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
}

Tensor square(Tape& tape, const Tensor& x) {
    return unary(
        tape, "square", x, [](double v) { return v * v; }, [](double v) { return 2.0 * v; });
}

Tensor add_scalar(Tape& tape, const Tensor& x, double value) {
    return unary(
        tape, "add_scalar", x, [value](double v) { return v + value; }, [](double) { return 1.0; });
}

Tensor mul_scalar(Tape& tape, const Tensor& x, double value) {
    return unary(
        tape, "mul_scalar", x, [value](double v) { return v * value; }, [value](double) { return value; });
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape("add", a, b);
    Tensor out(a.shape());
    std::span<double> o = out.mutable_data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = a.data()[i] + b.data()[i];
    tape.record("add", {&a, &b}, out, [a, b](std::span<const double> g) {
        if (a.requires_grad()) detail::accumulate(a, g);
        if (b.requires_grad()) detail::accumulate(b, g);
    });
    return out;
}

Tensor sub(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape("sub", a, b);
    Tensor out(a.shape());
    std::span<double> o = out.mutable_data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = a.data()[i] - b.data()[i];
    tape.record("sub", {&a, &b}, out, [a, b](std::span<const double> g) {
        if (a.requires_grad()) detail::accumulate(a, g);
        if (b.requires_grad()) {
            std::span<double> gb = b.grad_accumulator();
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i];
        }
    });
    return out;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape("mul", a, b);
    Tensor out(a.shape());
    std::span<double> o = out.mutable_data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = a.data()[i] * b.data()[i];
    tape.record("mul", {&a, &b}, out, [a, b](std::span<const double> g) {
        if (a.requires_grad()) {
            std::span<double> ga = a.grad_accumulator();
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] * b.data()[i];
        }
        if (b.requires_grad()) {
            std::span<double> gb = b.grad_accumulator();
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] += g[i] * a.data()[i];
        }
    });
    return out;
}

Tensor div(Tape& tape, const Tensor& a, const Tensor& b) {
    require_same_shape("div", a, b);
    Tensor out(a.shape());
    std::span<double> o = out.mutable_data();
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = a.data()[i] / b.data()[i];
    tape.record("div", {&a, &b}, out, [a, b](std::span<const double> g) {
        std::span<const double> av = a.data();
        std::span<const double> bv = b.data();
        if (a.requires_grad()) {
            std::span<double> ga = a.grad_accumulator();
            for (std::size_t i = 0; i < g.size(); ++i) ga[i] += g[i] / bv[i];
        }
        if (b.requires_grad()) {
            std::span<double> gb = b.grad_accumulator();
            for (std::size_t i = 0; i < g.size(); ++i) gb[i] -= g[i] * av[i] / (bv[i] * bv[i]);
        }
    });
    return out;
}

Tensor detach(const Tensor& x) {
    require_defined("detach", x);
    return x.clone();
}

}  // namespace dsah::ops
