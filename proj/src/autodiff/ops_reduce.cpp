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

#include <algorithm>

#include "dsah/autodiff/ops.hpp"
#include "dsah/kernels/kernels.hpp"
#include "ops_common.hpp"

namespace dsah::ops {
namespace {

using detail::require_defined;

// Shared by reduce_min / reduce_max; `better(a, b)` is true when a should
// replace b. Strict comparison keeps the first extreme element.
template <typename Better>
Tensor extreme(Tape& tape, std::string_view op, const Tensor& x, std::size_t first_axis, Better better) {
    require_defined(op, x);
    const Shape& shape = x.shape();
    if (first_axis > shape.size()) detail::shape_error(op, shape, "first_axis beyond rank");
    Shape out_shape(shape.begin(), shape.begin() + static_cast<std::ptrdiff_t>(first_axis));
    const std::size_t groups = shape_numel(out_shape);
    if (x.numel() == 0) detail::shape_error(op, shape, "cannot reduce an empty tensor");
    const std::size_t inner = x.numel() / groups;

    Tensor out(out_shape);
    std::vector<std::size_t> where(groups);
    std::span<const double> in = x.data();
    std::span<double> o = out.mutable_data();
    for (std::size_t g = 0; g < groups; ++g) {
        std::size_t best = g * inner;
        for (std::size_t i = best + 1; i < (g + 1) * inner; ++i) {
            if (better(in[i], in[best])) best = i;
        }
        where[g] = best;
        o[g] = in[best];
    }
    tape.record(op, {&x}, out, [x, where = std::move(where)](std::span<const double> g) {
        std::span<double> gx = x.grad_accumulator();
        for (std::size_t i = 0; i < g.size(); ++i) gx[where[i]] += g[i];
    });
    return out;
}

}  // namespace

Tensor inner_product(Tape& tape, const Tensor& a, const Tensor& b) {
    require_defined("inner_product", a);
    require_defined("inner_product", b);
    if (a.shape() != b.shape() || a.rank() == 0) {
        detail::shape_error("inner_product", a.shape(), b.shape(), "operands must share a shape of rank >= 1");
    }
    const std::size_t k = a.shape().back();
    Shape out_shape(a.shape().begin(), a.shape().end() - 1);
    Tensor out(out_shape);
    const std::size_t rows = out.numel();
    std::span<double> o = out.mutable_data();
    for (std::size_t r = 0; r < rows; ++r) {
        o[r] = kernels::dot(a.data().subspan(r * k, k), b.data().subspan(r * k, k));
    }
    tape.record("inner_product", {&a, &b}, out, [a, b, k](std::span<const double> g) {
        for (std::size_t r = 0; r < g.size(); ++r) {
            if (a.requires_grad()) kernels::axpy(g[r], b.data().subspan(r * k, k), a.grad_accumulator().subspan(r * k, k));
            if (b.requires_grad()) kernels::axpy(g[r], a.data().subspan(r * k, k), b.grad_accumulator().subspan(r * k, k));
        }
    });
    return out;
}

Tensor reduce_min(Tape& tape, const Tensor& x, std::size_t first_axis) {
    return extreme(tape, "reduce_min", x, first_axis, [](double a, double b) { return a < b; });
}

Tensor reduce_max(Tape& tape, const Tensor& x, std::size_t first_axis) {
    return extreme(tape, "reduce_max", x, first_axis, [](double a, double b) { return a > b; });
}

Tensor sum(Tape& tape, const Tensor& x) {
    require_defined("sum", x);
    double total = 0.0;
    for (double v : x.data()) total += v;
    Tensor out = Tensor::scalar(total);
    tape.record("sum", {&x}, out, [x](std::span<const double> g) {
        std::span<double> gx = x.grad_accumulator();
        for (double& v : gx) v += g[0];
    });
    return out;
}

Tensor mean(Tape& tape, const Tensor& x) {
    require_defined("mean", x);
    if (x.numel() == 0) detail::shape_error("mean", x.shape(), "empty tensor");
    const double n = static_cast<double>(x.numel());
    double total = 0.0;
    for (double v : x.data()) total += v;
    Tensor out = Tensor::scalar(total / n);
    tape.record("mean", {&x}, out, [x, n](std::span<const double> g) {
        std::span<double> gx = x.grad_accumulator();
        for (double& v : gx) v += g[0] / n;
    });
    return out;
}

Tensor reshape(Tape& tape, const Tensor& x, Shape shape) {
    require_defined("reshape", x);
    if (shape_numel(shape) != x.numel()) detail::shape_error("reshape", x.shape(), shape, "element counts differ");
    Tensor out(std::move(shape), std::vector<double>(x.data().begin(), x.data().end()));
    tape.record("reshape", {&x}, out, [x](std::span<const double> g) { detail::accumulate(x, g); });
    return out;
}

Tensor expand(Tape& tape, const Tensor& x, Shape shape) {
    require_defined("expand", x);
    const Shape& in = x.shape();
    if (in.size() != shape.size()) detail::shape_error("expand", in, shape, "ranks differ");
    for (std::size_t d = 0; d < in.size(); ++d) {
        if (in[d] != shape[d] && in[d] != 1) detail::shape_error("expand", in, shape, "only size-1 axes broadcast");
    }
    // Source offset of every output element.
    const std::size_t rank = shape.size();
    std::vector<std::size_t> in_stride(rank, 0);
    for (std::size_t d = rank, s = 1; d-- > 0;) {
        in_stride[d] = in[d] == 1 ? 0 : s;
        s *= in[d];
    }
    const std::size_t n = shape_numel(shape);
    std::vector<std::size_t> source(n);
    std::vector<std::size_t> index(rank, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t off = 0;
        for (std::size_t d = 0; d < rank; ++d) off += index[d] * in_stride[d];
        source[i] = off;
        for (std::size_t d = rank; d-- > 0;) {
            if (++index[d] < shape[d]) break;
            index[d] = 0;
        }
    }
    Tensor out(std::move(shape));
    std::span<double> o = out.mutable_data();
    for (std::size_t i = 0; i < n; ++i) o[i] = x.data()[source[i]];
    tape.record("expand", {&x}, out, [x, source = std::move(source)](std::span<const double> g) {
        std::span<double> gx = x.grad_accumulator();
        for (std::size_t i = 0; i < g.size(); ++i) gx[source[i]] += g[i];
    });
    return out;
}

Tensor gather_rows(Tape& tape, const Tensor& x, std::span<const std::size_t> rows) {
    require_defined("gather_rows", x);
    if (x.rank() == 0) detail::shape_error("gather_rows", x.shape(), "needs rank >= 1");
    const std::size_t n = x.dim(0);
    const std::size_t width = n == 0 ? 0 : x.numel() / n;
    Shape shape = x.shape();
    shape[0] = rows.size();
    Tensor out(shape);
    std::span<double> o = out.mutable_data();
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r] >= n) {
            detail::shape_error("gather_rows", x.shape(), "row " + std::to_string(rows[r]) + " out of range");
        }
        std::copy_n(x.data().begin() + static_cast<std::ptrdiff_t>(rows[r] * width), width,
                    o.begin() + static_cast<std::ptrdiff_t>(r * width));
    }
    std::vector<std::size_t> picked(rows.begin(), rows.end());
    tape.record("gather_rows", {&x}, out, [x, width, picked = std::move(picked)](std::span<const double> g) {
        std::span<double> gx = x.grad_accumulator();
        for (std::size_t r = 0; r < picked.size(); ++r) {
            for (std::size_t i = 0; i < width; ++i) gx[picked[r] * width + i] += g[r * width + i];
        }
    });
    return out;
}

}  // namespace dsah::ops
