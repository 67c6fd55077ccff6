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
#include <cmath>

#include "dsah/autodiff/ops.hpp"
#include "dsah/kernels/kernels.hpp"
#include "ops_common.hpp"

namespace dsah::ops {
namespace {

using detail::require_defined;

struct ConvGeometry {
    std::size_t batch, channels, height, width;
    std::size_t filters, kernel_h, kernel_w;
    std::size_t stride, padding;
    std::size_t out_h, out_w;

    std::size_t patch() const { return channels * kernel_h * kernel_w; }
    std::size_t out_pixels() const { return out_h * out_w; }
    std::size_t in_image() const { return channels * height * width; }
};

// Unrolls one image into columns [C*KH*KW, out_h*out_w]; padding reads zero.
void im2col(const ConvGeometry& g, const double* image, std::vector<double>& cols) {
    cols.assign(g.patch() * g.out_pixels(), 0.0);
    std::size_t row = 0;
    for (std::size_t c = 0; c < g.channels; ++c) {
        for (std::size_t kh = 0; kh < g.kernel_h; ++kh) {
            for (std::size_t kw = 0; kw < g.kernel_w; ++kw, ++row) {
                double* dst = cols.data() + row * g.out_pixels();
                for (std::size_t oh = 0; oh < g.out_h; ++oh) {
                    const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride + kh) -
                                              static_cast<std::ptrdiff_t>(g.padding);
                    if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.height)) continue;
                    for (std::size_t ow = 0; ow < g.out_w; ++ow) {
                        const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * g.stride + kw) -
                                                  static_cast<std::ptrdiff_t>(g.padding);
                        if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(g.width)) continue;
                        dst[oh * g.out_w + ow] =
                            image[(c * g.height + static_cast<std::size_t>(ih)) * g.width + static_cast<std::size_t>(iw)];
                    }
                }
            }
        }
    }
}

// Adjoint of im2col: scatters column gradients back onto the image.
void col2im(const ConvGeometry& g, const std::vector<double>& cols, double* image) {
    std::size_t row = 0;
    for (std::size_t c = 0; c < g.channels; ++c) {
        for (std::size_t kh = 0; kh < g.kernel_h; ++kh) {
            for (std::size_t kw = 0; kw < g.kernel_w; ++kw, ++row) {
                const double* src = cols.data() + row * g.out_pixels();
                for (std::size_t oh = 0; oh < g.out_h; ++oh) {
                    const std::ptrdiff_t ih = static_cast<std::ptrdiff_t>(oh * g.stride + kh) -
                                              static_cast<std::ptrdiff_t>(g.padding);
                    if (ih < 0 || ih >= static_cast<std::ptrdiff_t>(g.height)) continue;
                    for (std::size_t ow = 0; ow < g.out_w; ++ow) {
                        const std::ptrdiff_t iw = static_cast<std::ptrdiff_t>(ow * g.stride + kw) -
                                                  static_cast<std::ptrdiff_t>(g.padding);
                        if (iw < 0 || iw >= static_cast<std::ptrdiff_t>(g.width)) continue;
                        image[(c * g.height + static_cast<std::size_t>(ih)) * g.width + static_cast<std::size_t>(iw)] +=
                            src[oh * g.out_w + ow];
                    }
                }
            }
        }
    }
}

// Interpolation taps for one axis of a x2 upsample.
struct Taps {
    std::vector<std::size_t> lo, hi;
    std::vector<double> w_lo, w_hi;
};

Taps upsample_taps(std::size_t in) {
    Taps t;
    const std::size_t out = 2 * in;
    t.lo.resize(out);
    t.hi.resize(out);
    t.w_lo.resize(out);
    t.w_hi.resize(out);
    for (std::size_t i = 0; i < out; ++i) {
        double src = (static_cast<double>(i) + 0.5) / 2.0 - 0.5;
        if (src < 0.0) src = 0.0;
        const std::size_t lo = std::min(static_cast<std::size_t>(src), in - 1);
        const std::size_t hi = std::min(lo + 1, in - 1);
        const double frac = src - static_cast<double>(lo);
        t.lo[i] = lo;
        t.hi[i] = hi;
        t.w_lo[i] = 1.0 - frac;
        t.w_hi[i] = frac;
    }
    return t;
}

}  // namespace

Tensor conv2d(Tape& tape, const Tensor& x, const Tensor& weight, const Tensor& bias, Conv2dOptions options) {
    require_defined("conv2d", x);
    require_defined("conv2d", weight);
    if (x.rank() != 4 || weight.rank() != 4) {
        detail::shape_error("conv2d", x.shape(), weight.shape(), "expected input [N,C,H,W] and weight [O,C,KH,KW]");
    }
    if (x.dim(1) != weight.dim(1)) detail::shape_error("conv2d", x.shape(), weight.shape(), "channel counts differ");
    if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != weight.dim(0))) {
        detail::shape_error("conv2d", weight.shape(), bias.shape(), "bias must be [O]");
    }
    if (options.stride == 0) detail::shape_error("conv2d", x.shape(), "stride must be positive");
    ConvGeometry g{x.dim(0), x.dim(1), x.dim(2), x.dim(3), weight.dim(0), weight.dim(2), weight.dim(3),
                   options.stride, options.padding, 0, 0};
    if (g.height + 2 * g.padding < g.kernel_h || g.width + 2 * g.padding < g.kernel_w) {
        detail::shape_error("conv2d", x.shape(), weight.shape(), "kernel larger than padded input");
    }
    g.out_h = (g.height + 2 * g.padding - g.kernel_h) / g.stride + 1;
    g.out_w = (g.width + 2 * g.padding - g.kernel_w) / g.stride + 1;

    const kernels::KernelTable& k = kernels::active();
    Tensor out({g.batch, g.filters, g.out_h, g.out_w});
    std::span<double> o = out.mutable_data();
    std::span<const double> w = weight.data();
    std::vector<double> cols;
    const std::size_t P = g.out_pixels();
    for (std::size_t n = 0; n < g.batch; ++n) {
        im2col(g, x.data().data() + n * g.in_image(), cols);
        double* out_n = o.data() + n * g.filters * P;
        for (std::size_t f = 0; f < g.filters; ++f) {
            double* row = out_n + f * P;
            std::fill_n(row, P, bias.defined() ? bias.data()[f] : 0.0);
            for (std::size_t r = 0; r < g.patch(); ++r) {
                k.axpy(w[f * g.patch() + r], cols.data() + r * P, row, P);
            }
        }
    }

    tape.record("conv2d", {&x, &weight, &bias}, out, [x, weight, bias, g](std::span<const double> grad) {
        const kernels::KernelTable& k = kernels::active();
        const std::size_t P = g.out_pixels();
        std::vector<double> cols;
        std::vector<double> dcols;
        std::span<const double> w = weight.data();
        for (std::size_t n = 0; n < g.batch; ++n) {
            const double* g_n = grad.data() + n * g.filters * P;
            if (bias.defined() && bias.requires_grad()) {
                std::span<double> gb = bias.grad_accumulator();
                for (std::size_t f = 0; f < g.filters; ++f) {
                    double s = 0.0;
                    for (std::size_t p = 0; p < P; ++p) s += g_n[f * P + p];
                    gb[f] += s;
                }
            }
            if (weight.requires_grad()) {
                im2col(g, x.data().data() + n * g.in_image(), cols);
                std::span<double> gw = weight.grad_accumulator();
                for (std::size_t f = 0; f < g.filters; ++f) {
                    for (std::size_t r = 0; r < g.patch(); ++r) {
                        gw[f * g.patch() + r] += k.dot(g_n + f * P, cols.data() + r * P, P);
                    }
                }
            }
            if (x.requires_grad()) {
                dcols.assign(g.patch() * P, 0.0);
                for (std::size_t f = 0; f < g.filters; ++f) {
                    for (std::size_t r = 0; r < g.patch(); ++r) {
                        k.axpy(w[f * g.patch() + r], g_n + f * P, dcols.data() + r * P, P);
                    }
                }
                col2im(g, dcols, x.grad_accumulator().data() + n * g.in_image());
            }
        }
    });
    return out;
}

Tensor max_pool2d(Tape& tape, const Tensor& x, std::size_t window) {
    require_defined("max_pool2d", x);
    if (x.rank() != 4) detail::shape_error("max_pool2d", x.shape(), "expected [N,C,H,W]");
    if (window == 0 || x.dim(2) % window != 0 || x.dim(3) % window != 0) {
        detail::shape_error("max_pool2d", x.shape(), "spatial dims must be divisible by the window");
    }
    const std::size_t planes = x.dim(0) * x.dim(1);
    const std::size_t h = x.dim(2), w = x.dim(3);
    const std::size_t oh = h / window, ow = w / window;
    Tensor out({x.dim(0), x.dim(1), oh, ow});
    std::vector<std::size_t> where(out.numel());
    std::span<const double> in = x.data();
    std::span<double> o = out.mutable_data();
    for (std::size_t p = 0; p < planes; ++p) {
        for (std::size_t i = 0; i < oh; ++i) {
            for (std::size_t j = 0; j < ow; ++j) {
                std::size_t best = p * h * w + (i * window) * w + j * window;
                for (std::size_t di = 0; di < window; ++di) {
                    for (std::size_t dj = 0; dj < window; ++dj) {
                        const std::size_t idx = p * h * w + (i * window + di) * w + j * window + dj;
                        if (in[idx] > in[best]) best = idx;
                    }
                }
                const std::size_t out_idx = (p * oh + i) * ow + j;
                where[out_idx] = best;
                o[out_idx] = in[best];
            }
        }
    }
    tape.record("max_pool2d", {&x}, out, [x, where = std::move(where)](std::span<const double> g) {
        std::span<double> gx = x.grad_accumulator();
        for (std::size_t i = 0; i < g.size(); ++i) gx[where[i]] += g[i];
    });
    return out;
}

Tensor linear(Tape& tape, const Tensor& x, const Tensor& weight, const Tensor& bias) {
    require_defined("linear", x);
    require_defined("linear", weight);
    if (x.rank() != 2 || weight.rank() != 2 || x.dim(1) != weight.dim(1)) {
        detail::shape_error("linear", x.shape(), weight.shape(), "expected x [N,F] and weight [O,F]");
    }
    if (bias.defined() && (bias.rank() != 1 || bias.dim(0) != weight.dim(0))) {
        detail::shape_error("linear", weight.shape(), bias.shape(), "bias must be [O]");
    }
    const std::size_t n = x.dim(0), in = x.dim(1), outs = weight.dim(0);
    const kernels::KernelTable& k = kernels::active();
    Tensor out({n, outs});
    std::span<double> o = out.mutable_data();
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t f = 0; f < outs; ++f) {
            o[r * outs + f] = k.dot(x.data().data() + r * in, weight.data().data() + f * in, in) +
                              (bias.defined() ? bias.data()[f] : 0.0);
        }
    }
    tape.record("linear", {&x, &weight, &bias}, out, [x, weight, bias, n, in, outs](std::span<const double> g) {
        const kernels::KernelTable& k = kernels::active();
        for (std::size_t r = 0; r < n; ++r) {
            for (std::size_t f = 0; f < outs; ++f) {
                const double gv = g[r * outs + f];
                if (x.requires_grad()) {
                    k.axpy(gv, weight.data().data() + f * in, x.grad_accumulator().data() + r * in, in);
                }
                if (weight.requires_grad()) {
                    k.axpy(gv, x.data().data() + r * in, weight.grad_accumulator().data() + f * in, in);
                }
                if (bias.defined() && bias.requires_grad()) bias.grad_accumulator()[f] += gv;
            }
        }
    });
    return out;
}

Tensor upsample_bilinear2x(Tape& tape, const Tensor& x) {
    require_defined("upsample_bilinear2x", x);
    if (x.rank() != 4 || x.dim(2) == 0 || x.dim(3) == 0) {
        detail::shape_error("upsample_bilinear2x", x.shape(), "expected non-empty [N,C,H,W]");
    }
    const std::size_t planes = x.dim(0) * x.dim(1);
    const std::size_t h = x.dim(2), w = x.dim(3);
    const Taps ty = upsample_taps(h);
    const Taps tx = upsample_taps(w);
    Tensor out({x.dim(0), x.dim(1), 2 * h, 2 * w});
    std::span<const double> in = x.data();
    std::span<double> o = out.mutable_data();
    for (std::size_t p = 0; p < planes; ++p) {
        const double* src = in.data() + p * h * w;
        double* dst = o.data() + p * 4 * h * w;
        for (std::size_t i = 0; i < 2 * h; ++i) {
            const double* r0 = src + ty.lo[i] * w;
            const double* r1 = src + ty.hi[i] * w;
            for (std::size_t j = 0; j < 2 * w; ++j) {
                const double top = tx.w_lo[j] * r0[tx.lo[j]] + tx.w_hi[j] * r0[tx.hi[j]];
                const double bottom = tx.w_lo[j] * r1[tx.lo[j]] + tx.w_hi[j] * r1[tx.hi[j]];
                dst[i * 2 * w + j] = ty.w_lo[i] * top + ty.w_hi[i] * bottom;
            }
        }
    }
    tape.record("upsample_bilinear2x", {&x}, out, [x, ty, tx, planes, h, w](std::span<const double> g) {
        std::span<double> gx = x.grad_accumulator();
        for (std::size_t p = 0; p < planes; ++p) {
            double* dst = gx.data() + p * h * w;
            const double* src = g.data() + p * 4 * h * w;
            for (std::size_t i = 0; i < 2 * h; ++i) {
                for (std::size_t j = 0; j < 2 * w; ++j) {
                    const double v = src[i * 2 * w + j];
                    dst[ty.lo[i] * w + tx.lo[j]] += ty.w_lo[i] * tx.w_lo[j] * v;
                    dst[ty.lo[i] * w + tx.hi[j]] += ty.w_lo[i] * tx.w_hi[j] * v;
                    dst[ty.hi[i] * w + tx.lo[j]] += ty.w_hi[i] * tx.w_lo[j] * v;
                    dst[ty.hi[i] * w + tx.hi[j]] += ty.w_hi[i] * tx.w_hi[j] * v;
                }
            }
        }
    });
    return out;
}

}  // namespace dsah::ops
