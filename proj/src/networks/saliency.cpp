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

#include "dsah/networks/saliency.hpp"

#include "dsah/common/error.hpp"

namespace dsah::nn {

Tensor normalize_saliency(Tape& tape, const Tensor& raw) {
    if (raw.rank() < 2) throw ShapeError("normalize_saliency: expected [N, ...], got " + shape_str(raw.shape()));
    Shape per_sample(raw.rank(), 1);
    per_sample[0] = raw.dim(0);
    Tensor lo = ops::expand(tape, ops::reshape(tape, ops::reduce_min(tape, raw, 1), per_sample), raw.shape());
    Tensor hi = ops::expand(tape, ops::reshape(tape, ops::reduce_max(tape, raw, 1), per_sample), raw.shape());
    Tensor range = ops::add_scalar(tape, ops::sub(tape, hi, lo), kSaliencyEpsilon);
    return ops::div(tape, ops::sub(tape, raw, lo), range);
}

Tensor apply_saliency(Tape& tape, const Tensor& map, const Tensor& images) {
    if (map.rank() != 4 || images.rank() != 4 || map.dim(1) != 1 || map.dim(0) != images.dim(0) ||
        map.dim(2) != images.dim(2) || map.dim(3) != images.dim(3)) {
        throw ShapeError("apply_saliency: map " + shape_str(map.shape()) + " does not match images " +
                         shape_str(images.shape()));
    }
    return ops::mul(tape, ops::expand(tape, map, images.shape()), images);
}

SaliencyOutputs saliency_forward(Tape& tape, const AttentionModel& attention, const Tensor& images) {
    SaliencyOutputs out;
    out.raw = attention.forward(tape, images);
    out.map = normalize_saliency(tape, out.raw);
    out.images = apply_saliency(tape, out.map, images);
    return out;
}

std::vector<SaliencyMap> split_saliency_maps(const Tensor& map) {
    if (map.rank() != 4 || map.dim(1) != 1) {
        throw ShapeError("split_saliency_maps: expected [N,1,H,W], got " + shape_str(map.shape()));
    }
    const std::size_t h = map.dim(2), w = map.dim(3);
    std::vector<SaliencyMap> maps(map.dim(0));
    for (std::size_t n = 0; n < maps.size(); ++n) {
        auto values = map.data().subspan(n * h * w, h * w);
        maps[n] = SaliencyMap{h, w, {values.begin(), values.end()}};
    }
    return maps;
}

}  // namespace dsah::nn
