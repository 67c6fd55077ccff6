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
#include <vector>

#include "dsah/autodiff/ops.hpp"
#include "dsah/networks/models.hpp"

namespace dsah::nn {

/// Guard in the min-max denominator; a constant raw map normalizes to zeros.
inline constexpr double kSaliencyEpsilon = 1e-12;

/// Per-sample (raw - min) / (max - min + eps) over all non-batch axes.
Tensor normalize_saliency(Tape& tape, const Tensor& raw);

/// y(n,c,p,q) = map(n,0,p,q) * x(n,c,p,q): one mask shared by all channels.
Tensor apply_saliency(Tape& tape, const Tensor& map, const Tensor& images);

struct SaliencyOutputs {
    Tensor raw;
    Tensor map;
    Tensor images;
};

/// attention -> normalize -> apply, recorded on one tape.
SaliencyOutputs saliency_forward(Tape& tape, const AttentionModel& attention, const Tensor& images);

/// Normalized map of one image, values in [0, 1].
struct SaliencyMap {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<double> values;

    double at(std::size_t p, std::size_t q) const { return values[p * width + q]; }
};

/// Splits a [N,1,H,W] normalized map tensor into per-image maps.
std::vector<SaliencyMap> split_saliency_maps(const Tensor& map);

}  // namespace dsah::nn
