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

#include "dsah/data/dataset.hpp"
#include "dsah/networks/model.hpp"
#include "dsah/retrieval/binary_codes.hpp"

namespace dsah::retrieval {

/// mu = Hash(normalize(Attention(x)) * x), or Hash(x) without attention.
/// Runs on an inference tape. `images` is [N,C,H,W]; throws ShapeError when
/// (C,H,W) differs from the networks' input.
Tensor real_codes(const nn::AttentionModel* attention, const nn::HashModel& hash, const Tensor& images);

/// sign(real_codes(...)) for a single image [C,H,W] or [1,C,H,W].
SignVector encode(const Tensor& image, const nn::AttentionModel* attention, const nn::HashModel& hash);

/// Encodes every image of `set` in chunks of `batch`. Throws Error on an
/// empty set.
BinaryCodeSet encode_set(const nn::DsahModel& model, const data::ImageSet& set, std::size_t batch = 64);
BinaryCodeSet encode_set(const nn::AttentionModel* attention, const nn::HashModel& hash,
                         const data::ImageSet& set, std::size_t batch = 64);

/// Normalized saliency maps of every image, flattened [N*H*W].
std::vector<double> saliency_maps(const nn::AttentionModel& attention, const data::ImageSet& set,
                                  std::size_t batch = 64);

}  // namespace dsah::retrieval
