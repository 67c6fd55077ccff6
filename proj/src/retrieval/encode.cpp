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

#include "dsah/retrieval/encode.hpp"

#include <algorithm>

#include "dsah/common/error.hpp"
#include "dsah/networks/saliency.hpp"

namespace dsah::retrieval {

Tensor real_codes(const nn::AttentionModel* attention, const nn::HashModel& hash, const Tensor& images) {
    Tape tape(Tape::Mode::kInference);
    if (attention == nullptr) return hash.forward(tape, images);
    if (attention->input_shape() != hash.input_shape()) {
        throw ShapeError("real_codes: attention input " + attention->input_shape().str() + " vs hash input " +
                         hash.input_shape().str());
    }
    return hash.forward(tape, nn::saliency_forward(tape, *attention, images).images);
}

SignVector encode(const Tensor& image, const nn::AttentionModel* attention, const nn::HashModel& hash) {
    Tensor batch = image;
    if (image.rank() == 3) {
        Tape tape(Tape::Mode::kInference);
        batch = ops::reshape(tape, image, {1, image.dim(0), image.dim(1), image.dim(2)});
    }
    if (batch.rank() != 4 || batch.dim(0) != 1) {
        throw ShapeError("encode: expected one image [C,H,W] or [1,C,H,W], got " + shape_str(image.shape()));
    }
    return losses::binarize(real_codes(attention, hash, batch).data());
}

BinaryCodeSet encode_set(const nn::AttentionModel* attention, const nn::HashModel& hash,
                         const data::ImageSet& set, std::size_t batch) {
    if (set.size() == 0) throw Error("encode: no images to encode");
    if (set.shape != hash.input_shape()) {
        throw ShapeError("encode: images are " + set.shape.str() + " but the model expects " +
                         hash.input_shape().str());
    }
    BinaryCodeSet out(hash.bits());
    const std::size_t k = hash.bits();
    for (std::size_t begin = 0; begin < set.size(); begin += batch) {
        const std::size_t end = std::min(set.size(), begin + batch);
        std::vector<std::size_t> idx(end - begin);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
        const Tensor mu = real_codes(attention, hash, set.batch(idx));
        for (std::size_t i = 0; i < idx.size(); ++i) {
            out.add(losses::binarize(mu.data().subspan(i * k, k)), set.labels[idx[i]]);
        }
    }
    return out;
}

BinaryCodeSet encode_set(const nn::DsahModel& model, const data::ImageSet& set, std::size_t batch) {
    return encode_set(model.attention(), model.hash(), set, batch);
}

std::vector<double> saliency_maps(const nn::AttentionModel& attention, const data::ImageSet& set, std::size_t batch) {
    std::vector<double> out;
    out.reserve(set.size() * set.shape.pixels());
    for (std::size_t begin = 0; begin < set.size(); begin += batch) {
        const std::size_t end = std::min(set.size(), begin + batch);
        std::vector<std::size_t> idx(end - begin);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
        Tape tape(Tape::Mode::kInference);
        const Tensor map = nn::normalize_saliency(tape, attention.forward(tape, set.batch(idx)));
        out.insert(out.end(), map.data().begin(), map.data().end());
    }
    return out;
}

}  // namespace dsah::retrieval
