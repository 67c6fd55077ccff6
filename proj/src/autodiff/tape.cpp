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

#include "dsah/autodiff/tape.hpp"

#include "dsah/common/error.hpp"

namespace dsah {

bool Tape::needs_grad(std::initializer_list<const Tensor*> inputs) const {
    if (!recording()) return false;
    for (const Tensor* t : inputs) {
        if (t != nullptr && t->defined() && t->requires_grad()) return true;
    }
    return false;
}

void Tape::record(std::string_view op, std::initializer_list<const Tensor*> inputs,
                  Tensor& output, BackwardFn backward) {
    Tensor::Storage& out = output.storage();
    out.leaf = false;
    if (!needs_grad(inputs)) {
        out.requires_grad = false;
        return;
    }
    out.requires_grad = true;
    nodes_.push_back(Node{op, output, std::move(backward)});
}

void Tape::backward(const Tensor& loss) {
    if (!loss.defined() || loss.numel() != 1) {
        throw ShapeError("backward: loss must be a scalar, got shape " +
                         (loss.defined() ? shape_str(loss.shape()) : std::string("<undefined>")));
    }
    if (!loss.requires_grad()) {
        throw Error("backward: loss does not depend on any tensor that requires a gradient");
    }
    std::size_t start = nodes_.size();
    if (!loss.is_leaf()) {
        while (start > 0 && !nodes_[start - 1].output.shares_storage_with(loss)) --start;
        if (start == 0) throw Error("backward: loss was not produced on this tape");
    }
    loss.grad_accumulator()[0] += 1.0;
    for (std::size_t i = start; i-- > 0;) {
        Node& node = nodes_[i];
        if (!node.output.has_grad()) continue;
        node.backward(node.output.grad());
        node.output.clear_grad();
    }
}

}  // namespace dsah
