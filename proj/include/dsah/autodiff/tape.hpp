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
#include <functional>
#include <initializer_list>
#include <span>
#include <string_view>
#include <vector>

#include "dsah/autodiff/tensor.hpp"

namespace dsah {

/// Ordered record of the differentiable operations executed since the tape
/// was created. Confined to one thread.
class Tape {
 public:
    /// Receives the gradient of the node's output and accumulates into the
    /// gradients of whichever inputs require them.
    using BackwardFn = std::function<void(std::span<const double> grad_output)>;

    enum class Mode { kRecord, kInference };

    explicit Tape(Mode mode = Mode::kRecord) : mode_(mode) {}

    Tape(const Tape&) = delete;
    Tape& operator=(const Tape&) = delete;

    bool recording() const { return mode_ == Mode::kRecord; }

    /// True if recording and at least one input requires a gradient.
    bool needs_grad(std::initializer_list<const Tensor*> inputs) const;

    /// Marks `output` as produced by `op` and stores its backward rule.
    /// A no-op when needs_grad(inputs) is false.
    void record(std::string_view op, std::initializer_list<const Tensor*> inputs,
                Tensor& output, BackwardFn backward);

    /// Seeds d(loss)/d(loss) = 1 and replays the recorded nodes in reverse.
    /// Each node is visited once; nodes whose output received no gradient
    /// are skipped. Intermediate gradients are released after use so that
    /// repeated calls accumulate only into leaves.
    void backward(const Tensor& loss);

    std::size_t size() const { return nodes_.size(); }
    std::string_view op_at(std::size_t i) const { return nodes_[i].op; }

 private:
    struct Node {
        std::string_view op;
        Tensor output;
        BackwardFn backward;
    };

    Mode mode_;
    std::vector<Node> nodes_;
};

}  // namespace dsah
