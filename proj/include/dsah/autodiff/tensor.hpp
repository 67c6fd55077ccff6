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
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace dsah {

using Shape = std::vector<std::size_t>;

std::size_t shape_numel(const Shape& shape);
std::string shape_str(const Shape& shape);

/// Row-major array of doubles with an optional gradient buffer.
///
/// Tensor is a handle: copies share storage, like std::shared_ptr. This is
/// what lets the tape hold on to the inputs of an operation and accumulate
/// into their gradients later. Use clone() for an independent copy.
class Tensor {
 public:
    /// An undefined tensor (no storage). Used for optional operands.
    Tensor() = default;

    /// Zero-filled tensor.
    explicit Tensor(Shape shape, bool requires_grad = false);

    /// Throws ShapeError if values.size() != shape_numel(shape).
    Tensor(Shape shape, std::vector<double> values, bool requires_grad = false);

    static Tensor scalar(double value, bool requires_grad = false);

    bool defined() const { return storage_ != nullptr; }

    const Shape& shape() const;
    std::size_t rank() const { return shape().size(); }
    std::size_t dim(std::size_t axis) const;
    std::size_t numel() const;

    std::span<const double> data() const;
    std::span<double> mutable_data();
    double item() const;

    bool requires_grad() const;
    void set_requires_grad(bool value);

    /// True for tensors created by the user rather than by an operation.
    bool is_leaf() const;

    bool has_grad() const;
    std::span<const double> grad() const;

    /// Gradient buffer, allocated (zero-filled) on first use. Mutates
    /// shared storage even through a const handle.
    std::span<double> grad_accumulator() const;
    void clear_grad() const;

    /// Deep copy without gradient, detached from any tape.
    Tensor clone() const;

    bool shares_storage_with(const Tensor& other) const { return storage_ == other.storage_; }

 private:
    friend class Tape;

    struct Storage {
        Shape shape;
        std::vector<double> data;
        std::vector<double> grad;
        bool has_grad = false;
        bool requires_grad = false;
        bool leaf = true;
    };

    Storage& storage() const;

    std::shared_ptr<Storage> storage_;
};

}  // namespace dsah
