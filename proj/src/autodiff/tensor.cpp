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

#include "dsah/autodiff/tensor.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "dsah/common/error.hpp"

namespace dsah {

std::size_t shape_numel(const Shape& shape) {
    return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

std::string shape_str(const Shape& shape) {
    std::string out = "[";
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(shape[i]);
    }
    return out + "]";
}

Tensor::Tensor(Shape shape, bool requires_grad) : storage_(std::make_shared<Storage>()) {
    storage_->data.assign(shape_numel(shape), 0.0);
    storage_->shape = std::move(shape);
    storage_->requires_grad = requires_grad;
}

Tensor::Tensor(Shape shape, std::vector<double> values, bool requires_grad)
    : storage_(std::make_shared<Storage>()) {
    if (values.size() != shape_numel(shape)) {
        throw ShapeError("tensor: " + std::to_string(values.size()) + " values do not fill shape " +
                         shape_str(shape));
    }
    storage_->shape = std::move(shape);
    storage_->data = std::move(values);
    storage_->requires_grad = requires_grad;
}

Tensor Tensor::scalar(double value, bool requires_grad) { return Tensor({}, {value}, requires_grad); }

Tensor::Storage& Tensor::storage() const {
    if (!storage_) throw Error("use of an undefined tensor");
    return *storage_;
}

const Shape& Tensor::shape() const { return storage().shape; }

std::size_t Tensor::dim(std::size_t axis) const {
    const Shape& s = shape();
    if (axis >= s.size()) {
        throw ShapeError("tensor: axis " + std::to_string(axis) + " out of range for " + shape_str(s));
    }
    return s[axis];
}

std::size_t Tensor::numel() const { return storage().data.size(); }

std::span<const double> Tensor::data() const { return storage().data; }

std::span<double> Tensor::mutable_data() { return storage().data; }

double Tensor::item() const {
    if (numel() != 1) throw ShapeError("item: tensor of shape " + shape_str(shape()) + " is not a scalar");
    return storage().data[0];
}

bool Tensor::requires_grad() const { return storage().requires_grad; }

void Tensor::set_requires_grad(bool value) { storage().requires_grad = value; }

bool Tensor::is_leaf() const { return storage().leaf; }

bool Tensor::has_grad() const { return storage().has_grad; }

std::span<const double> Tensor::grad() const {
    Storage& s = storage();
    if (!s.has_grad) throw Error("tensor has no gradient");
    return s.grad;
}

std::span<double> Tensor::grad_accumulator() const {
    Storage& s = storage();
    if (!s.has_grad) {
        s.grad.assign(s.data.size(), 0.0);
        s.has_grad = true;
    }
    return s.grad;
}

void Tensor::clear_grad() const {
    Storage& s = storage();
    s.has_grad = false;
    s.grad.clear();
    s.grad.shrink_to_fit();
}

Tensor Tensor::clone() const { return Tensor(shape(), storage().data); }

}  // namespace dsah
