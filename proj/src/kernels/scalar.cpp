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

#include <bit>

#include "dsah/kernels/kernels.hpp"

namespace dsah::kernels {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void hamming_rows_scalar(const std::uint64_t* query, const std::uint64_t* rows,
                         std::size_t words, std::size_t count, std::uint32_t* out) {
    for (std::size_t r = 0; r < count; ++r) {
        const std::uint64_t* row = rows + r * words;
        std::uint32_t d = 0;
        for (std::size_t w = 0; w < words; ++w) d += std::popcount(query[w] ^ row[w]);
        out[r] = d;
    }
}

}  // namespace

const KernelTable& scalar_table() {
    static const KernelTable table{"scalar", dot_scalar, axpy_scalar, hamming_rows_scalar};
    return table;
}

}  // namespace dsah::kernels
