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
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

// Data-parallel inner loops shared by the tensor engine and the Hamming
// index. Each instruction set provides one KernelTable; the scalar table is
// the reference every other table is tested against.
namespace dsah::kernels {

struct KernelTable {
    std::string_view name;

    /// sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);

    /// y[i] += alpha * x[i]
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);

    /// out[r] = popcount(query ^ rows[r]) over `words` 64-bit words per row.
    void (*hamming_rows)(const std::uint64_t* query, const std::uint64_t* rows,
                         std::size_t words, std::size_t count, std::uint32_t* out);
};

const KernelTable& scalar_table();

/// Null when the binary was built without the variant or the CPU lacks it.
const KernelTable* avx2_table();
const KernelTable* neon_table();

/// Every table usable on this machine, scalar first.
std::vector<const KernelTable*> available_tables();

/// The table used by the library. Chosen once: the DSAH_KERNELS environment
/// variable ("scalar", "avx2", "neon") wins if it names an available table,
/// otherwise the widest available variant.
const KernelTable& active();

/// Overrides the active table; returns false if `name` is unavailable.
bool select(std::string_view name);

inline double dot(std::span<const double> a, std::span<const double> b) {
    return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace dsah::kernels
