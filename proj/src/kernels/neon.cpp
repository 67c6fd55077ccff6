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

#include "dsah/kernels/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)
#include <arm_neon.h>

#include <bit>
#endif

namespace dsah::kernels {

#if defined(__aarch64__) && defined(__ARM_NEON)
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
    }
    double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(alpha);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void hamming_rows_neon(const std::uint64_t* query, const std::uint64_t* rows,
                       std::size_t words, std::size_t count, std::uint32_t* out) {
    for (std::size_t r = 0; r < count; ++r) {
        const std::uint64_t* row = rows + r * words;
        std::uint64_t d = 0;
        std::size_t w = 0;
        for (; w + 2 <= words; w += 2) {
            const uint64x2_t x = veorq_u64(vld1q_u64(query + w), vld1q_u64(row + w));
            d += vaddvq_u8(vcntq_u8(vreinterpretq_u8_u64(x)));
        }
        for (; w < words; ++w) d += static_cast<std::uint64_t>(std::popcount(query[w] ^ row[w]));
        out[r] = static_cast<std::uint32_t>(d);
    }
}

}  // namespace

const KernelTable* neon_table() {
    static const KernelTable table{"neon", dot_neon, axpy_neon, hamming_rows_neon};
    return &table;
}

#else

const KernelTable* neon_table() { return nullptr; }

#endif

}  // namespace dsah::kernels
