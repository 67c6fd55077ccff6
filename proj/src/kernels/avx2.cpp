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

#if defined(__x86_64__) || defined(_M_X64)
#define DSAH_HAVE_AVX2_VARIANT 1
#include <immintrin.h>

#include <bit>
#endif

namespace dsah::kernels {

#if defined(DSAH_HAVE_AVX2_VARIANT)
namespace {

#define DSAH_AVX2 __attribute__((target("avx2,fma,popcnt")))

DSAH_AVX2 double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d pair = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

DSAH_AVX2 double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    __m256d acc2 = _mm256_setzero_pd();
    __m256d acc3 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 16 <= n; i += 16) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
        acc2 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 8), _mm256_loadu_pd(b + i + 8), acc2);
        acc3 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 12), _mm256_loadu_pd(b + i + 12), acc3);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    }
    double sum = hsum(_mm256_add_pd(_mm256_add_pd(acc0, acc1), _mm256_add_pd(acc2, acc3)));
    for (; i < n; ++i) sum += a[i] * b[i];
    return sum;
}

DSAH_AVX2 void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
        _mm256_storeu_pd(y + i + 4,
                         _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4)));
    }
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

// Per-byte popcount through a nibble lookup table (pshufb), summed into
// 64-bit lanes with sad_epu8.
DSAH_AVX2 __m256i popcount_epi64(__m256i v) {
    const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                         0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
    const __m256i low_mask = _mm256_set1_epi8(0x0f);
    const __m256i lo = _mm256_and_si256(v, low_mask);
    const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_mask);
    const __m256i counts = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
    return _mm256_sad_epu8(counts, _mm256_setzero_si256());
}

DSAH_AVX2 void hamming_rows_avx2(const std::uint64_t* query, const std::uint64_t* rows,
                                 std::size_t words, std::size_t count, std::uint32_t* out) {
    if (words == 1) {
        // Four single-word rows per vector.
        const __m256i q = _mm256_set1_epi64x(static_cast<long long>(query[0]));
        std::size_t r = 0;
        for (; r + 4 <= count; r += 4) {
            const __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(rows + r));
            alignas(32) std::uint64_t lanes[4];
            _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), popcount_epi64(_mm256_xor_si256(q, v)));
            for (int l = 0; l < 4; ++l) out[r + l] = static_cast<std::uint32_t>(lanes[l]);
        }
        for (; r < count; ++r) out[r] = static_cast<std::uint32_t>(std::popcount(query[0] ^ rows[r]));
        return;
    }
    for (std::size_t r = 0; r < count; ++r) {
        const std::uint64_t* row = rows + r * words;
        __m256i acc = _mm256_setzero_si256();
        std::size_t w = 0;
        for (; w + 4 <= words; w += 4) {
            const __m256i a = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(query + w));
            const __m256i b = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(row + w));
            acc = _mm256_add_epi64(acc, popcount_epi64(_mm256_xor_si256(a, b)));
        }
        alignas(32) std::uint64_t lanes[4];
        _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), acc);
        std::uint64_t d = lanes[0] + lanes[1] + lanes[2] + lanes[3];
        for (; w < words; ++w) d += static_cast<std::uint64_t>(std::popcount(query[w] ^ row[w]));
        out[r] = static_cast<std::uint32_t>(d);
    }
}

#undef DSAH_AVX2

}  // namespace

const KernelTable* avx2_table() {
    static const bool supported = [] {
        __builtin_cpu_init();
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma") &&
               __builtin_cpu_supports("popcnt");
    }();
    static const KernelTable table{"avx2", dot_avx2, axpy_avx2, hamming_rows_avx2};
    return supported ? &table : nullptr;
}

#else

const KernelTable* avx2_table() { return nullptr; }

#endif

}  // namespace dsah::kernels
