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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "dsah/common/rng.hpp"
#include "dsah/kernels/kernels.hpp"

using namespace dsah;

namespace {

std::vector<double> random_values(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (double& x : v) x = rng.uniform(-10.0, 10.0);
    return v;
}

}  // namespace

TEST_CASE("scalar table is always available and first") {
    const auto tables = kernels::available_tables();
    REQUIRE_FALSE(tables.empty());
    CHECK(tables.front()->name == "scalar");
    CHECK(kernels::select("scalar"));
    CHECK(kernels::active().name == "scalar");
    CHECK_FALSE(kernels::select("no-such-variant"));
    CHECK(kernels::active().name == "scalar");
    kernels::select(tables.back()->name);
}

TEST_CASE("every kernel variant agrees with the scalar reference") {
    const kernels::KernelTable& ref = kernels::scalar_table();
    Rng rng(31);
    for (const kernels::KernelTable* table : kernels::available_tables()) {
        CAPTURE(table->name);
        for (std::size_t n : {0, 1, 3, 4, 5, 7, 8, 15, 16, 17, 31, 64, 100, 1000}) {
            CAPTURE(n);
            const auto a = random_values(rng, n), b = random_values(rng, n);
            double magnitude = 0.0;
            for (std::size_t i = 0; i < n; ++i) magnitude += std::abs(a[i] * b[i]);
            CHECK(std::abs(table->dot(a.data(), b.data(), n) - ref.dot(a.data(), b.data(), n)) <=
                  1e-13 * magnitude);

            std::vector<double> y1 = random_values(rng, n), y2 = y1;
            table->axpy(0.37, a.data(), y1.data(), n);
            ref.axpy(0.37, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) {
                CHECK(std::abs(y1[i] - y2[i]) <= 4e-16 * (std::abs(y2[i]) + std::abs(0.37 * a[i])));
            }
        }
        for (std::size_t words : {1, 2, 3, 5}) {
            for (std::size_t count : {0, 1, 2, 7, 33}) {
                std::vector<std::uint64_t> query(words), rows(words * count);
                for (auto& w : query) w = rng.next_u64();
                for (auto& w : rows) w = rng.next_u64();
                std::vector<std::uint32_t> got(count), want(count);
                table->hamming_rows(query.data(), rows.data(), words, count, got.data());
                ref.hamming_rows(query.data(), rows.data(), words, count, want.data());
                CHECK(got == want);
            }
        }
    }
}
