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

#include <atomic>
#include <cstdlib>

#include "dsah/kernels/kernels.hpp"

namespace dsah::kernels {
namespace {

const KernelTable* find(std::string_view name) {
    for (const KernelTable* t : available_tables()) {
        if (t->name == name) return t;
    }
    return nullptr;
}

const KernelTable* initial_choice() {
    if (const char* env = std::getenv("DSAH_KERNELS")) {
        if (const KernelTable* t = find(env)) return t;
    }
    return available_tables().back();
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_choice()};
    return table;
}

}  // namespace

std::vector<const KernelTable*> available_tables() {
    std::vector<const KernelTable*> tables{&scalar_table()};
    if (const KernelTable* t = avx2_table()) tables.push_back(t);
    if (const KernelTable* t = neon_table()) tables.push_back(t);
    return tables;
}

const KernelTable& active() { return *current().load(std::memory_order_relaxed); }

bool select(std::string_view name) {
    const KernelTable* t = find(name);
    if (t == nullptr) return false;
    current().store(t, std::memory_order_relaxed);
    return true;
}

}  // namespace dsah::kernels
