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
#include <optional>
#include <span>
#include <vector>

#include "dsah/retrieval/binary_codes.hpp"

namespace dsah::retrieval {

/// Database ids in ascending Hamming distance; ties keep insertion order.
struct RankedResult {
    std::size_t query = 0;
    std::vector<std::size_t> ids;
    std::vector<std::uint32_t> distances;
    std::vector<std::uint8_t> relevant;
};

/// Throws Error on an empty database, ShapeError on a bit-width mismatch.
RankedResult rank(std::span<const std::uint64_t> query, const LabelSet& query_labels, const BinaryCodeSet& db,
                  std::size_t query_id = 0);

/// Mean of precision@r over relevant ranks r, optionally truncated to the
/// first `cutoff` ranks (the mean then runs over the relevant items found
/// there, 0 when none is). nullopt when the whole list has no relevant item.
std::optional<double> average_precision(std::span<const std::uint8_t> relevance,
                                        std::optional<std::size_t> cutoff = std::nullopt);

struct MapResult {
    double value = 0.0;
    std::size_t evaluated = 0;
    /// Queries with no relevant database item; left out of the mean.
    std::size_t skipped = 0;
};

MapResult mean_average_precision(const BinaryCodeSet& queries, const BinaryCodeSet& db,
                                 std::optional<std::size_t> cutoff = std::nullopt);

/// One point per Hamming radius 0..k. Recall is averaged over queries with
/// at least one relevant item; precision over queries that retrieve anything
/// within the radius (0 when none do).
struct PrPoint {
    std::uint32_t radius = 0;
    double recall = 0.0;
    double precision = 0.0;
};

std::vector<PrPoint> precision_recall_curve(const BinaryCodeSet& queries, const BinaryCodeSet& db);

/// Mean precision over the first `depth` ranked items, one value per depth.
std::vector<double> precision_at(const BinaryCodeSet& queries, const BinaryCodeSet& db,
                                 std::span<const std::size_t> depths);

}  // namespace dsah::retrieval
