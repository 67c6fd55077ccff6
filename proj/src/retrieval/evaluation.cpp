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

#include "dsah/retrieval/evaluation.hpp"

#include "dsah/common/error.hpp"
#include "dsah/kernels/kernels.hpp"

namespace dsah::retrieval {
namespace {

void require_compatible(const BinaryCodeSet& queries, const BinaryCodeSet& db) {
    if (queries.bits() != db.bits()) {
        throw ShapeError("evaluation: query codes have " + std::to_string(queries.bits()) + " bits, database " +
                         std::to_string(db.bits()));
    }
}

std::vector<std::uint32_t> distances_to(std::span<const std::uint64_t> query, const BinaryCodeSet& db) {
    std::vector<std::uint32_t> out(db.size());
    kernels::active().hamming_rows(query.data(), db.rows().data(), db.words_per_row(), db.size(), out.data());
    return out;
}

}  // namespace

RankedResult rank(std::span<const std::uint64_t> query, const LabelSet& query_labels, const BinaryCodeSet& db,
                  std::size_t query_id) {
    if (db.empty()) throw Error("rank: empty database");
    if (query.size() != db.words_per_row()) throw ShapeError("rank: query width does not match the database");
    const std::vector<std::uint32_t> dist = distances_to(query, db);

    // Counting sort on distance is stable, so ties keep insertion order.
    std::vector<std::size_t> start(db.bits() + 2, 0);
    for (std::uint32_t d : dist) ++start[d + 1];
    for (std::size_t d = 1; d < start.size(); ++d) start[d] += start[d - 1];

    RankedResult out;
    out.query = query_id;
    out.ids.resize(db.size());
    for (std::size_t i = 0; i < db.size(); ++i) out.ids[start[dist[i]]++] = i;
    out.distances.resize(db.size());
    out.relevant.resize(db.size());
    for (std::size_t r = 0; r < db.size(); ++r) {
        out.distances[r] = dist[out.ids[r]];
        out.relevant[r] = labels_intersect(query_labels, db.labels(out.ids[r])) ? 1 : 0;
    }
    return out;
}

std::optional<double> average_precision(std::span<const std::uint8_t> relevance, std::optional<std::size_t> cutoff) {
    std::size_t total = 0;
    for (std::uint8_t r : relevance) total += r != 0;
    if (total == 0) return std::nullopt;
    const std::size_t n = cutoff ? std::min(*cutoff, relevance.size()) : relevance.size();
    std::size_t hits = 0;
    double sum = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        if (relevance[r] == 0) continue;
        ++hits;
        sum += static_cast<double>(hits) / static_cast<double>(r + 1);
    }
    return hits == 0 ? 0.0 : sum / static_cast<double>(hits);
}

MapResult mean_average_precision(const BinaryCodeSet& queries, const BinaryCodeSet& db,
                                 std::optional<std::size_t> cutoff) {
    require_compatible(queries, db);
    MapResult out;
    double sum = 0.0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const RankedResult ranked = rank(queries.row(q), queries.labels(q), db, q);
        const std::optional<double> ap = average_precision(ranked.relevant, cutoff);
        if (!ap) {
            ++out.skipped;
            continue;
        }
        sum += *ap;
        ++out.evaluated;
    }
    out.value = out.evaluated == 0 ? 0.0 : sum / static_cast<double>(out.evaluated);
    return out;
}

std::vector<PrPoint> precision_recall_curve(const BinaryCodeSet& queries, const BinaryCodeSet& db) {
    require_compatible(queries, db);
    if (db.empty()) throw Error("precision_recall_curve: empty database");
    const std::size_t radii = db.bits() + 1;
    std::vector<double> recall_sum(radii, 0.0), precision_sum(radii, 0.0);
    std::vector<std::size_t> precision_n(radii, 0);
    std::size_t recall_n = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const std::vector<std::uint32_t> dist = distances_to(queries.row(q), db);
        std::vector<std::size_t> found(radii, 0), hits(radii, 0);
        std::size_t relevant = 0;
        for (std::size_t i = 0; i < db.size(); ++i) {
            const bool rel = labels_intersect(queries.labels(q), db.labels(i));
            ++found[dist[i]];
            hits[dist[i]] += rel;
            relevant += rel;
        }
        std::size_t cum_found = 0, cum_hits = 0;
        for (std::size_t r = 0; r < radii; ++r) {
            cum_found += found[r];
            cum_hits += hits[r];
            if (relevant > 0) recall_sum[r] += static_cast<double>(cum_hits) / static_cast<double>(relevant);
            if (cum_found > 0) {
                precision_sum[r] += static_cast<double>(cum_hits) / static_cast<double>(cum_found);
                ++precision_n[r];
            }
        }
        recall_n += relevant > 0;
    }
    std::vector<PrPoint> curve(radii);
    for (std::size_t r = 0; r < radii; ++r) {
        curve[r].radius = static_cast<std::uint32_t>(r);
        curve[r].recall = recall_n == 0 ? 0.0 : recall_sum[r] / static_cast<double>(recall_n);
        curve[r].precision = precision_n[r] == 0 ? 0.0 : precision_sum[r] / static_cast<double>(precision_n[r]);
    }
    return curve;
}

std::vector<double> precision_at(const BinaryCodeSet& queries, const BinaryCodeSet& db,
                                 std::span<const std::size_t> depths) {
    require_compatible(queries, db);
    std::vector<double> sums(depths.size(), 0.0);
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const RankedResult ranked = rank(queries.row(q), queries.labels(q), db, q);
        for (std::size_t d = 0; d < depths.size(); ++d) {
            const std::size_t n = std::min(depths[d], ranked.relevant.size());
            std::size_t hits = 0;
            for (std::size_t r = 0; r < n; ++r) hits += ranked.relevant[r];
            sums[d] += n == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(n);
        }
    }
    for (double& s : sums) s = queries.empty() ? 0.0 : s / static_cast<double>(queries.size());
    return sums;
}

}  // namespace dsah::retrieval
