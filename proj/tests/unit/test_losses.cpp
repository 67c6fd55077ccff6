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
#include <limits>

#include "doctest.h"
#include "dsah/common/error.hpp"
#include "dsah/common/rng.hpp"
#include "dsah/losses/losses.hpp"
#include "dsah/retrieval/binary_codes.hpp"

using namespace dsah;
using namespace dsah::losses;

namespace {

Tensor rows(std::size_t n, std::size_t k, std::vector<double> v) { return Tensor({n, k}, std::move(v)); }

PairwiseLabelBatch one_pair(double s) { return {{0}, {1}, {s}}; }

std::vector<double> random_values(Rng& rng, std::size_t n, double lo = -1.5, double hi = 1.5) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(lo, hi);
    return v;
}

std::vector<double> random_signs(Rng& rng, std::size_t n) {
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform() < 0.5 ? -1.0 : 1.0;
    return v;
}

std::vector<LabelSet> random_labels(Rng& rng, std::size_t n, std::uint32_t classes) {
    std::vector<LabelSet> labels(n);
    for (auto& l : labels) l = {static_cast<std::uint32_t>(rng.below(classes))};
    return labels;
}

double oracle_estimate(std::span<const double> codes, std::size_t k, std::size_t i, std::size_t j) {
    double dot = 0.0;
    for (std::size_t t = 0; t < k; ++t) dot += codes[i * k + t] * codes[j * k + t];
    return (dot + static_cast<double>(k)) / (2.0 * static_cast<double>(k));
}

double oracle_semantic(std::span<const double> codes, std::size_t k, const PairwiseLabelBatch& p) {
    double sum = 0.0;
    for (std::size_t q = 0; q < p.size(); ++q) {
        const double e = p.similarity[q] - oracle_estimate(codes, k, p.first[q], p.second[q]);
        sum += e * e;
    }
    return sum / static_cast<double>(p.size());
}

double oracle_saliency(std::span<const double> a, std::span<const double> b, std::size_t k,
                       const PairwiseLabelBatch& p, double m) {
    double sum = 0.0;
    for (std::size_t q = 0; q < p.size(); ++q) {
        const double d = std::pow(p.similarity[q] - oracle_estimate(a, k, p.first[q], p.second[q]), 2);
        const double ds = std::pow(p.similarity[q] - oracle_estimate(b, k, p.first[q], p.second[q]), 2);
        sum += std::max(m - d + ds, 0.0);
    }
    return sum / static_cast<double>(p.size());
}

double oracle_quantization(std::span<const double> codes, std::span<const double> targets, std::size_t n) {
    double sum = 0.0;
    for (std::size_t i = 0; i < codes.size(); ++i) sum += std::abs(codes[i] - targets[i]);
    return sum / static_cast<double>(n);
}

}  // namespace

TEST_CASE("pairwise labels follow label-set intersection") {
    const std::vector<LabelSet> labels{{3}, {3}, {5}, {1, 3}, {3, 5}, {}};
    const std::vector<std::size_t> batch{0, 1, 2};
    const auto p = pairwise_labels(labels, batch);
    REQUIRE(p.size() == 3);
    CHECK(p.first == std::vector<std::size_t>{0, 0, 1});
    CHECK(p.second == std::vector<std::size_t>{1, 2, 2});
    CHECK(p.similarity == std::vector<double>{1, 0, 0});

    const std::vector<std::size_t> multi{3, 4};
    CHECK(pairwise_labels(labels, multi).similarity == std::vector<double>{1});

    const std::vector<std::size_t> with_empty{0, 5};
    CHECK_THROWS_AS(pairwise_labels(labels, with_empty), Error);
}

TEST_CASE("pair estimate examples") {
    const std::vector<double> ones{1, 1, 1, 1}, neg{-1, -1, -1, -1}, half{1, 1, -1, -1};
    CHECK(pair_estimate(ones, ones, 4) == 1.0);
    CHECK(pair_estimate(ones, neg, 4) == 0.0);
    CHECK(pair_estimate(ones, half, 4) == 0.5);
    const std::vector<double> short_code{1, 1};
    CHECK_THROWS_AS(pair_estimate(ones, short_code, 4), ShapeError);

    Rng rng(11);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_values(rng, 7), b = random_values(rng, 7);
        CHECK(pair_estimate(a, b, 7) == pair_estimate(b, a, 7));
    }
}

TEST_CASE("semantic loss examples") {
    Tape tape;
    CHECK(semantic_loss(tape, rows(2, 4, {1, 1, 1, 1, 1, 1, 1, 1}), one_pair(1)).item() == 0.0);
    CHECK(semantic_loss(tape, rows(2, 4, {1, 1, 1, 1, -1, -1, -1, -1}), one_pair(0)).item() == 0.0);
    CHECK(semantic_loss(tape, rows(2, 4, {1, 1, 1, 1, 1, 1, -1, -1}), one_pair(1)).item() == 0.25);
    CHECK_THROWS_AS(semantic_loss(tape, rows(2, 4, std::vector<double>(8, 1.0)), PairwiseLabelBatch{}), Error);
}

TEST_CASE("semantic loss matches pairwise oracle") {
    Rng rng(12);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 2 + rng.below(8), k = 1 + rng.below(16);
        const auto labels = random_labels(rng, n, 3);
        std::vector<std::size_t> batch(n);
        for (std::size_t i = 0; i < n; ++i) batch[i] = i;
        const auto pairs = pairwise_labels(labels, batch);
        const auto codes = random_values(rng, n * k);
        Tape tape;
        CHECK(semantic_loss(tape, rows(n, k, codes), pairs).item() ==
              doctest::Approx(oracle_semantic(codes, k, pairs)).epsilon(1e-12));
    }
}

TEST_CASE("pair distance examples") {
    const std::vector<double> ones{1, 1, 1, 1}, half{1, 1, -1, -1};
    CHECK(pair_distance(ones, ones, 1.0, 4) == 0.0);
    CHECK(pair_distance(ones, half, 1.0, 4) == 0.25);

    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = random_values(rng, 6), b = random_values(rng, 6);
        const double s = trial % 2;
        std::vector<double> both(a);
        both.insert(both.end(), b.begin(), b.end());
        Tape tape;
        CHECK(pair_distance(a, b, s, 6) == semantic_loss(tape, rows(2, 6, both), one_pair(s)).item());
    }
}

TEST_CASE("saliency loss examples") {
    Tape tape;
    const Tensor perfect = rows(2, 4, {1, 1, 1, 1, 1, 1, 1, 1});
    const Tensor half = rows(2, 4, {1, 1, 1, 1, 1, 1, -1, -1});
    CHECK(saliency_loss(tape, half, perfect, one_pair(1), 0.25).item() == 0.0);
    CHECK(saliency_loss(tape, half, half, one_pair(1), 3.0).item() == 3.0);
    CHECK(saliency_loss(tape, half, perfect, one_pair(1), 1.0).item() == 0.75);
    CHECK_THROWS_AS(saliency_loss(tape, half, perfect, one_pair(1), 0.0), ConfigError);
    CHECK_THROWS_AS(saliency_loss(tape, half, perfect, one_pair(1), -1.0), ConfigError);
}

TEST_CASE("saliency loss is nonnegative and matches the hinge oracle") {
    Rng rng(14);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 2 + rng.below(6), k = 4 + rng.below(8);
        const auto labels = random_labels(rng, n, 2);
        std::vector<std::size_t> batch(n);
        for (std::size_t i = 0; i < n; ++i) batch[i] = i;
        const auto pairs = pairwise_labels(labels, batch);
        const auto a = random_values(rng, n * k), b = random_values(rng, n * k);
        const double m = rng.uniform(0.01, 2.0);
        Tape tape;
        const double got = saliency_loss(tape, rows(n, k, a), rows(n, k, b), pairs, m).item();
        CHECK(got >= 0.0);
        CHECK(got == doctest::Approx(oracle_saliency(a, b, k, pairs, m)).epsilon(1e-12));
    }
}

TEST_CASE("quantization loss examples") {
    Tape tape;
    CHECK(quantization_loss(tape, rows(1, 2, {1, -1}), rows(1, 2, {1, -1})).item() == 0.0);
    CHECK(quantization_loss(tape, rows(1, 2, {0.5, -0.2}), rows(1, 2, {1, -1})).item() == doctest::Approx(1.3));
    CHECK_THROWS_AS(quantization_loss(tape, rows(1, 2, {0.5, -0.2}), rows(1, 2, {1, 0})), Error);
    CHECK_THROWS_AS(quantization_loss(tape, rows(1, 2, {0.5, -0.2}), rows(1, 2, {1, 0.5})), Error);

    Rng rng(15);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 1 + rng.below(6), k = 1 + rng.below(12);
        const auto codes = random_values(rng, n * k);
        std::vector<double> targets(codes.size());
        for (std::size_t i = 0; i < codes.size(); ++i) targets[i] = codes[i] >= 0.0 ? 1.0 : -1.0;
        CHECK(quantization_loss(tape, rows(n, k, codes), rows(n, k, targets)).item() ==
              doctest::Approx(oracle_quantization(codes, targets, n)).epsilon(1e-12));
    }
}

TEST_CASE("binarize examples") {
    CHECK(binarize(std::vector<double>{0.5, -0.2, 3}) == SignVector{1, -1, 1});
    CHECK(binarize(std::vector<double>{0.0, -0.0}) == SignVector{1, 1});
    Rng rng(16);
    const auto mu = random_values(rng, 32);
    const SignVector b = binarize(mu);
    const std::vector<double> as_reals(b.begin(), b.end());
    CHECK(binarize(as_reals) == b);
}

TEST_CASE("sign is the exact minimizer of the L1 quantization loss") {
    Rng rng(17);
    for (std::size_t k = 1; k <= 8; ++k) {
        for (int trial = 0; trial < 50; ++trial) {
            const auto mu = random_values(rng, k);
            const SignVector best = binarize(mu);
            const std::vector<double> best_reals(best.begin(), best.end());
            Tape tape;
            const double at_sign = quantization_loss(tape, rows(1, k, mu), rows(1, k, best_reals)).item();
            for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
                std::vector<double> b(k);
                for (std::size_t t = 0; t < k; ++t) b[t] = (mask >> t) & 1u ? 1.0 : -1.0;
                CHECK(at_sign <= quantization_loss(tape, rows(1, k, mu), rows(1, k, b)).item());
            }
        }
    }
}

TEST_CASE("pair estimate of binary codes equals one minus normalized Hamming distance") {
    // Checked as estimate == (k - h) / k: both sides are the correctly rounded
    // quotient of the same integers, so equality is exact.
    for (std::size_t k = 1; k <= 8; ++k) {
        const std::uint32_t count = 1u << k;
        for (std::uint32_t x = 0; x < count; ++x) {
            for (std::uint32_t y = 0; y < count; ++y) {
                SignVector a(k), b(k);
                std::vector<double> ra(k), rb(k);
                for (std::size_t t = 0; t < k; ++t) {
                    a[t] = (x >> t) & 1u ? 1 : -1;
                    b[t] = (y >> t) & 1u ? 1 : -1;
                    ra[t] = a[t];
                    rb[t] = b[t];
                }
                const auto ha = retrieval::pack(a), hb = retrieval::pack(b);
                const std::size_t hamming = retrieval::hamming_distance(ha, hb);
                REQUIRE(pair_estimate(ra, rb, k) == static_cast<double>(k - hamming) / static_cast<double>(k));
            }
        }
    }
}

TEST_CASE("hashing objective composes its terms") {
    const PairwiseLabelBatch pairs = one_pair(1);
    const Tensor perfect = rows(2, 4, {1, 1, 1, 1, 1, 1, 1, 1});
    CodeBatch batch{perfect, perfect, perfect, perfect, &pairs};
    Tape tape;
    CHECK(hashing_objective(tape, batch, {30, 40, 1}).total.item() == 0.0);

    Rng rng(18);
    const std::size_t n = 6, k = 8;
    const auto labels = random_labels(rng, n, 3);
    std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5};
    const auto p = pairwise_labels(labels, idx);
    const auto mu = random_values(rng, n * k), mus = random_values(rng, n * k);
    const auto b = random_signs(rng, n * k), bs = random_signs(rng, n * k);
    CodeBatch random{rows(n, k, mu), rows(n, k, mus), rows(n, k, b), rows(n, k, bs), &p};
    const double sem = oracle_semantic(mu, k, p) + oracle_semantic(mus, k, p);
    const double quant = oracle_quantization(mu, b, n) + oracle_quantization(mus, bs, n);
    const auto terms = hashing_objective(tape, random, {30, 40, 2});
    CHECK(terms.total.item() == doctest::Approx(30 * sem + quant).epsilon(1e-12));
    CHECK(terms.semantic_original == doctest::Approx(oracle_semantic(mu, k, p)).epsilon(1e-12));
    CHECK(terms.semantic_saliency == doctest::Approx(oracle_semantic(mus, k, p)).epsilon(1e-12));
    CHECK(terms.quantization == doctest::Approx(quant).epsilon(1e-12));

    const double doubled = hashing_objective(tape, random, {60, 40, 2}).total.item();
    CHECK(doubled - quant == doctest::Approx(2 * (terms.total.item() - quant)).epsilon(1e-12));
}

TEST_CASE("hashing objective without saliency codes uses originals only") {
    Rng rng(19);
    const std::size_t n = 4, k = 6;
    const auto labels = random_labels(rng, n, 2);
    std::vector<std::size_t> idx{0, 1, 2, 3};
    const auto p = pairwise_labels(labels, idx);
    const auto mu = random_values(rng, n * k);
    const auto b = random_signs(rng, n * k);
    CodeBatch batch;
    batch.codes = rows(n, k, mu);
    batch.targets = rows(n, k, b);
    batch.pairs = &p;
    Tape tape;
    CHECK(hashing_objective(tape, batch, {30, 40, 2}).total.item() ==
          doctest::Approx(30 * oracle_semantic(mu, k, p) + oracle_quantization(mu, b, n)).epsilon(1e-12));
}

TEST_CASE("attention objective composes its terms") {
    const PairwiseLabelBatch pairs = one_pair(1);
    const Tensor half = rows(2, 4, {1, 1, 1, 1, 1, 1, -1, -1});
    const Tensor perfect = rows(2, 4, {1, 1, 1, 1, 1, 1, 1, 1});
    CodeBatch inactive{half, perfect, half, perfect, &pairs};
    Tape tape;
    CHECK(attention_objective(tape, inactive, {30, 40, 0.25}).total.item() == 0.0);

    Rng rng(20);
    const std::size_t n = 6, k = 8;
    const auto labels = random_labels(rng, n, 3);
    std::vector<std::size_t> idx{0, 1, 2, 3, 4, 5};
    const auto p = pairwise_labels(labels, idx);
    const auto mu = random_values(rng, n * k), mus = random_values(rng, n * k);
    const auto b = random_signs(rng, n * k), bs = random_signs(rng, n * k);
    CodeBatch random{rows(n, k, mu), rows(n, k, mus), rows(n, k, b), rows(n, k, bs), &p};
    const double sal = oracle_saliency(mu, mus, k, p, 2.0);
    const double sem = oracle_semantic(mus, k, p);
    const double quant = oracle_quantization(mus, bs, n);
    const auto terms = attention_objective(tape, random, {30, 40, 2});
    CHECK(terms.total.item() == doctest::Approx(40 * sal + 30 * sem + quant).epsilon(1e-12));
    CHECK(terms.saliency == doctest::Approx(sal).epsilon(1e-12));

    const double doubled = attention_objective(tape, random, {30, 80, 2}).total.item();
    CHECK(doubled == doctest::Approx(terms.total.item() + 40 * sal).epsilon(1e-12));

    CHECK(attention_objective(tape, random, {30, 40, 2}, {true, false}).total.item() ==
          doctest::Approx(30 * sem + quant).epsilon(1e-12));
    CHECK(attention_objective(tape, random, {30, 40, 2}, {false, true}).total.item() ==
          doctest::Approx(40 * sal + quant).epsilon(1e-12));
}

TEST_CASE("loss weights validation") {
    CHECK_NOTHROW((LossWeights{30, 40, 3}.validate()));
    CHECK_THROWS_AS((LossWeights{0, 40, 3}.validate()), ConfigError);
    CHECK_THROWS_AS((LossWeights{30, -1, 3}.validate()), ConfigError);
    CHECK_THROWS_AS((LossWeights{30, 40, 0}.validate()), ConfigError);
}
