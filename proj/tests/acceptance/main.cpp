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

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include "dsah/autodiff/checkpoint.hpp"
#include "dsah/autodiff/grad_check.hpp"
#include "dsah/common/binary_io.hpp"
#include "dsah/common/config_file.hpp"
#include "dsah/data/synthetic.hpp"
#include "dsah/losses/losses.hpp"
#include "dsah/retrieval/binary_codes.hpp"
#include "dsah/retrieval/encode.hpp"
#include "dsah/retrieval/evaluation.hpp"
#include "dsah/trainer/trainer.hpp"
#include "support/gradient_cases.hpp"

using namespace dsah;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

int failures = 0;

void report(int id, bool pass, const std::string& what, const std::string& detail) {
    std::printf("criterion %d %s  %s: %s\n", id, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* format, auto... args) {
    char buffer[512];
    std::snprintf(buffer, sizeof buffer, format, args...);
    return buffer;
}

// 1 --------------------------------------------------------------------------

void gradient_suite() {
    const auto start = Clock::now();
    auto cases = testing::primitive_cases();
    for (auto& c : testing::loss_cases()) cases.push_back(std::move(c));
    Rng rng(101);
    double worst = 0.0;
    std::string worst_case;
    std::size_t checks = 0;
    for (const auto& c : cases) {
        for (int trial = 0; trial < 100; ++trial) {
            const testing::GradTrial t = c.make(rng);
            const double err = grad_check(t.f, t.x);
            ++checks;
            if (!(err <= worst)) {
                worst = err;
                worst_case = c.name;
            }
        }
    }
    const double elapsed = seconds_since(start);
    report(1, worst < 1e-4 && elapsed < 60.0, "gradient suite",
           fmt("%zu cases x 100 trials, max rel error %.3g (%s), %.1fs", cases.size(), worst, worst_case.c_str(),
               elapsed));
}

// 2 --------------------------------------------------------------------------

void exact_minimizer() {
    Rng rng(102);
    std::size_t violations = 0, comparisons = 0;
    for (std::size_t k = 1; k <= 8; ++k) {
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> mu(k);
            for (double& v : mu) v = rng.uniform(-2.0, 2.0);
            const losses::SignVector s = losses::binarize(mu);
            Tape tape;
            const Tensor codes({1, k}, mu);
            const double at_sign =
                losses::quantization_loss(tape, codes, Tensor({1, k}, std::vector<double>(s.begin(), s.end()))).item();
            for (std::uint32_t mask = 0; mask < (1u << k); ++mask) {
                std::vector<double> b(k);
                for (std::size_t t = 0; t < k; ++t) b[t] = (mask >> t) & 1u ? 1.0 : -1.0;
                ++comparisons;
                if (losses::quantization_loss(tape, codes, Tensor({1, k}, b)).item() < at_sign) ++violations;
            }
        }
    }
    report(2, violations == 0, "sign minimizes the L1 quantization loss",
           fmt("%zu exhaustive comparisons over k = 1..8, %zu violations", comparisons, violations));
}

// 3 --------------------------------------------------------------------------

void bridge_identity() {
    std::size_t pairs = 0, mismatches = 0;
    for (std::size_t k = 1; k <= 8; ++k) {
        for (std::uint32_t x = 0; x < (1u << k); ++x) {
            for (std::uint32_t y = 0; y < (1u << k); ++y) {
                losses::SignVector a(k), b(k);
                std::vector<double> ra(k), rb(k);
                for (std::size_t t = 0; t < k; ++t) {
                    a[t] = (x >> t) & 1u ? 1 : -1;
                    b[t] = (y >> t) & 1u ? 1 : -1;
                    ra[t] = a[t];
                    rb[t] = b[t];
                }
                const std::size_t h = retrieval::hamming_distance(retrieval::pack(a), retrieval::pack(b));
                ++pairs;
                if (losses::pair_estimate(ra, rb, k) != static_cast<double>(k - h) / static_cast<double>(k)) {
                    ++mismatches;
                }
            }
        }
    }
    report(3, mismatches == 0, "Hamming distance equals k(1 - pair estimate)",
           fmt("%zu code pairs, %zu mismatches", pairs, mismatches));
}

// 4 --------------------------------------------------------------------------

double brute_force_map(const retrieval::BinaryCodeSet& queries, const retrieval::BinaryCodeSet& db) {
    double total = 0.0;
    std::size_t counted = 0;
    for (std::size_t q = 0; q < queries.size(); ++q) {
        const auto qc = queries.code(q);
        std::vector<std::pair<std::size_t, std::size_t>> order;
        for (std::size_t i = 0; i < db.size(); ++i) {
            const auto c = db.code(i);
            std::size_t d = 0;
            for (std::size_t t = 0; t < c.size(); ++t) d += c[t] != qc[t];
            order.emplace_back(d, i);
        }
        std::sort(order.begin(), order.end());
        double hits = 0.0, sum = 0.0;
        for (std::size_t r = 0; r < order.size(); ++r) {
            const auto& a = queries.labels(q);
            const auto& b = db.labels(order[r].second);
            const bool rel = std::any_of(a.begin(), a.end(), [&](auto l) { return std::find(b.begin(), b.end(), l) != b.end(); });
            if (rel) {
                hits += 1.0;
                sum += hits / static_cast<double>(r + 1);
            }
        }
        if (hits > 0.0) {
            total += sum / hits;
            ++counted;
        }
    }
    return counted ? total / static_cast<double>(counted) : 0.0;
}

void map_oracle() {
    Rng rng(104);
    double worst = 0.0;
    for (int fixture = 0; fixture < 20; ++fixture) {
        const std::size_t k = 4 + rng.below(29);
        const std::size_t n_db = 10 + rng.below(91), n_q = 1 + rng.below(10);
        auto make = [&](std::size_t n) {
            retrieval::BinaryCodeSet set(k);
            for (std::size_t i = 0; i < n; ++i) {
                losses::SignVector c(k);
                for (auto& v : c) v = rng.uniform() < 0.5 ? -1 : 1;
                set.add(c, {static_cast<std::uint32_t>(rng.below(4))});
            }
            return set;
        };
        const auto db = make(n_db);
        const auto queries = make(n_q);
        worst = std::max(worst, std::abs(retrieval::mean_average_precision(queries, db).value -
                                         brute_force_map(queries, db)));
    }
    report(4, worst <= 1e-12, "MAP equals a brute-force implementation",
           fmt("20 fixtures, max abs difference %.3g", worst));
}

// 5 and 6 --------------------------------------------------------------------

struct RunOutcome {
    std::unique_ptr<nn::DsahModel> model;
    std::vector<train::EpochRecord> history;
    double map = 0.0;
};

RunOutcome train_and_score(const data::SyntheticDataset& ds, train::TrainConfig config) {
    config.input = ds.synth.shape;
    auto result = train::alternating_train(ds.train, config);
    RunOutcome out;
    const auto db = retrieval::encode_set(*result.model, ds.train);
    const auto queries = retrieval::encode_set(*result.model, ds.test);
    out.map = retrieval::mean_average_precision(queries, db).value;
    out.model = std::move(result.model);
    out.history = std::move(result.history);
    return out;
}

double random_code_map(const data::SyntheticDataset& ds, std::size_t bits, std::size_t draws) {
    Rng rng(105);
    auto random_set = [&](const data::ImageSet& set) {
        retrieval::BinaryCodeSet codes(bits);
        for (std::size_t i = 0; i < set.size(); ++i) {
            losses::SignVector c(bits);
            for (auto& v : c) v = rng.uniform() < 0.5 ? -1 : 1;
            codes.add(c, set.labels[i]);
        }
        return codes;
    };
    double sum = 0.0;
    for (std::size_t d = 0; d < draws; ++d) {
        const auto db = random_set(ds.train);
        sum += retrieval::mean_average_precision(random_set(ds.test), db).value;
    }
    return sum / static_cast<double>(draws);
}

double mean_iou(const nn::AttentionNet& attention, const data::ImageSet& set) {
    const auto maps = retrieval::saliency_maps(attention, set);
    const std::size_t pixels = set.shape.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        sum += data::saliency_iou(std::span(maps).subspan(i * pixels, pixels), set.mask(i), 0.5);
    }
    return sum / static_cast<double>(set.size());
}

void end_to_end_and_ablation(const data::SyntheticDataset& ds) {
    const auto start = Clock::now();
    train::TrainConfig config;
    config.seed = 1;
    RunOutcome full = train_and_score(ds, config);
    const double elapsed = seconds_since(start);

    const auto& first = full.history.front();
    const auto& last = full.history.back();
    const bool decreasing =
        last.total_attention < first.total_attention && last.total_hashing < first.total_hashing;
    report(5, decreasing && elapsed < 900.0, "(a) objectives decrease",
           fmt("attention %.4f -> %.4f, hashing %.4f -> %.4f over %zu epochs, %.0fs", first.total_attention,
               last.total_attention, first.total_hashing, last.total_hashing, full.history.size(), elapsed));

    const double baseline = random_code_map(ds, config.bits, 20);
    report(5, full.map >= 3.0 * baseline, "(b) test MAP against random codes",
           fmt("MAP %.4f, random-code MAP %.4f, ratio %.2f (need 3)", full.map, baseline, full.map / baseline));

    Rng chance_rng(106);
    const double chance = data::chance_iou(ds.test, ds.synth.patch, 1000, chance_rng);
    const double iou = mean_iou(*full.model->attention(), ds.test);
    report(5, iou >= 2.0 * chance, "(c) saliency IoU against chance",
           fmt("mean IoU %.4f at threshold 0.5, chance %.4f, ratio %.2f (need 2)", iou, chance, iou / chance));

    std::vector<double> with_attention{full.map}, without;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        train::TrainConfig c;
        c.seed = seed;
        if (seed > 1) with_attention.push_back(train_and_score(ds, c).map);
        c.use_attention = false;
        without.push_back(train_and_score(ds, c).map);
    }
    const double mean_full = std::accumulate(with_attention.begin(), with_attention.end(), 0.0) / 3.0;
    const double mean_plain = std::accumulate(without.begin(), without.end(), 0.0) / 3.0;
    report(6, mean_full >= mean_plain, "full method against hash net alone",
           fmt("mean MAP %.4f (%.4f %.4f %.4f) vs %.4f (%.4f %.4f %.4f) over seeds 1-3", mean_full,
               with_attention[0], with_attention[1], with_attention[2], mean_plain, without[0], without[1],
               without[2]));
}

// 7 --------------------------------------------------------------------------

void determinism(const data::SyntheticDataset& ds, const fs::path& dir) {
    train::TrainConfig config;
    config.input = ds.synth.shape;
    config.epochs = 3;
    config.seed = 7;
    std::vector<std::string> checkpoints, codes;
    for (int run = 0; run < 2; ++run) {
        const auto result = train::alternating_train(ds.train, config);
        const fs::path ckpt = dir / ("run" + std::to_string(run) + ".ckpt");
        const fs::path code_file = dir / ("run" + std::to_string(run) + ".codes");
        result.model->save(ckpt);
        retrieval::write_code_file(code_file, retrieval::encode_set(*result.model, ds.test));
        checkpoints.push_back(io::read_file(ckpt));
        codes.push_back(io::read_file(code_file));
    }
    const bool same = checkpoints[0] == checkpoints[1] && codes[0] == codes[1];
    report(7, same, "identical runs give identical files",
           fmt("checkpoints %s (%zu bytes), code files %s (%zu bytes)",
               checkpoints[0] == checkpoints[1] ? "identical" : "differ", checkpoints[0].size(),
               codes[0] == codes[1] ? "identical" : "differ", codes[0].size()));
}

// 8 --------------------------------------------------------------------------

void round_trips(const data::SyntheticDataset& ds, const fs::path& dir) {
    std::vector<std::string> broken;

    train::TrainConfig config;
    config.input = ds.synth.shape;
    const nn::DsahModel model(config.model_config(), 3);
    model.save(dir / "a.ckpt");
    nn::DsahModel::load(dir / "a.ckpt")->save(dir / "b.ckpt");
    if (io::read_file(dir / "a.ckpt") != io::read_file(dir / "b.ckpt")) broken.push_back("checkpoint");

    const auto codes = retrieval::encode_set(model, ds.test);
    retrieval::write_code_file(dir / "a.codes", codes);
    retrieval::write_code_file(dir / "b.codes", retrieval::read_code_file(dir / "a.codes"));
    if (io::read_file(dir / "a.codes") != io::read_file(dir / "b.codes")) broken.push_back("code file");

    data::write_dataset(dir / "data_a", ds);
    const auto files = data::read_dataset(dir / "data_a");
    data::write_image_set(dir / "data_b_train.bin", files.train);
    data::write_image_set(dir / "data_b_test.bin", files.test);
    io::write_file(dir / "data_b_manifest.txt", format_key_values(files.manifest));
    if (io::read_file(dir / "data_a" / "train.bin") != io::read_file(dir / "data_b_train.bin") ||
        io::read_file(dir / "data_a" / "test.bin") != io::read_file(dir / "data_b_test.bin") ||
        io::read_file(dir / "data_a" / "manifest.txt") != io::read_file(dir / "data_b_manifest.txt")) {
        broken.push_back("dataset");
    }

    std::string detail = broken.empty() ? "checkpoint, code file and dataset rewrite byte-identically" : "broken:";
    for (const auto& b : broken) detail += " " + b;
    report(8, broken.empty(), "format round trips", detail);
}

}  // namespace

int main() {
    const fs::path dir = fs::temp_directory_path() / "dsah_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);

    gradient_suite();
    exact_minimizer();
    bridge_identity();
    map_oracle();

    const data::SyntheticDataset ds = data::generate(data::SyntheticConfig{});
    end_to_end_and_ablation(ds);
    determinism(ds, dir);
    round_trips(ds, dir);

    fs::remove_all(dir);
    std::printf("%d criteria checks failed\n", failures);
    return failures == 0 ? 0 : 1;
}
