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
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>

#include "doctest.h"
#include "dsah/common/binary_io.hpp"
#include "dsah/common/error.hpp"
#include "dsah/data/synthetic.hpp"
#include "dsah/losses/losses.hpp"
#include "dsah/networks/models.hpp"
#include "dsah/networks/saliency.hpp"
#include "dsah/trainer/trainer.hpp"

using namespace dsah;
using namespace dsah::train;
namespace fs = std::filesystem;

namespace {

// Three-pixel toy: one channel, 1x3 images, two bits, two images in one batch.
constexpr std::size_t kPix = 3;
constexpr std::size_t kBits = 2;
const ImageShape kToyShape{1, 1, 3};

data::ImageSet toy_set(const std::array<double, 6>& pixels, std::uint32_t label0, std::uint32_t label1) {
    data::ImageSet set;
    set.shape = kToyShape;
    set.pixels.assign(pixels.begin(), pixels.end());
    set.labels = {{label0}, {label1}};
    set.masks.assign(2 * kPix, 0);
    return set;
}

TrainConfig toy_config() {
    TrainConfig c;
    c.bits = kBits;
    c.batch_size = 2;
    c.lr_attention = 0.05;
    c.lr_hashing = 0.05;
    c.momentum = 0.9;
    c.weight_decay = 0.01;
    c.lambda = 3.0;
    c.alpha = 4.0;
    c.input = kToyShape;
    return c;
}

// Parameters in registration order: weight then bias.
std::vector<double> flatten(nn::Module& m) {
    std::vector<double> out;
    for (Parameter* p : m.parameters()) out.insert(out.end(), p->tensor.data().begin(), p->tensor.data().end());
    return out;
}

using Vec = std::array<double, kPix>;
using Code = std::array<double, kBits>;

Code hash_of(const std::vector<double>& h, const Vec& x) {
    Code mu{};
    for (std::size_t t = 0; t < kBits; ++t) {
        mu[t] = h[kBits * kPix + t];
        for (std::size_t p = 0; p < kPix; ++p) mu[t] += h[t * kPix + p] * x[p];
    }
    return mu;
}

Vec saliency_image(const std::vector<double>& a, const Vec& x) {
    Vec r{};
    for (std::size_t p = 0; p < kPix; ++p) {
        r[p] = a[kPix * kPix + p];
        for (std::size_t q = 0; q < kPix; ++q) r[p] += a[p * kPix + q] * x[q];
    }
    const double lo = *std::min_element(r.begin(), r.end());
    const double hi = *std::max_element(r.begin(), r.end());
    Vec y{};
    for (std::size_t p = 0; p < kPix; ++p) y[p] = x[p] * (r[p] - lo) / (hi - lo + nn::kSaliencyEpsilon);
    return y;
}

double pair_d(const Code& u, const Code& v, double s) {
    const double est = (u[0] * v[0] + u[1] * v[1] + kBits) / (2.0 * kBits);
    return (s - est) * (s - est);
}

double l1(const Code& u, const std::array<int, kBits>& b) { return std::abs(u[0] - b[0]) + std::abs(u[1] - b[1]); }

std::array<int, kBits> sign_of(const Code& u) { return {u[0] >= 0 ? 1 : -1, u[1] >= 0 ? 1 : -1}; }

struct ToyProblem {
    std::array<Vec, 2> x;
    double s;
    TrainConfig config;
};

double attention_objective_of(const ToyProblem& pb, const std::vector<double>& att, const std::vector<double>& hash,
                              const std::array<std::array<int, kBits>, 2>& b_sal) {
    const Code mu0 = hash_of(hash, pb.x[0]), mu1 = hash_of(hash, pb.x[1]);
    const Code m0 = hash_of(hash, saliency_image(att, pb.x[0]));
    const Code m1 = hash_of(hash, saliency_image(att, pb.x[1]));
    const double d = pair_d(mu0, mu1, pb.s), ds = pair_d(m0, m1, pb.s);
    const double hinge = std::max(pb.config.effective_margin() - d + ds, 0.0);
    return pb.config.alpha * hinge + pb.config.lambda * ds + (l1(m0, b_sal[0]) + l1(m1, b_sal[1])) / 2.0;
}

double hashing_objective_of(const ToyProblem& pb, const std::vector<double>& att, const std::vector<double>& hash,
                            const std::array<std::array<int, kBits>, 2>& b,
                            const std::array<std::array<int, kBits>, 2>& b_sal) {
    const Code mu0 = hash_of(hash, pb.x[0]), mu1 = hash_of(hash, pb.x[1]);
    const Code m0 = hash_of(hash, saliency_image(att, pb.x[0]));
    const Code m1 = hash_of(hash, saliency_image(att, pb.x[1]));
    return pb.config.lambda * (pair_d(mu0, mu1, pb.s) + pair_d(m0, m1, pb.s)) + (l1(mu0, b[0]) + l1(mu1, b[1])) / 2.0 +
           (l1(m0, b_sal[0]) + l1(m1, b_sal[1])) / 2.0;
}

// Central differences of f around theta.
template <typename F>
std::vector<double> numeric_gradient(std::vector<double> theta, F f) {
    constexpr double h = 1e-6;
    std::vector<double> g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double saved = theta[i];
        theta[i] = saved + h;
        const double up = f(theta);
        theta[i] = saved - h;
        const double down = f(theta);
        theta[i] = saved;
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

std::vector<double> sgd_oracle(const std::vector<double>& theta, const std::vector<double>& g, double lr, double wd) {
    std::vector<double> out(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) out[i] = theta[i] - lr * (g[i] + wd * theta[i]);
    return out;
}

void check_close(const std::vector<double>& got, const std::vector<double>& want, double tol) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(std::abs(got[i] - want[i]) <= tol);
}

data::SyntheticDataset small_data(std::uint64_t seed = 3) {
    data::SyntheticConfig s;
    s.classes = 2;
    s.train_per_class = 4;
    s.test_per_class = 1;
    s.shape = {3, 16, 16};
    s.patch = 6;
    s.seed = seed;
    return data::generate(s);
}

TrainConfig small_config() {
    TrainConfig c;
    c.bits = 4;
    c.batch_size = 4;
    c.epochs = 2;
    c.input = {3, 16, 16};
    c.attention_channels = {2, 3, 3};
    c.hash_channels = {2, 3, 3};
    c.hash_hidden = 5;
    return c;
}

std::array<std::array<int, kBits>, 2> targets_of(const std::vector<std::int8_t>& flat) {
    return {{{flat[0], flat[1]}, {flat[2], flat[3]}}};
}

}  // namespace

TEST_CASE("binary targets are the signs of the frozen codes") {
    const auto data = small_data();
    nn::DsahModel model(small_config().model_config(), 4);
    const Networks nets{model.attention(), &model.hash()};
    const BinaryTargets b = compute_binary_targets(data.train, nets, 3);
    REQUIRE(b.bits == 4);
    REQUIRE(b.original.size() == data.train.size() * 4);
    REQUIRE(b.saliency.size() == data.train.size() * 4);
    for (auto v : b.original) CHECK((v == 1 || v == -1));
    for (auto v : b.saliency) CHECK((v == 1 || v == -1));

    Tape tape(Tape::Mode::kInference);
    const Tensor all = data.train.all();
    const Tensor mu = model.hash().forward(tape, all);
    const Tensor mu_sal = model.hash().forward(tape, nn::saliency_forward(tape, *model.attention(), all).images);
    CHECK(losses::binarize(mu.data()) == b.original);
    CHECK(losses::binarize(mu_sal.data()) == b.saliency);

    const BinaryTargets again = compute_binary_targets(data.train, nets, 64);
    CHECK(again.original == b.original);
    CHECK(again.saliency == b.saliency);

    CHECK(compute_binary_targets(data.train, Networks{nullptr, &model.hash()}).saliency.empty());
    CHECK_THROWS_AS(compute_binary_targets(data.train, Networks{}), Error);
}

TEST_CASE("one hashing step on the toy matches a hand-written SGD update") {
    const std::array<double, 6> px{0.2, 0.7, 0.4, 0.9, 0.1, 0.5};
    for (const std::uint32_t second_label : {0u, 1u}) {
        CAPTURE(second_label);
        ToyProblem pb{{{{0.2, 0.7, 0.4}, {0.9, 0.1, 0.5}}}, second_label == 0 ? 1.0 : 0.0, toy_config()};
        const data::ImageSet set = toy_set(px, 0, second_label);
        Rng rng(11);
        nn::LinearAttention att(kToyShape, rng);
        nn::LinearHash hash(kToyShape, kBits, rng);
        TrainState state(Networks{&att, &hash}, 1);
        state.targets = compute_binary_targets(set, state.nets);

        const std::vector<double> a0 = flatten(att), h0 = flatten(hash);
        const auto b = targets_of(state.targets.original), bs = targets_of(state.targets.saliency);
        CHECK(b[0] == sign_of(hash_of(h0, pb.x[0])));
        CHECK(bs[1] == sign_of(hash_of(h0, saliency_image(a0, pb.x[1]))));
        const auto g = numeric_gradient(h0, [&](const std::vector<double>& h) {
            return hashing_objective_of(pb, a0, h, b, bs);
        });
        const HashingEpochStats stats = train_hashing_epoch(state, set, pb.config);
        CHECK(stats.objective == doctest::Approx(hashing_objective_of(pb, a0, h0, b, bs)).epsilon(1e-12));
        check_close(flatten(hash), sgd_oracle(h0, g, pb.config.lr_hashing, pb.config.weight_decay), 1e-8);
        CHECK(flatten(att) == a0);
        CHECK(state.hashing_history.size() == 1);
    }
}

TEST_CASE("one attention step on the toy matches a hand-written SGD update") {
    const std::array<double, 6> px{0.3, 0.8, 0.15, 0.6, 0.25, 0.95};
    for (const std::uint32_t second_label : {0u, 1u}) {
        CAPTURE(second_label);
        ToyProblem pb{{{{0.3, 0.8, 0.15}, {0.6, 0.25, 0.95}}}, second_label == 0 ? 1.0 : 0.0, toy_config()};
        const data::ImageSet set = toy_set(px, 0, second_label);
        Rng rng(23);
        nn::LinearAttention att(kToyShape, rng);
        nn::LinearHash hash(kToyShape, kBits, rng);
        TrainState state(Networks{&att, &hash}, 2);
        state.targets = compute_binary_targets(set, state.nets);

        const std::vector<double> a0 = flatten(att), h0 = flatten(hash);
        const auto bs = targets_of(state.targets.saliency);
        const auto g = numeric_gradient(a0, [&](const std::vector<double>& a) {
            return attention_objective_of(pb, a, h0, bs);
        });
        const AttentionEpochStats stats = train_attention_epoch(state, set, pb.config);
        CHECK(stats.objective == doctest::Approx(attention_objective_of(pb, a0, h0, bs)).epsilon(1e-12));
        check_close(flatten(att), sgd_oracle(a0, g, pb.config.lr_attention, pb.config.weight_decay), 1e-8);
        CHECK(flatten(hash) == h0);
    }
}

TEST_CASE("a zero learning rate leaves every parameter unchanged") {
    const auto data = small_data();
    TrainConfig c = small_config();
    c.lr_attention = 0.0;
    c.lr_hashing = 0.0;
    nn::DsahModel model(c.model_config(), 5);
    TrainState state(Networks{model.attention(), &model.hash()}, 5);
    const auto a0 = flatten(*model.attention()), h0 = flatten(model.hash());
    run_epoch(state, data.train, c);
    CHECK(flatten(*model.attention()) == a0);
    CHECK(flatten(model.hash()) == h0);
}

TEST_CASE("targets are refreshed once per outer epoch") {
    const auto data = small_data();
    TrainConfig c = small_config();
    c.warmup_attention_epochs = 2;
    nn::DsahModel model(c.model_config(), 6);
    TrainState state(Networks{model.attention(), &model.hash()}, 6);
    for (std::size_t t = 1; t <= 3; ++t) {
        const EpochRecord r = run_epoch(state, data.train, c);
        CHECK(r.epoch == t);
        CHECK(state.target_refreshes == t);
        CHECK(state.epoch == t);
    }
    CHECK(state.attention_history.size() == 4);
    CHECK(state.hashing_history.size() == 3);
    CHECK(state.history.size() == 3);
}

TEST_CASE("hashing steps require populated targets") {
    const auto data = small_data();
    nn::DsahModel model(small_config().model_config(), 7);
    TrainState state(Networks{model.attention(), &model.hash()}, 7);
    CHECK_THROWS_AS(train_hashing_epoch(state, data.train, small_config()), Error);
    CHECK_THROWS_AS(train_attention_epoch(state, data.train, small_config()), Error);
}

TEST_CASE("with a vanishing semantic weight the quantization term falls step by step") {
    Rng rng(31);
    data::ImageSet set;
    set.shape = kToyShape;
    for (int i = 0; i < 6; ++i) {
        for (std::size_t p = 0; p < kPix; ++p) set.pixels.push_back(rng.uniform(0.0, 1.0));
        set.labels.push_back({static_cast<std::uint32_t>(i % 2)});
    }
    set.masks.assign(6 * kPix, 0);
    nn::LinearHash hash(kToyShape, kBits, rng);
    TrainState state(Networks{nullptr, &hash}, 3);
    state.targets = compute_binary_targets(set, state.nets);
    TrainConfig c = toy_config();
    c.lambda = 1e-12;
    c.momentum = 0.0;
    c.weight_decay = 0.0;
    c.batch_size = 6;
    c.lr_hashing = 0.01;
    double previous = std::numeric_limits<double>::infinity();
    for (int step = 0; step < 5; ++step) {
        const double q = train_hashing_epoch(state, set, c).quantization;
        CHECK(q < previous);
        previous = q;
    }
}

TEST_CASE("zero epochs return the freshly initialised model") {
    const auto data = small_data();
    TrainConfig c = small_config();
    c.epochs = 0;
    const TrainResult r = alternating_train(data.train, c);
    nn::DsahModel fresh(c.model_config(), c.seed);
    CHECK(r.history.empty());
    CHECK(flatten(*r.model->attention()) == flatten(*fresh.attention()));
    CHECK(flatten(r.model->hash()) == flatten(fresh.hash()));
}

TEST_CASE("training is deterministic for a fixed seed") {
    const auto data = small_data();
    const TrainConfig c = small_config();
    std::vector<EpochRecord> seen;
    const TrainResult a = alternating_train(data.train, c, [&](const EpochRecord& r) { seen.push_back(r); });
    const TrainResult b = alternating_train(data.train, c);
    REQUIRE(a.history.size() == 2);
    CHECK(seen.size() == 2);
    CHECK(history_csv(a.history) == history_csv(b.history));
    CHECK(flatten(*a.model->attention()) == flatten(*b.model->attention()));
    CHECK(flatten(a.model->hash()) == flatten(b.model->hash()));

    TrainConfig other = c;
    other.seed = 2;
    CHECK(flatten(alternating_train(data.train, other).model->hash()) != flatten(a.model->hash()));
}

TEST_CASE("no-attention training has no attention net and no saliency terms") {
    const auto data = small_data();
    TrainConfig c = small_config();
    c.use_attention = false;
    const TrainResult r = alternating_train(data.train, c);
    CHECK(r.model->attention() == nullptr);
    for (const EpochRecord& e : r.history) {
        CHECK(e.saliency == 0.0);
        CHECK(e.semantic_saliency == 0.0);
        CHECK(e.total_attention == 0.0);
    }
}

TEST_CASE("centring shifts the mean training code to zero") {
    const auto data = small_data();
    nn::DsahModel model(small_config().model_config(), 8);
    const Networks nets{model.attention(), &model.hash()};
    center_hash_outputs(data.train, nets, 3);
    Tape tape(Tape::Mode::kInference);
    const Tensor all = data.train.all();
    const Tensor mu = model.hash().forward(tape, all);
    const Tensor mu_sal = model.hash().forward(tape, nn::saliency_forward(tape, *model.attention(), all).images);
    for (std::size_t t = 0; t < 4; ++t) {
        double sum = 0.0;
        for (std::size_t i = 0; i < data.train.size(); ++i) sum += mu.data()[i * 4 + t] + mu_sal.data()[i * 4 + t];
        CHECK(std::abs(sum) < 1e-12);
    }

    Rng rng(1);
    nn::LinearHash no_bias(kToyShape, kBits, rng, false);
    const data::ImageSet toy = toy_set({0.1, 0.2, 0.3, 0.4, 0.5, 0.6}, 0, 1);
    CHECK_THROWS_AS(center_hash_outputs(toy, Networks{nullptr, &no_bias}), Error);
}

TEST_CASE("a non-finite objective raises a numeric error naming the step") {
    const auto data = small_data();
    TrainConfig c = small_config();
    c.lr_hashing = 1e300;
    try {
        alternating_train(data.train, c);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        const std::string what = e.what();
        CHECK(what.find("epoch 1") != std::string::npos);
        CHECK(what.find("hashing step") != std::string::npos);
    }
}

TEST_CASE("training rejects bad inputs and invalid configs") {
    const auto data = small_data();
    TrainConfig c = small_config();
    c.input = {3, 32, 32};
    CHECK_THROWS_AS(alternating_train(data.train, c), ShapeError);

    data::ImageSet one = data.train;
    one.labels.resize(1);
    one.pixels.resize(one.shape.numel());
    one.masks.resize(one.shape.pixels());
    CHECK_THROWS_AS(alternating_train(one, small_config()), Error);

    auto rejects = [](auto mutate) {
        TrainConfig bad = small_config();
        mutate(bad);
        CHECK_THROWS_AS(bad.validate(), ConfigError);
    };
    rejects([](TrainConfig& t) { t.bits = 0; });
    rejects([](TrainConfig& t) { t.batch_size = 1; });
    rejects([](TrainConfig& t) { t.lr_attention = 0.0; });
    rejects([](TrainConfig& t) { t.lr_hashing = -1.0; });
    rejects([](TrainConfig& t) { t.lr_decay = 0.0; });
    rejects([](TrainConfig& t) { t.lr_decay_every = 0; });
    rejects([](TrainConfig& t) { t.momentum = 1.0; });
    rejects([](TrainConfig& t) { t.weight_decay = -0.1; });
    rejects([](TrainConfig& t) { t.warmup_attention_epochs = 0; });
    rejects([](TrainConfig& t) { t.lambda = 0.0; });
    rejects([](TrainConfig& t) { t.alpha = 0.0; });
    rejects([](TrainConfig& t) { t.margin = 0.0; });
    rejects([](TrainConfig& t) { t.attention_terms = {false, false}; });
    CHECK_NOTHROW(small_config().validate());
}

TEST_CASE("learning rates decay stepwise and the margin defaults to a quarter of the bits") {
    TrainConfig c;
    c.lr_attention = 0.08;
    c.lr_hashing = 0.04;
    c.lr_decay = 0.5;
    c.lr_decay_every = 10;
    CHECK(c.attention_rate(1) == 0.08);
    CHECK(c.attention_rate(10) == 0.08);
    CHECK(c.attention_rate(11) == 0.04);
    CHECK(c.hashing_rate(21) == 0.01);
    c.bits = 48;
    CHECK(c.effective_margin() == 12.0);
    c.margin = 2.5;
    CHECK(c.loss_weights().margin == 2.5);
}

TEST_CASE("loss history survives a CSV round trip") {
    std::vector<EpochRecord> h;
    for (std::size_t e = 1; e <= 3; ++e) {
        h.push_back({e, 0.1 * e, 1.0 / 3.0 + e, 0.7, 2.0 / 7.0, 100.0 / 3.0, 1e-17 * e});
    }
    const fs::path dir = fs::temp_directory_path() / "dsah_unit_history";
    fs::create_directories(dir);
    write_history_csv(dir / "h.csv", h);
    const auto back = read_history_csv(dir / "h.csv");
    CHECK(history_csv(back) == history_csv(h));
    CHECK(back[2].semantic_saliency == h[2].semantic_saliency);

    io::write_file(dir / "bad.csv", "epoch,loss\n1,2\n");
    CHECK_THROWS_AS(read_history_csv(dir / "bad.csv"), FormatError);
    io::write_file(dir / "row.csv", "epoch,sem_ori,sem_sal,sal,quant,total_attention,total_hashing\n1,2,x\n");
    CHECK_THROWS_AS(read_history_csv(dir / "row.csv"), FormatError);
    CHECK_THROWS_AS(read_history_csv(dir / "missing.csv"), IoError);
    fs::remove_all(dir);
}
