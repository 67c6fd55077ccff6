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

#include "dsah/trainer/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dsah/common/binary_io.hpp"
#include "dsah/common/error.hpp"
#include "dsah/losses/losses.hpp"
#include "dsah/networks/saliency.hpp"

namespace dsah::train {
namespace {

// Shuffled mini-batches. A trailing singleton (which has no pairs) is folded
// into the previous batch.
std::vector<std::vector<std::size_t>> make_batches(std::size_t count, std::size_t batch_size, Rng& rng) {
    if (count < 2) throw Error("training needs at least two images");
    std::vector<std::size_t> order(count);
    for (std::size_t i = 0; i < count; ++i) order[i] = i;
    rng.shuffle(order);
    std::vector<std::vector<std::size_t>> batches;
    for (std::size_t begin = 0; begin < count; begin += batch_size) {
        const std::size_t end = std::min(count, begin + batch_size);
        batches.emplace_back(order.begin() + static_cast<std::ptrdiff_t>(begin),
                             order.begin() + static_cast<std::ptrdiff_t>(end));
    }
    if (batches.size() > 1 && batches.back().size() == 1) {
        batches[batches.size() - 2].push_back(batches.back().front());
        batches.pop_back();
    }
    return batches;
}

Tensor target_rows(const std::vector<std::int8_t>& targets, std::size_t bits, std::span<const std::size_t> idx) {
    std::vector<double> values;
    values.reserve(idx.size() * bits);
    for (std::size_t i : idx) {
        for (std::size_t t = 0; t < bits; ++t) values.push_back(static_cast<double>(targets[i * bits + t]));
    }
    return Tensor({idx.size(), bits}, std::move(values));
}

void require_finite(double value, std::string_view step, std::size_t epoch, std::size_t batch) {
    if (!std::isfinite(value)) {
        std::ostringstream msg;
        msg << step << " step, epoch " << epoch << ", batch " << batch << ": objective is " << value;
        throw NumericError(msg.str());
    }
}

void require_targets(const TrainState& state, const data::ImageSet& set) {
    if (state.targets.empty() || state.targets.original.size() != set.size() * state.targets.bits) {
        throw Error("binary targets are not populated for this training set");
    }
}

std::vector<Parameter*> params_of(nn::Module& m) { return m.parameters(); }

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

BinaryTargets compute_binary_targets(const data::ImageSet& set, const Networks& nets, std::size_t batch) {
    if (nets.hash == nullptr) throw Error("compute_binary_targets: no hash network");
    BinaryTargets out;
    out.bits = nets.hash->bits();
    const std::size_t k = out.bits;
    for (std::size_t begin = 0; begin < set.size(); begin += batch) {
        const std::size_t end = std::min(set.size(), begin + batch);
        std::vector<std::size_t> idx(end - begin);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
        const Tensor images = set.batch(idx);
        Tape tape(Tape::Mode::kInference);
        const Tensor mu = nets.hash->forward(tape, images);
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const losses::SignVector b = losses::binarize(mu.data().subspan(i * k, k));
            out.original.insert(out.original.end(), b.begin(), b.end());
        }
        if (nets.attention != nullptr) {
            const Tensor y = nn::saliency_forward(tape, *nets.attention, images).images;
            const Tensor mu_sal = nets.hash->forward(tape, y);
            for (std::size_t i = 0; i < idx.size(); ++i) {
                const losses::SignVector b = losses::binarize(mu_sal.data().subspan(i * k, k));
                out.saliency.insert(out.saliency.end(), b.begin(), b.end());
            }
        }
    }
    return out;
}

void center_hash_outputs(const data::ImageSet& set, const Networks& nets, std::size_t batch) {
    if (nets.hash == nullptr) throw Error("center_hash_outputs: no hash network");
    Parameter* bias = nets.hash->output_bias();
    if (bias == nullptr) throw Error("center_hash_outputs: hash network has no output bias");
    const std::size_t k = nets.hash->bits();
    std::vector<double> mean(k, 0.0);
    std::size_t rows = 0;
    auto accumulate = [&](const Tensor& mu, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t t = 0; t < k; ++t) mean[t] += mu.data()[i * k + t];
        }
        rows += n;
    };
    for (std::size_t begin = 0; begin < set.size(); begin += batch) {
        const std::size_t end = std::min(set.size(), begin + batch);
        std::vector<std::size_t> idx(end - begin);
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = begin + i;
        const Tensor images = set.batch(idx);
        Tape tape(Tape::Mode::kInference);
        accumulate(nets.hash->forward(tape, images), idx.size());
        if (nets.attention != nullptr) {
            accumulate(nets.hash->forward(tape, nn::saliency_forward(tape, *nets.attention, images).images),
                       idx.size());
        }
    }
    if (rows == 0) return;
    auto values = bias->tensor.mutable_data();
    for (std::size_t t = 0; t < k; ++t) values[t] -= mean[t] / static_cast<double>(rows);
}

AttentionEpochStats train_attention_epoch(TrainState& state, const data::ImageSet& set, const TrainConfig& config) {
    if (state.nets.attention == nullptr) throw Error("train_attention_epoch: no attention network");
    require_targets(state, set);
    nn::AttentionModel& attention = *state.nets.attention;
    nn::HashModel& hash = *state.nets.hash;
    attention.set_trainable(true);
    hash.set_trainable(false);

    const std::size_t epoch = state.epoch + 1;
    const SgdOptions sgd{config.attention_rate(epoch), config.momentum, config.weight_decay};
    const losses::LossWeights weights = config.loss_weights();
    const std::size_t k = state.targets.bits;
    std::vector<Parameter*> params = params_of(attention);

    AttentionEpochStats stats;
    const auto batches = make_batches(set.size(), config.batch_size, state.rng);
    for (std::size_t b = 0; b < batches.size(); ++b) {
        const auto& idx = batches[b];
        const Tensor images = set.batch(idx);
        const losses::PairwiseLabelBatch pairs = losses::pairwise_labels(set.labels, idx);

        Tensor codes;
        {
            Tape frozen(Tape::Mode::kInference);
            codes = hash.forward(frozen, images);
        }
        Tape tape;
        const nn::SaliencyOutputs sal = nn::saliency_forward(tape, attention, images);
        losses::CodeBatch batch;
        batch.codes = codes;
        batch.saliency_codes = hash.forward(tape, sal.images);
        batch.saliency_targets = target_rows(state.targets.saliency, k, idx);
        batch.pairs = &pairs;
        const losses::ObjectiveTerms terms =
            losses::attention_objective(tape, batch, weights, config.attention_terms);
        require_finite(terms.total.item(), "attention", epoch, b);
        tape.backward(terms.total);
        sgd_step(params, sgd);

        stats.objective += terms.total.item();
        stats.saliency += terms.saliency;
        stats.semantic_saliency += terms.semantic_saliency;
        stats.quantization += terms.quantization;
    }
    const double n = static_cast<double>(batches.size());
    stats.objective /= n;
    stats.saliency /= n;
    stats.semantic_saliency /= n;
    stats.quantization /= n;
    hash.set_trainable(true);
    state.attention_history.push_back(stats);
    return stats;
}

HashingEpochStats train_hashing_epoch(TrainState& state, const data::ImageSet& set, const TrainConfig& config) {
    if (state.nets.hash == nullptr) throw Error("train_hashing_epoch: no hash network");
    require_targets(state, set);
    nn::AttentionModel* attention = state.nets.attention;
    nn::HashModel& hash = *state.nets.hash;
    if (attention != nullptr) attention->set_trainable(false);
    hash.set_trainable(true);

    const std::size_t epoch = state.epoch + 1;
    const SgdOptions sgd{config.hashing_rate(epoch), config.momentum, config.weight_decay};
    const losses::LossWeights weights = config.loss_weights();
    const std::size_t k = state.targets.bits;
    std::vector<Parameter*> params = params_of(hash);

    HashingEpochStats stats;
    const auto batches = make_batches(set.size(), config.batch_size, state.rng);
    for (std::size_t b = 0; b < batches.size(); ++b) {
        const auto& idx = batches[b];
        const Tensor images = set.batch(idx);
        const losses::PairwiseLabelBatch pairs = losses::pairwise_labels(set.labels, idx);

        Tensor saliency_images;
        if (attention != nullptr) {
            Tape frozen(Tape::Mode::kInference);
            saliency_images = nn::saliency_forward(frozen, *attention, images).images;
        }
        Tape tape;
        losses::CodeBatch batch;
        batch.codes = hash.forward(tape, images);
        batch.targets = target_rows(state.targets.original, k, idx);
        if (attention != nullptr) {
            batch.saliency_codes = hash.forward(tape, saliency_images);
            batch.saliency_targets = target_rows(state.targets.saliency, k, idx);
        }
        batch.pairs = &pairs;
        const losses::ObjectiveTerms terms = losses::hashing_objective(tape, batch, weights);
        require_finite(terms.total.item(), "hashing", epoch, b);
        tape.backward(terms.total);
        sgd_step(params, sgd);

        stats.objective += terms.total.item();
        stats.semantic_original += terms.semantic_original;
        stats.semantic_saliency += terms.semantic_saliency;
        stats.quantization += terms.quantization;
    }
    const double n = static_cast<double>(batches.size());
    stats.objective /= n;
    stats.semantic_original /= n;
    stats.semantic_saliency /= n;
    stats.quantization /= n;
    if (attention != nullptr) attention->set_trainable(true);
    state.hashing_history.push_back(stats);
    return stats;
}

EpochRecord run_epoch(TrainState& state, const data::ImageSet& set, const TrainConfig& config) {
    state.targets = compute_binary_targets(set, state.nets);
    ++state.target_refreshes;

    EpochRecord record;
    record.epoch = state.epoch + 1;
    if (state.nets.attention != nullptr) {
        const std::size_t passes = state.epoch == 0 ? config.warmup_attention_epochs : 1;
        AttentionEpochStats att;
        for (std::size_t p = 0; p < passes; ++p) att = train_attention_epoch(state, set, config);
        record.saliency = att.saliency;
        record.total_attention = att.objective;
    }
    const HashingEpochStats hs = train_hashing_epoch(state, set, config);
    record.semantic_original = hs.semantic_original;
    record.semantic_saliency = hs.semantic_saliency;
    record.quantization = hs.quantization;
    record.total_hashing = hs.objective;
    ++state.epoch;
    state.history.push_back(record);
    return record;
}

TrainResult alternating_train(const data::ImageSet& set, const TrainConfig& config, const EpochCallback& on_epoch) {
    config.validate();
    set.validate();
    if (set.shape != config.input) {
        throw ShapeError("training images are " + set.shape.str() + " but the config expects " + config.input.str());
    }
    TrainResult result;
    result.model = std::make_unique<nn::DsahModel>(config.model_config(), config.seed);
    // Shuffling draws from its own stream so that it does not depend on how
    // many values weight initialization consumed.
    TrainState state(Networks{result.model->attention(), &result.model->hash()},
                     config.seed ^ 0x9e3779b97f4a7c15ULL);
    if (config.center_codes && config.epochs > 0) center_hash_outputs(set, state.nets);
    for (std::size_t t = 0; t < config.epochs; ++t) {
        const EpochRecord record = run_epoch(state, set, config);
        if (on_epoch) on_epoch(record);
    }
    result.history = state.history;
    return result;
}

std::string history_csv(const std::vector<EpochRecord>& history) {
    std::string out = "epoch,sem_ori,sem_sal,sal,quant,total_attention,total_hashing\n";
    for (const EpochRecord& r : history) {
        out += std::to_string(r.epoch) + "," + format_double(r.semantic_original) + "," +
               format_double(r.semantic_saliency) + "," + format_double(r.saliency) + "," +
               format_double(r.quantization) + "," + format_double(r.total_attention) + "," +
               format_double(r.total_hashing) + "\n";
    }
    return out;
}

void write_history_csv(const std::filesystem::path& path, const std::vector<EpochRecord>& history) {
    io::write_file(path, history_csv(history));
}

std::vector<EpochRecord> read_history_csv(const std::filesystem::path& path) {
    std::istringstream in(io::read_file(path));
    std::string line;
    if (!std::getline(in, line) || line != "epoch,sem_ori,sem_sal,sal,quant,total_attention,total_hashing") {
        throw FormatError("history csv: unexpected header in " + path.string());
    }
    std::vector<EpochRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream row(line);
        EpochRecord r;
        char comma = 0;
        row >> r.epoch >> comma >> r.semantic_original >> comma >> r.semantic_saliency >> comma >> r.saliency >>
            comma >> r.quantization >> comma >> r.total_attention >> comma >> r.total_hashing;
        if (!row) throw FormatError("history csv: malformed row '" + line + "'");
        out.push_back(r);
    }
    return out;
}

}  // namespace dsah::train
