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

#include "dsah/losses/losses.hpp"

#include "dsah/common/error.hpp"
#include "dsah/kernels/kernels.hpp"

namespace dsah::losses {
namespace {

void require_codes(std::string_view who, const Tensor& codes) {
    if (!codes.defined() || codes.rank() != 2 || codes.dim(1) == 0) {
        throw ShapeError(std::string(who) + ": codes must be [B, k] with k > 0, got " +
                         (codes.defined() ? shape_str(codes.shape()) : std::string("<undefined>")));
    }
}

void require_pairs(std::string_view who, const PairwiseLabelBatch* pairs) {
    if (pairs == nullptr || pairs->size() == 0) throw Error(std::string(who) + ": empty pair set");
}

Tensor similarity_tensor(const PairwiseLabelBatch& pairs) { return Tensor({pairs.size()}, pairs.similarity); }

}  // namespace

PairwiseLabelBatch pairwise_labels(std::span<const LabelSet> labels, std::span<const std::size_t> batch) {
    for (std::size_t idx : batch) {
        if (idx >= labels.size()) throw Error("pairwise_labels: image index " + std::to_string(idx) + " out of range");
        if (labels[idx].empty()) throw Error("pairwise_labels: image " + std::to_string(idx) + " has no label");
    }
    PairwiseLabelBatch out;
    for (std::size_t i = 0; i < batch.size(); ++i) {
        for (std::size_t j = i + 1; j < batch.size(); ++j) {
            out.first.push_back(i);
            out.second.push_back(j);
            out.similarity.push_back(labels_intersect(labels[batch[i]], labels[batch[j]]) ? 1.0 : 0.0);
        }
    }
    return out;
}

double pair_estimate(std::span<const double> a, std::span<const double> b, std::size_t k) {
    if (a.size() != k || b.size() != k) {
        throw ShapeError("pair_estimate: code lengths " + std::to_string(a.size()) + " and " +
                         std::to_string(b.size()) + " for k = " + std::to_string(k));
    }
    const double kd = static_cast<double>(k);
    return (kernels::dot(a, b) + kd) / (2.0 * kd);
}

double pair_distance(std::span<const double> a, std::span<const double> b, double s, std::size_t k) {
    const double diff = s - pair_estimate(a, b, k);
    return diff * diff;
}

SignVector binarize(std::span<const double> values) {
    SignVector out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] < 0.0 ? -1 : 1;
    return out;
}

Tensor pair_estimates(Tape& tape, const Tensor& codes, const PairwiseLabelBatch& pairs) {
    require_codes("pair_estimates", codes);
    const double k = static_cast<double>(codes.dim(1));
    Tensor left = ops::gather_rows(tape, codes, pairs.first);
    Tensor right = ops::gather_rows(tape, codes, pairs.second);
    Tensor ip = ops::inner_product(tape, left, right);
    const Tensor denominator(ip.shape(), std::vector<double>(ip.numel(), 2.0 * k));
    return ops::div(tape, ops::add_scalar(tape, ip, k), denominator);
}

Tensor pair_distances(Tape& tape, const Tensor& codes, const PairwiseLabelBatch& pairs) {
    Tensor estimate = pair_estimates(tape, codes, pairs);
    return ops::square(tape, ops::sub(tape, similarity_tensor(pairs), estimate));
}

Tensor semantic_loss(Tape& tape, const Tensor& codes, const PairwiseLabelBatch& pairs) {
    require_pairs("semantic_loss", &pairs);
    return ops::mean(tape, pair_distances(tape, codes, pairs));
}

Tensor saliency_loss(Tape& tape, const Tensor& codes, const Tensor& saliency_codes,
                     const PairwiseLabelBatch& pairs, double margin) {
    if (!(margin > 0.0)) throw ConfigError("saliency_loss: margin must be positive");
    require_pairs("saliency_loss", &pairs);
    require_codes("saliency_loss", codes);
    require_codes("saliency_loss", saliency_codes);
    if (codes.shape() != saliency_codes.shape()) {
        throw ShapeError("saliency_loss: code shapes " + shape_str(codes.shape()) + " and " +
                         shape_str(saliency_codes.shape()) + " differ");
    }
    Tensor d = pair_distances(tape, codes, pairs);
    Tensor d_sal = pair_distances(tape, saliency_codes, pairs);
    Tensor slack = ops::add_scalar(tape, ops::sub(tape, d_sal, d), margin);
    return ops::mean(tape, ops::hinge(tape, slack));
}

Tensor quantization_loss(Tape& tape, const Tensor& codes, const Tensor& targets) {
    require_codes("quantization_loss", codes);
    if (!targets.defined() || targets.shape() != codes.shape()) {
        throw ShapeError("quantization_loss: targets " +
                         (targets.defined() ? shape_str(targets.shape()) : std::string("<undefined>")) +
                         " do not match codes " + shape_str(codes.shape()));
    }
    for (double v : targets.data()) {
        if (v != 1.0 && v != -1.0) throw Error("quantization_loss: targets must be +-1, found " + std::to_string(v));
    }
    Tensor total = ops::sum(tape, ops::abs(tape, ops::sub(tape, codes, targets)));
    return ops::mul_scalar(tape, total, 1.0 / static_cast<double>(codes.dim(0)));
}

Tensor sign_tensor(std::span<const SignVector> rows) {
    const std::size_t k = rows.empty() ? 0 : rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * k);
    for (const SignVector& r : rows) {
        if (r.size() != k) throw ShapeError("sign_tensor: ragged rows");
        for (std::int8_t v : r) values.push_back(static_cast<double>(v));
    }
    return Tensor({rows.size(), k}, std::move(values));
}

void LossWeights::validate() const {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (!(alpha > 0.0)) throw ConfigError("alpha must be positive");
    if (!(margin > 0.0)) throw ConfigError("margin must be positive");
}

ObjectiveTerms hashing_objective(Tape& tape, const CodeBatch& batch, const LossWeights& weights) {
    require_pairs("hashing_objective", batch.pairs);
    ObjectiveTerms out;
    Tensor sem = semantic_loss(tape, batch.codes, *batch.pairs);
    Tensor quant = quantization_loss(tape, batch.codes, batch.targets);
    out.semantic_original = sem.item();
    out.quantization = quant.item();
    Tensor total = ops::add(tape, ops::mul_scalar(tape, sem, weights.lambda), quant);
    if (batch.saliency_codes.defined()) {
        Tensor sem_sal = semantic_loss(tape, batch.saliency_codes, *batch.pairs);
        Tensor quant_sal = quantization_loss(tape, batch.saliency_codes, batch.saliency_targets);
        out.semantic_saliency = sem_sal.item();
        out.quantization += quant_sal.item();
        total = ops::add(tape, total, ops::add(tape, ops::mul_scalar(tape, sem_sal, weights.lambda), quant_sal));
    }
    out.total = total;
    return out;
}

ObjectiveTerms attention_objective(Tape& tape, const CodeBatch& batch, const LossWeights& weights,
                                   AttentionTerms terms) {
    require_pairs("attention_objective", batch.pairs);
    ObjectiveTerms out;
    Tensor total = quantization_loss(tape, batch.saliency_codes, batch.saliency_targets);
    out.quantization = total.item();
    if (terms.saliency) {
        Tensor sal = saliency_loss(tape, batch.codes, batch.saliency_codes, *batch.pairs, weights.margin);
        out.saliency = sal.item();
        total = ops::add(tape, total, ops::mul_scalar(tape, sal, weights.alpha));
    }
    if (terms.semantic) {
        Tensor sem_sal = semantic_loss(tape, batch.saliency_codes, *batch.pairs);
        out.semantic_saliency = sem_sal.item();
        total = ops::add(tape, total, ops::mul_scalar(tape, sem_sal, weights.lambda));
    }
    out.total = total;
    return out;
}

}  // namespace dsah::losses
