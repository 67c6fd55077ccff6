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
#include <span>
#include <vector>

#include "dsah/autodiff/ops.hpp"
#include "dsah/common/labels.hpp"

namespace dsah::losses {

/// Code entries in {-1, +1}.
using SignVector = std::vector<std::int8_t>;

/// Pairwise similarity over all unordered pairs (i < j) of a mini-batch.
/// `first`/`second` index positions within the batch.
struct PairwiseLabelBatch {
    std::vector<std::size_t> first;
    std::vector<std::size_t> second;
    std::vector<double> similarity;

    std::size_t size() const { return similarity.size(); }
};

/// S_ij = 1 iff the label sets of batch[i] and batch[j] intersect.
/// Throws Error if any referenced image has an empty label set.
PairwiseLabelBatch pairwise_labels(std::span<const LabelSet> labels, std::span<const std::size_t> batch);

/// (a . b + k) / (2k). Throws ShapeError on length mismatch.
double pair_estimate(std::span<const double> a, std::span<const double> b, std::size_t k);

/// (s - pair_estimate(a, b, k))^2
double pair_distance(std::span<const double> a, std::span<const double> b, double s, std::size_t k);

/// sign with sign(0) = +1.
SignVector binarize(std::span<const double> values);

// Tensor forms. `codes` is [B, k]; results are differentiable in the codes.

/// Per-pair estimates [P].
Tensor pair_estimates(Tape& tape, const Tensor& codes, const PairwiseLabelBatch& pairs);

/// Per-pair d_ij = (S_ij - estimate_ij)^2, [P].
Tensor pair_distances(Tape& tape, const Tensor& codes, const PairwiseLabelBatch& pairs);

/// Mean of d_ij over pairs. Throws Error on an empty pair set.
Tensor semantic_loss(Tape& tape, const Tensor& codes, const PairwiseLabelBatch& pairs);

/// Mean over pairs of max(m - d_ij + d'_ij, 0), where d' is measured on the
/// saliency-image codes. Throws ConfigError if margin <= 0.
Tensor saliency_loss(Tape& tape, const Tensor& codes, const Tensor& saliency_codes,
                     const PairwiseLabelBatch& pairs, double margin);

/// Mean over rows of ||codes_i - targets_i||_1. Throws Error if a target is
/// not exactly +-1.
Tensor quantization_loss(Tape& tape, const Tensor& codes, const Tensor& targets);

/// [rows, k] tensor of +-1 values.
Tensor sign_tensor(std::span<const SignVector> rows);

struct LossWeights {
    double lambda = 30.0;
    double alpha = 40.0;
    double margin = 3.0;

    /// Throws ConfigError unless all three are positive.
    void validate() const;
};

/// Inputs of one mini-batch. `saliency_codes` (and `saliency_targets`) are
/// undefined in the no-attention configuration.
struct CodeBatch {
    Tensor codes;
    Tensor saliency_codes;
    Tensor targets;
    Tensor saliency_targets;
    const PairwiseLabelBatch* pairs = nullptr;
};

struct ObjectiveTerms {
    Tensor total;
    double semantic_original = 0.0;
    double semantic_saliency = 0.0;
    double saliency = 0.0;
    double quantization = 0.0;
};

/// lambda * (J_sem(mu) + J_sem(mu')) + J_reg(mu, b) + J_reg(mu', b').
ObjectiveTerms hashing_objective(Tape& tape, const CodeBatch& batch, const LossWeights& weights);

/// Which terms drive the attention network; the default is the full method.
struct AttentionTerms {
    bool semantic = true;
    bool saliency = true;
};

/// alpha * J_sal + lambda * J_sem(mu') + J_reg(mu', b').
ObjectiveTerms attention_objective(Tape& tape, const CodeBatch& batch, const LossWeights& weights,
                                   AttentionTerms terms = {});

}  // namespace dsah::losses
