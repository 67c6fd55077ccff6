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
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "dsah/common/rng.hpp"
#include "dsah/data/dataset.hpp"

namespace dsah::data {

/// Fine-grained toy problem: every class shares one background texture
/// family and differs only in a small glyph stamped at a random location.
struct SyntheticConfig {
    std::size_t classes = 8;
    std::size_t train_per_class = 40;
    std::size_t test_per_class = 10;
    ImageShape shape{3, 32, 32};
    std::size_t patch = 8;
    double noise = 0.05;
    std::uint64_t seed = 7;

    /// Throws ConfigError (patch must fit, at least two classes, ...).
    void validate() const;
};

/// Leave-one-out nearest-centroid accuracy on the glyph crop versus an
/// equally sized background crop.
struct DiscriminativenessReport {
    double patch_accuracy = 0.0;
    double background_accuracy = 0.0;

    double gap() const { return patch_accuracy - background_accuracy; }
};

struct SyntheticDataset {
    SyntheticConfig synth;
    ImageSet train;
    ImageSet test;
    /// Per-class glyph patterns, patch*patch values in {0, 1}.
    std::vector<std::vector<std::uint8_t>> glyphs;
    /// Per-class ink colour, one level per channel in [0, 1].
    std::vector<std::vector<double>> colors;
    /// Measured on the training split at generation time.
    DiscriminativenessReport report;
};

SyntheticDataset generate(const SyntheticConfig& synth);

DiscriminativenessReport measure_discriminativeness(const ImageSet& set, std::size_t patch);

/// IoU between {map >= threshold} and the mask. Both empty gives 1.
/// Throws ShapeError on size mismatch, ConfigError unless 0 < threshold < 1.
double saliency_iou(std::span<const double> map, std::span<const std::uint8_t> mask, double threshold);

/// Mean IoU between each image's mask and a uniformly placed
/// patch x patch square, over `samples` draws cycling through the images.
double chance_iou(const ImageSet& set, std::size_t patch, std::size_t samples, Rng& rng);

// Dataset directory: manifest.txt (key = value) next to train.bin / test.bin.
void write_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset);

struct DatasetFiles {
    std::map<std::string, std::string> manifest;
    ImageSet train;
    ImageSet test;
};

DatasetFiles read_dataset(const std::filesystem::path& dir);

}  // namespace dsah::data
