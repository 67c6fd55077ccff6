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

#include "dsah/data/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "dsah/common/binary_io.hpp"
#include "dsah/common/config_file.hpp"
#include "dsah/common/error.hpp"

namespace dsah::data {
namespace {

// Glyph patterns of distinct classes differ in at least this fraction of cells.
constexpr double kMinGlyphSeparation = 0.25;

std::vector<std::vector<std::uint8_t>> make_glyphs(const SyntheticConfig& synth, Rng& rng) {
    const std::size_t cells = synth.patch * synth.patch;
    const auto min_diff = static_cast<std::size_t>(kMinGlyphSeparation * static_cast<double>(cells));
    std::vector<std::vector<std::uint8_t>> glyphs;
    while (glyphs.size() < synth.classes) {
        std::vector<std::uint8_t> g(cells);
        for (auto& c : g) c = rng.uniform() < 0.5 ? 1 : 0;
        bool separated = true;
        for (const auto& other : glyphs) {
            std::size_t diff = 0;
            for (std::size_t i = 0; i < cells; ++i) diff += g[i] != other[i];
            separated = separated && diff >= min_diff;
        }
        if (separated) glyphs.push_back(std::move(g));
    }
    return glyphs;
}

// Hues evenly spaced around the wheel, offset by a random rotation.
std::vector<std::vector<double>> make_colors(const SyntheticConfig& synth, Rng& rng) {
    const double offset = rng.uniform(0.0, 2.0 * std::numbers::pi);
    std::vector<std::vector<double>> colors(synth.classes, std::vector<double>(synth.shape.channels));
    for (std::size_t k = 0; k < synth.classes; ++k) {
        const double hue = offset + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(synth.classes);
        for (std::size_t c = 0; c < synth.shape.channels; ++c) {
            const double phase = 2.0 * std::numbers::pi * static_cast<double>(c) / static_cast<double>(synth.shape.channels);
            colors[k][c] = 0.5 + 0.5 * std::cos(hue - phase);
        }
    }
    return colors;
}

// Shared texture family: a tinted base level, two random plane waves and
// per-pixel Gaussian noise.
void paint_background(const SyntheticConfig& synth, Rng& rng, std::span<double> image) {
    const ImageShape& s = synth.shape;
    const double base = rng.uniform(0.15, 0.35);
    std::vector<double> tint(s.channels);
    for (double& t : tint) t = rng.uniform(-0.05, 0.05);
    struct Wave {
        double fx, fy, phase, amplitude;
    };
    Wave waves[2];
    for (Wave& w : waves) {
        const double angle = rng.uniform(0.0, std::numbers::pi);
        const double freq = rng.uniform(0.1, 0.5);
        w = {freq * std::cos(angle), freq * std::sin(angle), rng.uniform(0.0, 2.0 * std::numbers::pi),
             rng.uniform(0.05, 0.15)};
    }
    for (std::size_t c = 0; c < s.channels; ++c) {
        for (std::size_t p = 0; p < s.height; ++p) {
            for (std::size_t q = 0; q < s.width; ++q) {
                double v = base + tint[c];
                for (const Wave& w : waves) {
                    v += w.amplitude * std::sin(w.fx * static_cast<double>(q) + w.fy * static_cast<double>(p) + w.phase);
                }
                v += synth.noise * rng.normal();
                image[(c * s.height + p) * s.width + q] = v;
            }
        }
    }
}

void stamp_glyph(const SyntheticConfig& synth, const std::vector<std::uint8_t>& glyph, const std::vector<double>& color,
                 std::size_t top,
                 std::size_t left, Rng& rng, std::span<double> image, std::span<std::uint8_t> mask) {
    const ImageShape& s = synth.shape;
    const double on = rng.uniform(0.85, 1.0);
    const double off = rng.uniform(0.0, 0.15);
    for (std::size_t i = 0; i < synth.patch; ++i) {
        for (std::size_t j = 0; j < synth.patch; ++j) {
            const bool ink = glyph[i * synth.patch + j] != 0;
            for (std::size_t c = 0; c < s.channels; ++c) {
                const double v = ink ? on * color[c] : off;
                image[(c * s.height + top + i) * s.width + left + j] = v + synth.noise * rng.normal();
            }
            mask[(top + i) * s.width + left + j] = 1;
        }
    }
}

ImageSet make_split(const SyntheticConfig& synth, const std::vector<std::vector<std::uint8_t>>& glyphs,
                    const std::vector<std::vector<double>>& colors,
                    std::size_t per_class, Rng& rng) {
    ImageSet set;
    set.shape = synth.shape;
    const std::size_t count = synth.classes * per_class;
    set.pixels.resize(count * synth.shape.numel());
    set.masks.assign(count * synth.shape.pixels(), 0);
    set.labels.resize(count);
    for (std::size_t n = 0; n < count; ++n) {
        const std::size_t label = n % synth.classes;
        std::span<double> image(set.pixels.data() + n * synth.shape.numel(), synth.shape.numel());
        std::span<std::uint8_t> mask(set.masks.data() + n * synth.shape.pixels(), synth.shape.pixels());
        paint_background(synth, rng, image);
        const std::size_t top = rng.below(synth.shape.height - synth.patch + 1);
        const std::size_t left = rng.below(synth.shape.width - synth.patch + 1);
        stamp_glyph(synth, glyphs[label], colors[label], top, left, rng, image, mask);
        for (double& v : image) v = std::clamp(v, 0.0, 1.0);
        set.labels[n] = {static_cast<std::uint32_t>(label)};
    }
    return set;
}

// Top-left corner of the (square) mask region.
std::pair<std::size_t, std::size_t> mask_origin(std::span<const std::uint8_t> mask, std::size_t width) {
    const auto it = std::find(mask.begin(), mask.end(), std::uint8_t{1});
    const auto idx = static_cast<std::size_t>(it - mask.begin());
    return {idx / width, idx % width};
}

std::vector<double> crop(const ImageSet& set, std::size_t n, std::size_t top, std::size_t left, std::size_t patch) {
    const ImageShape& s = set.shape;
    std::span<const double> img = set.image(n);
    std::vector<double> out;
    out.reserve(s.channels * patch * patch);
    for (std::size_t c = 0; c < s.channels; ++c) {
        for (std::size_t i = 0; i < patch; ++i) {
            for (std::size_t j = 0; j < patch; ++j) out.push_back(img[(c * s.height + top + i) * s.width + left + j]);
        }
    }
    return out;
}

double leave_one_out_accuracy(const std::vector<std::vector<double>>& features, const std::vector<std::uint32_t>& labels) {
    std::uint32_t classes = 0;
    for (std::uint32_t l : labels) classes = std::max(classes, l + 1);
    const std::size_t dims = features.front().size();
    std::vector<std::vector<double>> sums(classes, std::vector<double>(dims, 0.0));
    std::vector<std::size_t> counts(classes, 0);
    for (std::size_t n = 0; n < features.size(); ++n) {
        for (std::size_t d = 0; d < dims; ++d) sums[labels[n]][d] += features[n][d];
        ++counts[labels[n]];
    }
    std::size_t correct = 0;
    for (std::size_t n = 0; n < features.size(); ++n) {
        double best = std::numeric_limits<double>::infinity();
        std::uint32_t best_class = 0;
        for (std::uint32_t c = 0; c < classes; ++c) {
            const bool own = c == labels[n];
            const std::size_t cnt = counts[c] - (own ? 1 : 0);
            if (cnt == 0) continue;
            double dist = 0.0;
            for (std::size_t d = 0; d < dims; ++d) {
                const double centroid = (sums[c][d] - (own ? features[n][d] : 0.0)) / static_cast<double>(cnt);
                dist += (features[n][d] - centroid) * (features[n][d] - centroid);
            }
            if (dist < best) {
                best = dist;
                best_class = c;
            }
        }
        correct += best_class == labels[n];
    }
    return static_cast<double>(correct) / static_cast<double>(features.size());
}

std::string format_double(double v) {
    std::ostringstream ss;
    ss.precision(17);
    ss << v;
    return ss.str();
}

}  // namespace

void SyntheticConfig::validate() const {
    if (classes < 2) throw ConfigError("synthetic: need at least two classes");
    if (train_per_class == 0) throw ConfigError("synthetic: train_per_class must be positive");
    if (shape.channels == 0 || shape.height == 0 || shape.width == 0) throw ConfigError("synthetic: empty image shape");
    if (patch == 0 || patch > shape.height || patch > shape.width) {
        throw ConfigError("synthetic: patch " + std::to_string(patch) + " does not fit in " + shape.str());
    }
    if (!(noise >= 0.0)) throw ConfigError("synthetic: noise must be non-negative");
    // Glyph rejection sampling needs enough room for distinct patterns.
    if (patch * patch < 16 && classes > (std::size_t{1} << (patch * patch)) / 4) {
        throw ConfigError("synthetic: patch too small for " + std::to_string(classes) + " distinct glyphs");
    }
}

SyntheticDataset generate(const SyntheticConfig& synth) {
    synth.validate();
    Rng rng(synth.seed);
    SyntheticDataset ds;
    ds.synth = synth;
    ds.glyphs = make_glyphs(synth, rng);
    ds.colors = make_colors(synth, rng);
    ds.train = make_split(synth, ds.glyphs, ds.colors, synth.train_per_class, rng);
    ds.test = make_split(synth, ds.glyphs, ds.colors, synth.test_per_class, rng);
    ds.report = measure_discriminativeness(ds.train, synth.patch);
    return ds;
}

DiscriminativenessReport measure_discriminativeness(const ImageSet& set, std::size_t patch) {
    const ImageShape& s = set.shape;
    std::vector<std::vector<double>> on_patch, off_patch;
    std::vector<std::uint32_t> labels;
    for (std::size_t n = 0; n < set.size(); ++n) {
        const auto [top, left] = mask_origin(set.mask(n), s.width);
        on_patch.push_back(crop(set, n, top, left, patch));
        // Whichever opposite corner is disjoint from the glyph.
        const bool use_top_left = top >= patch || left >= patch;
        const std::size_t bt = use_top_left ? 0 : s.height - patch;
        const std::size_t bl = use_top_left ? 0 : s.width - patch;
        off_patch.push_back(crop(set, n, bt, bl, patch));
        labels.push_back(set.labels[n].front());
    }
    return {leave_one_out_accuracy(on_patch, labels), leave_one_out_accuracy(off_patch, labels)};
}

double saliency_iou(std::span<const double> map, std::span<const std::uint8_t> mask, double threshold) {
    if (map.size() != mask.size()) {
        throw ShapeError("saliency_iou: map has " + std::to_string(map.size()) + " pixels, mask " +
                         std::to_string(mask.size()));
    }
    if (!(threshold > 0.0 && threshold < 1.0)) throw ConfigError("saliency_iou: threshold must lie in (0, 1)");
    std::size_t inter = 0, uni = 0;
    for (std::size_t i = 0; i < map.size(); ++i) {
        const bool pred = map[i] >= threshold;
        const bool truth = mask[i] != 0;
        inter += pred && truth;
        uni += pred || truth;
    }
    return uni == 0 ? 1.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

double chance_iou(const ImageSet& set, std::size_t patch, std::size_t samples, Rng& rng) {
    const ImageShape& s = set.shape;
    if (set.size() == 0 || samples == 0) return 0.0;
    std::vector<std::uint8_t> placed(s.pixels());
    std::vector<double> as_map(s.pixels());
    double total = 0.0;
    for (std::size_t t = 0; t < samples; ++t) {
        const std::size_t n = t % set.size();
        const std::size_t top = rng.below(s.height - patch + 1);
        const std::size_t left = rng.below(s.width - patch + 1);
        std::fill(as_map.begin(), as_map.end(), 0.0);
        for (std::size_t i = 0; i < patch; ++i) {
            for (std::size_t j = 0; j < patch; ++j) as_map[(top + i) * s.width + left + j] = 1.0;
        }
        total += saliency_iou(as_map, set.mask(n), 0.5);
    }
    return total / static_cast<double>(samples);
}

void write_dataset(const std::filesystem::path& dir, const SyntheticDataset& dataset) {
    const SyntheticConfig& s = dataset.synth;
    std::map<std::string, std::string> manifest{
        {"kind", "synthetic"},
        {"classes", std::to_string(s.classes)},
        {"train_per_class", std::to_string(s.train_per_class)},
        {"test_per_class", std::to_string(s.test_per_class)},
        {"input", s.shape.str()},
        {"patch", std::to_string(s.patch)},
        {"noise", format_double(s.noise)},
        {"seed", std::to_string(s.seed)},
        {"train", "train.bin"},
        {"test", "test.bin"},
        {"patch_accuracy", format_double(dataset.report.patch_accuracy)},
        {"background_accuracy", format_double(dataset.report.background_accuracy)},
    };
    write_image_set(dir / "train.bin", dataset.train);
    write_image_set(dir / "test.bin", dataset.test);
    io::write_file(dir / "manifest.txt", format_key_values(manifest));
}

DatasetFiles read_dataset(const std::filesystem::path& dir) {
    DatasetFiles files;
    files.manifest = read_key_value_file(dir / "manifest.txt");
    auto file_for = [&](const std::string& key) {
        auto it = files.manifest.find(key);
        if (it == files.manifest.end()) throw FormatError("manifest: missing '" + key + "'");
        return dir / it->second;
    };
    files.train = read_image_set(file_for("train"));
    files.test = read_image_set(file_for("test"));
    if (files.train.shape != files.test.shape) {
        throw ShapeError("dataset: train " + files.train.shape.str() + " and test " + files.test.shape.str() +
                         " shapes differ");
    }
    return files;
}

}  // namespace dsah::data
