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
#include <charconv>
#include <cmath>

#include "dsah/cli/cli.hpp"
#include "dsah/common/error.hpp"

namespace dsah::cli {
std::uint64_t parse_unsigned(const std::string& key, const std::string& text) {
    std::uint64_t v = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        throw ConfigError("config: '" + key + "' expects a non-negative integer, got '" + text + "'");
    }
    return v;
}

double parse_real(const std::string& key, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) {
        throw ConfigError("config: '" + key + "' expects a real number, got '" + text + "'");
    }
    return v;
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& text) {
    std::vector<std::size_t> out;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t comma = std::min(text.find(',', begin), text.size());
        std::string item = text.substr(begin, comma - begin);
        item.erase(0, item.find_first_not_of(' '));
        item.erase(item.find_last_not_of(' ') + 1);
        out.push_back(parse_unsigned(key, item));
        begin = comma + 1;
    }
    return out;
}

namespace {

bool parse_bool(const std::string& key, const std::string& text) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError("config: '" + key + "' expects true or false, got '" + text + "'");
}

ImageShape parse_shape(const std::string& key, const std::string& text) {
    std::vector<std::size_t> dims;
    std::size_t begin = 0;
    while (begin <= text.size()) {
        const std::size_t x = std::min(text.find('x', begin), text.size());
        dims.push_back(parse_unsigned(key, text.substr(begin, x - begin)));
        begin = x + 1;
    }
    if (dims.size() != 3) throw ConfigError("config: '" + key + "' expects CxHxW, got '" + text + "'");
    return {dims[0], dims[1], dims[2]};
}

template <typename Fn>
void with(const KeyValues& values, const std::string& key, Fn&& fn) {
    if (const auto it = values.find(key); it != values.end()) fn(it->second);
}

}  // namespace

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys{
        // generator
        "data.classes", "data.train_per_class", "data.test_per_class", "data.input", "data.patch", "data.noise",
        "data.seed",
        // training
        "bits", "lambda", "alpha", "margin", "batch_size", "epochs", "lr_attention", "lr_hashing", "lr_decay",
        "lr_decay_every", "momentum", "weight_decay", "seed", "warmup_attention_epochs", "attention_channels",
        "hash_channels", "hash_hidden", "use_attention", "center_codes", "attention_semantic", "attention_saliency",
        // paths and evaluation
        "data", "model", "images", "queries", "index", "history", "out", "cutoff", "precision_at", "top",
    };
    return keys;
}

void reject_unknown_keys(const KeyValues& values, const std::string& origin) {
    const auto& keys = known_keys();
    for (const auto& [key, value] : values) {
        if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
            throw ConfigError(origin + ": unknown key '" + key + "'");
        }
    }
}

void apply_synthetic_keys(const KeyValues& values, data::SyntheticConfig& synth) {
    with(values, "data.classes", [&](const std::string& v) { synth.classes = parse_unsigned("data.classes", v); });
    with(values, "data.train_per_class",
         [&](const std::string& v) { synth.train_per_class = parse_unsigned("data.train_per_class", v); });
    with(values, "data.test_per_class",
         [&](const std::string& v) { synth.test_per_class = parse_unsigned("data.test_per_class", v); });
    with(values, "data.input", [&](const std::string& v) { synth.shape = parse_shape("data.input", v); });
    with(values, "data.patch", [&](const std::string& v) { synth.patch = parse_unsigned("data.patch", v); });
    with(values, "data.noise", [&](const std::string& v) { synth.noise = parse_real("data.noise", v); });
    with(values, "data.seed", [&](const std::string& v) { synth.seed = parse_unsigned("data.seed", v); });
}

void apply_train_keys(const KeyValues& values, train::TrainConfig& c) {
    auto u = [&](const char* key, std::size_t& field) {
        with(values, key, [&](const std::string& v) { field = parse_unsigned(key, v); });
    };
    auto r = [&](const char* key, double& field) {
        with(values, key, [&](const std::string& v) { field = parse_real(key, v); });
    };
    u("bits", c.bits);
    r("lambda", c.lambda);
    r("alpha", c.alpha);
    with(values, "margin", [&](const std::string& v) { c.margin = parse_real("margin", v); });
    u("batch_size", c.batch_size);
    u("epochs", c.epochs);
    r("lr_attention", c.lr_attention);
    r("lr_hashing", c.lr_hashing);
    r("lr_decay", c.lr_decay);
    u("lr_decay_every", c.lr_decay_every);
    r("momentum", c.momentum);
    r("weight_decay", c.weight_decay);
    with(values, "seed", [&](const std::string& v) { c.seed = parse_unsigned("seed", v); });
    u("warmup_attention_epochs", c.warmup_attention_epochs);
    with(values, "attention_channels",
         [&](const std::string& v) { c.attention_channels = parse_list("attention_channels", v); });
    with(values, "hash_channels", [&](const std::string& v) { c.hash_channels = parse_list("hash_channels", v); });
    u("hash_hidden", c.hash_hidden);
    with(values, "center_codes", [&](const std::string& v) { c.center_codes = parse_bool("center_codes", v); });
    with(values, "use_attention", [&](const std::string& v) { c.use_attention = parse_bool("use_attention", v); });
    with(values, "attention_semantic",
         [&](const std::string& v) { c.attention_terms.semantic = parse_bool("attention_semantic", v); });
    with(values, "attention_saliency",
         [&](const std::string& v) { c.attention_terms.saliency = parse_bool("attention_saliency", v); });
}

}  // namespace dsah::cli
