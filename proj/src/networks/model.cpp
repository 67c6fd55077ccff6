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

#include "dsah/networks/model.hpp"

#include <sstream>

#include "dsah/common/error.hpp"

namespace dsah::nn {
namespace {

std::string join(const std::vector<std::size_t>& values) {
    std::string out;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ",";
        out += std::to_string(values[i]);
    }
    return out;
}

std::size_t parse_size(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    unsigned long long v = 0;
    try {
        v = std::stoull(text, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos == 0 || pos != text.size()) throw FormatError("checkpoint: bad value for '" + key + "': " + text);
    return static_cast<std::size_t>(v);
}

std::vector<std::size_t> parse_list(const std::string& key, const std::string& text, char sep) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(parse_size(key, item));
    return out;
}

const std::string& require_key(const Checkpoint& c, const std::string& key) {
    auto it = c.metadata.find(key);
    if (it == c.metadata.end()) throw FormatError("checkpoint: missing metadata '" + key + "'");
    return it->second;
}

}  // namespace

DsahModel::DsahModel(const ModelConfig& config, std::uint64_t seed) : config_(config) {
    Rng rng(seed);
    if (config_.use_attention) attention_ = std::make_unique<AttentionNet>(config_.input, config_.attention, rng);
    hash_ = std::make_unique<HashNet>(config_.input, config_.hash_options(), rng);
}

Checkpoint DsahModel::to_checkpoint() const {
    Checkpoint c;
    c.metadata["model"] = "dsah";
    c.metadata["bits"] = std::to_string(config_.bits);
    c.metadata["input"] = config_.input.str();
    c.metadata["use_attention"] = config_.use_attention ? "1" : "0";
    c.metadata["attention.channels"] = join(config_.attention.channels);
    c.metadata["hash.channels"] = join(config_.hash_channels);
    c.metadata["hash.hidden"] = std::to_string(config_.hash_hidden);
    if (attention_) export_parameters(*attention_, "attention.", c);
    export_parameters(*hash_, "hash.", c);
    return c;
}

std::unique_ptr<DsahModel> DsahModel::from_checkpoint(const Checkpoint& checkpoint) {
    if (require_key(checkpoint, "model") != "dsah") throw FormatError("checkpoint: not a dsah model");
    ModelConfig config;
    config.bits = parse_size("bits", require_key(checkpoint, "bits"));
    const std::vector<std::size_t> input = parse_list("input", require_key(checkpoint, "input"), 'x');
    if (input.size() != 3) throw FormatError("checkpoint: input must be CxHxW");
    config.input = ImageShape{input[0], input[1], input[2]};
    const std::string& flag = require_key(checkpoint, "use_attention");
    if (flag != "0" && flag != "1") throw FormatError("checkpoint: bad use_attention flag");
    config.use_attention = flag == "1";
    config.attention.channels = parse_list("attention.channels", require_key(checkpoint, "attention.channels"), ',');
    config.hash_channels = parse_list("hash.channels", require_key(checkpoint, "hash.channels"), ',');
    config.hash_hidden = parse_size("hash.hidden", require_key(checkpoint, "hash.hidden"));

    std::unique_ptr<DsahModel> model;
    try {
        model = std::make_unique<DsahModel>(config, 0);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("checkpoint: invalid architecture: ") + e.what());
    }
    std::size_t expected = model->hash_->parameters().size();
    if (model->attention_) {
        import_parameters(*model->attention_, "attention.", checkpoint);
        expected += model->attention_->parameters().size();
    }
    import_parameters(*model->hash_, "hash.", checkpoint);
    if (checkpoint.arrays.size() != expected) {
        throw FormatError("checkpoint: " + std::to_string(checkpoint.arrays.size()) + " arrays, architecture has " +
                          std::to_string(expected));
    }
    return model;
}

void DsahModel::save(const std::filesystem::path& path) const { write_checkpoint(path, to_checkpoint()); }

std::unique_ptr<DsahModel> DsahModel::load(const std::filesystem::path& path) {
    return from_checkpoint(read_checkpoint(path));
}

void export_parameters(const Module& module, const std::string& prefix, Checkpoint& out) {
    for (const Parameter* p : module.parameters()) {
        std::span<const double> v = p->tensor.data();
        out.arrays.push_back(NamedArray{prefix + p->name, p->tensor.shape(), {v.begin(), v.end()}});
    }
}

void import_parameters(Module& module, const std::string& prefix, const Checkpoint& in) {
    for (Parameter* p : module.parameters()) {
        const NamedArray* a = in.find(prefix + p->name);
        if (a == nullptr) throw FormatError("checkpoint: missing parameter '" + prefix + p->name + "'");
        if (a->shape != p->tensor.shape()) {
            throw ShapeError("checkpoint: parameter '" + a->name + "' has shape " + shape_str(a->shape) +
                             ", architecture expects " + shape_str(p->tensor.shape()));
        }
        std::copy(a->values.begin(), a->values.end(), p->tensor.mutable_data().begin());
        std::fill(p->momentum.begin(), p->momentum.end(), 0.0);
    }
}

}  // namespace dsah::nn
