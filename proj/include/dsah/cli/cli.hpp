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

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "dsah/data/synthetic.hpp"
#include "dsah/trainer/config.hpp"

namespace dsah::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kMissingFile = 2,
    kMalformedFile = 3,
    kShapeMismatch = 4,
    kBadConfig = 5,
    kNumeric = 6,
};

using KeyValues = std::map<std::string, std::string>;

/// Throw ConfigError naming `key` on malformed text.
std::uint64_t parse_unsigned(const std::string& key, const std::string& text);
double parse_real(const std::string& key, const std::string& text);
/// Comma separated non-negative integers.
std::vector<std::size_t> parse_list(const std::string& key, const std::string& text);

/// Every key a run config may contain. Generator keys carry a "data."
/// prefix; training keys are bare; the rest name input and output paths.
const std::vector<std::string>& known_keys();

/// Throws ConfigError on the first key not in known_keys().
void reject_unknown_keys(const KeyValues& values, const std::string& origin);

/// Applies the "data." keys on top of `synth`.
void apply_synthetic_keys(const KeyValues& values, data::SyntheticConfig& synth);

/// Applies the training keys on top of `config`.
void apply_train_keys(const KeyValues& values, train::TrainConfig& config);

/// Entry point. Returns an ExitCode; diagnostics go to `err` as one line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace dsah::cli
