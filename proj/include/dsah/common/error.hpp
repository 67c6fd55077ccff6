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

#include <stdexcept>
#include <string>

namespace dsah {

// Root of every error thrown by the library. The subclasses map onto
// distinct CLI exit codes.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

class ShapeError : public Error {
 public:
    using Error::Error;
};

class ConfigError : public Error {
 public:
    using Error::Error;
};

// Malformed file content: bad magic, unknown version, truncation.
class FormatError : public Error {
 public:
    using Error::Error;
};

// Missing or unreadable/unwritable file.
class IoError : public Error {
 public:
    using Error::Error;
};

// Non-finite value encountered during training.
class NumericError : public Error {
 public:
    using Error::Error;
};

}  // namespace dsah
