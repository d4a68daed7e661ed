// Copyright 2026 the jpdkit authors
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

namespace jpd {

// Base class for all toolkit errors.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid numeric input (negative frequency, non-finite value, ...).
class domain_error : public error {
public:
    explicit domain_error(const std::string& msg) : error(msg) {}
};

// Not enough (or inconsistent) data to perform an estimate.
class data_error : public error {
public:
    explicit data_error(const std::string& msg) : error(msg) {}
};

// Audio that cannot be analyzed: silence, unvoiced, too short, unreadable.
class audio_error : public error {
public:
    explicit audio_error(const std::string& msg) : error(msg) {}
};

}  // namespace jpd
