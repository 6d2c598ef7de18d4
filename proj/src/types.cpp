// Copyright 2026 The phq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "phq/types.hpp"

#include <algorithm>

#include "phq/errors.hpp"

namespace phq {

BinaryState::BinaryState(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        if (bits_[i] > 1) {
            throw DimensionError("binary state element " + std::to_string(i) + " is not 0 or 1");
        }
    }
}

BinaryState BinaryState::from_string(std::string_view text) {
    std::vector<std::uint8_t> bits;
    bits.reserve(text.size());
    for (char c : text) {
        if (c != '0' && c != '1') {
            throw DimensionError("binary state string may contain only '0' and '1'");
        }
        bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return BinaryState(std::move(bits));
}

BinaryState BinaryState::from_index(std::uint64_t index, std::size_t n) {
    if (n > 64) {
        throw DimensionError("index encoding supports at most 64 bits");
    }
    std::vector<std::uint8_t> bits(n);
    for (std::size_t i = 0; i < n; ++i) {
        bits[i] = static_cast<std::uint8_t>((index >> (n - 1 - i)) & 1U);
    }
    return BinaryState(std::move(bits));
}

void BinaryState::flip(std::size_t i) {
    bits_.at(i) ^= 1U;
}

std::size_t BinaryState::weight() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::uint64_t BinaryState::index() const {
    if (bits_.size() > 64) {
        throw DimensionError("index encoding supports at most 64 bits");
    }
    std::uint64_t value = 0;
    for (auto b : bits_) {
        value = (value << 1) | b;
    }
    return value;
}

RealVector BinaryState::to_vector() const {
    RealVector v(static_cast<Eigen::Index>(bits_.size()));
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        v[static_cast<Eigen::Index>(i)] = bits_[i];
    }
    return v;
}

std::string BinaryState::to_string() const {
    std::string out(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) {
        out[i] = static_cast<char>('0' + bits_[i]);
    }
    return out;
}

std::size_t hamming_distance(const BinaryState& a, const BinaryState& b) {
    if (a.size() != b.size()) {
        throw DimensionError("hamming distance of states with different lengths");
    }
    std::size_t d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d += static_cast<std::size_t>(a[i] != b[i]);
    }
    return d;
}

}  // namespace phq
