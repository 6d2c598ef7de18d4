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

#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace phq {

using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

using Rng = std::mt19937_64;

/// SplitMix64 finalizer over (master, index). Used to give every run of a
/// campaign an independent stream that does not depend on scheduling order.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// A vector s in {0,1}^N. Element i is stored as exactly 0 or 1.
///
/// The integer index of a state treats s_0 as the most significant bit, so
/// ordering by index is the same as lexicographic ordering of the bits.
class BinaryState {
   public:
    BinaryState() = default;
    explicit BinaryState(std::size_t n) : bits_(n, 0) {}
    explicit BinaryState(std::vector<std::uint8_t> bits);

    static BinaryState from_string(std::string_view text);
    static BinaryState from_index(std::uint64_t index, std::size_t n);

    std::size_t size() const noexcept { return bits_.size(); }
    std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
    std::span<const std::uint8_t> bits() const noexcept { return bits_; }

    void flip(std::size_t i);
    std::size_t weight() const noexcept;
    std::uint64_t index() const;

    RealVector to_vector() const;
    std::string to_string() const;

    friend bool operator==(const BinaryState&, const BinaryState&) = default;

   private:
    std::vector<std::uint8_t> bits_;
};

std::size_t hamming_distance(const BinaryState& a, const BinaryState& b);

/// Balanced-photodetector signals I_BPD, one signed value per channel.
struct ReadoutVector {
    RealVector i_bpd;

    std::size_t size() const noexcept { return static_cast<std::size_t>(i_bpd.size()); }
};

}  // namespace phq
