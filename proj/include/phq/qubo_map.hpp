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

// QUBO problems C(s) = -1/2 s^T K s over s in {0,1}^N, the spectral mapping
// K = A^T A onto a real transform matrix A, and the exhaustive oracle.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>

#include <nlohmann/json_fwd.hpp>

#include "phq/types.hpp"

namespace phq {

/// Symmetric weight matrix K (checked to 1e-12 absolute).
class QuboProblem {
   public:
    explicit QuboProblem(RealMatrix k);

    const RealMatrix& weights() const noexcept { return k_; }
    std::size_t size() const noexcept { return static_cast<std::size_t>(k_.rows()); }

   private:
    RealMatrix k_;
};

/// Real OVMM matrix A; entries must be finite.
class TransformMatrix {
   public:
    explicit TransformMatrix(RealMatrix a);

    const RealMatrix& matrix() const noexcept { return a_; }
    std::size_t rows() const noexcept { return static_cast<std::size_t>(a_.rows()); }
    std::size_t cols() const noexcept { return static_cast<std::size_t>(a_.cols()); }

    RealVector apply(const BinaryState& s) const;

   private:
    RealMatrix a_;
};

/// K = Q^T D Q. Rows of `eigenvectors` are the eigenvectors, ordered with
/// descending eigenvalues.
struct SpectralData {
    RealVector eigenvalues;
    RealMatrix eigenvectors;
};

struct Decomposition {
    SpectralData spectral;
    TransformMatrix transform;
};

struct GroundTruth {
    BinaryState s_min;
    double c_min = 0.0;
};

double cost(const QuboProblem& p, const BinaryState& s);

/// Eigenvalues at or above -1e-9 * max(1, lambda_max) are clamped to zero;
/// anything lower throws NotPsdError. A = sqrt(D) * Q.
Decomposition decompose(const QuboProblem& p);

/// K' = K + c I with c = max(0, -lambda_min). For binary s,
/// C_K(s) = C_K'(s) + (c/2) * |s|, see `shift_correction`.
struct ShiftedProblem {
    QuboProblem shifted;
    double shift = 0.0;
};

ShiftedProblem shift_to_psd(const QuboProblem& p);
double shift_correction(double shift, const BinaryState& s);

/// K = A^T A.
QuboProblem problem_from_transform(const TransformMatrix& a);

/// C_exp = -1/2 * sum_i I_BPD_i^2.
double cost_from_readout(const ReadoutVector& r);

inline constexpr std::size_t kMaxBruteForceDim = 24;

/// Exhaustive search over all 2^n states; the lowest state index wins ties.
GroundTruth brute_force_min(const QuboProblem& p);

/// Number of states with C(s) < threshold; enumerates like brute_force_min.
std::uint64_t count_states_below(const QuboProblem& p, double threshold);

// Problem file: {"n": int, "k": [row-major values]}.
nlohmann::json problem_to_json(const QuboProblem& p);
QuboProblem problem_from_json(const nlohmann::json& j);
void save_problem(const QuboProblem& p, const std::filesystem::path& path);
QuboProblem load_problem(const std::filesystem::path& path);

/// FNV-1a over the raw matrix bytes, used to tie a ground-truth cache to
/// the problem it was computed for.
std::uint64_t problem_fingerprint(const QuboProblem& p);

nlohmann::json ground_truth_to_json(const GroundTruth& gt, const QuboProblem& p);
/// Throws IoError if the cached entry belongs to a different problem.
GroundTruth ground_truth_from_json(const nlohmann::json& j, const QuboProblem& p);

}  // namespace phq
