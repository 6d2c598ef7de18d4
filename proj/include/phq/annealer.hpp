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

// Annealing-style search driven by a cost evaluator. Each iteration draws a
// flip count m from a beta-dependent law, toggles m random bits, evaluates
// the proposal and accepts it with probability min(1, exp(beta * dC)) where
// dC = C_previous - C_new (improvements are always accepted). beta is quoted
// relative to |C| of the problem, estimated by a short warm-up, so the
// schedule does not depend on the arbitrary optical scale factor.

#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "phq/mesh_model.hpp"
#include "phq/noise_channel.hpp"
#include "phq/qubo_map.hpp"
#include "phq/run_record.hpp"
#include "phq/types.hpp"

namespace phq {

enum class Ramp { linear, geometric };

struct AnnealSchedule {
    double beta_start = 20.0;
    double beta_end = 2000.0;
    std::size_t n_iterations = 1000;
    Ramp ramp = Ramp::geometric;
    /// Random states evaluated before the run to fix the cost scale. Ignored
    /// when `cost_scale` is set.
    std::size_t warmup_samples = 64;
    std::optional<double> cost_scale;

    void validate() const;
    /// Nondecreasing in t; beta_start at t = 0, beta_end at the last iteration.
    double beta_at(std::size_t t) const;
};

enum class FlipLawKind { geometric_truncated, exponential_mean };

struct FlipLaw {
    FlipLawKind law = FlipLawKind::geometric_truncated;
    double scale = 1.0;
};

/// m = 1 + X with X in [0, n-1].
///  geometric_truncated: P(X = k) proportional to q^k, q = exp(-beta * scale).
///  exponential_mean: X = min(n-1, floor(E)), E exponential with mean
///  (n/2) exp(-beta * scale).
std::size_t sample_flip_count(double beta, const FlipLaw& law, std::size_t n, Rng& rng);

/// Picks m distinct positions uniformly (partial Fisher-Yates), ascending.
std::vector<std::size_t> choose_positions(std::size_t n, std::size_t m, Rng& rng);
BinaryState flip_positions(const BinaryState& s, std::span<const std::size_t> positions);
BinaryState propose(const BinaryState& s, std::size_t m, Rng& rng);

/// delta_c = C_previous - C_new. Draws from the RNG only for worsening moves.
bool accept(double delta_c, double beta, Rng& rng);

struct Evaluation {
    double measured_cost = 0.0;
    double theoretical_cost = 0.0;
    double fidelity = kNotMeasured;
    double scale = kNotMeasured;
};

enum class EvaluatorKind { exact, photonic_noiseless, photonic_noisy };

/// Computes the cost of a state, either exactly or through the simulated
/// optical path. Immutable; `evaluate` may be called from many threads as
/// long as each caller owns its RNG.
class CostEvaluator {
   public:
    /// C(s) = -1/2 s^T K s.
    static CostEvaluator exact(QuboProblem problem);

    /// Readout through the homodyne model of a configured mesh. The
    /// reference problem is K = A^T A with A = 2 e_ref Re(U).
    static CostEvaluator photonic(std::shared_ptr<const ConfiguredMesh> mesh, ReferenceArm ref,
                                  std::optional<NoiseParams> noise = std::nullopt);

    /// Ideal OVMM with transform A = sqrt(D) Q of the problem. Problems that
    /// are not PSD are shifted when `allow_shift` is set; the linear
    /// correction is added digitally to every cost.
    static CostEvaluator ovmm(const QuboProblem& problem, std::optional<NoiseParams> noise = std::nullopt,
                              bool allow_shift = false);

    Evaluation evaluate(const BinaryState& s, Rng& rng) const;

    EvaluatorKind kind() const noexcept;
    std::size_t size() const noexcept;
    /// The problem that theoretical costs refer to.
    const QuboProblem& problem() const noexcept;

   private:
    struct Impl;
    explicit CostEvaluator(std::shared_ptr<const Impl> impl);
    std::shared_ptr<const Impl> impl_;
};

/// One full run: random initial state, warm-up, then n_iterations of
/// flip-count draw, proposal, evaluation and acceptance.
RunRecord anneal(const CostEvaluator& ev, const AnnealSchedule& sched, const FlipLaw& law, Rng& rng);

std::string to_string(Ramp r);
std::string to_string(FlipLawKind k);
std::string to_string(EvaluatorKind k);
Ramp ramp_from_string(const std::string& s);
FlipLawKind flip_law_from_string(const std::string& s);
EvaluatorKind evaluator_kind_from_string(const std::string& s);

}  // namespace phq
