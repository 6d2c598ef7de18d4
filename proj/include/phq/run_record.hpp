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

#include <cstddef>
#include <cstdint>
#include <limits>
#include <vector>

#include "phq/types.hpp"

namespace phq {

inline constexpr double kNotMeasured = std::numeric_limits<double>::quiet_NaN();

/// One annealing iteration. "current" fields describe the accepted state
/// after the accept/reject decision.
struct IterationRecord {
    std::size_t iteration = 0;
    double beta = 0.0;
    std::size_t flips = 0;
    BinaryState proposed;
    bool accepted = false;
    double measured_cost = 0.0;     ///< of the proposed state, as the evaluator saw it
    double theoretical_cost = 0.0;  ///< of the proposed state, exact
    double current_measured_cost = 0.0;
    double current_theoretical_cost = 0.0;
    double best_measured_cost = 0.0;
    double fidelity = kNotMeasured;  ///< photonic evaluators only
    double scale = kNotMeasured;     ///< photonic evaluators only
};

struct RunRecord {
    std::size_t run_index = 0;
    std::uint64_t seed = 0;
    double cost_scale = 1.0;  ///< |C| reference that beta is quoted against
    BinaryState initial_state;
    double initial_measured_cost = 0.0;
    double initial_theoretical_cost = 0.0;
    std::vector<IterationRecord> iterations;
    BinaryState best_state;
    double best_measured_cost = 0.0;
    double best_theoretical_cost = 0.0;
    double wall_clock_s = 0.0;
};

/// The accepted state after every iteration, rebuilt from the proposals.
std::vector<BinaryState> accepted_states(const RunRecord& record);

}  // namespace phq
