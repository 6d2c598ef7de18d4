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

// Readout noise and the stability metrics of the optical matrix multiply:
// fidelity, scale factor, cost SNR / resolution and wrong acceptances.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phq/run_record.hpp"
#include "phq/types.hpp"

namespace phq {

struct NoiseParams {
    double detector_sigma = 0.0;   ///< additive, per channel, readout units
    double laser_rel_sigma = 0.0;  ///< common-mode relative amplitude jitter per shot
    std::optional<int> adc_bits;
    double adc_full_scale = 1.0;   ///< quantizer covers [-full_scale, full_scale]
    std::optional<int> dac_bits;
    std::uint64_t seed = 0;

    void validate() const;
    bool is_noiseless() const noexcept;
};

/// r' = (1 + eps) r + eta, eps ~ N(0, laser_rel_sigma) once per vector,
/// eta_i ~ N(0, detector_sigma) per channel, then optional ADC quantization.
ReadoutVector apply_noise(const ReadoutVector& r, const NoiseParams& np, Rng& rng);

/// Uniform mid-tread quantizer over [-full_scale, full_scale] with 2^bits codes.
double quantize(double x, int bits, double full_scale);

/// Snaps drive voltages onto a 2^bits-level DAC grid over [0, max_voltage].
std::vector<double> quantize_voltages(std::span<const double> voltages, int bits, double max_voltage);

/// |<m, t>| / (|m| |t|). Throws UndefinedMetricError for a zero vector.
double fidelity(const ReadoutVector& measured, const ReadoutVector& theoretical);

/// |m|^2 / |t|^2.
double scale_factor(const ReadoutVector& measured, const ReadoutVector& theoretical);

struct SnrResult {
    double snr = 0.0;       ///< mean(P) / std(P); +inf when std(P) = 0
    double snr_db = 0.0;    ///< 20 log10(snr)
    double resolution = 0;  ///< 1 / snr; 0 when snr is infinite

    bool infinite() const noexcept;
};

/// Sample standard deviation (n - 1). Needs at least two values.
SnrResult snr_and_resolution(std::span<const double> scale_factors);

double snr_from_db(double snr_db);
double resolution_from_db(double snr_db);

/// C_r = (C_proposed - C_previous) / |C_min| for iterations in
/// [first, last), using theoretical costs. Positive means the proposal is
/// worse than the state it was compared against.
std::vector<double> relative_cost_changes(const RunRecord& record, double c_min, std::size_t first, std::size_t last);

/// Fraction of values with R > C_r > 0.
double wrong_acceptance_fraction(std::span<const double> relative_changes, double resolution);

struct WrongAcceptanceWindow {
    std::size_t first = 400;
    std::size_t last = 600;
};

struct StabilityReport {
    double mean_fidelity = 0.0;
    double fidelity_std = 0.0;
    double mean_scale = 0.0;
    double scale_std = 0.0;
    double snr_db = 0.0;
    double resolution = 0.0;
    double wrong_accept_fraction = 0.0;
    std::size_t samples = 0;  ///< iterations with a defined fidelity / scale
    std::size_t window_samples = 0;
};

/// Per-run report from the fidelity / scale samples in the record. Runs
/// without photonic measurements report unit fidelity and scale.
StabilityReport stability_report(const RunRecord& record, double c_min, WrongAcceptanceWindow window = {});

/// Campaign-level report: means over runs of the per-run means (the std
/// fields are the spread of those per-run means), SNR averaged in linear
/// units, and the wrong-acceptance fraction pooled over all window samples.
StabilityReport aggregate_stability(std::span<const StabilityReport> per_run);

nlohmann::json stability_to_json(const StabilityReport& r);
StabilityReport stability_from_json(const nlohmann::json& j);

/// Finds the detector sigma whose scale-factor SNR on `reference` equals
/// target_snr_db. Monte Carlo with common random numbers and bisection.
double calibrate_detector_sigma(const ReadoutVector& reference, double target_snr_db, double laser_rel_sigma,
                                std::size_t samples = 20000, std::uint64_t seed = 1);

}  // namespace phq
