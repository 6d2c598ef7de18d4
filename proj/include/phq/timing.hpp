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
#include <optional>
#include <string>

#include <nlohmann/json_fwd.hpp>

namespace phq::timing {

inline constexpr double kSpeedOfLight = 299'792'458.0;  // m/s

// ---------------------------------------------------------------------------
// Per-iteration sequence of the hardware loop. Cycle counts are measured
// from the TX edge at t = 0: the raw RX edge, the processed RX edge, and
// the rise / fall of the sampled signal.
// ---------------------------------------------------------------------------
struct TimingParams {
    double clock_hz = 245.76e6;
    double mod_bandwidth_hz = 28.0e9;
    double pd_bandwidth_hz = 41.3e9;
    double path_length_m = 9.3e-3;
    double group_index = 3.48;
    std::size_t rx_latency_cycles = 40;
    std::size_t processed_cycles = 45;
    std::size_t sample_rise_cycles = 47;
    std::size_t sample_fall_cycles = 51;
    double iter_time_s = 265.1e-9;
    std::size_t n = 16;
    double chip_area_mm2 = 37.5;
    // What-if: converter latencies replacing the measured DAC+ADC share.
    std::optional<double> dac_latency_s;
    std::optional<double> adc_latency_s;

    void validate() const;
};

struct LatencyBreakdown {
    double t0 = 0;          // clock period
    double tau_mod = 0;     // modulator response
    double tau_pd = 0;      // photodetector response
    double tau_prop = 0;    // on-chip propagation
    double tau_ovmm = 0;    // tau_mod + tau_prop + tau_pd
    double tau_dacadc = 0;  // rx_latency * t0 - tau_ovmm, or dac + adc in what-if mode
    double tau_fpga = 0;    // tau_iter - sample_fall * t0
    double tau_iter = 0;
};

struct Throughput {
    double loop_flops_per_s = 0;  // n^2 / (tau_dacadc + tau_ovmm)
    double ovmm_flops_per_s = 0;  // n^2 / tau_ovmm
    double area_gmac_mm2 = 0;     // ovmm MAC rate / chip area, in GMAC/s/mm^2
};

/// 10-90 rise time of a single-pole response, 0.35 / f_B.
double response_time(double bandwidth_hz);
double propagation_delay(double length_m, double index);
LatencyBreakdown latency_breakdown(const TimingParams& p);
/// One matrix-vector product counts n^2 FLOPs (one per multiply-accumulate).
Throughput throughput(const TimingParams& p, const LatencyBreakdown& b);

/// Rounds to 4 significant figures.
double round_sig4(double x);

nlohmann::json report_json(const TimingParams& p, const LatencyBreakdown& b, const Throughput& t);
std::string report_csv(const LatencyBreakdown& b, const Throughput& t);

}  // namespace phq::timing
