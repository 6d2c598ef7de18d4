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

#include "phq/timing.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include <nlohmann/json.hpp>

#include "phq/errors.hpp"

namespace phq::timing {

void TimingParams::validate() const {
    if (!(clock_hz > 0) || !(mod_bandwidth_hz > 0) || !(pd_bandwidth_hz > 0) || !(path_length_m > 0) ||
        !(group_index > 0) || !(iter_time_s > 0) || !(chip_area_mm2 > 0) || n == 0) {
        throw ConfigError("timing parameters must all be positive");
    }
    if (rx_latency_cycles == 0 ||
        !(rx_latency_cycles < processed_cycles && processed_cycles < sample_rise_cycles &&
          sample_rise_cycles < sample_fall_cycles)) {
        throw ConfigError("cycle marks must satisfy 0 < rx < processed < sample_rise < sample_fall");
    }
    if ((dac_latency_s && !(*dac_latency_s > 0)) || (adc_latency_s && !(*adc_latency_s > 0))) {
        throw ConfigError("converter latencies must be positive");
    }
    if (dac_latency_s.has_value() != adc_latency_s.has_value()) {
        throw ConfigError("what-if mode needs both DAC and ADC latencies");
    }
}

double response_time(double bandwidth_hz) {
    if (!(bandwidth_hz > 0)) {
        throw ConfigError("bandwidth must be positive");
    }
    return 0.35 / bandwidth_hz;
}

double propagation_delay(double length_m, double index) {
    if (length_m < 0 || !(index > 0)) {
        throw ConfigError("propagation needs a non-negative length and positive index");
    }
    return length_m * index / kSpeedOfLight;
}

LatencyBreakdown latency_breakdown(const TimingParams& p) {
    p.validate();
    LatencyBreakdown b;
    b.t0 = 1.0 / p.clock_hz;
    b.tau_mod = response_time(p.mod_bandwidth_hz);
    b.tau_pd = response_time(p.pd_bandwidth_hz);
    b.tau_prop = propagation_delay(p.path_length_m, p.group_index);
    b.tau_ovmm = b.tau_mod + b.tau_prop + b.tau_pd;
    if (p.dac_latency_s) {
        b.tau_dacadc = *p.dac_latency_s + *p.adc_latency_s;
    } else {
        b.tau_dacadc = static_cast<double>(p.rx_latency_cycles) * b.t0 - b.tau_ovmm;
        if (!(b.tau_dacadc > 0)) {
            throw ConfigError("RX latency is shorter than the optical path");
        }
    }
    b.tau_iter = p.iter_time_s;
    b.tau_fpga = b.tau_iter - static_cast<double>(p.sample_fall_cycles) * b.t0;
    return b;
}

Throughput throughput(const TimingParams& p, const LatencyBreakdown& b) {
    if (p.n == 0) {
        throw ConfigError("dimension must be at least 1");
    }
    const double flops = static_cast<double>(p.n) * static_cast<double>(p.n);
    Throughput t;
    t.loop_flops_per_s = flops / (b.tau_dacadc + b.tau_ovmm);
    t.ovmm_flops_per_s = flops / b.tau_ovmm;
    t.area_gmac_mm2 = t.ovmm_flops_per_s / p.chip_area_mm2 / 1e9;
    return t;
}

double round_sig4(double x) {
    if (x == 0 || !std::isfinite(x)) {
        return x;
    }
    // Through decimal text so the result is the double nearest the 4-digit value.
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return std::strtod(buf, nullptr);
}

nlohmann::json report_json(const TimingParams& p, const LatencyBreakdown& b, const Throughput& t) {
    return nlohmann::json{
        {"n", p.n},
        {"t0_s", round_sig4(b.t0)},
        {"tau_mod_s", round_sig4(b.tau_mod)},
        {"tau_pd_s", round_sig4(b.tau_pd)},
        {"tau_prop_s", round_sig4(b.tau_prop)},
        {"tau_ovmm_s", round_sig4(b.tau_ovmm)},
        {"tau_dacadc_s", round_sig4(b.tau_dacadc)},
        {"tau_fpga_s", round_sig4(b.tau_fpga)},
        {"tau_iter_s", round_sig4(b.tau_iter)},
        {"loop_flops_per_s", round_sig4(t.loop_flops_per_s)},
        {"ovmm_flops_per_s", round_sig4(t.ovmm_flops_per_s)},
        {"area_gmac_per_s_mm2", round_sig4(t.area_gmac_mm2)},
    };
}

std::string report_csv(const LatencyBreakdown& b, const Throughput& t) {
    std::ostringstream out;
    out.precision(4);
    out << "quantity,value,unit\n";
    out << "t0," << b.t0 * 1e9 << ",ns\n";
    out << "tau_mod," << b.tau_mod * 1e12 << ",ps\n";
    out << "tau_pd," << b.tau_pd * 1e12 << ",ps\n";
    out << "tau_prop," << b.tau_prop * 1e12 << ",ps\n";
    out << "tau_ovmm," << b.tau_ovmm * 1e12 << ",ps\n";
    out << "tau_dacadc," << b.tau_dacadc * 1e9 << ",ns\n";
    out << "tau_fpga," << b.tau_fpga * 1e9 << ",ns\n";
    out << "tau_iter," << b.tau_iter * 1e9 << ",ns\n";
    out << "loop_rate," << t.loop_flops_per_s / 1e9 << ",GFLOP/s\n";
    out << "ovmm_rate," << t.ovmm_flops_per_s / 1e12 << ",TFLOP/s\n";
    out << "area_efficiency," << t.area_gmac_mm2 << ",GMAC/s/mm2\n";
    return out.str();
}

}  // namespace phq::timing
