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

#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "phq/errors.hpp"
#include "phq/timing.hpp"

namespace phq::timing {
namespace {

#define EXPECT_REL(actual, expected, rel) EXPECT_NEAR((actual), (expected), std::abs(expected) * (rel))

TEST(Timing, ResponseAndPropagation) {
    EXPECT_REL(response_time(28e9), 12.5e-12, 1e-3);
    EXPECT_REL(response_time(41.3e9), 8.47e-12, 1e-3);
    EXPECT_REL(propagation_delay(9.3e-3, 3.48), 107.95e-12, 1e-4);
    EXPECT_EQ(propagation_delay(0.0, 3.48), 0.0);
    EXPECT_THROW(response_time(0.0), ConfigError);
    EXPECT_THROW(propagation_delay(1.0, 0.0), ConfigError);
}

TEST(Timing, DefaultBreakdownMatchesPublishedFigures) {
    const TimingParams p;
    const auto b = latency_breakdown(p);
    EXPECT_REL(b.t0, 4.069e-9, 1e-3);
    EXPECT_REL(b.tau_ovmm, 128.9e-12, 0.01);
    EXPECT_REL(b.tau_dacadc, 162.6e-9, 0.01);
    EXPECT_REL(b.tau_fpga, 57.6e-9, 0.01);
    EXPECT_REL(b.tau_iter, 265.1e-9, 1e-12);
    const auto t = throughput(p, b);
    EXPECT_REL(t.loop_flops_per_s, 1.57e9, 0.01);
    EXPECT_REL(t.ovmm_flops_per_s, 2.00e12, 0.01);
    EXPECT_REL(t.area_gmac_mm2, 53.3, 0.01);
}

// Independent arithmetic: 40 clock periods minus the optical path.
TEST(Timing, ConverterShareIsRxLatencyMinusOptics) {
    const TimingParams p;
    const auto b = latency_breakdown(p);
    const double t0 = 1.0 / 245.76e6;
    const double optics = 0.35 / 28e9 + 0.35 / 41.3e9 + 9.3e-3 * 3.48 / 299792458.0;
    EXPECT_NEAR(b.tau_dacadc, 40 * t0 - optics, 1e-18);
    EXPECT_NEAR(b.tau_fpga, 265.1e-9 - 51 * t0, 1e-18);
}

TEST(Timing, WhatIfConverters) {
    TimingParams p;
    p.dac_latency_s = 3.55e-9;
    p.adc_latency_s = 3.55e-9;
    const auto b = latency_breakdown(p);
    EXPECT_NEAR(b.tau_dacadc, 7.1e-9, 1e-20);
    const auto t = throughput(p, b);
    EXPECT_REL(t.loop_flops_per_s, 256.0 / (7.1e-9 + b.tau_ovmm), 1e-12);
    p.adc_latency_s.reset();
    EXPECT_THROW(latency_breakdown(p), ConfigError);
}

TEST(Timing, Validation) {
    TimingParams p;
    p.clock_hz = 0.0;
    EXPECT_THROW(latency_breakdown(p), ConfigError);
    p = TimingParams{};
    p.processed_cycles = 30;
    EXPECT_THROW(latency_breakdown(p), ConfigError);
    p = TimingParams{};
    p.clock_hz = 1e12;
    EXPECT_THROW(latency_breakdown(p), ConfigError);  // RX edge before the light arrives
}

TEST(Timing, Rounding) {
    EXPECT_DOUBLE_EQ(round_sig4(1.98637e12), 1.986e12);
    EXPECT_DOUBLE_EQ(round_sig4(-0.000123456), -0.0001235);
    EXPECT_EQ(round_sig4(0.0), 0.0);
}

TEST(Timing, Reports) {
    const TimingParams p;
    const auto b = latency_breakdown(p);
    const auto t = throughput(p, b);
    const auto j = report_json(p, b, t);
    EXPECT_DOUBLE_EQ(j.at("tau_ovmm_s").get<double>(), round_sig4(b.tau_ovmm));
    EXPECT_EQ(j.at("n").get<std::size_t>(), 16u);
    const auto csv = report_csv(b, t);
    EXPECT_EQ(csv.rfind("quantity,value,unit\n", 0), 0u);
    EXPECT_NE(csv.find("tau_dacadc,162.6,ns"), std::string::npos);
}

}  // namespace
}  // namespace phq::timing
