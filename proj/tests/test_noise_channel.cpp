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
#include <random>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "phq/errors.hpp"
#include "phq/noise_channel.hpp"

namespace phq {
namespace {

ReadoutVector vec(std::initializer_list<double> xs) {
    RealVector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v(i++) = x;
    return ReadoutVector{v};
}

TEST(ApplyNoise, IdentityWhenNoiseless) {
    Rng rng(1);
    const auto r = vec({0.3, -1.2, 2.5});
    NoiseParams np;
    EXPECT_TRUE(np.is_noiseless());
    EXPECT_TRUE(apply_noise(r, np, rng).i_bpd == r.i_bpd);
}

TEST(ApplyNoise, DetectorSigmaStatistics) {
    Rng rng(2);
    NoiseParams np;
    np.detector_sigma = 0.7;
    const ReadoutVector zero{RealVector::Zero(4)};
    double sum = 0.0, sum2 = 0.0;
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) {
        const double x = apply_noise(zero, np, rng).i_bpd(k % 4);
        sum += x;
        sum2 += x * x;
    }
    const double mean = sum / draws;
    const double sd = std::sqrt((sum2 - draws * mean * mean) / (draws - 1));
    EXPECT_NEAR(sd, 0.7, 0.02 * 0.7);
}

TEST(ApplyNoise, LaserOnlyPreservesDirection) {
    Rng rng(3);
    NoiseParams np;
    np.laser_rel_sigma = 0.05;
    const auto r = vec({0.5, -0.25, 1.0, 0.125});
    for (int k = 0; k < 200; ++k) {
        const auto m = apply_noise(r, np, rng);
        EXPECT_NEAR(fidelity(m, r), 1.0, 1e-14);
    }
}

TEST(ApplyNoise, AdcQuantizesToGrid) {
    Rng rng(4);
    NoiseParams np;
    np.adc_bits = 4;
    np.adc_full_scale = 2.0;
    const auto m = apply_noise(vec({0.11, -0.9, 3.7}), np, rng);
    // two's-complement codes: step = full_scale / 2^(bits-1), range [-8, 7] steps
    const double step = 2.0 / 8.0;
    EXPECT_DOUBLE_EQ(m.i_bpd(0), 0.0);
    EXPECT_DOUBLE_EQ(m.i_bpd(1), -1.0);
    EXPECT_DOUBLE_EQ(m.i_bpd(2), 7.0 * step);
}

TEST(Quantize, MidTreadAndClip) {
    EXPECT_EQ(quantize(0.0, 8, 1.0), 0.0);
    EXPECT_DOUBLE_EQ(quantize(0.9999, 8, 1.0), 127.0 / 128.0);
    EXPECT_DOUBLE_EQ(quantize(0.3, 8, 1.0), 38.0 / 128.0);
    EXPECT_NEAR(quantize(-5.0, 8, 1.0), -1.0, 1e-12);
    const auto v = quantize_voltages(std::vector<double>{0.0, 2.5, 5.0, 1.2345}, 4, 5.0);
    EXPECT_EQ(v[0], 0.0);
    EXPECT_NEAR(v[2], 5.0, 1e-12);
    EXPECT_NEAR(v[3] / (5.0 / 15.0), std::round(v[3] / (5.0 / 15.0)), 1e-9);
}

TEST(Params, Validation) {
    NoiseParams np;
    np.detector_sigma = -1.0;
    EXPECT_THROW(np.validate(), ConfigError);
    np.detector_sigma = 0.0;
    np.adc_bits = 3;
    EXPECT_THROW(np.validate(), ConfigError);
    np.adc_bits = 17;
    EXPECT_THROW(np.validate(), ConfigError);
    np.adc_bits = 16;
    EXPECT_NO_THROW(np.validate());
}

TEST(Fidelity, Cases) {
    const auto t = vec({1.0, 2.0, -3.0});
    EXPECT_NEAR(fidelity(t, t), 1.0, 1e-15);
    EXPECT_NEAR(fidelity(vec({1.0, 0.0}), vec({0.0, 4.0})), 0.0, 1e-15);
    EXPECT_NEAR(fidelity(vec({-1.0, -2.0, 3.0}), t), 1.0, 1e-15);
    EXPECT_NEAR(fidelity(vec({-7.0, -14.0, 21.0}), t), 1.0, 1e-15);
    EXPECT_THROW(fidelity(vec({0.0, 0.0}), vec({1.0, 1.0})), UndefinedMetricError);
    EXPECT_THROW(fidelity(vec({1.0}), vec({1.0, 1.0})), DimensionError);
}

TEST(Fidelity, BoundedByCauchySchwarz) {
    Rng rng(5);
    std::normal_distribution<double> g;
    for (int k = 0; k < 500; ++k) {
        RealVector a(6), b(6);
        for (Eigen::Index i = 0; i < 6; ++i) {
            a(i) = g(rng);
            b(i) = g(rng);
        }
        const double f = fidelity(ReadoutVector{a}, ReadoutVector{b});
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0 + 1e-15);
    }
}

TEST(ScaleFactor, Cases) {
    const auto t = vec({1.0, -2.0});
    EXPECT_DOUBLE_EQ(scale_factor(t, t), 1.0);
    EXPECT_DOUBLE_EQ(scale_factor(vec({2.0, -4.0}), t), 4.0);
    EXPECT_THROW(scale_factor(t, vec({0.0, 0.0})), UndefinedMetricError);
}

TEST(Snr, PublishedResolutions) {
    EXPECT_NEAR(resolution_from_db(26.6) * 100.0, 4.67, 0.02);
    EXPECT_NEAR(resolution_from_db(28.2) * 100.0, 3.88, 0.02);
}

TEST(Snr, DbRoundTrip) {
    for (double db : {-3.0, 0.0, 12.5, 26.6, 40.0}) {
        const double snr = snr_from_db(db);
        EXPECT_NEAR(20.0 * std::log10(snr), db, 1e-12 * std::max(1.0, std::abs(db)));
        EXPECT_NEAR(resolution_from_db(db) * snr, 1.0, 1e-12);
    }
}

TEST(Snr, SampleStatistics) {
    const std::vector<double> p{1.0, 1.1, 0.9, 1.05, 0.95};
    const auto r = snr_and_resolution(p);
    // mean 1, sample variance (0 + .01 + .01 + .0025 + .0025) / 4
    const double sd = std::sqrt(0.025 / 4.0);
    EXPECT_NEAR(r.snr, 1.0 / sd, 1e-9);
    EXPECT_NEAR(r.resolution, sd, 1e-12);
    EXPECT_NEAR(r.snr_db, 20.0 * std::log10(1.0 / sd), 1e-9);
}

TEST(Snr, ConstantScaleIsInfinite) {
    const std::vector<double> p(10, 0.8);
    const auto r = snr_and_resolution(p);
    EXPECT_TRUE(r.infinite());
    EXPECT_EQ(r.resolution, 0.0);
    const std::vector<double> one{1.0};
    EXPECT_THROW(snr_and_resolution(one), UndefinedMetricError);
}

RunRecord synthetic_trace(const std::vector<double>& proposed, const std::vector<double>& current, double initial) {
    RunRecord r;
    r.initial_theoretical_cost = initial;
    for (std::size_t t = 0; t < proposed.size(); ++t) {
        IterationRecord it;
        it.iteration = t;
        it.theoretical_cost = proposed[t];
        it.current_theoretical_cost = current[t];
        r.iterations.push_back(it);
    }
    return r;
}

TEST(WrongAcceptance, HandCountedTrace) {
    // c_min = -10; changes relative to the previous accepted cost: +0.01, +0.05, -0.02.
    const auto rec = synthetic_trace({-9.9, -9.5, -10.2}, {-10.0, -10.0, -10.2}, -10.0);
    const auto changes = relative_cost_changes(rec, -10.0, 0, 3);
    ASSERT_EQ(changes.size(), 3u);
    EXPECT_NEAR(changes[0], 0.01, 1e-12);
    EXPECT_NEAR(changes[1], 0.05, 1e-12);
    EXPECT_NEAR(changes[2], -0.02, 1e-12);
    EXPECT_NEAR(wrong_acceptance_fraction(changes, 0.03), 1.0 / 3.0, 1e-15);
    EXPECT_EQ(wrong_acceptance_fraction(changes, 0.0), 0.0);
    const std::vector<double> improving{-0.1, -0.01, 0.0};
    EXPECT_EQ(wrong_acceptance_fraction(improving, 0.5), 0.0);
    EXPECT_THROW(relative_cost_changes(rec, 0.0, 0, 3), DegenerateProblemError);
}

TEST(WrongAcceptance, WindowIsClipped) {
    const auto rec = synthetic_trace({-1.0, -1.0}, {-1.0, -1.0}, -1.0);
    EXPECT_EQ(relative_cost_changes(rec, -1.0, 400, 600).size(), 0u);
    EXPECT_EQ(relative_cost_changes(rec, -1.0, 1, 600).size(), 1u);
}

TEST(Stability, ReportAndAggregate) {
    RunRecord rec = synthetic_trace({-9.9, -9.5, -10.2, -10.0}, {-10.0, -10.0, -10.2, -10.2}, -10.0);
    const double fid[] = {0.99, 0.98, 1.0, 0.97};
    const double sc[] = {1.0, 1.1, 0.9, 1.0};
    for (std::size_t t = 0; t < 4; ++t) {
        rec.iterations[t].fidelity = fid[t];
        rec.iterations[t].scale = sc[t];
    }
    const auto r = stability_report(rec, -10.0, WrongAcceptanceWindow{0, 4});
    EXPECT_NEAR(r.mean_fidelity, 0.985, 1e-12);
    EXPECT_NEAR(r.mean_scale, 1.0, 1e-12);
    const std::vector<double> sv(std::begin(sc), std::end(sc));
    EXPECT_NEAR(r.resolution, snr_and_resolution(sv).resolution, 1e-15);
    EXPECT_EQ(r.samples, 4u);
    EXPECT_EQ(r.window_samples, 4u);
    const std::vector<double> ch = relative_cost_changes(rec, -10.0, 0, 4);
    EXPECT_DOUBLE_EQ(r.wrong_accept_fraction, wrong_acceptance_fraction(ch, r.resolution));

    const std::vector<StabilityReport> two{r, r};
    const auto agg = aggregate_stability(two);
    EXPECT_NEAR(agg.mean_fidelity, r.mean_fidelity, 1e-15);
    EXPECT_NEAR(agg.snr_db, r.snr_db, 1e-9);
    EXPECT_EQ(agg.window_samples, 8u);

    const auto back = stability_from_json(nlohmann::json::parse(stability_to_json(r).dump()));
    EXPECT_DOUBLE_EQ(back.snr_db, r.snr_db);
    EXPECT_DOUBLE_EQ(back.wrong_accept_fraction, r.wrong_accept_fraction);
}

TEST(Stability, NoiselessRunHasNullSnr) {
    const auto rec = synthetic_trace({-1.0, -1.0, -1.0}, {-1.0, -1.0, -1.0}, -1.0);
    const auto r = stability_report(rec, -1.0);
    EXPECT_TRUE(std::isinf(r.snr_db));
    EXPECT_TRUE(stability_to_json(r).at("snr_db").is_null());
    EXPECT_TRUE(std::isinf(stability_from_json(stability_to_json(r)).snr_db));
}

TEST(Calibration, HitsTargetOnFreshDraws) {
    const auto ref = vec({0.8, -0.3, 0.5, 1.1, -0.9, 0.2, 0.4, -0.6});
    const double sigma = calibrate_detector_sigma(ref, 26.6, 0.005);
    Rng rng(99);
    NoiseParams np;
    np.detector_sigma = sigma;
    np.laser_rel_sigma = 0.005;
    std::vector<double> p;
    for (int k = 0; k < 50000; ++k) p.push_back(scale_factor(apply_noise(ref, np, rng), ref));
    EXPECT_NEAR(snr_and_resolution(p).snr_db, 26.6, 0.1);
    EXPECT_THROW(calibrate_detector_sigma(ref, 26.6, 0.5), ConfigError);
    EXPECT_THROW(calibrate_detector_sigma(vec({0.0, 0.0}), 26.6, 0.0), UndefinedMetricError);
}

}  // namespace
}  // namespace phq
