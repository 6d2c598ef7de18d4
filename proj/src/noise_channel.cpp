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

#include "phq/noise_channel.hpp"

#include <algorithm>
#include <functional>
#include <cmath>
#include <limits>
#include <numeric>

#include <nlohmann/json.hpp>

#include "phq/errors.hpp"

namespace phq {

namespace {

double mean_of(std::span<const double> xs) {
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs, double mean) {
    if (xs.size() < 2) {
        return 0.0;
    }
    // Identical samples: the rounded mean can differ from them by an ulp.
    if (std::adjacent_find(xs.begin(), xs.end(), std::not_equal_to<>()) == xs.end()) {
        return 0.0;
    }
    double acc = 0.0;
    for (double x : xs) {
        acc += (x - mean) * (x - mean);
    }
    return std::sqrt(acc / static_cast<double>(xs.size() - 1));
}

void check_bits(const std::optional<int>& bits, const char* name) {
    if (bits && (*bits < 4 || *bits > 16)) {
        throw ConfigError(std::string(name) + " must lie in [4, 16]");
    }
}

}  // namespace

void NoiseParams::validate() const {
    if (!(detector_sigma >= 0.0) || !(laser_rel_sigma >= 0.0)) {
        throw ConfigError("noise sigmas must be non-negative");
    }
    check_bits(adc_bits, "adc_bits");
    check_bits(dac_bits, "dac_bits");
    if (adc_bits && !(adc_full_scale > 0.0)) {
        throw ConfigError("adc_full_scale must be positive");
    }
}

bool NoiseParams::is_noiseless() const noexcept {
    return detector_sigma == 0.0 && laser_rel_sigma == 0.0 && !adc_bits;
}

double quantize(double x, int bits, double full_scale) {
    const double half_codes = std::ldexp(1.0, bits - 1);
    const double step = full_scale / half_codes;
    const double code = std::clamp(std::round(x / step), -half_codes, half_codes - 1.0);
    return code * step;
}

std::vector<double> quantize_voltages(std::span<const double> voltages, int bits, double max_voltage) {
    if (bits < 4 || bits > 16) {
        throw ConfigError("dac_bits must lie in [4, 16]");
    }
    const double levels = std::ldexp(1.0, bits) - 1.0;
    const double step = max_voltage / levels;
    std::vector<double> out(voltages.size());
    for (std::size_t i = 0; i < voltages.size(); ++i) {
        out[i] = std::clamp(std::round(voltages[i] / step), 0.0, levels) * step;
    }
    return out;
}

ReadoutVector apply_noise(const ReadoutVector& r, const NoiseParams& np, Rng& rng) {
    ReadoutVector out = r;
    if (np.laser_rel_sigma > 0.0) {
        std::normal_distribution<double> laser(0.0, np.laser_rel_sigma);
        out.i_bpd *= 1.0 + laser(rng);
    }
    if (np.detector_sigma > 0.0) {
        std::normal_distribution<double> detector(0.0, np.detector_sigma);
        for (Eigen::Index i = 0; i < out.i_bpd.size(); ++i) {
            out.i_bpd[i] += detector(rng);
        }
    }
    if (np.adc_bits) {
        for (Eigen::Index i = 0; i < out.i_bpd.size(); ++i) {
            out.i_bpd[i] = quantize(out.i_bpd[i], *np.adc_bits, np.adc_full_scale);
        }
    }
    return out;
}

double fidelity(const ReadoutVector& measured, const ReadoutVector& theoretical) {
    if (measured.size() != theoretical.size()) {
        throw DimensionError("fidelity of vectors with different lengths");
    }
    const double nm = measured.i_bpd.norm();
    const double nt = theoretical.i_bpd.norm();
    if (nm == 0.0 || nt == 0.0) {
        throw UndefinedMetricError("fidelity is undefined for a zero vector");
    }
    const double f = std::abs(measured.i_bpd.dot(theoretical.i_bpd)) / (nm * nt);
    return std::min(f, 1.0);
}

double scale_factor(const ReadoutVector& measured, const ReadoutVector& theoretical) {
    if (measured.size() != theoretical.size()) {
        throw DimensionError("scale factor of vectors with different lengths");
    }
    const double t2 = theoretical.i_bpd.squaredNorm();
    if (t2 == 0.0) {
        throw UndefinedMetricError("scale factor is undefined for a zero theoretical vector");
    }
    return measured.i_bpd.squaredNorm() / t2;
}

bool SnrResult::infinite() const noexcept {
    return std::isinf(snr);
}

SnrResult snr_and_resolution(std::span<const double> scale_factors) {
    if (scale_factors.size() < 2) {
        throw UndefinedMetricError("SNR needs at least two scale factors");
    }
    const double m = mean_of(scale_factors);
    const double s = sample_std(scale_factors, m);
    if (s == 0.0) {
        const double inf = std::numeric_limits<double>::infinity();
        return SnrResult{inf, inf, 0.0};
    }
    const double snr = m / s;
    return SnrResult{snr, 20.0 * std::log10(snr), 1.0 / snr};
}

double snr_from_db(double snr_db) {
    return std::pow(10.0, snr_db / 20.0);
}

double resolution_from_db(double snr_db) {
    return 1.0 / snr_from_db(snr_db);
}

std::vector<double> relative_cost_changes(const RunRecord& record, double c_min, std::size_t first, std::size_t last) {
    const double denom = std::abs(c_min);
    if (denom == 0.0) {
        throw DegenerateProblemError("relative cost change needs a nonzero C_min");
    }
    last = std::min(last, record.iterations.size());
    std::vector<double> out;
    for (std::size_t t = first; t < last; ++t) {
        const double previous =
            t == 0 ? record.initial_theoretical_cost : record.iterations[t - 1].current_theoretical_cost;
        out.push_back((record.iterations[t].theoretical_cost - previous) / denom);
    }
    return out;
}

double wrong_acceptance_fraction(std::span<const double> relative_changes, double resolution) {
    if (relative_changes.empty()) {
        return 0.0;
    }
    const auto hits = std::count_if(relative_changes.begin(), relative_changes.end(),
                                    [&](double c) { return resolution > c && c > 0.0; });
    return static_cast<double>(hits) / static_cast<double>(relative_changes.size());
}

StabilityReport stability_report(const RunRecord& record, double c_min, WrongAcceptanceWindow window) {
    std::vector<double> fid;
    std::vector<double> scale;
    for (const auto& it : record.iterations) {
        if (std::isfinite(it.fidelity)) {
            fid.push_back(it.fidelity);
        }
        if (std::isfinite(it.scale)) {
            scale.push_back(it.scale);
        }
    }
    StabilityReport r;
    r.samples = scale.size();
    if (fid.empty()) {
        r.mean_fidelity = 1.0;
    } else {
        r.mean_fidelity = mean_of(fid);
        r.fidelity_std = sample_std(fid, r.mean_fidelity);
    }
    SnrResult snr{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(), 0.0};
    if (scale.empty()) {
        r.mean_scale = 1.0;
    } else {
        r.mean_scale = mean_of(scale);
        r.scale_std = sample_std(scale, r.mean_scale);
        if (scale.size() >= 2) {
            snr = snr_and_resolution(scale);
        }
    }
    r.snr_db = snr.snr_db;
    r.resolution = snr.resolution;
    const auto changes = relative_cost_changes(record, c_min, window.first, window.last);
    r.window_samples = changes.size();
    r.wrong_accept_fraction = wrong_acceptance_fraction(changes, r.resolution);
    return r;
}

StabilityReport aggregate_stability(std::span<const StabilityReport> per_run) {
    StabilityReport agg;
    if (per_run.empty()) {
        agg.mean_fidelity = 1.0;
        agg.mean_scale = 1.0;
        agg.snr_db = std::numeric_limits<double>::infinity();
        return agg;
    }
    std::vector<double> fid, scale, snr;
    double wrong = 0.0;
    for (const auto& r : per_run) {
        fid.push_back(r.mean_fidelity);
        scale.push_back(r.mean_scale);
        snr.push_back(snr_from_db(r.snr_db));
        wrong += r.wrong_accept_fraction * static_cast<double>(r.window_samples);
        agg.samples += r.samples;
        agg.window_samples += r.window_samples;
    }
    agg.mean_fidelity = mean_of(fid);
    agg.fidelity_std = sample_std(fid, agg.mean_fidelity);
    agg.mean_scale = mean_of(scale);
    agg.scale_std = sample_std(scale, agg.mean_scale);
    const double mean_snr = mean_of(snr);
    agg.snr_db = 20.0 * std::log10(mean_snr);
    agg.resolution = std::isinf(mean_snr) ? 0.0 : 1.0 / mean_snr;
    agg.wrong_accept_fraction = agg.window_samples == 0 ? 0.0 : wrong / static_cast<double>(agg.window_samples);
    return agg;
}

nlohmann::json stability_to_json(const StabilityReport& r) {
    nlohmann::json j{{"mean_fidelity", r.mean_fidelity},
                     {"fidelity_std", r.fidelity_std},
                     {"mean_scale", r.mean_scale},
                     {"scale_std", r.scale_std},
                     {"resolution", r.resolution},
                     {"wrong_accept_fraction", r.wrong_accept_fraction},
                     {"samples", r.samples},
                     {"window_samples", r.window_samples}};
    // JSON has no infinity; a noiseless run reports null.
    j["snr_db"] = std::isfinite(r.snr_db) ? nlohmann::json(r.snr_db) : nlohmann::json(nullptr);
    return j;
}

StabilityReport stability_from_json(const nlohmann::json& j) {
    StabilityReport r;
    r.mean_fidelity = j.at("mean_fidelity").get<double>();
    r.fidelity_std = j.at("fidelity_std").get<double>();
    r.mean_scale = j.at("mean_scale").get<double>();
    r.scale_std = j.at("scale_std").get<double>();
    r.resolution = j.at("resolution").get<double>();
    r.wrong_accept_fraction = j.at("wrong_accept_fraction").get<double>();
    r.samples = j.at("samples").get<std::size_t>();
    r.window_samples = j.at("window_samples").get<std::size_t>();
    r.snr_db = j.at("snr_db").is_null() ? std::numeric_limits<double>::infinity() : j.at("snr_db").get<double>();
    return r;
}

double calibrate_detector_sigma(const ReadoutVector& reference, double target_snr_db, double laser_rel_sigma,
                                std::size_t samples, std::uint64_t seed) {
    const double ref_norm2 = reference.i_bpd.squaredNorm();
    if (ref_norm2 == 0.0) {
        throw UndefinedMetricError("cannot calibrate noise against a zero readout");
    }
    if (samples < 2) {
        throw ConfigError("calibration needs at least two samples");
    }
    const auto n = reference.i_bpd.size();
    Rng rng(seed);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<RealVector> scaled_ref(samples);
    RealMatrix eta(n, static_cast<Eigen::Index>(samples));
    for (std::size_t k = 0; k < samples; ++k) {
        scaled_ref[k] = (1.0 + laser_rel_sigma * unit(rng)) * reference.i_bpd;
        for (Eigen::Index i = 0; i < n; ++i) {
            eta(i, static_cast<Eigen::Index>(k)) = unit(rng);
        }
    }
    std::vector<double> p(samples);
    auto snr_at = [&](double sigma) {
        for (std::size_t k = 0; k < samples; ++k) {
            p[k] = (scaled_ref[k] + sigma * eta.col(static_cast<Eigen::Index>(k))).squaredNorm() / ref_norm2;
        }
        return snr_and_resolution(p).snr_db;
    };
    if (snr_at(0.0) < target_snr_db) {
        throw ConfigError("laser fluctuation alone already exceeds the target noise level");
    }
    double lo = 0.0;
    double hi = std::sqrt(ref_norm2 / static_cast<double>(n));
    while (snr_at(hi) > target_snr_db) {
        lo = hi;
        hi *= 2.0;
    }
    for (int iter = 0; iter < 80; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (snr_at(mid) > target_snr_db ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace phq
