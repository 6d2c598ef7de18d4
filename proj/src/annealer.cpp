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

#include "phq/annealer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "phq/errors.hpp"

namespace phq {

void AnnealSchedule::validate() const {
    if (!(beta_start > 0.0) || !(beta_end >= beta_start) || !std::isfinite(beta_end)) {
        throw ConfigError("schedule needs 0 < beta_start <= beta_end");
    }
    if (n_iterations == 0) {
        throw ConfigError("schedule needs at least one iteration");
    }
    if (cost_scale && !(*cost_scale > 0.0)) {
        throw ConfigError("cost_scale must be positive");
    }
}

double AnnealSchedule::beta_at(std::size_t t) const {
    if (n_iterations <= 1) {
        return beta_start;
    }
    const double x = static_cast<double>(std::min(t, n_iterations - 1)) / static_cast<double>(n_iterations - 1);
    if (ramp == Ramp::linear) {
        return beta_start + (beta_end - beta_start) * x;
    }
    return beta_start * std::pow(beta_end / beta_start, x);
}

std::size_t sample_flip_count(double beta, const FlipLaw& law, std::size_t n, Rng& rng) {
    if (n == 0) {
        throw DimensionError("flip count needs a nonempty state");
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u = unit(rng);
    const double rate = beta * law.scale;
    std::size_t extra = 0;
    if (law.law == FlipLawKind::geometric_truncated) {
        if (rate <= 0.0) {
            extra = static_cast<std::size_t>(u * static_cast<double>(n));
        } else {
            // Inverse CDF of the geometric law truncated to [0, n-1].
            const double mass = -std::expm1(-rate * static_cast<double>(n));
            const double x = std::log1p(-u * mass) / -rate;
            extra = static_cast<std::size_t>(std::max(0.0, std::floor(x)));
        }
    } else {
        const double mean = 0.5 * static_cast<double>(n) * std::exp(-rate);
        const double e = -mean * std::log1p(-u);
        extra = e >= static_cast<double>(n) ? n : static_cast<std::size_t>(std::floor(e));
    }
    return 1 + std::min(extra, n - 1);
}

std::vector<std::size_t> choose_positions(std::size_t n, std::size_t m, Rng& rng) {
    if (m < 1 || m > n) {
        throw DimensionError("flip count " + std::to_string(m) + " outside [1, " + std::to_string(n) + "]");
    }
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < m; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(idx[i], idx[pick(rng)]);
    }
    idx.resize(m);
    std::sort(idx.begin(), idx.end());
    return idx;
}

BinaryState flip_positions(const BinaryState& s, std::span<const std::size_t> positions) {
    BinaryState out = s;
    for (auto p : positions) {
        out.flip(p);
    }
    return out;
}

BinaryState propose(const BinaryState& s, std::size_t m, Rng& rng) {
    const auto positions = choose_positions(s.size(), m, rng);
    return flip_positions(s, positions);
}

bool accept(double delta_c, double beta, Rng& rng) {
    if (delta_c >= 0.0) {
        return true;
    }
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    return unit(rng) < std::exp(beta * delta_c);
}

struct CostEvaluator::Impl {
    EvaluatorKind kind;
    QuboProblem problem;
    std::shared_ptr<const ConfiguredMesh> mesh;
    ReferenceArm ref;
    std::optional<TransformMatrix> transform;
    double shift = 0.0;
    std::optional<NoiseParams> noise;
};

namespace {

EvaluatorKind photonic_kind(const std::optional<NoiseParams>& noise) {
    return (noise && !noise->is_noiseless()) ? EvaluatorKind::photonic_noisy : EvaluatorKind::photonic_noiseless;
}

}  // namespace

CostEvaluator::CostEvaluator(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

CostEvaluator CostEvaluator::exact(QuboProblem problem) {
    return CostEvaluator(std::make_shared<const Impl>(Impl{EvaluatorKind::exact, std::move(problem), nullptr, {}, {}, 0.0, {}}));
}

CostEvaluator CostEvaluator::photonic(std::shared_ptr<const ConfiguredMesh> mesh, ReferenceArm ref,
                                      std::optional<NoiseParams> noise) {
    if (!mesh) {
        throw ConfigError("photonic evaluator needs a configured mesh");
    }
    if (noise) {
        noise->validate();
    }
    TransformMatrix a = effective_matrix(mesh->unitary(), ref);
    QuboProblem k = problem_from_transform(a);
    const auto kind = photonic_kind(noise);
    return CostEvaluator(std::make_shared<const Impl>(
        Impl{kind, std::move(k), std::move(mesh), std::move(ref), std::move(a), 0.0, std::move(noise)}));
}

CostEvaluator CostEvaluator::ovmm(const QuboProblem& problem, std::optional<NoiseParams> noise, bool allow_shift) {
    if (noise) {
        noise->validate();
    }
    double shift = 0.0;
    std::optional<Decomposition> d;
    try {
        d = decompose(problem);
    } catch (const NotPsdError&) {
        if (!allow_shift) {
            throw;
        }
        auto shifted = shift_to_psd(problem);
        shift = shifted.shift;
        d = decompose(shifted.shifted);
    }
    const auto kind = photonic_kind(noise);
    return CostEvaluator(std::make_shared<const Impl>(
        Impl{kind, problem, nullptr, {}, std::move(d->transform), shift, std::move(noise)}));
}

Evaluation CostEvaluator::evaluate(const BinaryState& s, Rng& rng) const {
    const Impl& im = *impl_;
    Evaluation e;
    e.theoretical_cost = cost(im.problem, s);
    if (im.kind == EvaluatorKind::exact) {
        e.measured_cost = e.theoretical_cost;
        return e;
    }
    ReadoutVector theoretical{im.transform->apply(s)};
    ReadoutVector measured = im.mesh ? im.mesh->readout(s, im.ref).readout : theoretical;
    if (im.noise) {
        measured = apply_noise(measured, *im.noise, rng);
    }
    e.measured_cost = cost_from_readout(measured) + shift_correction(im.shift, s);
    if (theoretical.i_bpd.squaredNorm() > 0.0) {
        e.scale = scale_factor(measured, theoretical);
        if (measured.i_bpd.squaredNorm() > 0.0) {
            e.fidelity = fidelity(measured, theoretical);
        }
    }
    return e;
}

EvaluatorKind CostEvaluator::kind() const noexcept {
    return impl_->kind;
}

std::size_t CostEvaluator::size() const noexcept {
    return impl_->problem.size();
}

const QuboProblem& CostEvaluator::problem() const noexcept {
    return impl_->problem;
}

namespace {

BinaryState random_state(std::size_t n, Rng& rng) {
    std::bernoulli_distribution coin(0.5);
    std::vector<std::uint8_t> bits(n);
    for (auto& b : bits) {
        b = static_cast<std::uint8_t>(coin(rng));
    }
    return BinaryState(std::move(bits));
}

}  // namespace

RunRecord anneal(const CostEvaluator& ev, const AnnealSchedule& sched, const FlipLaw& law, Rng& rng) {
    sched.validate();
    if (!(law.scale > 0.0)) {
        throw ConfigError("flip law scale must be positive");
    }
    const auto started = std::chrono::steady_clock::now();
    const std::size_t n = ev.size();

    auto checked_eval = [&](const BinaryState& s, std::size_t iteration) {
        try {
            return ev.evaluate(s, rng);
        } catch (const std::exception& e) {
            throw EvaluationError(iteration, e.what());
        }
    };

    RunRecord rec;
    rec.initial_state = random_state(n, rng);

    if (sched.cost_scale) {
        rec.cost_scale = *sched.cost_scale;
    } else {
        double largest = 0.0;
        for (std::size_t w = 0; w < sched.warmup_samples; ++w) {
            largest = std::max(largest, std::abs(checked_eval(random_state(n, rng), 0).measured_cost));
        }
        rec.cost_scale = largest > 0.0 ? largest : 1.0;
    }

    const Evaluation first = checked_eval(rec.initial_state, 0);
    rec.initial_measured_cost = first.measured_cost;
    rec.initial_theoretical_cost = first.theoretical_cost;

    BinaryState current = rec.initial_state;
    double cur_measured = first.measured_cost;
    double cur_theoretical = first.theoretical_cost;
    rec.best_state = current;
    rec.best_measured_cost = cur_measured;
    rec.best_theoretical_cost = cur_theoretical;

    rec.iterations.reserve(sched.n_iterations);
    for (std::size_t t = 0; t < sched.n_iterations; ++t) {
        IterationRecord it;
        it.iteration = t;
        it.beta = sched.beta_at(t);
        it.flips = sample_flip_count(it.beta, law, n, rng);
        it.proposed = propose(current, it.flips, rng);
        const Evaluation e = checked_eval(it.proposed, t);
        it.measured_cost = e.measured_cost;
        it.theoretical_cost = e.theoretical_cost;
        it.fidelity = e.fidelity;
        it.scale = e.scale;
        it.accepted = accept((cur_measured - e.measured_cost) / rec.cost_scale, it.beta, rng);
        if (it.accepted) {
            current = it.proposed;
            cur_measured = e.measured_cost;
            cur_theoretical = e.theoretical_cost;
        }
        if (e.measured_cost < rec.best_measured_cost) {
            rec.best_state = it.proposed;
            rec.best_measured_cost = e.measured_cost;
            rec.best_theoretical_cost = e.theoretical_cost;
        }
        it.current_measured_cost = cur_measured;
        it.current_theoretical_cost = cur_theoretical;
        it.best_measured_cost = rec.best_measured_cost;
        rec.iterations.push_back(std::move(it));
    }
    rec.wall_clock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return rec;
}

std::vector<BinaryState> accepted_states(const RunRecord& record) {
    std::vector<BinaryState> out;
    out.reserve(record.iterations.size());
    BinaryState current = record.initial_state;
    for (const auto& it : record.iterations) {
        if (it.accepted) {
            current = it.proposed;
        }
        out.push_back(current);
    }
    return out;
}

std::string to_string(Ramp r) {
    return r == Ramp::linear ? "linear" : "geometric";
}

std::string to_string(FlipLawKind k) {
    return k == FlipLawKind::geometric_truncated ? "geometric-truncated" : "exponential-mean";
}

std::string to_string(EvaluatorKind k) {
    switch (k) {
        case EvaluatorKind::exact:
            return "exact";
        case EvaluatorKind::photonic_noiseless:
            return "photonic-noiseless";
        case EvaluatorKind::photonic_noisy:
            return "photonic-noisy";
    }
    return "exact";
}

Ramp ramp_from_string(const std::string& s) {
    if (s == "linear") return Ramp::linear;
    if (s == "geometric") return Ramp::geometric;
    throw ConfigError("unknown ramp '" + s + "'");
}

FlipLawKind flip_law_from_string(const std::string& s) {
    if (s == "geometric-truncated") return FlipLawKind::geometric_truncated;
    if (s == "exponential-mean") return FlipLawKind::exponential_mean;
    throw ConfigError("unknown flip law '" + s + "'");
}

EvaluatorKind evaluator_kind_from_string(const std::string& s) {
    if (s == "exact") return EvaluatorKind::exact;
    if (s == "photonic-noiseless") return EvaluatorKind::photonic_noiseless;
    if (s == "photonic-noisy") return EvaluatorKind::photonic_noisy;
    throw ConfigError("unknown evaluator kind '" + s + "'");
}

}  // namespace phq
