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

#include "phq/harness.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <initializer_list>
#include <mutex>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "phq/errors.hpp"

#ifndef PHQ_VERSION
#define PHQ_VERSION "0.0.0"
#endif

namespace phq {

using nlohmann::json;

std::string version() {
    return PHQ_VERSION;
}

std::string to_string(ProblemSource s) {
    switch (s) {
        case ProblemSource::file:
            return "file";
        case ProblemSource::random_psd:
            return "random-psd";
        case ProblemSource::random_mesh_voltages:
            return "random-mesh-voltages";
    }
    return "file";
}

ProblemSource problem_source_from_string(const std::string& s) {
    if (s == "file") return ProblemSource::file;
    if (s == "random-psd") return ProblemSource::random_psd;
    if (s == "random-mesh-voltages") return ProblemSource::random_mesh_voltages;
    throw ConfigError("unknown problem source '" + s + "'");
}

void ExperimentConfig::validate() const {
    if (runs == 0) {
        throw ConfigError("a campaign needs at least one run");
    }
    if (iterations == 0) {
        throw ConfigError("a campaign needs at least one iteration");
    }
    for (double eta : eta_grid) {
        if (!(eta > 0.0 && eta <= 1.0)) {
            throw ConfigError("tolerance coefficients must lie in (0, 1]");
        }
    }
    if (source != ProblemSource::file && n == 0) {
        throw ConfigError("problem dimension must be positive");
    }
    if (target_snr_db && !std::isfinite(*target_snr_db)) {
        throw ConfigError("target SNR must be finite");
    }
    noise.validate();
    mesh.thermo.validate();
    AnnealSchedule s = schedule;
    s.n_iterations = iterations;
    s.validate();
    if (!(flip_law.scale > 0.0)) {
        throw ConfigError("flip law scale must be positive");
    }
    if (window.first > window.last) {
        throw ConfigError("wrong-acceptance window is reversed");
    }
}

namespace {

json optional_json(const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
}

json optional_json(const std::optional<int>& v) {
    return v ? json(*v) : json(nullptr);
}

template <typename T>
void read_if(const json& j, const char* key, T& out) {
    if (j.contains(key) && !j.at(key).is_null()) {
        out = j.at(key).get<T>();
    }
}

template <typename T>
void read_optional(const json& j, const char* key, std::optional<T>& out) {
    if (j.contains(key)) {
        if (j.at(key).is_null()) {
            out.reset();
        } else {
            out = j.at(key).get<T>();
        }
    }
}

}  // namespace

json config_to_json(const ExperimentConfig& cfg) {
    json problem{{"source", to_string(cfg.source)}, {"n", cfg.n}, {"seed", cfg.problem_seed}};
    if (cfg.source == ProblemSource::file) {
        problem["file"] = cfg.problem_file.string();
    }
    json noise{{"detector_sigma", cfg.noise.detector_sigma},
               {"laser_rel_sigma", cfg.noise.laser_rel_sigma},
               {"adc_bits", optional_json(cfg.noise.adc_bits)},
               {"adc_full_scale", cfg.noise.adc_full_scale},
               {"dac_bits", optional_json(cfg.noise.dac_bits)},
               {"seed", cfg.noise.seed},
               {"target_snr_db", optional_json(cfg.target_snr_db)}};
    json schedule{{"beta_start", cfg.schedule.beta_start},
                  {"beta_end", cfg.schedule.beta_end},
                  {"ramp", to_string(cfg.schedule.ramp)},
                  {"warmup_samples", cfg.schedule.warmup_samples},
                  {"cost_scale", optional_json(cfg.schedule.cost_scale)}};
    json mesh{{"topology_file",
               cfg.mesh.topology_file ? json(cfg.mesh.topology_file->string()) : json(nullptr)},
              {"phase_per_volt_sq", cfg.mesh.thermo.phase_per_volt_sq},
              {"max_voltage", cfg.mesh.thermo.max_voltage},
              {"e_ref", cfg.mesh.reference.e_ref}};
    return json{{"problem", std::move(problem)},
                {"runs", cfg.runs},
                {"iterations", cfg.iterations},
                {"eta_grid", cfg.eta_grid},
                {"evaluator", to_string(cfg.evaluator)},
                {"allow_shift", cfg.allow_shift},
                {"noise", std::move(noise)},
                {"schedule", std::move(schedule)},
                {"flip_law", {{"law", to_string(cfg.flip_law.law)}, {"scale", cfg.flip_law.scale}}},
                {"mesh", std::move(mesh)},
                {"master_seed", cfg.master_seed},
                {"wrong_accept_window", {cfg.window.first, cfg.window.last}}};
}

namespace {

// A misspelled key would otherwise be ignored silently.
void check_keys(const json& j, std::initializer_list<const char*> known, const char* where) {
    if (!j.is_object()) {
        throw ConfigError(std::string(where) + " must be a JSON object");
    }
    for (const auto& [key, value] : j.items()) {
        if (std::none_of(known.begin(), known.end(), [&](const char* k) { return key == k; })) {
            throw ConfigError("unknown key \"" + key + "\" in " + where);
        }
    }
}

}  // namespace

ExperimentConfig config_from_json(const json& root, ExperimentConfig cfg) {
    // The config.json echo written next to the results nests the config.
    const json& j = root.is_object() && root.contains("config") ? root.at("config") : root;
    try {
        check_keys(j,
                   {"problem", "runs", "iterations", "eta_grid", "evaluator", "allow_shift", "noise", "schedule",
                    "flip_law", "mesh", "master_seed", "wrong_accept_window", "threads"},
                   "experiment config");
        if (j.contains("problem")) {
            const json& p = j.at("problem");
            check_keys(p, {"source", "n", "seed", "file"}, "problem");
            if (p.contains("source")) {
                cfg.source = problem_source_from_string(p.at("source").get<std::string>());
            }
            read_if(p, "n", cfg.n);
            read_if(p, "seed", cfg.problem_seed);
            if (p.contains("file") && p.at("file").is_string()) {
                cfg.problem_file = p.at("file").get<std::string>();
            }
        }
        read_if(j, "runs", cfg.runs);
        read_if(j, "iterations", cfg.iterations);
        read_if(j, "eta_grid", cfg.eta_grid);
        if (j.contains("evaluator")) {
            cfg.evaluator = evaluator_kind_from_string(j.at("evaluator").get<std::string>());
        }
        read_if(j, "allow_shift", cfg.allow_shift);
        if (j.contains("noise")) {
            const json& nj = j.at("noise");
            check_keys(nj,
                       {"detector_sigma", "laser_rel_sigma", "adc_bits", "adc_full_scale", "dac_bits", "seed",
                        "target_snr_db"},
                       "noise");
            read_if(nj, "detector_sigma", cfg.noise.detector_sigma);
            read_if(nj, "laser_rel_sigma", cfg.noise.laser_rel_sigma);
            read_optional(nj, "adc_bits", cfg.noise.adc_bits);
            read_if(nj, "adc_full_scale", cfg.noise.adc_full_scale);
            read_optional(nj, "dac_bits", cfg.noise.dac_bits);
            read_if(nj, "seed", cfg.noise.seed);
            read_optional(nj, "target_snr_db", cfg.target_snr_db);
        }
        if (j.contains("schedule")) {
            const json& sj = j.at("schedule");
            check_keys(sj, {"beta_start", "beta_end", "ramp", "warmup_samples", "cost_scale"}, "schedule");
            read_if(sj, "beta_start", cfg.schedule.beta_start);
            read_if(sj, "beta_end", cfg.schedule.beta_end);
            if (sj.contains("ramp")) {
                cfg.schedule.ramp = ramp_from_string(sj.at("ramp").get<std::string>());
            }
            read_if(sj, "warmup_samples", cfg.schedule.warmup_samples);
            read_optional(sj, "cost_scale", cfg.schedule.cost_scale);
        }
        if (j.contains("flip_law")) {
            const json& fj = j.at("flip_law");
            check_keys(fj, {"law", "scale"}, "flip_law");
            if (fj.contains("law")) {
                cfg.flip_law.law = flip_law_from_string(fj.at("law").get<std::string>());
            }
            read_if(fj, "scale", cfg.flip_law.scale);
        }
        if (j.contains("mesh")) {
            const json& mj = j.at("mesh");
            check_keys(mj, {"topology_file", "phase_per_volt_sq", "max_voltage", "e_ref"}, "mesh");
            if (mj.contains("topology_file")) {
                if (mj.at("topology_file").is_null()) {
                    cfg.mesh.topology_file.reset();
                } else {
                    cfg.mesh.topology_file = mj.at("topology_file").get<std::string>();
                }
            }
            read_if(mj, "phase_per_volt_sq", cfg.mesh.thermo.phase_per_volt_sq);
            read_if(mj, "max_voltage", cfg.mesh.thermo.max_voltage);
            read_if(mj, "e_ref", cfg.mesh.reference.e_ref);
        }
        read_if(j, "master_seed", cfg.master_seed);
        if (j.contains("wrong_accept_window")) {
            const auto w = j.at("wrong_accept_window").get<std::vector<std::size_t>>();
            if (w.size() != 2) {
                throw ConfigError("wrong_accept_window must be [first, last]");
            }
            cfg.window = WrongAcceptanceWindow{w[0], w[1]};
        }
        read_if(j, "threads", cfg.threads);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed experiment config: ") + e.what());
    }
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open config " + path.string());
    }
    try {
        return config_from_json(json::parse(in), std::move(base));
    } catch (const json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

GeneratedProblem generate_problem(ProblemSource mode, std::size_t n, Rng& rng, const MeshSettings& mesh,
                                  const std::filesystem::path& file, std::optional<int> dac_bits) {
    switch (mode) {
        case ProblemSource::file:
            return GeneratedProblem{load_problem(file), nullptr};
        case ProblemSource::random_psd: {
            if (n == 0) {
                throw DimensionError("problem dimension must be positive");
            }
            std::normal_distribution<double> gauss(0.0, 1.0);
            const auto en = static_cast<Eigen::Index>(n);
            RealMatrix b(en, en);
            for (Eigen::Index i = 0; i < en; ++i) {
                for (Eigen::Index j = 0; j < en; ++j) {
                    b(i, j) = gauss(rng);
                }
            }
            return GeneratedProblem{problem_from_transform(TransformMatrix(std::move(b))), nullptr};
        }
        case ProblemSource::random_mesh_voltages: {
            auto topo = std::make_shared<const MeshTopology>(mesh.topology_file ? load_topology(*mesh.topology_file)
                                                                                : build_topology(n));
            if (topo->n_ports() != n) {
                throw DimensionError("topology has " + std::to_string(topo->n_ports()) + " ports, problem needs " +
                                     std::to_string(n));
            }
            VoltageVector v = experimental_voltages(*topo, mesh.thermo.max_voltage, rng);
            if (dac_bits) {
                v = quantize_voltages(v, *dac_bits, mesh.thermo.max_voltage);
            }
            auto configured = std::make_shared<const ConfiguredMesh>(topo, std::move(v), mesh.thermo);
            QuboProblem k = problem_from_transform(effective_matrix(configured->unitary(), mesh.reference));
            return GeneratedProblem{std::move(k), std::move(configured)};
        }
    }
    throw ConfigError("unknown problem source");
}

GeneratedProblem generate_problem(const ExperimentConfig& cfg) {
    Rng rng(cfg.problem_seed);
    return generate_problem(cfg.source, cfg.n, rng, cfg.mesh, cfg.problem_file, cfg.noise.dac_bits);
}

std::vector<double> success_curve(std::span<const RunRecord> records, double c_min, double eta) {
    if (c_min == 0.0) {
        throw DegenerateProblemError("success probability is undefined when C_min = 0");
    }
    if (records.empty()) {
        return {};
    }
    const double threshold = eta * c_min;
    std::size_t len = records.front().iterations.size();
    for (const auto& r : records) {
        len = std::min(len, r.iterations.size());
    }
    std::vector<double> prob(len, 0.0);
    for (const auto& r : records) {
        for (std::size_t t = 0; t < len; ++t) {
            prob[t] += static_cast<double>(r.iterations[t].current_theoretical_cost < threshold);
        }
    }
    for (auto& p : prob) {
        p /= static_cast<double>(records.size());
    }
    return prob;
}

std::vector<EtaCurve> success_curves(std::span<const RunRecord> records, double c_min, std::span<const double> etas) {
    std::vector<EtaCurve> out;
    for (double eta : etas) {
        out.push_back(EtaCurve{eta, success_curve(records, c_min, eta)});
    }
    return out;
}

namespace {

RealVector reference_readout(const ExperimentConfig& cfg, const GeneratedProblem& problem, const BinaryState& s) {
    if (problem.mesh) {
        return problem.mesh->readout(s, cfg.mesh.reference).readout.i_bpd;
    }
    QuboProblem k = problem.problem;
    if (cfg.allow_shift) {
        try {
            return decompose(k).transform.apply(s);
        } catch (const NotPsdError&) {
            return decompose(shift_to_psd(k).shifted).transform.apply(s);
        }
    }
    return decompose(k).transform.apply(s);
}

}  // namespace

double calibrated_detector_sigma(const ExperimentConfig& cfg, const GeneratedProblem& problem,
                                 const GroundTruth& truth) {
    if (!cfg.target_snr_db) {
        return cfg.noise.detector_sigma;
    }
    const ReadoutVector ref{reference_readout(cfg, problem, truth.s_min)};
    return calibrate_detector_sigma(ref, *cfg.target_snr_db, cfg.noise.laser_rel_sigma, 20000,
                                    derive_seed(cfg.noise.seed, 0xCA1));
}

CostEvaluator make_evaluator(const ExperimentConfig& cfg, const GeneratedProblem& problem,
                             std::optional<double> detector_sigma) {
    std::optional<NoiseParams> noise;
    if (cfg.evaluator == EvaluatorKind::photonic_noisy) {
        noise = cfg.noise;
        if (detector_sigma) {
            noise->detector_sigma = *detector_sigma;
        }
    }
    switch (cfg.evaluator) {
        case EvaluatorKind::exact:
            return CostEvaluator::exact(problem.problem);
        case EvaluatorKind::photonic_noiseless:
        case EvaluatorKind::photonic_noisy:
            if (problem.mesh) {
                return CostEvaluator::photonic(problem.mesh, cfg.mesh.reference, noise);
            }
            return CostEvaluator::ovmm(problem.problem, noise, cfg.allow_shift);
    }
    throw ConfigError("unknown evaluator kind");
}

CampaignResult run_campaign(const ExperimentConfig& cfg, std::optional<GroundTruth> cached_truth) {
    cfg.validate();
    return run_campaign(cfg, generate_problem(cfg), std::move(cached_truth));
}

CampaignResult run_campaign(const ExperimentConfig& cfg, GeneratedProblem problem,
                            std::optional<GroundTruth> cached_truth) {
    cfg.validate();
    GroundTruth truth = cached_truth ? *cached_truth : brute_force_min(problem.problem);

    std::optional<double> sigma;
    if (cfg.evaluator == EvaluatorKind::photonic_noisy) {
        sigma = calibrated_detector_sigma(cfg, problem, truth);
    }
    const CostEvaluator ev = make_evaluator(cfg, problem, sigma);
    AnnealSchedule sched = cfg.schedule;
    sched.n_iterations = cfg.iterations;

    std::vector<RunRecord> runs(cfg.runs);
    std::vector<std::exception_ptr> failures(cfg.runs);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cfg.runs; i = next++) {
            try {
                const std::uint64_t seed = derive_seed(cfg.master_seed, i);
                Rng rng(seed);
                runs[i] = anneal(ev, sched, cfg.flip_law, rng);
                runs[i].run_index = i;
                runs[i].seed = seed;
            } catch (...) {
                failures[i] = std::current_exception();
            }
        }
    };
    std::size_t n_threads = cfg.threads ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());
    n_threads = std::min(n_threads, cfg.runs);
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < n_threads; ++t) {
            pool.emplace_back(worker);
        }
    }
    for (std::size_t i = 0; i < failures.size(); ++i) {
        if (failures[i]) {
            try {
                std::rethrow_exception(failures[i]);
            } catch (const std::exception& e) {
                throw Error("run " + std::to_string(i) + " failed: " + e.what());
            }
        }
    }

    CampaignResult result{cfg,   std::move(problem.problem), std::move(problem.mesh), std::move(truth), sigma,
                          {},    {},                         {},                      {},               version()};
    result.runs = std::move(runs);
    if (result.ground_truth.c_min != 0.0) {
        result.curves = success_curves(result.runs, result.ground_truth.c_min, cfg.eta_grid);
        for (const auto& r : result.runs) {
            result.run_stability.push_back(stability_report(r, result.ground_truth.c_min, cfg.window));
        }
        result.stability = aggregate_stability(result.run_stability);
    }
    return result;
}

std::string format_double(double x) {
    if (std::isnan(x)) {
        return "nan";
    }
    if (std::isinf(x)) {
        return x > 0 ? "inf" : "-inf";
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw IoError("bad number '" + s + "'");
    }
    return v;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

void write_json(const json& j, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << j.dump(2) << '\n';
    finish(out, path);
}

json measured_or_null(double x) {
    return std::isfinite(x) ? json(x) : json(nullptr);
}

double read_measured(const json& j) {
    return j.is_null() ? kNotMeasured : j.get<double>();
}

}  // namespace

void write_run_records(std::span<const RunRecord> records, const std::filesystem::path& path,
                       bool include_wall_clock) {
    auto out = open_for_write(path);
    for (const auto& r : records) {
        json head{{"type", "run"},
                  {"run", r.run_index},
                  {"seed", r.seed},
                  {"cost_scale", r.cost_scale},
                  {"initial_state", r.initial_state.to_string()},
                  {"initial_measured_cost", r.initial_measured_cost},
                  {"initial_theoretical_cost", r.initial_theoretical_cost},
                  {"best_state", r.best_state.to_string()},
                  {"best_measured_cost", r.best_measured_cost},
                  {"best_theoretical_cost", r.best_theoretical_cost},
                  {"iterations", r.iterations.size()}};
        if (include_wall_clock) {
            head["wall_clock_s"] = r.wall_clock_s;
        }
        out << head.dump() << '\n';
        for (const auto& it : r.iterations) {
            json line{{"type", "iter"},
                      {"run", r.run_index},
                      {"t", it.iteration},
                      {"beta", it.beta},
                      {"m", it.flips},
                      {"proposed", it.proposed.to_string()},
                      {"accepted", it.accepted},
                      {"measured_cost", it.measured_cost},
                      {"theoretical_cost", it.theoretical_cost},
                      {"current_measured_cost", it.current_measured_cost},
                      {"current_theoretical_cost", it.current_theoretical_cost},
                      {"best_measured_cost", it.best_measured_cost},
                      {"fidelity", measured_or_null(it.fidelity)},
                      {"scale", measured_or_null(it.scale)}};
            out << line.dump() << '\n';
        }
    }
    finish(out, path);
}

std::vector<RunRecord> load_run_records(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::vector<RunRecord> records;
    std::string line;
    std::size_t line_no = 0;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.empty()) {
                continue;
            }
            const json j = json::parse(line);
            const auto type = j.at("type").get<std::string>();
            if (type == "run") {
                RunRecord r;
                r.run_index = j.at("run").get<std::size_t>();
                r.seed = j.at("seed").get<std::uint64_t>();
                r.cost_scale = j.at("cost_scale").get<double>();
                r.initial_state = BinaryState::from_string(j.at("initial_state").get<std::string>());
                r.initial_measured_cost = j.at("initial_measured_cost").get<double>();
                r.initial_theoretical_cost = j.at("initial_theoretical_cost").get<double>();
                r.best_state = BinaryState::from_string(j.at("best_state").get<std::string>());
                r.best_measured_cost = j.at("best_measured_cost").get<double>();
                r.best_theoretical_cost = j.at("best_theoretical_cost").get<double>();
                r.wall_clock_s = j.value("wall_clock_s", 0.0);
                r.iterations.reserve(j.at("iterations").get<std::size_t>());
                records.push_back(std::move(r));
            } else if (type == "iter") {
                if (records.empty() || records.back().run_index != j.at("run").get<std::size_t>()) {
                    throw IoError("iteration line without its run header");
                }
                IterationRecord it;
                it.iteration = j.at("t").get<std::size_t>();
                it.beta = j.at("beta").get<double>();
                it.flips = j.at("m").get<std::size_t>();
                it.proposed = BinaryState::from_string(j.at("proposed").get<std::string>());
                it.accepted = j.at("accepted").get<bool>();
                it.measured_cost = j.at("measured_cost").get<double>();
                it.theoretical_cost = j.at("theoretical_cost").get<double>();
                it.current_measured_cost = j.at("current_measured_cost").get<double>();
                it.current_theoretical_cost = j.at("current_theoretical_cost").get<double>();
                it.best_measured_cost = j.at("best_measured_cost").get<double>();
                it.fidelity = read_measured(j.at("fidelity"));
                it.scale = read_measured(j.at("scale"));
                records.back().iterations.push_back(std::move(it));
            } else {
                throw IoError("unknown record type '" + type + "'");
            }
        }
    } catch (const json::exception& e) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const Error& e) {
        throw IoError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
    return records;
}

void write_success_curves(std::span<const EtaCurve> curves, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "eta,iteration,probability\n";
    for (const auto& c : curves) {
        for (std::size_t t = 0; t < c.probability.size(); ++t) {
            out << format_double(c.eta) << ',' << t << ',' << format_double(c.probability[t]) << '\n';
        }
    }
    finish(out, path);
}

std::vector<EtaCurve> load_success_curves(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    std::string line;
    if (!std::getline(in, line) || line != "eta,iteration,probability") {
        throw IoError(path.string() + ": missing success-curve header");
    }
    std::vector<EtaCurve> curves;
    while (std::getline(in, line)) {
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string eta_s, t_s, p_s;
        std::getline(ss, eta_s, ',');
        std::getline(ss, t_s, ',');
        std::getline(ss, p_s, ',');
        const double eta = parse_double(eta_s);
        const auto t = static_cast<std::size_t>(std::stoull(t_s));
        if (curves.empty() || curves.back().eta != eta) {
            curves.push_back(EtaCurve{eta, {}});
        }
        if (t != curves.back().probability.size()) {
            throw IoError(path.string() + ": iterations out of order");
        }
        curves.back().probability.push_back(parse_double(p_s));
    }
    return curves;
}

void write_evolution(std::span<const RunRecord> records, double c_min, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "run,iteration,normalized_cost\n";
    const double denom = std::abs(c_min);
    for (const auto& r : records) {
        for (const auto& it : r.iterations) {
            const double v = denom > 0 ? it.current_theoretical_cost / denom : 0.0;
            out << r.run_index << ',' << it.iteration << ',' << format_double(v) << '\n';
        }
    }
    finish(out, path);
}

void write_stability(const StabilityReport& aggregate, std::span<const StabilityReport> per_run,
                     const std::filesystem::path& path) {
    json runs = json::array();
    for (const auto& r : per_run) {
        runs.push_back(stability_to_json(r));
    }
    write_json(json{{"aggregate", stability_to_json(aggregate)}, {"runs", std::move(runs)}}, path);
}

void export_campaign(const CampaignResult& result, const std::filesystem::path& dir, ExportOptions opts) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }
    json cfg = config_to_json(result.config);
    json echo{{"config", std::move(cfg)},
              {"version", result.version},
              {"detector_sigma_used", result.detector_sigma ? json(*result.detector_sigma) : json(nullptr)}};
    write_json(echo, dir / "config.json");
    write_json(problem_to_json(result.problem), dir / "problem.json");
    write_json(ground_truth_to_json(result.ground_truth, result.problem), dir / "ground_truth.json");
    if (result.mesh) {
        write_json(mesh_state_to_json(*result.mesh, result.config.mesh.reference), dir / "mesh_state.json");
    }
    write_run_records(result.runs, dir / "runs.jsonl", opts.include_wall_clock);

    {
        const auto path = dir / "summary.csv";
        auto out = open_for_write(path);
        out << "run,seed,initial_cost,best_state,best_theoretical_cost,final_cost,acceptance_rate";
        out << (opts.include_wall_clock ? ",wall_clock_s\n" : "\n");
        for (const auto& r : result.runs) {
            std::size_t accepted = 0;
            for (const auto& it : r.iterations) {
                accepted += it.accepted ? 1 : 0;
            }
            const double final_cost =
                r.iterations.empty() ? r.initial_theoretical_cost : r.iterations.back().current_theoretical_cost;
            const double rate =
                r.iterations.empty() ? 0.0 : static_cast<double>(accepted) / static_cast<double>(r.iterations.size());
            out << r.run_index << ',' << r.seed << ',' << format_double(r.initial_theoretical_cost) << ','
                << r.best_state.to_string() << ',' << format_double(r.best_theoretical_cost) << ','
                << format_double(final_cost) << ',' << format_double(rate);
            if (opts.include_wall_clock) {
                out << ',' << format_double(r.wall_clock_s);
            }
            out << '\n';
        }
        finish(out, path);
    }
    write_success_curves(result.curves, dir / "success_curves.csv");
    write_evolution(result.runs, result.ground_truth.c_min, dir / "evolution.csv");
    write_stability(result.stability, result.run_stability, dir / "stability.json");
}

}  // namespace phq
