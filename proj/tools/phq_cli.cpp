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

// phq: command-line front end.
//
//   phq gen        generate a problem (and its ground truth) into the output dir
//   phq solve      run a campaign and export every result file
//   phq stability  recompute stability metrics from exported run records
//   phq curves     recompute success / evolution CSVs from exported run records
//   phq timing     latency and throughput report
//
// Output directory: --out, else $PHQ_OUTPUT_DIR, else ./phq_out.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "phq/phq.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kOutputEnv = "PHQ_OUTPUT_DIR";

fs::path output_dir(const std::string& flag) {
    if (!flag.empty()) return flag;
    if (const char* env = std::getenv(kOutputEnv); env && *env) return env;
    return "phq_out";
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out || !(out << text)) throw phq::IoError("cannot write " + path.string());
}

json read_json(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw phq::IoError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw phq::IoError(path.string() + ": " + e.what());
    }
}

// Flags that override the experiment config. Unset optionals leave the
// config-file (or default) value alone.
struct ExperimentFlags {
    std::string config;
    std::optional<std::string> source, problem_file, evaluator, ramp, flip_law, topology;
    std::optional<std::size_t> n, runs, iterations, threads;
    std::optional<std::uint64_t> problem_seed, master_seed, noise_seed;
    std::optional<double> target_snr_db, detector_sigma, laser_sigma, beta_start, beta_end, flip_scale, e_ref,
        phase_per_volt_sq, max_voltage;
    std::optional<int> adc_bits, dac_bits;
    std::vector<double> eta;
    std::vector<std::size_t> window;
    bool no_calibration = false;
    bool allow_shift = false;

    void attach(CLI::App* app, bool full) {
        app->add_option("-c,--config", config, "experiment config JSON")->check(CLI::ExistingFile);
        app->add_option("--source", source, "file | random-psd | random-mesh-voltages");
        app->add_option("--problem-file", problem_file, "problem JSON for --source file");
        app->add_option("--n", n, "problem dimension");
        app->add_option("--problem-seed", problem_seed, "seed for problem generation");
        app->add_option("--topology", topology, "mesh topology JSON (default: built-in 16x4 FFT mesh)");
        app->add_option("--e-ref", e_ref, "reference-arm amplitude |E_ref|");
        app->add_option("--phase-per-volt-sq", phase_per_volt_sq, "thermo-optic coefficient (rad/V^2)");
        app->add_option("--max-voltage", max_voltage, "drive voltage ceiling (V)");
        app->add_option("--dac-bits", dac_bits, "quantize drive voltages to this many bits");
        if (!full) return;
        app->add_option("--runs", runs, "annealing runs");
        app->add_option("--iterations", iterations, "iterations per run");
        app->add_option("--eta", eta, "tolerance coefficients")->delimiter(',');
        app->add_option("--evaluator", evaluator, "exact | ovmm | photonic-noiseless | photonic-noisy");
        app->add_option("--target-snr-db", target_snr_db, "calibrate detector noise to this cost SNR");
        app->add_flag("--no-calibration", no_calibration, "use --detector-sigma as given");
        app->add_option("--detector-sigma", detector_sigma, "additive detector noise per channel");
        app->add_option("--laser-sigma", laser_sigma, "common-mode relative laser fluctuation");
        app->add_option("--adc-bits", adc_bits, "readout quantizer bits");
        app->add_option("--noise-seed", noise_seed, "seed of the calibration draws");
        app->add_option("--beta-start", beta_start, "inverse temperature at the first iteration");
        app->add_option("--beta-end", beta_end, "inverse temperature at the last iteration");
        app->add_option("--ramp", ramp, "geometric | linear");
        app->add_option("--flip-law", flip_law, "geometric-truncated | exponential-mean");
        app->add_option("--flip-scale", flip_scale, "flip-count decay per unit beta");
        app->add_option("--seed", master_seed, "master seed of the campaign");
        app->add_option("--threads", threads, "worker threads (0 = all cores)");
        app->add_option("--window", window, "wrong-acceptance window FIRST LAST")->expected(2);
        app->add_flag("--allow-shift", allow_shift, "shift indefinite problems to PSD");
    }

    phq::ExperimentConfig resolve() const {
        phq::ExperimentConfig cfg = config.empty() ? phq::ExperimentConfig{} : phq::load_config(config);
        if (source) cfg.source = phq::problem_source_from_string(*source);
        if (problem_file) {
            cfg.problem_file = *problem_file;
            if (!source) cfg.source = phq::ProblemSource::file;
        }
        if (n) cfg.n = *n;
        if (problem_seed) cfg.problem_seed = *problem_seed;
        if (topology) cfg.mesh.topology_file = fs::path(*topology);
        if (e_ref) cfg.mesh.reference.e_ref = *e_ref;
        if (phase_per_volt_sq) cfg.mesh.thermo.phase_per_volt_sq = *phase_per_volt_sq;
        if (max_voltage) cfg.mesh.thermo.max_voltage = *max_voltage;
        if (dac_bits) cfg.noise.dac_bits = *dac_bits;
        if (runs) cfg.runs = *runs;
        if (iterations) cfg.iterations = *iterations;
        if (!eta.empty()) cfg.eta_grid = eta;
        if (evaluator) cfg.evaluator = phq::evaluator_kind_from_string(*evaluator);
        if (target_snr_db) cfg.target_snr_db = *target_snr_db;
        if (no_calibration) cfg.target_snr_db.reset();
        if (detector_sigma) cfg.noise.detector_sigma = *detector_sigma;
        if (laser_sigma) cfg.noise.laser_rel_sigma = *laser_sigma;
        if (adc_bits) cfg.noise.adc_bits = *adc_bits;
        if (noise_seed) cfg.noise.seed = *noise_seed;
        if (beta_start) cfg.schedule.beta_start = *beta_start;
        if (beta_end) cfg.schedule.beta_end = *beta_end;
        if (ramp) cfg.schedule.ramp = phq::ramp_from_string(*ramp);
        if (flip_law) cfg.flip_law.law = phq::flip_law_from_string(*flip_law);
        if (flip_scale) cfg.flip_law.scale = *flip_scale;
        if (master_seed) cfg.master_seed = *master_seed;
        if (threads) cfg.threads = *threads;
        if (window.size() == 2) cfg.window = phq::WrongAcceptanceWindow{window[0], window[1]};
        if (allow_shift) cfg.allow_shift = true;
        cfg.validate();
        return cfg;
    }
};

// Campaign inputs read back from an exported directory or explicit files.
struct RecordInputs {
    std::string dir, records, problem, truth;

    void attach(CLI::App* app) {
        app->add_option("--from", dir, "exported campaign directory");
        app->add_option("--records", records, "runs.jsonl (default: <from>/runs.jsonl)");
        app->add_option("--problem", problem, "problem.json (default: <from>/problem.json)");
        app->add_option("--ground-truth", truth, "ground_truth.json (default: <from>/ground_truth.json)");
    }

    fs::path pick(const std::string& explicit_path, const char* name) const {
        if (!explicit_path.empty()) return explicit_path;
        if (dir.empty()) throw phq::ConfigError(std::string("need --from or an explicit path for ") + name);
        return fs::path(dir) / name;
    }

    std::vector<phq::RunRecord> load_records() const { return phq::load_run_records(pick(records, "runs.jsonl")); }

    phq::GroundTruth load_truth() const {
        const auto p = phq::load_problem(pick(problem, "problem.json"));
        return phq::ground_truth_from_json(read_json(pick(truth, "ground_truth.json")), p);
    }

    // Falls back to the campaign's own config echo for defaults.
    std::optional<phq::ExperimentConfig> echoed_config() const {
        if (dir.empty() || !fs::exists(fs::path(dir) / "config.json")) return std::nullopt;
        return phq::config_from_json(read_json(fs::path(dir) / "config.json").at("config"));
    }
};

std::string percent(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
    return buf;
}

int cmd_gen(const ExperimentFlags& flags, const std::string& out_flag, bool skip_truth) {
    const auto cfg = flags.resolve();
    const auto out = output_dir(out_flag);
    fs::create_directories(out);
    const auto g = phq::generate_problem(cfg);
    phq::save_problem(g.problem, out / "problem.json");
    std::cout << "problem: n=" << g.problem.size() << " -> " << (out / "problem.json").string() << '\n';
    if (g.mesh) {
        write_text(out / "mesh_state.json", phq::mesh_state_to_json(*g.mesh, cfg.mesh.reference).dump(2) + "\n");
        phq::save_topology(g.mesh->topology(), out / "topology.json");
        std::cout << "mesh state -> " << (out / "mesh_state.json").string() << '\n';
    }
    if (!skip_truth) {
        const auto gt = phq::brute_force_min(g.problem);
        write_text(out / "ground_truth.json", phq::ground_truth_to_json(gt, g.problem).dump(2) + "\n");
        std::cout << "ground truth: C_min=" << phq::format_double(gt.c_min) << " s=" << gt.s_min.to_string() << '\n';
    }
    return 0;
}

int cmd_solve(const ExperimentFlags& flags, const std::string& out_flag, const std::string& truth_cache,
              bool wall_clock) {
    const auto cfg = flags.resolve();
    const auto out = output_dir(out_flag);
    auto problem = phq::generate_problem(cfg);

    std::optional<phq::GroundTruth> truth;
    if (!truth_cache.empty() && fs::exists(truth_cache)) {
        truth = phq::ground_truth_from_json(read_json(truth_cache), problem.problem);
        std::cout << "ground truth from cache " << truth_cache << '\n';
    }
    const auto result = phq::run_campaign(cfg, std::move(problem), truth);
    if (!truth_cache.empty() && !truth) {
        write_text(truth_cache, phq::ground_truth_to_json(result.ground_truth, result.problem).dump(2) + "\n");
    }
    phq::export_campaign(result, out, phq::ExportOptions{wall_clock});

    std::cout << "C_min=" << phq::format_double(result.ground_truth.c_min)
              << " s_min=" << result.ground_truth.s_min.to_string() << '\n';
    if (result.detector_sigma) {
        std::cout << "detector sigma=" << phq::format_double(*result.detector_sigma) << '\n';
    }
    for (const auto& c : result.curves) {
        if (!c.probability.empty()) {
            std::cout << "eta=" << phq::format_double(c.eta) << " final success=" << c.probability.back() << '\n';
        }
    }
    const auto& s = result.stability;
    std::cout << "mean fidelity=" << s.mean_fidelity << " SNR="
              << (std::isfinite(s.snr_db) ? std::to_string(s.snr_db) + " dB" : std::string("inf"))
              << " wrong acceptance=" << percent(s.wrong_accept_fraction) << '\n';
    std::cout << "results -> " << out.string() << '\n';
    return 0;
}

int cmd_stability(const RecordInputs& in, const std::string& out_flag, const std::vector<std::size_t>& window) {
    const auto records = in.load_records();
    const auto truth = in.load_truth();
    phq::WrongAcceptanceWindow w;
    if (auto cfg = in.echoed_config()) w = cfg->window;
    if (window.size() == 2) w = phq::WrongAcceptanceWindow{window[0], window[1]};
    std::vector<phq::StabilityReport> per_run;
    for (const auto& r : records) per_run.push_back(phq::stability_report(r, truth.c_min, w));
    const auto agg = phq::aggregate_stability(per_run);
    const auto out = output_dir(out_flag);
    fs::create_directories(out);
    phq::write_stability(agg, per_run, out / "stability.json");
    std::cout << phq::stability_to_json(agg).dump(2) << '\n';
    return 0;
}

int cmd_curves(const RecordInputs& in, const std::string& out_flag, std::vector<double> etas) {
    const auto records = in.load_records();
    const auto truth = in.load_truth();
    if (etas.empty()) {
        etas = in.echoed_config() ? in.echoed_config()->eta_grid : phq::ExperimentConfig{}.eta_grid;
    }
    const auto out = output_dir(out_flag);
    fs::create_directories(out);
    const auto curves = phq::success_curves(records, truth.c_min, etas);
    phq::write_success_curves(curves, out / "success_curves.csv");
    phq::write_evolution(records, truth.c_min, out / "evolution.csv");
    for (const auto& c : curves) {
        if (!c.probability.empty()) {
            std::cout << "eta=" << phq::format_double(c.eta) << " final success=" << c.probability.back() << '\n';
        }
    }
    return 0;
}

phq::timing::TimingParams timing_from_json(const json& j) {
    phq::timing::TimingParams p;
    auto rd = [&](const char* k, auto& v) {
        if (j.contains(k)) v = j.at(k).get<std::remove_reference_t<decltype(v)>>();
    };
    rd("clock_hz", p.clock_hz);
    rd("mod_bandwidth_hz", p.mod_bandwidth_hz);
    rd("pd_bandwidth_hz", p.pd_bandwidth_hz);
    rd("path_length_m", p.path_length_m);
    rd("group_index", p.group_index);
    rd("rx_latency_cycles", p.rx_latency_cycles);
    rd("processed_cycles", p.processed_cycles);
    rd("sample_rise_cycles", p.sample_rise_cycles);
    rd("sample_fall_cycles", p.sample_fall_cycles);
    rd("iter_time_s", p.iter_time_s);
    rd("n", p.n);
    rd("chip_area_mm2", p.chip_area_mm2);
    if (j.contains("dac_latency_s")) p.dac_latency_s = j.at("dac_latency_s").get<double>();
    if (j.contains("adc_latency_s")) p.adc_latency_s = j.at("adc_latency_s").get<double>();
    return p;
}

struct TimingFlags {
    std::string config, format = "json";
    std::optional<double> clock_hz, mod_bw, pd_bw, length, group_index, iter_time, area, dac_ns, adc_ns;
    std::optional<std::size_t> n;
};

int cmd_timing(const TimingFlags& f, const std::string& out_flag, bool save) {
    auto p = f.config.empty() ? phq::timing::TimingParams{} : timing_from_json(read_json(f.config));
    if (f.clock_hz) p.clock_hz = *f.clock_hz;
    if (f.mod_bw) p.mod_bandwidth_hz = *f.mod_bw;
    if (f.pd_bw) p.pd_bandwidth_hz = *f.pd_bw;
    if (f.length) p.path_length_m = *f.length;
    if (f.group_index) p.group_index = *f.group_index;
    if (f.iter_time) p.iter_time_s = *f.iter_time;
    if (f.area) p.chip_area_mm2 = *f.area;
    if (f.n) p.n = *f.n;
    if (f.dac_ns) p.dac_latency_s = *f.dac_ns * 1e-9;
    if (f.adc_ns) p.adc_latency_s = *f.adc_ns * 1e-9;
    const auto b = phq::timing::latency_breakdown(p);
    const auto t = phq::timing::throughput(p, b);
    const std::string js = phq::timing::report_json(p, b, t).dump(2) + "\n";
    const std::string csv = phq::timing::report_csv(b, t);
    std::cout << (f.format == "csv" ? csv : js);
    if (save) {
        const auto out = output_dir(out_flag);
        fs::create_directories(out);
        write_text(out / "timing.json", js);
        write_text(out / "timing.csv", csv);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phq: photonic QUBO solver digital twin"};
    app.set_version_flag("--version", phq::version());
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_flag;
    app.add_option("-o,--out", out_flag, std::string("output directory (default $") + kOutputEnv + " or ./phq_out)");

    ExperimentFlags gen_flags;
    bool skip_truth = false;
    auto* gen = app.add_subcommand("gen", "generate a problem and its ground truth");
    gen_flags.attach(gen, false);
    gen->add_flag("--no-ground-truth", skip_truth, "skip the exhaustive search");

    ExperimentFlags solve_flags;
    std::string truth_cache;
    bool wall_clock = false;
    auto* solve = app.add_subcommand("solve", "run an annealing campaign and export the results");
    solve_flags.attach(solve, true);
    solve->add_option("--truth-cache", truth_cache, "ground-truth cache file (read if valid, written otherwise)");
    solve->add_flag("--wall-clock", wall_clock, "include wall-clock times (exports stop being byte-reproducible)");

    RecordInputs stab_in;
    std::vector<std::size_t> stab_window;
    auto* stab = app.add_subcommand("stability", "stability metrics from exported run records");
    stab_in.attach(stab);
    stab->add_option("--window", stab_window, "wrong-acceptance window FIRST LAST")->expected(2);

    RecordInputs curve_in;
    std::vector<double> curve_eta;
    auto* curves = app.add_subcommand("curves", "success and evolution CSVs from exported run records");
    curve_in.attach(curves);
    curves->add_option("--eta", curve_eta, "tolerance coefficients")->delimiter(',');

    TimingFlags tf;
    bool save_timing = false;
    auto* timing = app.add_subcommand("timing", "latency and throughput of the hardware loop");
    timing->add_option("-c,--config", tf.config, "timing parameter JSON")->check(CLI::ExistingFile);
    timing->add_option("--format", tf.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    timing->add_option("--clock-hz", tf.clock_hz);
    timing->add_option("--mod-bandwidth-hz", tf.mod_bw);
    timing->add_option("--pd-bandwidth-hz", tf.pd_bw);
    timing->add_option("--path-length-m", tf.length);
    timing->add_option("--group-index", tf.group_index);
    timing->add_option("--iter-time-s", tf.iter_time);
    timing->add_option("--chip-area-mm2", tf.area);
    timing->add_option("--n", tf.n);
    timing->add_option("--dac-ns", tf.dac_ns, "what-if DAC latency");
    timing->add_option("--adc-ns", tf.adc_ns, "what-if ADC latency");
    timing->add_flag("--save", save_timing, "also write timing.json and timing.csv to the output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen(gen_flags, out_flag, skip_truth);
        if (solve->parsed()) return cmd_solve(solve_flags, out_flag, truth_cache, wall_clock);
        if (stab->parsed()) return cmd_stability(stab_in, out_flag, stab_window);
        if (curves->parsed()) return cmd_curves(curve_in, out_flag, curve_eta);
        if (timing->parsed()) return cmd_timing(tf, out_flag, save_timing);
    } catch (const phq::Error& e) {
        std::cerr << "phq: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "phq: unexpected error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
