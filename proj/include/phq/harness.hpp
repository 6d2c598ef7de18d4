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

// Experiment campaigns: problem generation, repeated seeded annealing runs
// against a brute-force ground truth, success-probability curves, stability
// reports, and the on-disk result format.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phq/annealer.hpp"
#include "phq/mesh_model.hpp"
#include "phq/noise_channel.hpp"
#include "phq/qubo_map.hpp"

namespace phq {

std::string version();

enum class ProblemSource { file, random_psd, random_mesh_voltages };

std::string to_string(ProblemSource s);
ProblemSource problem_source_from_string(const std::string& s);

struct MeshSettings {
    std::optional<std::filesystem::path> topology_file;
    ThermoOpticParams thermo;
    ReferenceArm reference;
};

struct ExperimentConfig {
    ProblemSource source = ProblemSource::random_mesh_voltages;
    std::filesystem::path problem_file;
    std::size_t n = 16;
    std::uint64_t problem_seed = 1;

    std::size_t runs = 100;
    std::size_t iterations = 1000;
    std::vector<double> eta_grid{0.96, 0.97, 0.98, 0.99};

    EvaluatorKind evaluator = EvaluatorKind::photonic_noisy;
    NoiseParams noise{0.0, 0.005, std::nullopt, 1.0, std::nullopt, 0};
    /// When set, detector_sigma is calibrated so the cost SNR at the ground
    /// state matches this value.
    std::optional<double> target_snr_db = 26.6;
    bool allow_shift = false;

    AnnealSchedule schedule;
    FlipLaw flip_law;
    std::uint64_t master_seed = 1;
    MeshSettings mesh;
    WrongAcceptanceWindow window;

    /// Worker threads; 0 uses the hardware concurrency. Not part of the
    /// result: runs are merged by index.
    std::size_t threads = 0;

    void validate() const;
};

nlohmann::json config_to_json(const ExperimentConfig& cfg);
/// Fields missing from `j` keep their value from `base`.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
ExperimentConfig load_config(const std::filesystem::path& path, ExperimentConfig base = {});

struct GeneratedProblem {
    QuboProblem problem;
    std::shared_ptr<const ConfiguredMesh> mesh;  ///< set for random_mesh_voltages
};

/// random_mesh_voltages: random drive on one internal shifter per MZI,
/// A = 2 e_ref Re(U), K = A^T A. random_psd: K = B^T B with Gaussian B.
/// file: the JSON problem at `file`.
GeneratedProblem generate_problem(ProblemSource mode, std::size_t n, Rng& rng, const MeshSettings& mesh = {},
                                  const std::filesystem::path& file = {}, std::optional<int> dac_bits = std::nullopt);
GeneratedProblem generate_problem(const ExperimentConfig& cfg);

struct EtaCurve {
    double eta = 1.0;
    std::vector<double> probability;  ///< one entry per iteration
};

/// Fraction of runs whose accepted state after iteration t has theoretical
/// cost strictly below eta * c_min.
std::vector<double> success_curve(std::span<const RunRecord> records, double c_min, double eta);
std::vector<EtaCurve> success_curves(std::span<const RunRecord> records, double c_min, std::span<const double> etas);

struct CampaignResult {
    ExperimentConfig config;
    QuboProblem problem;
    std::shared_ptr<const ConfiguredMesh> mesh;
    GroundTruth ground_truth;
    std::optional<double> detector_sigma;  ///< value used by the noisy evaluator
    std::vector<RunRecord> runs;
    std::vector<EtaCurve> curves;
    std::vector<StabilityReport> run_stability;
    StabilityReport stability;
    std::string version;
};

CampaignResult run_campaign(const ExperimentConfig& cfg, std::optional<GroundTruth> cached_truth = std::nullopt);
CampaignResult run_campaign(const ExperimentConfig& cfg, GeneratedProblem problem,
                            std::optional<GroundTruth> cached_truth = std::nullopt);

/// Builds the evaluator a campaign would use; exposed for the CLI and tests.
CostEvaluator make_evaluator(const ExperimentConfig& cfg, const GeneratedProblem& problem,
                             std::optional<double> detector_sigma);

/// detector_sigma giving cfg.target_snr_db at the ground-state readout.
double calibrated_detector_sigma(const ExperimentConfig& cfg, const GeneratedProblem& problem,
                                 const GroundTruth& truth);

struct ExportOptions {
    /// Wall-clock times differ between identical runs; off by default so
    /// exports are byte-reproducible.
    bool include_wall_clock = false;
};

/// Writes config.json, problem.json, ground_truth.json, mesh_state.json
/// (mesh problems only), runs.jsonl, summary.csv, success_curves.csv,
/// evolution.csv and stability.json into `dir`.
void export_campaign(const CampaignResult& result, const std::filesystem::path& dir, ExportOptions opts = {});

void write_run_records(std::span<const RunRecord> records, const std::filesystem::path& path,
                       bool include_wall_clock = false);
std::vector<RunRecord> load_run_records(const std::filesystem::path& path);

void write_success_curves(std::span<const EtaCurve> curves, const std::filesystem::path& path);
std::vector<EtaCurve> load_success_curves(const std::filesystem::path& path);

/// run, iteration, C(accepted) / |C_min|.
void write_evolution(std::span<const RunRecord> records, double c_min, const std::filesystem::path& path);

void write_stability(const StabilityReport& aggregate, std::span<const StabilityReport> per_run,
                     const std::filesystem::path& path);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double x);

}  // namespace phq
