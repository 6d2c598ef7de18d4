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

// Simulation of the programmable interferometer: a butterfly (FFT) mesh of
// Mach-Zehnder interferometers, per-port external phase shifters, and a bank
// of reference-arm mixers read out by balanced photodetectors.
//
// Shifter numbering: MZI j of layer l (in the order its pair is listed) owns
// shifters 2*(l*N/2 + j) (top arm) and 2*(l*N/2 + j) + 1 (bottom arm). The
// external shifters follow in the order they are listed in the topology.

#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <memory>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "phq/qubo_map.hpp"
#include "phq/types.hpp"

namespace phq {

/// A per-port phase shifter applied before layer `stage` (stage == n_layers
/// means after the last layer).
struct ExternalShifter {
    std::size_t stage = 0;
    std::size_t port = 0;

    friend bool operator==(const ExternalShifter&, const ExternalShifter&) = default;
};

/// Port pairing of one MZI column; `first` is the top arm of each MZI.
using LayerPairs = std::vector<std::pair<std::size_t, std::size_t>>;

class MeshTopology {
   public:
    /// Validates everything: power-of-two port count, log2 layers, each
    /// layer a perfect matching, externals in range.
    MeshTopology(std::size_t n_ports, std::vector<LayerPairs> layers, std::vector<ExternalShifter> externals);

    std::size_t n_ports() const noexcept { return n_ports_; }
    std::size_t n_layers() const noexcept { return layers_.size(); }
    std::size_t mzis_per_layer() const noexcept { return n_ports_ / 2; }
    std::size_t n_mzis() const noexcept { return n_layers() * mzis_per_layer(); }
    std::size_t n_couplers() const noexcept { return 2 * n_mzis(); }
    std::size_t n_internal_shifters() const noexcept { return 2 * n_mzis(); }
    std::size_t n_shifters() const noexcept { return n_internal_shifters() + externals_.size(); }

    const std::vector<LayerPairs>& layers() const noexcept { return layers_; }
    const std::vector<ExternalShifter>& externals() const noexcept { return externals_; }

    /// arm 0 = top, 1 = bottom.
    std::size_t internal_shifter(std::size_t layer, std::size_t mzi, std::size_t arm) const;
    std::size_t external_shifter(std::size_t k) const { return n_internal_shifters() + k; }

    friend bool operator==(const MeshTopology&, const MeshTopology&) = default;

   private:
    std::size_t n_ports_;
    std::vector<LayerPairs> layers_;
    std::vector<ExternalShifter> externals_;
};

/// Butterfly mesh on `n_ports` ports (power of two in [2, 64]). Layer l
/// pairs port p with p ^ 2^l. Default external placement: one shifter on the
/// top output of every MZI between consecutive layers, which gives 24 for
/// the 16-port mesh.
MeshTopology build_topology(std::size_t n_ports = 16);

nlohmann::json topology_to_json(const MeshTopology& topo);
MeshTopology topology_from_json(const nlohmann::json& j);
MeshTopology load_topology(const std::filesystem::path& path);
void save_topology(const MeshTopology& topo, const std::filesystem::path& path);

/// Phenomenological thermo-optic law phi = k * V^2 + phi0.
struct ThermoOpticParams {
    double phase_per_volt_sq = 0.25;
    std::vector<double> phase_offset;  ///< empty means all zero
    double max_voltage = 5.0;

    void validate() const;
};

using VoltageVector = std::vector<double>;
using PhaseConfig = std::vector<double>;

PhaseConfig voltages_to_phases(std::span<const double> voltages, const ThermoOpticParams& params);

/// The experimental drive pattern: the top-arm shifter of every MZI is drawn
/// uniformly from [0, max_voltage], all other shifters sit at 0 V.
VoltageVector experimental_voltages(const MeshTopology& topo, double max_voltage, Rng& rng);

/// BS * diag(e^{i phi_top}, e^{i phi_bottom}) * BS with BS = (1/sqrt 2)[[1, i], [i, 1]].
Eigen::Matrix2cd mzi_transfer(double phi_top, double phi_bottom);

ComplexMatrix compose_unitary(const MeshTopology& topo, std::span<const double> phases);

/// max |U^dagger U - I|.
double unitarity_error(const ComplexMatrix& u);

struct ReferenceArm {
    double e_ref = 0.5;
    std::vector<double> phi_ref;  ///< empty means all zero

    bool zero_phase() const noexcept;
};

struct MixerIntensities {
    RealVector i_plus;
    RealVector i_minus;
};

struct HomodyneResult {
    MixerIntensities mixer;
    ReadoutVector readout;
};

HomodyneResult homodyne_readout(const ComplexMatrix& u, const BinaryState& s, const ReferenceArm& ref);

/// A = 2 e_ref Re(U). Requires every reference phase to be zero.
TransformMatrix effective_matrix(const ComplexMatrix& u, const ReferenceArm& ref);

/// A configured chip: topology, drive voltages, phases and the resulting
/// unitary. Immutable once built; safe to share between threads.
class ConfiguredMesh {
   public:
    ConfiguredMesh(std::shared_ptr<const MeshTopology> topo, VoltageVector voltages, const ThermoOpticParams& params);

    const MeshTopology& topology() const noexcept { return *topo_; }
    const VoltageVector& voltages() const noexcept { return voltages_; }
    const PhaseConfig& phases() const noexcept { return phases_; }
    const ComplexMatrix& unitary() const noexcept { return unitary_; }

    HomodyneResult readout(const BinaryState& s, const ReferenceArm& ref) const {
        return homodyne_readout(unitary_, s, ref);
    }

   private:
    std::shared_ptr<const MeshTopology> topo_;
    VoltageVector voltages_;
    PhaseConfig phases_;
    ComplexMatrix unitary_;
};

/// Voltages, phases, U (row-major [re, im] pairs) and A.
nlohmann::json mesh_state_to_json(const ConfiguredMesh& mesh, const ReferenceArm& ref);

}  // namespace phq
