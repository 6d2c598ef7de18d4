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

#include "phq/mesh_model.hpp"

#include <bit>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "phq/errors.hpp"

namespace phq {

namespace {

constexpr std::size_t kMaxPorts = 64;

bool is_power_of_two(std::size_t n) {
    return n >= 2 && std::has_single_bit(n);
}

}  // namespace

MeshTopology::MeshTopology(std::size_t n_ports, std::vector<LayerPairs> layers, std::vector<ExternalShifter> externals)
    : n_ports_(n_ports), layers_(std::move(layers)), externals_(std::move(externals)) {
    if (!is_power_of_two(n_ports_) || n_ports_ > kMaxPorts) {
        throw InvalidTopologyError("port count must be a power of two in [2, 64], got " + std::to_string(n_ports_));
    }
    const auto expected_layers = static_cast<std::size_t>(std::countr_zero(n_ports_));
    if (layers_.size() != expected_layers) {
        throw InvalidTopologyError("a " + std::to_string(n_ports_) + "-port mesh needs " +
                                   std::to_string(expected_layers) + " layers, got " +
                                   std::to_string(layers_.size()));
    }
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const auto& layer = layers_[l];
        if (layer.size() != n_ports_ / 2) {
            throw InvalidTopologyError("layer " + std::to_string(l) + " must hold " + std::to_string(n_ports_ / 2) +
                                       " MZIs");
        }
        std::vector<bool> seen(n_ports_, false);
        for (const auto& [a, b] : layer) {
            if (a >= n_ports_ || b >= n_ports_ || a == b || seen[a] || seen[b]) {
                throw InvalidTopologyError("layer " + std::to_string(l) + " is not a perfect matching of the ports");
            }
            seen[a] = seen[b] = true;
        }
    }
    for (const auto& e : externals_) {
        if (e.stage > layers_.size() || e.port >= n_ports_) {
            throw InvalidTopologyError("external shifter out of range (stage " + std::to_string(e.stage) +
                                       ", port " + std::to_string(e.port) + ")");
        }
    }
}

std::size_t MeshTopology::internal_shifter(std::size_t layer, std::size_t mzi, std::size_t arm) const {
    if (layer >= n_layers() || mzi >= mzis_per_layer() || arm > 1) {
        throw DimensionError("internal shifter address out of range");
    }
    return 2 * (layer * mzis_per_layer() + mzi) + arm;
}

MeshTopology build_topology(std::size_t n_ports) {
    if (!is_power_of_two(n_ports) || n_ports > kMaxPorts) {
        throw InvalidTopologyError("port count must be a power of two in [2, 64], got " + std::to_string(n_ports));
    }
    const auto n_layers = static_cast<std::size_t>(std::countr_zero(n_ports));
    std::vector<LayerPairs> layers(n_layers);
    std::vector<ExternalShifter> externals;
    for (std::size_t l = 0; l < n_layers; ++l) {
        const std::size_t stride = std::size_t{1} << l;
        for (std::size_t p = 0; p < n_ports; ++p) {
            if ((p & stride) == 0) {
                layers[l].emplace_back(p, p | stride);
                if (l + 1 < n_layers) {
                    externals.push_back(ExternalShifter{l + 1, p});
                }
            }
        }
    }
    return MeshTopology(n_ports, std::move(layers), std::move(externals));
}

nlohmann::json topology_to_json(const MeshTopology& topo) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : topo.layers()) {
        nlohmann::json pairs = nlohmann::json::array();
        for (const auto& [a, b] : layer) {
            pairs.push_back({a, b});
        }
        layers.push_back(std::move(pairs));
    }
    nlohmann::json externals = nlohmann::json::array();
    for (const auto& e : topo.externals()) {
        externals.push_back({{"stage", e.stage}, {"port", e.port}});
    }
    return nlohmann::json{{"n_ports", topo.n_ports()},
                          {"n_layers", topo.n_layers()},
                          {"layers", std::move(layers)},
                          {"external_shifters", std::move(externals)}};
}

MeshTopology topology_from_json(const nlohmann::json& j) {
    try {
        const auto n_ports = j.at("n_ports").get<std::size_t>();
        std::vector<LayerPairs> layers;
        for (const auto& layer : j.at("layers")) {
            LayerPairs pairs;
            for (const auto& pair : layer) {
                if (pair.size() != 2) {
                    throw InvalidTopologyError("each MZI entry must list exactly two ports");
                }
                pairs.emplace_back(pair[0].get<std::size_t>(), pair[1].get<std::size_t>());
            }
            layers.push_back(std::move(pairs));
        }
        if (j.contains("n_layers") && j.at("n_layers").get<std::size_t>() != layers.size()) {
            throw InvalidTopologyError("n_layers does not match the number of listed layers");
        }
        std::vector<ExternalShifter> externals;
        if (j.contains("external_shifters")) {
            for (const auto& e : j.at("external_shifters")) {
                externals.push_back(ExternalShifter{e.at("stage").get<std::size_t>(), e.at("port").get<std::size_t>()});
            }
        }
        return MeshTopology(n_ports, std::move(layers), std::move(externals));
    } catch (const nlohmann::json::exception& e) {
        throw InvalidTopologyError(std::string("malformed topology description: ") + e.what());
    }
}

MeshTopology load_topology(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open topology file " + path.string());
    }
    try {
        return topology_from_json(nlohmann::json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void save_topology(const MeshTopology& topo, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write topology file " + path.string());
    }
    out << topology_to_json(topo).dump(2) << '\n';
}

void ThermoOpticParams::validate() const {
    if (!(phase_per_volt_sq > 0.0) || !std::isfinite(phase_per_volt_sq)) {
        throw ConfigError("phase_per_volt_sq must be positive");
    }
    if (!(max_voltage > 0.0)) {
        throw ConfigError("max_voltage must be positive");
    }
}

PhaseConfig voltages_to_phases(std::span<const double> voltages, const ThermoOpticParams& params) {
    params.validate();
    if (!params.phase_offset.empty() && params.phase_offset.size() != voltages.size()) {
        throw DimensionError("phase offsets and voltages have different lengths");
    }
    PhaseConfig phi(voltages.size());
    for (std::size_t k = 0; k < voltages.size(); ++k) {
        const double offset = params.phase_offset.empty() ? 0.0 : params.phase_offset[k];
        phi[k] = params.phase_per_volt_sq * voltages[k] * voltages[k] + offset;
    }
    return phi;
}

VoltageVector experimental_voltages(const MeshTopology& topo, double max_voltage, Rng& rng) {
    std::uniform_real_distribution<double> dist(0.0, max_voltage);
    VoltageVector v(topo.n_shifters(), 0.0);
    for (std::size_t l = 0; l < topo.n_layers(); ++l) {
        for (std::size_t j = 0; j < topo.mzis_per_layer(); ++j) {
            v[topo.internal_shifter(l, j, 0)] = dist(rng);
        }
    }
    return v;
}

Eigen::Matrix2cd mzi_transfer(double phi_top, double phi_bottom) {
    const double r = 1.0 / std::sqrt(2.0);
    Eigen::Matrix2cd bs;
    bs << Complex(r, 0.0), Complex(0.0, r), Complex(0.0, r), Complex(r, 0.0);
    Eigen::Matrix2cd arms = Eigen::Matrix2cd::Zero();
    arms(0, 0) = std::polar(1.0, phi_top);
    arms(1, 1) = std::polar(1.0, phi_bottom);
    return bs * arms * bs;
}

ComplexMatrix compose_unitary(const MeshTopology& topo, std::span<const double> phases) {
    if (phases.size() != topo.n_shifters()) {
        throw DimensionError("mesh has " + std::to_string(topo.n_shifters()) + " shifters, got " +
                             std::to_string(phases.size()) + " phases");
    }
    const auto n = static_cast<Eigen::Index>(topo.n_ports());
    ComplexMatrix u = ComplexMatrix::Identity(n, n);

    auto apply_externals = [&](std::size_t stage) {
        for (std::size_t k = 0; k < topo.externals().size(); ++k) {
            const auto& e = topo.externals()[k];
            if (e.stage == stage) {
                u.row(static_cast<Eigen::Index>(e.port)) *= std::polar(1.0, phases[topo.external_shifter(k)]);
            }
        }
    };

    for (std::size_t l = 0; l < topo.n_layers(); ++l) {
        apply_externals(l);
        const auto& layer = topo.layers()[l];
        for (std::size_t j = 0; j < layer.size(); ++j) {
            const auto t = mzi_transfer(phases[topo.internal_shifter(l, j, 0)], phases[topo.internal_shifter(l, j, 1)]);
            const auto a = static_cast<Eigen::Index>(layer[j].first);
            const auto b = static_cast<Eigen::Index>(layer[j].second);
            const ComplexVector top = u.row(a);
            const ComplexVector bottom = u.row(b);
            u.row(a) = t(0, 0) * top + t(0, 1) * bottom;
            u.row(b) = t(1, 0) * top + t(1, 1) * bottom;
        }
    }
    apply_externals(topo.n_layers());
    return u;
}

double unitarity_error(const ComplexMatrix& u) {
    const ComplexMatrix g = u.adjoint() * u - ComplexMatrix::Identity(u.rows(), u.cols());
    return g.cwiseAbs().maxCoeff();
}

bool ReferenceArm::zero_phase() const noexcept {
    for (double p : phi_ref) {
        if (p != 0.0) {
            return false;
        }
    }
    return true;
}

HomodyneResult homodyne_readout(const ComplexMatrix& u, const BinaryState& s, const ReferenceArm& ref) {
    const auto n = static_cast<std::size_t>(u.rows());
    if (u.cols() != u.rows() || s.size() != n) {
        throw DimensionError("unitary and input state dimensions differ");
    }
    if (!ref.phi_ref.empty() && ref.phi_ref.size() != n) {
        throw DimensionError("reference phase count does not match the port count");
    }
    if (!(ref.e_ref >= 0.0)) {
        throw ConfigError("reference amplitude must be non-negative");
    }
    const ComplexVector e_out = u * s.to_vector().cast<Complex>();
    const double e_ref_sq = ref.e_ref * ref.e_ref;

    HomodyneResult out;
    const auto en = static_cast<Eigen::Index>(n);
    out.mixer.i_plus.resize(en);
    out.mixer.i_minus.resize(en);
    out.readout.i_bpd.resize(en);
    for (Eigen::Index i = 0; i < en; ++i) {
        const double mag = std::abs(e_out[i]);
        const double phi_ref = ref.phi_ref.empty() ? 0.0 : ref.phi_ref[static_cast<std::size_t>(i)];
        // |E_out| cos(phi_out - phi_ref) = Re(E_out e^{-i phi_ref}); this form
        // stays exact when E_out = 0 and its phase is undefined.
        const double in_phase = (e_out[i] * std::polar(1.0, -phi_ref)).real();
        const double cross = ref.e_ref * in_phase;
        out.mixer.i_plus[i] = e_ref_sq + mag * mag + cross;
        out.mixer.i_minus[i] = e_ref_sq + mag * mag - cross;
        out.readout.i_bpd[i] = 2.0 * cross;
    }
    return out;
}

TransformMatrix effective_matrix(const ComplexMatrix& u, const ReferenceArm& ref) {
    if (!ref.zero_phase()) {
        throw UnsupportedConfigurationError(
            "the real-matrix equivalence A = 2 e_ref Re(U) needs every reference phase at 0");
    }
    return TransformMatrix(2.0 * ref.e_ref * u.real());
}

ConfiguredMesh::ConfiguredMesh(std::shared_ptr<const MeshTopology> topo, VoltageVector voltages,
                               const ThermoOpticParams& params)
    : topo_(std::move(topo)), voltages_(std::move(voltages)) {
    if (!topo_) {
        throw ConfigError("configured mesh needs a topology");
    }
    if (voltages_.size() != topo_->n_shifters()) {
        throw DimensionError("mesh has " + std::to_string(topo_->n_shifters()) + " shifters, got " +
                             std::to_string(voltages_.size()) + " voltages");
    }
    params.validate();
    for (double v : voltages_) {
        if (!(v >= 0.0 && v <= params.max_voltage)) {
            throw ConfigError("voltage " + std::to_string(v) + " outside [0, " + std::to_string(params.max_voltage) +
                              "]");
        }
    }
    phases_ = voltages_to_phases(voltages_, params);
    unitary_ = compose_unitary(*topo_, phases_);
}

nlohmann::json mesh_state_to_json(const ConfiguredMesh& mesh, const ReferenceArm& ref) {
    const ComplexMatrix& u = mesh.unitary();
    nlohmann::json u_json = nlohmann::json::array();
    for (Eigen::Index r = 0; r < u.rows(); ++r) {
        for (Eigen::Index c = 0; c < u.cols(); ++c) {
            u_json.push_back({u(r, c).real(), u(r, c).imag()});
        }
    }
    nlohmann::json a_json = nlohmann::json::array();
    const RealMatrix a = effective_matrix(u, ref).matrix();
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            a_json.push_back(a(r, c));
        }
    }
    return nlohmann::json{{"n_ports", mesh.topology().n_ports()},
                          {"e_ref", ref.e_ref},
                          {"voltages", mesh.voltages()},
                          {"phases", mesh.phases()},
                          {"u", std::move(u_json)},
                          {"a", std::move(a_json)}};
}

}  // namespace phq
