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

#include "phq/qubo_map.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <numeric>

#include <nlohmann/json.hpp>

#include "phq/errors.hpp"

namespace phq {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdRelTol = 1e-9;

void require_same_dim(const QuboProblem& p, const BinaryState& s) {
    if (p.size() != s.size()) {
        throw DimensionError("state has " + std::to_string(s.size()) + " bits, problem has dimension " +
                             std::to_string(p.size()));
    }
}

}  // namespace

QuboProblem::QuboProblem(RealMatrix k) : k_(std::move(k)) {
    if (k_.rows() < 1 || k_.rows() != k_.cols()) {
        throw DimensionError("weight matrix must be square with n >= 1");
    }
    if (!k_.allFinite()) {
        throw DimensionError("weight matrix has non-finite entries");
    }
    if ((k_ - k_.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol) {
        throw DimensionError("weight matrix is not symmetric");
    }
}

TransformMatrix::TransformMatrix(RealMatrix a) : a_(std::move(a)) {
    if (!a_.allFinite()) {
        throw DimensionError("transform matrix has non-finite entries");
    }
}

RealVector TransformMatrix::apply(const BinaryState& s) const {
    if (cols() != s.size()) {
        throw DimensionError("transform matrix and state dimensions differ");
    }
    return a_ * s.to_vector();
}

double cost(const QuboProblem& p, const BinaryState& s) {
    require_same_dim(p, s);
    const RealVector x = s.to_vector();
    return -0.5 * x.dot(p.weights() * x);
}

Decomposition decompose(const QuboProblem& p) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(p.weights());
    if (solver.info() != Eigen::Success) {
        throw Error("eigendecomposition did not converge");
    }
    // Eigen returns ascending eigenvalues with eigenvectors as columns.
    const Eigen::Index n = p.weights().rows();
    RealVector lambda = solver.eigenvalues().reverse();
    RealMatrix q = solver.eigenvectors().rowwise().reverse().transpose();

    const double tol = kPsdRelTol * std::max(1.0, lambda[0]);
    if (lambda[n - 1] < -tol) {
        throw NotPsdError(lambda[n - 1]);
    }
    lambda = lambda.cwiseMax(0.0);

    RealMatrix a = lambda.cwiseSqrt().asDiagonal() * q;
    return Decomposition{SpectralData{std::move(lambda), std::move(q)}, TransformMatrix(std::move(a))};
}

ShiftedProblem shift_to_psd(const QuboProblem& p) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(p.weights(), Eigen::EigenvaluesOnly);
    const double c = std::max(0.0, -solver.eigenvalues()[0]);
    RealMatrix k = p.weights();
    k.diagonal().array() += c;
    return ShiftedProblem{QuboProblem(std::move(k)), c};
}

double shift_correction(double shift, const BinaryState& s) {
    return 0.5 * shift * static_cast<double>(s.weight());
}

QuboProblem problem_from_transform(const TransformMatrix& a) {
    RealMatrix k = a.matrix().transpose() * a.matrix();
    // Symmetrize to kill rounding asymmetry of the product.
    RealMatrix sym = 0.5 * (k + k.transpose());
    return QuboProblem(std::move(sym));
}

double cost_from_readout(const ReadoutVector& r) {
    return -0.5 * r.i_bpd.squaredNorm();
}

namespace {

// Gray-code walk over all 2^n states maintaining the local field h = K s.
// Flipping bit j changes the cost by -(sign * h_j + sign^2 K_jj / 2) with
// sign = +1 for 0->1 and -1 for 1->0. The callback sees (cost, bits) with
// bits[j] the value of s_j.
template <typename Visit>
void gray_walk(const QuboProblem& p, Visit&& visit) {
    const std::size_t n = p.size();
    if (n > kMaxBruteForceDim) {
        throw BudgetError("exhaustive enumeration is limited to n <= " + std::to_string(kMaxBruteForceDim) +
                          " (got " + std::to_string(n) + ")");
    }
    const RealMatrix& k = p.weights();
    std::vector<double> field(n, 0.0);
    std::vector<std::uint8_t> bits(n, 0);
    double c = 0.0;
    visit(c, bits);
    const std::uint64_t total = std::uint64_t{1} << n;
    for (std::uint64_t g = 1; g < total; ++g) {
        const auto j = static_cast<std::size_t>(std::countr_zero(g));
        const double sign = bits[j] ? -1.0 : 1.0;
        const auto jj = static_cast<Eigen::Index>(j);
        c -= sign * field[j] + 0.5 * k(jj, jj);
        for (std::size_t i = 0; i < n; ++i) {
            field[i] += sign * k(static_cast<Eigen::Index>(i), jj);
        }
        bits[j] ^= 1U;
        visit(c, bits);
    }
}

std::uint64_t index_of(const std::vector<std::uint8_t>& bits) {
    std::uint64_t v = 0;
    for (auto b : bits) {
        v = (v << 1) | b;
    }
    return v;
}

}  // namespace

GroundTruth brute_force_min(const QuboProblem& p) {
    const std::size_t n = p.size();
    const double scale = std::max(1.0, p.weights().cwiseAbs().maxCoeff() * static_cast<double>(n * n));
    // Incremental costs carry rounding; candidates within this band of the
    // running best are re-scored exactly before comparing.
    const double band = 1e-11 * scale;

    double best_approx = 0.0;
    std::vector<std::uint64_t> near;  // indices within `band` of best_approx
    gray_walk(p, [&](double c, const std::vector<std::uint8_t>& bits) {
        if (near.empty() || c < best_approx - band) {
            best_approx = c;
            near.assign(1, index_of(bits));
        } else if (c <= best_approx + band) {
            near.push_back(index_of(bits));
            best_approx = std::min(best_approx, c);
        }
    });

    BinaryState best_state;
    double best_cost = 0.0;
    bool have = false;
    std::sort(near.begin(), near.end());
    for (auto idx : near) {
        BinaryState s = BinaryState::from_index(idx, n);
        const double c = cost(p, s);
        if (!have || c < best_cost) {
            best_state = std::move(s);
            best_cost = c;
            have = true;
        }
    }
    return GroundTruth{std::move(best_state), best_cost};
}

std::uint64_t count_states_below(const QuboProblem& p, double threshold) {
    std::uint64_t count = 0;
    gray_walk(p, [&](double c, const std::vector<std::uint8_t>&) { count += static_cast<std::uint64_t>(c < threshold); });
    return count;
}

nlohmann::json problem_to_json(const QuboProblem& p) {
    const auto n = static_cast<Eigen::Index>(p.size());
    std::vector<double> flat;
    flat.reserve(static_cast<std::size_t>(n * n));
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            flat.push_back(p.weights()(i, j));
        }
    }
    return nlohmann::json{{"n", p.size()}, {"k", flat}};
}

QuboProblem problem_from_json(const nlohmann::json& j) {
    try {
        const auto n = j.at("n").get<std::size_t>();
        const auto flat = j.at("k").get<std::vector<double>>();
        if (n == 0 || flat.size() != n * n) {
            throw DimensionError("problem file: expected " + std::to_string(n * n) + " weights, found " +
                                 std::to_string(flat.size()));
        }
        const auto en = static_cast<Eigen::Index>(n);
        RealMatrix k(en, en);
        for (Eigen::Index r = 0; r < en; ++r) {
            for (Eigen::Index c = 0; c < en; ++c) {
                k(r, c) = flat[static_cast<std::size_t>(r * en + c)];
            }
        }
        return QuboProblem(std::move(k));
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed problem file: ") + e.what());
    }
}

namespace {

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

void write_json_file(const nlohmann::json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace

void save_problem(const QuboProblem& p, const std::filesystem::path& path) {
    write_json_file(problem_to_json(p), path);
}

QuboProblem load_problem(const std::filesystem::path& path) {
    try {
        return problem_from_json(read_json_file(path));
    } catch (const DimensionError& e) {
        throw IoError(path.string() + ": " + e.what());
    } catch (const IoError& e) {
        throw IoError(path.string() + ": " + e.what());
    }
}

std::uint64_t problem_fingerprint(const QuboProblem& p) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    const RealMatrix& k = p.weights();
    for (Eigen::Index i = 0; i < k.size(); ++i) {
        unsigned char bytes[sizeof(double)];
        const double v = k.data()[i];
        std::memcpy(bytes, &v, sizeof(double));
        for (unsigned char b : bytes) {
            h ^= b;
            h *= 0x100000001b3ULL;
        }
    }
    return h;
}

nlohmann::json ground_truth_to_json(const GroundTruth& gt, const QuboProblem& p) {
    return nlohmann::json{{"n", p.size()},
                          {"fingerprint", problem_fingerprint(p)},
                          {"s_min", gt.s_min.to_string()},
                          {"c_min", gt.c_min}};
}

GroundTruth ground_truth_from_json(const nlohmann::json& j, const QuboProblem& p) {
    try {
        if (j.at("n").get<std::size_t>() != p.size() ||
            j.at("fingerprint").get<std::uint64_t>() != problem_fingerprint(p)) {
            throw IoError("ground-truth cache belongs to a different problem");
        }
        return GroundTruth{BinaryState::from_string(j.at("s_min").get<std::string>()), j.at("c_min").get<double>()};
    } catch (const nlohmann::json::exception& e) {
        throw IoError(std::string("malformed ground-truth file: ") + e.what());
    }
}

}  // namespace phq
