// Copyright 2026 The hybc Authors
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

#include <gtest/gtest.h>

#include "support.hpp"

namespace hybc {
namespace {

using testing::coherent_amplitude;

Matrix single(const std::string &name, Params ps, std::vector<std::size_t> dims) {
    const auto g = lookup(name);
    return gate_matrix(testing::on_fresh_wires(g, std::move(ps)), dims);
}

TEST(Registry, ContainsEveryTableGate) {
    for (const auto &list : {table_cv_gates(), table_hybrid_gates(), dv_gates()}) {
        for (const auto &n : list) {
            EXPECT_NO_THROW(lookup(n)) << n;
        }
    }
    EXPECT_NO_THROW(lookup("xCD"));
}

TEST(Registry, QasmNamesAreUnique) {
    std::set<std::string> seen;
    for (const auto &[n, g] : gate_registry()) {
        EXPECT_TRUE(seen.insert(g->qasm_name).second) << g->qasm_name;
        EXPECT_EQ(lookup_qasm(g->qasm_name), g);
    }
}

TEST(Registry, UnknownNameSuggestsNeighbours) {
    try {
        lookup("CDD");
        FAIL();
    } catch (const UnknownGateError &e) {
        EXPECT_NE(std::string(e.what()).find("did you mean"), std::string::npos);
        EXPECT_NE(std::string(e.what()).find("CD"), std::string::npos);
    }
    EXPECT_THROW(lookup_qasm("cv_nope"), UnknownGateError);
}

TEST(GateSets, NamedSets) {
    EXPECT_EQ(enumerate_gateset("full").gates.size(), gate_registry().size());
    const auto sim = enumerate_gateset("sim-native");
    EXPECT_TRUE(sim.contains("CD"));
    EXPECT_TRUE(sim.contains("H"));
    EXPECT_TRUE(sim.contains("xCD"));
    EXPECT_EQ(enumerate_gateset("qscout-native").gates, (std::set<std::string>{"RZ", "RY", "RX", "CNOT", "xCD"}));
    EXPECT_THROW(enumerate_gateset("nope"), UnknownGateError);
}

TEST(Gates, SignatureClasses) {
    EXPECT_EQ(gate_signature(lookup("D")), std::vector<WireType>{WireType::qumode()});
    EXPECT_EQ(gate_signature(lookup("CBS")),
              (std::vector<WireType>{WireType::qubit(), WireType::qumode(), WireType::qumode()}));
    EXPECT_EQ(gate_signature(lookup("CNOT")), (std::vector<WireType>{WireType::qubit(), WireType::qubit()}));
}

TEST(Gates, EveryMatrixIsUnitaryAtCutoff8) {
    EXPECT_LE(testing::worst_unitarity_error(8), 1e-10);
}

TEST(Gates, ParameterKindsAreChecked) {
    EXPECT_THROW(lookup("SNAP")->check_params({0.2}), ConstructionError);
    EXPECT_THROW(lookup("R")->check_params({std::vector<double>{0.2}}), ConstructionError);
    EXPECT_THROW(lookup("SQR")->check_params({std::vector<double>{0.2}, std::vector<double>{0.2, 0.3}}),
                 ConstructionError);
}

TEST(Gates, DisplacementOfVacuumIsCoherent) {
    const double r = 0.8;
    const double phi = 0.6;
    const Matrix u = single("D", {r, phi}, {48});
    for (std::size_t n = 0; n < 12; ++n) {
        EXPECT_LT(std::abs(u(static_cast<Eigen::Index>(n), 0) - coherent_amplitude(std::polar(r, phi), n)), 1e-10) << n;
    }
}

TEST(Gates, RotationIsDiagonal) {
    const Matrix u = single("R", {0.37}, {8});
    for (Eigen::Index n = 0; n < 8; ++n) {
        EXPECT_LT(std::abs(u(n, n) - std::exp(cd(0, -0.37 * static_cast<double>(n)))), 1e-12);
    }
    EXPECT_LT(linalg::max_abs(u - Matrix(u.diagonal().asDiagonal())), 1e-12);
}

TEST(Gates, SnapPhasesEachLevel) {
    const std::vector<double> phi{0.1, -0.4, 2.2, 0.0, 1.0, -3.0};
    const Matrix u = single("SNAP", {phi}, {6});
    for (Eigen::Index n = 0; n < 6; ++n) {
        EXPECT_LT(std::abs(u(n, n) - std::exp(cd(0, -phi[static_cast<std::size_t>(n)]))), 1e-12);
    }
}

TEST(Gates, ConditionalRotationPhases) {
    const double th = 0.9;
    const Matrix u = single("CR", {th}, {2, 6});
    for (Eigen::Index n = 0; n < 6; ++n) {
        EXPECT_LT(std::abs(u(n, n) - std::exp(cd(0, -th / 2 * static_cast<double>(n)))), 1e-12);
        EXPECT_LT(std::abs(u(6 + n, 6 + n) - std::exp(cd(0, th / 2 * static_cast<double>(n)))), 1e-12);
    }
}

TEST(Gates, ConditionalDisplacementBranches) {
    const std::size_t c = 12;
    const Matrix cdm = single("CD", {0.4, 0.3}, {2, c});
    const Matrix dp = single("D", {0.4, 0.3}, {c});
    const Matrix dm = single("D", {-0.4, 0.3}, {c});
    const auto n = static_cast<Eigen::Index>(c);
    EXPECT_LT(linalg::max_abs(cdm.block(0, 0, n, n) - dp), 1e-10);
    EXPECT_LT(linalg::max_abs(cdm.block(n, n, n, n) - dm), 1e-10);
    EXPECT_LT(linalg::max_abs(cdm.block(0, n, n, n)), 1e-12);
}

TEST(Gates, SqueezedVacuumPhotonNumber) {
    const double r = 0.3;
    const Matrix u = single("Squeezing", {r, 0.0}, {60});
    double mean = 0.0;
    for (Eigen::Index n = 0; n < 60; ++n) {
        mean += static_cast<double>(n) * std::norm(u(n, 0));
        if (n % 2 == 1) {
            EXPECT_LT(std::abs(u(n, 0)), 1e-12);
        }
    }
    EXPECT_NEAR(mean, std::sinh(r) * std::sinh(r), 1e-10);
}

TEST(Gates, JaynesCummingsRabiOscillation) {
    const double th = 0.7;
    const std::size_t c = 10;
    const Matrix u = single("JC", {th, 0.4}, {2, c});
    for (std::size_t n = 0; n + 1 < c; ++n) {
        const auto from = static_cast<Eigen::Index>(c + n);  // |1, n>
        const auto to = static_cast<Eigen::Index>(n + 1);    // |0, n+1>
        const double w = th * std::sqrt(static_cast<double>(n + 1));
        EXPECT_NEAR(std::abs(u(from, from)), std::abs(std::cos(w)), 1e-10) << n;
        EXPECT_NEAR(std::abs(u(to, from)), std::abs(std::sin(w)), 1e-10) << n;
    }
}

// Excitation number of |b, n> conserved by JC (n + b) and by AJC (n - b).
void expect_conserves(const Matrix &u, std::size_t c, int sign) {
    for (std::size_t i = 0; i < 2 * c; ++i) {
        for (std::size_t j = 0; j < 2 * c; ++j) {
            const auto ex = [&](std::size_t k) {
                return static_cast<int>(k % c) + sign * static_cast<int>(k / c);
            };
            if (ex(i) != ex(j)) {
                EXPECT_LT(std::abs(u(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))), 1e-12);
            }
        }
    }
}

TEST(Gates, JaynesCummingsConservesExcitations) {
    expect_conserves(single("JC", {1.1, -0.3}, {2, 8}), 8, 1);
    expect_conserves(single("AJC", {1.1, -0.3}, {2, 8}), 8, -1);
}

TEST(Gates, ModeSwapExchangesModes) {
    const Matrix u = single("ModeSwap", {}, {3, 4});
    for (Eigen::Index a = 0; a < 3; ++a) {
        for (Eigen::Index b = 0; b < 3; ++b) {
            EXPECT_EQ(u(b * 4 + a, a * 4 + b), cd(1.0));
        }
    }
}

TEST(Gates, QubitGates) {
    const Matrix h = single("H", {}, {2});
    Matrix want(2, 2);
    want << 1, 1, 1, -1;
    want /= std::sqrt(2.0);
    EXPECT_LT(testing::distance_up_to_phase(h, want), 1e-12);
    const Matrix cx = single("CNOT", {}, {2, 2});
    Matrix cxw = Matrix::Zero(4, 4);
    cxw(0, 0) = cxw(1, 1) = cxw(3, 2) = cxw(2, 3) = 1.0;
    EXPECT_LT(testing::distance_up_to_phase(cx, cxw), 1e-12);
}

TEST(Gates, XConditionedDisplacement) {
    // exp[X (alpha adag - conj(alpha) a)] = H CD(alpha) H.
    const std::size_t c = 10;
    const double u = 0.3;
    const double v = -0.2;
    const Matrix x = single("xCD", {u, v}, {2, c});
    const Matrix cdm = single("CD", {std::hypot(u, v), std::atan2(v, u)}, {2, c});
    const Matrix h = linalg::kron(single("H", {}, {2}), Matrix::Identity(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(c)));
    EXPECT_LT(linalg::max_abs(x - h * cdm * h), 1e-10);
}

}  // namespace
}  // namespace hybc
