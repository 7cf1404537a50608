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

const WireLabel q("q");
const WireLabel m("m");

TEST(BasisSchema, RebindingToAnotherBasisConflicts) {
    BasisSchema s{{m, Basis::Position}};
    EXPECT_NO_THROW(s.add(m, Basis::Position));
    EXPECT_THROW(s.add(m, Basis::Discrete), BasisConflict);
    EXPECT_EQ(s.size(), 1u);
}

TEST(BasisSchema, InferredAcrossMeasurements) {
    const auto s = infer_basis_schema({MeasurementSpec::expval(obs_x(m)), MeasurementSpec::expval(obs_z(q))});
    EXPECT_EQ(s.find(m), Basis::Position);
    EXPECT_EQ(s.find(q), Basis::Discrete);
    EXPECT_THROW(infer_basis_schema({MeasurementSpec::expval(obs_x(m)), MeasurementSpec::expval(obs_n(m))}),
                 BasisConflict);
}

TEST(Observable, ProductRejectsRepeatedWire) {
    EXPECT_THROW(obs_z(q) * obs_pauli_x(q), MeasurementError);
    const auto o = 2.0 * (obs_z(q) * obs_n(m));
    EXPECT_EQ(o.str(), "2.000000*Z(q)@N(m)");
    EXPECT_EQ(o.wires(), (std::vector<WireLabel>{q, m}));
}

TEST(Observable, Spectrum) {
    const auto o = 0.5 * (obs_z(q) * obs_n(m));
    EXPECT_DOUBLE_EQ(eigenvalue_of(o, {std::uint64_t{0}, std::uint64_t{3}}), 1.5);
    EXPECT_DOUBLE_EQ(eigenvalue_of(o, {std::uint64_t{1}, std::uint64_t{3}}), -1.5);
    EXPECT_DOUBLE_EQ(eigenvalue_of(obs_x(m), {0.25}), 0.25);
    EXPECT_THROW(eigenvalue_of(obs_x(m), {std::uint64_t{1}}), MeasurementError);
    EXPECT_THROW(eigenvalue_of(obs_z(q), {std::uint64_t{2}}), MeasurementError);
    EXPECT_THROW(eigenvalue_of(o, {std::uint64_t{0}}), MeasurementError);
}

TEST(Observable, DiagonalizingGatesRotateIntoZ) {
    for (const auto &[obs, pauli] : {std::pair{obs_pauli_x(q), linalg::pauli_x()}, std::pair{obs_pauli_y(q), linalg::pauli_y()}}) {
        Matrix u = Matrix::Identity(2, 2);
        for (const auto &g : diagonalizing_gates(obs)) {
            u = gate_matrix(g, std::vector<std::size_t>{2}) * u;
        }
        EXPECT_LT(linalg::max_abs(u * pauli * u.adjoint() - linalg::pauli_z()), 1e-12);
    }
    EXPECT_TRUE(diagonalizing_gates(obs_z(q) * obs_n(m) * obs_x(WireLabel("k"))).empty());
}

TEST(MeasurementSpec, Descriptions) {
    EXPECT_EQ(MeasurementSpec::sample({{q, Basis::Discrete}, {m, Basis::Position}}).str(), "sample(q:discrete, m:position)");
    EXPECT_EQ(MeasurementSpec::var(obs_n(m)).str(), "var(N(m))");
    EXPECT_EQ(MeasurementSpec::expval(obs_z(q)).wires(), std::vector<WireLabel>{q});
}

}  // namespace
}  // namespace hybc
