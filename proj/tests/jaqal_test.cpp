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

QscoutDevice two_qubit(bool optimize = true) {
    QscoutDevice d;
    d.n_qubits = 2;
    d.optimize = optimize;
    return d;
}

TEST(ModeLabels, Parse) {
    EXPECT_EQ(parse_mode_label(WireLabel("m1i0")), (PhysicalMode{1, 0}));
    EXPECT_FALSE(parse_mode_label(WireLabel("m1")));
    EXPECT_FALSE(parse_mode_label(WireLabel(3)));
    EXPECT_EQ((PhysicalMode{0, 1}).label(), "m0i1");
}

TEST(Device, FromJson) {
    const auto d = QscoutDevice::from_json(nlohmann::json::parse(
        R"({"n_qubits": 3, "enable_com": true, "precision": 6, "couplings": {"BS": [["m0i1", "m0i2"]]}})"));
    EXPECT_EQ(d.n_qubits, 3u);
    EXPECT_TRUE(d.enable_com);
    EXPECT_EQ(d.precision, 6);
    EXPECT_TRUE(d.coupling_allowed("BS", "m0i2", "m0i1"));
    EXPECT_FALSE(d.coupling_allowed("BS", "m0i1", "m1i1"));
    EXPECT_TRUE(d.coupling_allowed("TMS", "m0i1", "m1i1"));
    EXPECT_EQ(d.enabled_modes().size(), 6u);
    EXPECT_THROW(QscoutDevice::from_json(nlohmann::json::parse(R"({"n_qubits": 0})")), Error);
}

TEST(Validate, Diagnostics) {
    const auto dev = two_qubit();
    const auto tape = build_tape({}, {make_instruction("R", {WireLabel("m0i0")}, {0.1}),
                                      make_instruction("R", {WireLabel("m2i0")}, {0.1}),
                                      make_instruction("H", {WireLabel(5)}),
                                      make_instruction("BS", {WireLabel("m0i1"), WireLabel("m1i0")}, {0.1, 0.0})},
                                 {});
    const auto d = validate_for_qscout(tape, dev);
    std::vector<std::string> kinds;
    for (const auto &x : d) {
        kinds.push_back(diagnostic_kind_name(x.kind));
    }
    EXPECT_EQ(kinds, (std::vector<std::string>{"ComModeDisabled", "UnknownMode", "QubitOutOfRange", "ComModeDisabled",
                                               "DisallowedCoupling"}));
    EXPECT_EQ(d[2].op_index, 2u);
    EXPECT_THROW(lower_to_native(tape, dev), Error);
}

TEST(Lowering, CalibrationProgramShape) {
    const auto low = lower_to_native(build_calibration_tape(0.5), two_qubit());
    ASSERT_EQ(low.ancillas.size(), 1u);
    EXPECT_EQ(low.ancillas[0], WireLabel(0));
    EXPECT_EQ(low.wire_map.at(WireLabel("q")), WireLabel(1));
    const auto prog = read_jaqal(emit_jaqal(low, two_qubit()));
    EXPECT_EQ(prog.usepulses, "Calibration_PulseDefinitions.QubitBosonPulses");
    EXPECT_EQ(prog.register_size, 2u);
    ASSERT_EQ(prog.subcircuits.size(), 1u);
    std::vector<std::vector<std::string>> xcd;
    for (const auto &s : prog.subcircuits[0]) {
        EXPECT_TRUE(s.gate == "Rz" || s.gate == "Ry" || s.gate == "xCD") << s.gate;
        if (s.gate == "xCD") {
            xcd.push_back(s.args);
        }
    }
    ASSERT_EQ(xcd.size(), 4u);
    const std::vector<std::vector<std::string>> want{{"q[1]", "1", "1", "0.5", "0.0"},
                                                     {"q[0]", "1", "1", "0.0", "0.5"},
                                                     {"q[1]", "1", "1", "-0.5", "-0.0"},
                                                     {"q[0]", "1", "1", "-0.0", "-0.5"}};
    EXPECT_EQ(xcd, want);
}

TEST(Lowering, WithoutAncillaReuseTheDeviceIsTooSmall) {
    EXPECT_THROW(lower_to_native(build_calibration_tape(0.5), two_qubit(false)), UnsatisfiableError);
    QscoutDevice big = two_qubit(false);
    big.n_qubits = 3;
    EXPECT_EQ(lower_to_native(build_calibration_tape(0.5), big).ancillas.size(), 2u);
}

TEST(Lowering, PostSelectedValueMatchesDirect) {
    SimOptions o;
    o.cutoffs.default_cutoff = 16;
    for (double b : {0.0, 0.35, 0.8, 1.3}) {
        const auto tape = build_calibration_tape(b);
        const auto low = lower_to_native(tape, two_qubit());
        const auto ps = postselected_expval(simulate(low.tape, o), *low.tape.measurements[0].obs, low.ancillas);
        EXPECT_NEAR(ps.value, expval(simulate(tape, o), *tape.measurements[0].obs), 1e-9) << b;
        EXPECT_NEAR(ps.rejection, 0.0, 1e-10);
    }
}

TEST(Lowering, VirtualModesUseFirstFitAndCouplings) {
    QscoutDevice dev = two_qubit();
    dev.n_qubits = 3;
    const auto tape = build_tape({}, {make_instruction("R", {WireLabel("a")}, {0.1}),
                                      make_instruction("BS", {WireLabel("a"), WireLabel("b")}, {0.1, 0.0})},
                                 {});
    const auto map = allocate_virtual_wires(tape, dev);
    EXPECT_EQ(map.at(WireLabel("a")), WireLabel("m0i1"));
    EXPECT_EQ(map.at(WireLabel("b")), WireLabel("m1i1"));
    dev.couplings["BS"] = {};
    EXPECT_THROW(allocate_virtual_wires(tape, dev), UnsatisfiableError);
}

TEST(Emit, NumbersAndOptimizeFlag) {
    EXPECT_EQ(jaqal_number(0.5, 4), "0.5");
    EXPECT_EQ(jaqal_number(-1e-17, 4), "-0.0");
    EXPECT_EQ(jaqal_number(1.23456, 3), "1.235");
    EXPECT_EQ(jaqal_number(2.0, 4), "2.0");
    LoweredProgram p;
    p.tape = build_tape({}, {make_instruction("RZ", {WireLabel(0)}, {2 * kPi}), make_instruction("RY", {WireLabel(0)}, {0.3})}, {});
    QscoutDevice keep = two_qubit(false);
    QscoutDevice drop = two_qubit(true);
    EXPECT_NE(emit_jaqal(p, keep).find("\tRz q[0] 6.2832\n"), std::string::npos);
    EXPECT_EQ(emit_jaqal(p, drop).find("Rz"), std::string::npos);
    EXPECT_NE(emit_jaqal(p, drop).find("\tRy q[0] 0.3\n"), std::string::npos);
}

TEST(Emit, NonNativeGatesAreRejected) {
    LoweredProgram p;
    p.tape = build_tape({}, {make_instruction("H", {WireLabel(0)})}, {});
    EXPECT_THROW(emit_jaqal(p, two_qubit()), UnsupportedError);
}

TEST(Read, RejectsStrayLines) {
    EXPECT_THROW(read_jaqal("register q[2]\nRz q[0] 1.0\n"), ParseError);
}

}  // namespace
}  // namespace hybc
