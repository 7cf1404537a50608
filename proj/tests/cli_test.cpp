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

#include <nlohmann/json.hpp>

#include "support.hpp"

namespace hybc {
namespace {

using testing::fixture;

testing::CommandResult cli(const std::string &args, bool with_stderr = false) {
    return testing::run_command(std::string(HYBC_CLI) + " " + args + (with_stderr ? " 2>&1" : " 2>/dev/null"));
}

TEST(Cli, HelpAndVersion) {
    EXPECT_EQ(cli("--help").status, 0);
    const auto v = cli("--version");
    EXPECT_EQ(v.status, 0);
    EXPECT_NE(v.out.find(HYBC_VERSION), std::string::npos);
    EXPECT_EQ(cli("").status, 1);
    EXPECT_EQ(cli("simulate").status, 1);
    EXPECT_EQ(cli("simulate x.qasm --format yaml").status, 1);
}

TEST(Cli, CheckCleanFile) {
    const auto r = cli("check " + fixture("cat_state.qasm"));
    EXPECT_EQ(r.status, 0);
    EXPECT_NE(r.out.find("m0"), std::string::npos);
}

TEST(Cli, CheckReportsTypeConflict) {
    const auto r = cli("check " + fixture("conflict.qasm"), true);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("TypeConflict"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("line 9"), std::string::npos) << r.out;
}

TEST(Cli, StrictCheckFlagsUnresolvedWires) {
    EXPECT_EQ(cli("check " + fixture("unconstrained.qasm")).status, 0);
    const auto r = cli("check --strict " + fixture("unconstrained.qasm"), true);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("UnresolvedWire(q1)"), std::string::npos) << r.out;
}

TEST(Cli, DecomposeCount) {
    const auto r = cli("decompose --count " + fixture("evo_only.qasm"));
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_EQ(j.at("gates"), nlohmann::json::parse(R"({"CR":1,"R":1,"RZ":1})"));
    EXPECT_EQ(j.at("metadata").at("tool"), "hybc");
}

TEST(Cli, DecomposeToCustomGateSetEmitsQasm) {
    const auto r = cli("decompose " + fixture("calibration_b05.qasm") + " --gateset " + fixture("native_gateset.json"));
    ASSERT_EQ(r.status, 0);
    const auto p = parse_qasm(r.out);
    for (const auto &g : p.tape.ops) {
        EXPECT_TRUE(g.gate->name == "H" || g.gate->name == "CD" || g.gate->name == "D") << g.gate->name;
    }
    EXPECT_EQ(cli("decompose " + fixture("cat_state.qasm") + " --gateset nope").status, 1);
}

TEST(Cli, SimulateCalibration) {
    const auto r = cli("simulate " + fixture("calibration_b05.qasm") + " --cutoff 16");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("results").at(0).at("value").get<double>(), std::cos(1.0), 1e-6);
    EXPECT_EQ(j.at("metadata").at("cutoffs").at("m0"), 16);
}

TEST(Cli, SimulateWithShotsCountsOutcomes) {
    const auto r = cli("simulate " + fixture("cat_state.qasm") + " --cutoff 40 --shots 100 --seed 3");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    std::size_t total = 0;
    for (const auto &[k, v] : j.at("results").at(0).at("counts").items()) {
        total += v.get<std::size_t>();
    }
    EXPECT_EQ(total, 100u);
    EXPECT_EQ(j.at("metadata").at("seed"), 3);
}

TEST(Cli, ExportJaqal) {
    const auto r = cli("export-jaqal " + fixture("calibration_b05.qasm") + " --device " + fixture("device_com.json"));
    ASSERT_EQ(r.status, 0);
    const auto prog = read_jaqal(r.out);
    EXPECT_EQ(prog.register_size, 2u);
    const auto bad = cli("export-jaqal " + fixture("com_mode.qasm"), true);
    EXPECT_EQ(bad.status, 1);
    EXPECT_NE(bad.out.find("ComModeDisabled"), std::string::npos) << bad.out;
}

TEST(Cli, ExportQasm) {
    const auto lib = cli("export-qasm --stdlib");
    ASSERT_EQ(lib.status, 0);
    EXPECT_EQ(lib.out, cvstdgates_inc());
    const auto r = cli("export-qasm " + fixture("cat_state.qasm"));
    ASSERT_EQ(r.status, 0);
    const auto p = parse_qasm(r.out);
    EXPECT_EQ(p.tape.ops.size(), 13u);
}

TEST(Cli, OutputFile) {
    const auto path = std::filesystem::temp_directory_path() / "hybc_cli_test_out.qasm";
    ASSERT_EQ(cli("export-qasm " + fixture("cat_state.qasm") + " -o " + path.string()).status, 0);
    EXPECT_EQ(read_text_file(path.string()), cli("export-qasm " + fixture("cat_state.qasm")).out);
    std::filesystem::remove(path);
}

TEST(Cli, MissingFileIsAnError) {
    const auto r = cli("simulate /nonexistent.qasm", true);
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("nonexistent"), std::string::npos);
}

TEST(Cli, DemoQpeSmall) {
    const auto r = cli("demo qpe --bits 6 --shots 200 --seed 4");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    EXPECT_NEAR(j.at("estimate").get<double>(), 4.3, 2 * kPi / 64);
    EXPECT_DOUBLE_EQ(j.at("exact").get<double>(), 4.3);
    EXPECT_EQ(cli("demo qpe --bits 6 --cutoff 4").status, 1);
}

TEST(Cli, DemoCalibrationWarnsNearCutoff) {
    const auto r = cli("demo calibration --beta 0.25 --beta 1.5 --cutoff 8");
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    ASSERT_EQ(j.at("points").size(), 2u);
    EXPECT_NEAR(j.at("points").at(0).at("expval").get<double>(), std::cos(0.25), 1e-6);
    EXPECT_EQ(j.at("warnings").size(), 1u);
}

TEST(Cli, DemoCalibrationLowered) {
    const auto r = cli("demo calibration --points 2 --beta-max 0.5 --device " + fixture("device_com.json"));
    ASSERT_EQ(r.status, 0);
    const auto j = nlohmann::json::parse(r.out);
    for (const auto &p : j.at("points")) {
        EXPECT_NEAR(p.at("lowered_expval").get<double>(), p.at("expval").get<double>(), 1e-9);
        EXPECT_NEAR(p.at("rejection").get<double>(), 0.0, 1e-10);
    }
}

}  // namespace
}  // namespace hybc
