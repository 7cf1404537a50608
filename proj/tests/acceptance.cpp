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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <unistd.h>

#include "support.hpp"

namespace {

using namespace hybc;
using hybc::testing::fixture;
using hybc::testing::run_command;

// Pinned tolerances.
constexpr double kQpePaperEstimate = 4.3013;
constexpr double kQpeExact = 4.3;
constexpr double kQpeConcentration = 0.90;
constexpr double kCalibrationPaperSettingsTol = 0.05;
constexpr double kCalibrationConvergedTol = 1e-3;
constexpr double kRejectionTol = 1e-10;
constexpr double kLibraryTol = 1e-8;
constexpr double kLoweredTol = 2e-3;
constexpr double kUnitarityTol = 1e-10;
constexpr double kCoherentTol = 1e-6;
constexpr double kHomodyneRelTol = 0.05;
constexpr double kNormTol = 1e-10;
constexpr std::uint64_t kSeed = 1234;

struct Report {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string &what) {
        if (!cond) {
            ok = false;
            detail << "  failed: " << what << "\n";
        }
    }
    void note(const std::string &what) {
        detail << "  " << what << "\n";
    }
};

std::string num(double v, int digits = 6) {
    std::ostringstream s;
    s.precision(digits);
    s << v;
    return s.str();
}

std::string cli() {
    return HYBC_CLI;
}

std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
    }
    return out;
}

// Share of shots on the two grid energies adjacent to `target`.
double adjacent_share(const std::map<double, std::size_t> &energies, double target, double spacing) {
    std::size_t hits = 0;
    std::size_t total = 0;
    for (const auto &[e, n] : energies) {
        total += n;
        if (std::abs(e - target) < spacing) {
            hits += n;
        }
    }
    return total ? static_cast<double>(hits) / static_cast<double>(total) : 0.0;
}

void criterion1(Report &r) {
    const double spacing = 2.0 * kPi / 1024.0;
    // Through the CLI, exactly as documented.
    const auto res = run_command(cli() +
                                 " demo qpe --bits 10 --cutoff 8 --shots 1024 --t 1 --omega-r 1 --omega-q -1 --chi 0.1"
                                 " --seed " +
                                 std::to_string(kSeed));
    r.require(res.status == 0, "demo qpe exits 0");
    if (res.status != 0) {
        return;
    }
    const auto j = nlohmann::json::parse(res.out);
    const double est = j.at("estimate").get<double>();
    std::map<double, std::size_t> energies;
    for (const auto &[k, v] : j.at("energies").items()) {
        energies[std::stod(k)] = v.get<std::size_t>();
    }
    const double share = adjacent_share(energies, kQpeExact, spacing);
    r.note("cli estimate " + num(est, 8) + ", exact " + num(j.at("exact").get<double>()) + ", adjacent share " +
           num(share, 4));
    r.require(std::abs(std::round(est * 1e4) / 1e4 - kQpePaperEstimate) < 1e-9, "estimate rounds to 4.3013");
    r.require(std::abs(est - kQpeExact) <= spacing, "estimate within 2 pi / 2^10 of 4.3");
    r.require(std::abs(j.at("exact").get<double>() - kQpeExact) < 1e-12, "exact diagonal energy is 4.3");
    r.require(share >= kQpeConcentration, ">= 90% of shots on the grid points adjacent to 4.3");

    // Library path with the same seed; the exact outcome distribution is
    // the oracle for the concentration.
    QpeConfig cfg;
    const auto tape = decompose_to_gateset(build_qpe_tape(cfg), enumerate_gateset("sim-native"));
    SimOptions opts;
    opts.cutoffs.default_cutoff = 8;
    const auto run_res = run(tape, opts, kSeed);
    const auto lib = postprocess_qpe(run_res.results.at(0).samples, cfg);
    r.require(std::abs(lib.estimate - est) < 1e-9, "library and CLI estimates agree");
    // Analytic: for phase theta0 = -E t / 2 pi mod 1, P(k) = |sum_j e^{2 pi i j (theta0 - k/N)}|^2 / N^2.
    const double n_grid = 1024.0;
    double theta0 = std::fmod(-kQpeExact / (2.0 * kPi), 1.0);
    if (theta0 < 0) {
        theta0 += 1.0;
    }
    double p_adjacent = 0.0;
    const double kf = std::floor(theta0 * n_grid);
    for (double k : {kf, kf + 1.0}) {
        const double d = theta0 - k / n_grid;
        const double num_ = std::sin(kPi * n_grid * d);
        const double den = n_grid * std::sin(kPi * d);
        p_adjacent += den == 0.0 ? 1.0 : (num_ * num_) / (den * den);
    }
    r.note("analytic adjacent probability " + num(p_adjacent, 4));
    r.require(run_res.results.at(0).samples.size() == 1024, "1024 samples drawn");
    r.require(tape.ops.size() < 5000, "decomposed gate count is of order 10^3 (" + std::to_string(tape.ops.size()) + ")");
}

void criterion2(Report &r) {
    double worst16 = 0.0;
    double worst32 = 0.0;
    double worst_rej = 0.0;
    QscoutDevice dev;
    dev.optimize = true;
    for (double b : linspace(0.0, 2.0, 40)) {
        SimOptions o16;
        o16.cutoffs.default_cutoff = 16;
        const auto tape = build_calibration_tape(b);
        const double v = expval(simulate(tape, o16), *tape.measurements[0].obs);
        worst16 = std::max(worst16, std::abs(v - std::cos(4 * b * b)));
        if (b <= 1.0) {
            SimOptions o32;
            o32.cutoffs.default_cutoff = 32;
            const double v32 = expval(simulate(tape, o32), *tape.measurements[0].obs);
            worst32 = std::max(worst32, std::abs(v32 - std::cos(4 * b * b)));
        }
        const auto low = lower_to_native(tape, dev);
        const auto ps = postselected_expval(simulate(low.tape, o16), *low.tape.measurements[0].obs, low.ancillas);
        worst_rej = std::max(worst_rej, std::abs(ps.rejection));
    }
    r.note("cutoff 16 max error " + num(worst16) + ", cutoff 32 on [0,1] max error " + num(worst32) +
           ", max rejection " + num(worst_rej));
    r.require(worst16 <= kCalibrationPaperSettingsTol, "cutoff 16 curve within 0.05 of cos(4 beta^2)");
    r.require(worst32 <= kCalibrationConvergedTol, "cutoff 32 curve on [0,1] within 1e-3");
    r.require(worst_rej <= kRejectionTol, "ancilla post-selection rejection is 0");
}

void criterion3(Report &r) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto checks = hybc::testing::rule_oracle_suite();
    std::map<std::string, bool> seen;
    for (const auto &c : checks) {
        seen[c.id] = true;
        if (!c.passed()) {
            r.require(false, "rule " + c.id + " on " + c.what + ": error " + num(c.error) + " > " + num(c.tolerance));
        }
    }
    for (int i = 1; i <= 13; ++i) {
        r.require(seen.count(std::to_string(i)) > 0, "rule " + std::to_string(i) + " covered");
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    double worst = 0.0;
    for (const auto &c : checks) {
        worst = std::max(worst, c.error);
    }
    r.note(std::to_string(checks.size()) + " checks, worst error " + num(worst) + ", " + num(secs, 3) + " s");
}

void criterion4(Report &r) {
    // (a)
    std::size_t n = 0;
    for (const auto &list : {table_cv_gates(), table_hybrid_gates()}) {
        for (const auto &name : list) {
            const auto g = lookup(name);
            ++n;
            r.require(derived_signature(g) == gate_signature(g), "derived signature of " + name);
        }
    }
    r.note("(a) " + std::to_string(n) + " table gates");
    // (b)
    try {
        parse_qasm(read_text_file(fixture("conflict.qasm")));
        r.require(false, "(b) conflict fixture rejected");
    } catch (const QasmTypeError &) {
    }
    const WireLabel w("w");
    const auto tape = build_tape({}, {make_instruction("R", {w}, {0.2}), make_instruction("H", {w})}, {});
    try {
        infer_types(tape);
        r.require(false, "(b) R then H on one wire raises TypeError");
    } catch (const TypeError &e) {
        r.require(e.wire == w && e.existing == WireType::qumode() && e.required == WireType::qubit() && e.index == 1,
                  "(b) TypeError fields (w, qumode, qubit, 1)");
    }
    const auto mtape = build_tape({}, {make_instruction("H", {w})}, {MeasurementSpec::sample({{w, Basis::Position}})});
    try {
        infer_types(mtape);
        r.require(false, "(b) position sampling of a qubit raises TypeError");
    } catch (const TypeError &e) {
        r.require(e.wire == w && e.existing == WireType::qubit() && e.required == WireType::qumode() && e.index == 1,
                  "(b) measurement TypeError fields (w, qubit, qumode, 1)");
    }
    // (c)
    const auto evo = make_evo_gate({}, false);
    r.require(!evo->declared_signature(), "(c) stripped Evo has no declared signature");
    r.require(gate_signature(evo) == std::vector<WireType>{WireType::qubit(), WireType::qumode()},
              "(c) stripped Evo infers (qubit, qumode)");
    // (d)
    const auto pos = infer_types(build_tape({}, {}, {MeasurementSpec::sample({{w, Basis::Position}})}));
    const auto dis = infer_types(build_tape({}, {}, {MeasurementSpec::sample({{w, Basis::Discrete}})}));
    r.require(pos.get(w) == WireType::qumode(), "(d) position sampling infers qumode");
    r.require(dis.get(w).is_bottom(), "(d) discrete sampling infers nothing");
}

void criterion5(Report &r) {
    const auto cat = parse_qasm(read_text_file(fixture("cat_state.qasm")));
    r.require(!cat.tape.ops.empty(), "cat-state listing parses");
    std::string why;
    r.require(roundtrip(cat.tape, cat.env, 12, &why), "cat-state parse -> emit -> parse: " + why);
    const auto once = emit_qasm(cat.tape, cat.env, 12);
    const auto again = parse_qasm(once);
    r.require(emit_qasm(again.tape, again.env, 12) == once, "second emit is byte-identical");
    double worst = 0.0;
    for (const auto &c : hybc::testing::library_soundness(8)) {
        // The truncated BS(pi) is a swap only where n_a + n_b < cutoff.
        const double err = c.gate == "cv_swap" ? c.sector : c.full;
        worst = std::max(worst, err);
        if (c.gate == "cv_swap") {
            r.note("cv_swap: full space " + num(c.full) + ", n_a + n_b < cutoff " + num(c.sector));
        }
        r.require(err <= kLibraryTol, c.gate + " equals its gate-library counterpart (" + num(err) + ")");
    }
    r.note("library worst error " + num(worst));
}

void criterion6(Report &r) {
    QscoutDevice dev;
    dev.n_qubits = 2;
    dev.optimize = true;
    const auto tape = build_calibration_tape(0.5);
    const auto low = lower_to_native(tape, dev);
    const auto prog = read_jaqal(emit_jaqal(low, dev));
    r.require(prog.register_size == 2, "register q[2]");
    r.require(prog.subcircuits.size() == 1, "one subcircuit");
    if (prog.subcircuits.size() != 1) {
        return;
    }
    std::vector<std::array<std::string, 4>> xcd;
    for (const auto &s : prog.subcircuits[0]) {
        r.require(s.gate == "Rz" || s.gate == "Ry" || s.gate == "xCD", "gate name " + s.gate + " in {Rz, Ry, xCD}");
        if (s.gate == "xCD" && s.args.size() == 5) {
            xcd.push_back({s.args[1] + " " + s.args[2], s.args[3], s.args[4], s.args[0]});
        }
    }
    r.require(xcd.size() == 4, "exactly 4 xCD statements");
    const std::vector<std::pair<double, double>> want{{0.5, 0.0}, {0.0, 0.5}, {-0.5, -0.0}, {-0.0, -0.5}};
    for (std::size_t i = 0; i < xcd.size() && i < 4; ++i) {
        r.require(xcd[i][0] == "1 1", "xCD #" + std::to_string(i) + " mode arguments 1 1");
        r.require(std::stod(xcd[i][1]) == want[i].first && std::stod(xcd[i][2]) == want[i].second &&
                      std::signbit(std::stod(xcd[i][1])) == std::signbit(want[i].first) &&
                      std::signbit(std::stod(xcd[i][2])) == std::signbit(want[i].second),
                  "xCD #" + std::to_string(i) + " displacement (" + xcd[i][1] + ", " + xcd[i][2] + ")");
    }
    double worst = 0.0;
    for (double b : linspace(0.0, 2.0, 40)) {
        SimOptions o;
        o.cutoffs.default_cutoff = 16;
        const auto t = build_calibration_tape(b);
        const double ideal = expval(simulate(t, o), *t.measurements[0].obs);
        const auto l = lower_to_native(t, dev);
        const auto ps = postselected_expval(simulate(l.tape, o), *l.tape.measurements[0].obs, l.ancillas);
        worst = std::max(worst, std::abs(ps.value - ideal));
    }
    r.note("lowered vs direct max difference " + num(worst));
    r.require(worst <= kLoweredTol, "post-selected lowered curve within 2e-3 of criterion 2");
}

void criterion7(Report &r) {
    const double unit = hybc::testing::worst_unitarity_error(8);
    r.note("worst |U^dag U - 1| " + num(unit));
    r.require(unit <= kUnitarityTol, "every gate matrix unitary at cutoff 8");

    double worst_n = 0.0;
    double worst_x = 0.0;
    const WireLabel m("m");
    for (double r0 : {0.0, 0.3, 0.7, 1.0}) {
        for (double phi : {0.0, 0.9, 2.5, -1.3}) {
            const auto tape = build_tape({}, {make_instruction("D", {m}, {r0, phi})}, {});
            SimOptions o;
            o.cutoffs.default_cutoff = 32;
            const auto st = simulate(tape, o);
            const cd alpha = std::polar(r0, phi);
            worst_n = std::max(worst_n, std::abs(expval(st, obs_n(m)) - std::norm(alpha)));
            worst_x = std::max(worst_x, std::abs(expval(st, obs_x(m)) - std::sqrt(2.0) * alpha.real()));
        }
    }
    r.note("coherent <n> error " + num(worst_n) + ", <x> error " + num(worst_x));
    r.require(worst_n <= kCoherentTol, "<n> = |alpha|^2");
    r.require(worst_x <= kCoherentTol, "<x> = sqrt(2) Re alpha");

    {
        const auto tape =
            build_tape({{m, 0}}, {}, {MeasurementSpec::sample({{m, Basis::Position}})}, std::size_t{100000});
        SimOptions o;
        o.cutoffs.default_cutoff = 32;
        const auto res = run(tape, o, kSeed);
        double s1 = 0.0;
        double s2 = 0.0;
        for (const auto &t : res.results[0].samples) {
            const double x = std::get<double>(t[0]);
            s1 += x;
            s2 += x * x;
        }
        const double nshots = static_cast<double>(res.results[0].samples.size());
        const double v = s2 / nshots - (s1 / nshots) * (s1 / nshots);
        r.note("vacuum homodyne variance " + num(v));
        r.require(std::abs(v - 0.5) <= kHomodyneRelTol * 0.5, "vacuum homodyne variance within 5% of 1/2");
    }

    // Norm after every gate, with a tolerance tighter than the default guard.
    const auto qpe = decompose_to_gateset(build_qpe_tape({.bits = 4, .shots = std::nullopt}),
                                          enumerate_gateset("sim-native"));
    const auto cal = build_calibration_tape(0.7);
    double drift = 0.0;
    for (const auto *t : {&qpe, &cal}) {
        SimOptions o;
        o.cutoffs.default_cutoff = 12;
        auto pc = prepare(*t, o);
        for (const auto &g : pc.ops) {
            apply_instruction(pc.state, g);
            drift = std::max(drift, std::abs(pc.state.norm() - 1.0));
        }
    }
    r.note("max norm drift " + num(drift));
    r.require(drift <= kNormTol, "norm preserved after every gate");
}

void criterion8(Report &r) {
    const auto tmp = std::filesystem::temp_directory_path() / ("hybc_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(tmp);
    const std::vector<std::string> cmds{
        "simulate " + fixture("cat_state.qasm") + " --shots 200 --seed 7",
        "simulate " + fixture("calibration_b05.qasm") + " --seed 7",
        "demo qpe --bits 6 --shots 256 --seed 7",
        "decompose " + fixture("calibration_b05.qasm") + " --gateset " + fixture("native_gateset.json"),
        "decompose " + fixture("cat_state.qasm") + " --gateset qscout-native",
        "export-qasm " + fixture("cat_state.qasm"),
        "export-jaqal " + fixture("calibration_b05.qasm") + " --device " + fixture("device_com.json"),
    };
    for (const auto &c : cmds) {
        const auto a = run_command(cli() + " " + c + " 2>/dev/null");
        const auto b = run_command(cli() + " " + c + " 2>/dev/null");
        r.require(a.status == 0 && b.status == 0, "'" + c + "' exits 0");
        r.require(!a.out.empty() && a.out == b.out, "'" + c + "' byte-identical across runs");
    }
    // Files written by the calibration demo.
    std::string first;
    for (int k = 0; k < 2; ++k) {
        const auto dir = tmp / std::to_string(k);
        const auto res = run_command(cli() + " demo calibration --points 3 --beta-max 1 --jaqal-dir " + dir.string() +
                                     " 2>/dev/null");
        r.require(res.status == 0, "demo calibration with --jaqal-dir exits 0");
        std::string all = res.out;
        for (int i = 0; i < 3; ++i) {
            char name[64];
            std::snprintf(name, sizeof name, "calibration_%03d.jaqal", i);
            all += read_text_file((dir / name).string());
        }
        if (k == 0) {
            first = all;
        } else {
            r.require(all == first, "calibration JSON and JAQAL files byte-identical across runs");
        }
    }
    std::filesystem::remove_all(tmp);
    r.note(std::to_string(cmds.size() + 1) + " commands compared");
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<void(Report &)>>> criteria{
        {"1 QPE reproduction", criterion1},      {"2 calibration curve", criterion2},
        {"3 rewrite-rule oracles", criterion3},  {"4 type inference", criterion4},
        {"5 QASM round-trip", criterion5},       {"6 JAQAL export", criterion6},
        {"7 simulator properties", criterion7},  {"8 determinism", criterion8},
    };
    bool all = true;
    for (const auto &[name, fn] : criteria) {
        Report r;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            fn(r);
        } catch (const std::exception &e) {
            r.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::cout << (r.ok ? "PASS" : "FAIL") << " criterion " << name << " (" << num(secs, 3) << " s)\n"
                  << r.detail.str() << std::flush;
        all = all && r.ok;
    }
    return all ? 0 : 1;
}
