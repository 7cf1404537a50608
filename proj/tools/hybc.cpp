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

// hybc command-line driver.
//
// Exit codes: 0 success, 1 circuit or usage error, 2 internal error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hybc/hybc.hpp"

namespace {

using hybc::ojson;

bool use_color() {
    const char *v = std::getenv("HYBC_COLOR");
    return v != nullptr && std::string(v) != "0" && std::string(v) != "never" && std::string(v) != "";
}

void report(const std::string &kind, const std::string &msg) {
    if (use_color()) {
        std::cerr << "\033[1;31m" << kind << "\033[0m: " << msg << "\n";
    } else {
        std::cerr << kind << ": " << msg << "\n";
    }
}

void warn(const std::string &msg) {
    if (use_color()) {
        std::cerr << "\033[1;33mwarning\033[0m: " << msg << "\n";
    } else {
        std::cerr << "warning: " << msg << "\n";
    }
}

/// Exits with code 1 after reporting; used for diagnostics that are not
/// exceptions.
struct DiagnosticExit {
    int code = 1;
};

struct Common {
    std::size_t cutoff = 8;
    std::vector<std::string> cutoff_wire;
    std::optional<std::size_t> shots;
    std::uint64_t seed = 0;
    std::string gateset = "sim-native";
    std::string device;
    int precision = 4;
    bool strict = false;
    std::string output;
    std::string format = "json";
};

void add_common(CLI::App *app, Common &c) {
    app->add_option("--cutoff", c.cutoff, "Default Fock cutoff per qumode")->check(CLI::Range(2, 4096));
    app->add_option("--cutoff-wire", c.cutoff_wire, "Per-wire cutoff override, w=N (repeatable)");
    app->add_option("--shots", c.shots, "Number of shots (analytic when absent)")->check(CLI::PositiveNumber);
    app->add_option("--seed", c.seed, "RNG seed");
    app->add_option("--gateset", c.gateset, "Target gate set: full, sim-native, qscout-native or a JSON file");
    app->add_option("--device", c.device, "QSCOUT device JSON file");
    app->add_option("--precision", c.precision, "Decimal places for emitted numbers")->check(CLI::Range(1, 17));
    app->add_flag("--strict", c.strict, "Treat unconstrained wires as errors");
    app->add_option("--output,-o", c.output, "Write to this file instead of stdout");
    app->add_option("--format", c.format, "Output format")->check(CLI::IsMember({"json", "text"}));
}

hybc::CutoffConfig cutoffs(const Common &c) {
    hybc::CutoffConfig cfg;
    cfg.default_cutoff = c.cutoff;
    for (const auto &s : c.cutoff_wire) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0) {
            throw hybc::Error("--cutoff-wire expects w=N, got '" + s + "'");
        }
        const std::string w = s.substr(0, eq);
        std::size_t n = 0;
        try {
            n = std::stoul(s.substr(eq + 1));
        } catch (const std::exception &) {
            throw hybc::Error("--cutoff-wire expects w=N, got '" + s + "'");
        }
        const bool numeric = !w.empty() && w.find_first_not_of("0123456789") == std::string::npos;
        cfg.overrides[numeric ? hybc::WireLabel(static_cast<std::int64_t>(std::stoll(w))) : hybc::WireLabel(w)] = n;
    }
    return cfg;
}

void emit(const Common &c, const std::string &text) {
    if (c.output.empty()) {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream out(c.output, std::ios::binary);
    if (!out) {
        throw hybc::Error("cannot write " + c.output);
    }
    out << text;
}

std::string dump(const ojson &j) {
    return j.dump(2) + "\n";
}

hybc::QscoutDevice device_of(const Common &c, bool optimize_default = false) {
    if (c.device.empty()) {
        hybc::QscoutDevice d;
        d.optimize = optimize_default;
        d.precision = c.precision;
        return d;
    }
    return hybc::QscoutDevice::from_json(hybc::read_json_file(c.device));
}

hybc::QasmProgram load(const std::string &path) {
    return hybc::parse_qasm(hybc::read_text_file(path));
}

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int cmd_check(const std::string &file, const Common &c) {
    const auto prog = load(file);
    const auto inferred = hybc::infer_types(prog.tape);
    auto diags = hybc::validate(prog.tape, prog.env, false);
    if (c.strict) {
        for (const auto &[w, t] : prog.env.entries()) {
            if (inferred.get(w).is_bottom()) {
                diags.push_back({hybc::Diagnostic::Kind::UnresolvedWire, w, "UnresolvedWire(" + w.str() + ")"});
            }
        }
    }
    if (c.format == "json") {
        ojson j;
        ojson env = ojson::object();
        for (const auto &[w, t] : prog.env.entries()) {
            env[w.str()] = t.str();
        }
        j["env"] = env;
        ojson ds = ojson::array();
        for (const auto &d : diags) {
            ds.push_back({{"kind", d.kind == hybc::Diagnostic::Kind::TypeConflict ? "TypeConflict" : "UnresolvedWire"},
                          {"wire", d.wire.str()},
                          {"message", d.message}});
        }
        j["diagnostics"] = ds;
        ojson ws = ojson::array();
        for (const auto &w : prog.warnings) {
            ws.push_back(w);
        }
        j["warnings"] = ws;
        emit(c, dump(j));
    } else {
        std::string out;
        for (const auto &[w, t] : prog.env.entries()) {
            out += w.str() + ": " + t.str() + "\n";
        }
        emit(c, out);
    }
    for (const auto &w : prog.warnings) {
        warn(w);
    }
    for (const auto &d : diags) {
        report(d.kind == hybc::Diagnostic::Kind::TypeConflict ? "TypeConflict" : "UnresolvedWire", d.message);
    }
    return diags.empty() ? 0 : 1;
}

int cmd_decompose(const std::string &file, const Common &c, bool count) {
    const auto prog = load(file);
    const auto target = hybc::resolve_gateset(c.gateset);
    const auto res = hybc::decompose_detailed(prog.tape, target);
    if (count) {
        ojson j;
        j["metadata"] = hybc::metadata_json({std::nullopt, prog.tape.shots, {}, target.name});
        const auto rc = hybc::count_gates(res.tape, res.ancillas);
        const auto body = hybc::resource_count_json(rc);
        j["gates"] = body["gates"];
        j["ancillas"] = body["ancillas"];
        emit(c, dump(j));
        return 0;
    }
    hybc::TypeEnv env = prog.env;
    const auto inferred = hybc::infer_types(res.tape);
    for (const auto &w : res.tape.wires()) {
        if (!env.find(w)) {
            const auto t = inferred.get(w);
            env.set(w, t.is_bottom() ? hybc::WireType::qubit() : t);
        }
    }
    emit(c, hybc::emit_qasm(res.tape, env, c.precision));
    return 0;
}

int cmd_simulate(const std::string &file, const Common &c) {
    const auto prog = load(file);
    auto tape = prog.tape;
    if (c.shots) {
        tape.shots = c.shots;
    }
    const auto target = hybc::resolve_gateset(c.gateset);
    tape = hybc::decompose_to_gateset(tape, target);
    hybc::SimOptions opts;
    opts.cutoffs = cutoffs(c);
    const auto r = hybc::run(tape, opts, c.seed);
    for (const auto &w : r.warnings) {
        warn(w);
    }
    if (c.format == "json") {
        emit(c, dump(hybc::run_result_json(r, target.name)));
        return 0;
    }
    std::string out;
    for (const auto &m : r.results) {
        if (m.value) {
            out += m.spec.str() + " = " + fmt(*m.value, 10) + "\n";
        } else {
            std::map<std::string, std::size_t> counts;
            for (const auto &s : m.samples) {
                counts[hybc::outcome_key(s)] += 1;
            }
            out += m.spec.str() + "\n";
            for (const auto &[k, n] : counts) {
                out += "  " + k + ": " + std::to_string(n) + "\n";
            }
        }
    }
    emit(c, out);
    return 0;
}

int cmd_export_jaqal(const std::string &file, const Common &c) {
    const auto prog = load(file);
    const auto dev = device_of(c);
    const auto diags = hybc::validate_for_qscout(prog.tape, dev);
    if (!diags.empty()) {
        for (const auto &d : diags) {
            report(hybc::diagnostic_kind_name(d.kind), d.message);
        }
        return 1;
    }
    emit(c, hybc::export_jaqal(prog.tape, dev));
    return 0;
}

int cmd_export_qasm(const std::string &file, const Common &c, bool stdlib) {
    if (stdlib) {
        emit(c, hybc::cvstdgates_inc());
        return 0;
    }
    if (file.empty()) {
        throw hybc::Error("export-qasm needs an input file or --stdlib");
    }
    const auto prog = load(file);
    emit(c, hybc::emit_qasm(prog.tape, prog.env, c.precision));
    return 0;
}

struct QpeArgs {
    std::size_t bits = 10;
    double t = 1.0;
    double omega_r = 1.0;
    double omega_q = -1.0;
    double chi = 0.1;
    std::size_t fock_level = 4;
};

int cmd_demo_qpe(const QpeArgs &a, Common c) {
    if (a.bits < 1 || a.bits > 20) {
        throw hybc::Error("--bits must be in 1..20");
    }
    if (a.fock_level >= c.cutoff) {
        throw hybc::Error("Fock level " + std::to_string(a.fock_level) + " needs --cutoff > " +
                          std::to_string(a.fock_level));
    }
    hybc::QpeConfig cfg;
    cfg.bits = a.bits;
    cfg.t = a.t;
    cfg.h = {a.omega_r, a.omega_q, a.chi};
    cfg.fock_level = a.fock_level;
    cfg.shots = c.shots.value_or(1024);
    const auto tape = hybc::decompose_to_gateset(hybc::build_qpe_tape(cfg), hybc::enumerate_gateset("sim-native"));
    hybc::SimOptions opts;
    opts.cutoffs = cutoffs(c);
    const auto r = hybc::run(tape, opts, c.seed);
    const auto est = hybc::postprocess_qpe(r.results.at(0).samples, cfg);
    const double spacing = 2.0 * hybc::kPi / std::ldexp(1.0, static_cast<int>(cfg.bits)) / cfg.t;
    if (c.format == "text") {
        std::string out = "estimate " + fmt(est.estimate) + "\nexact " + fmt(est.exact) + "\ngrid spacing " +
                          fmt(spacing) + "\nwindow [" + fmt(est.window_lo) + ", " + fmt(est.window_hi) + ")\n";
        emit(c, out);
        return 0;
    }
    ojson j;
    j["metadata"] = hybc::metadata_json({c.seed, cfg.shots, r.cutoffs, "sim-native"});
    j["estimate"] = est.estimate;
    j["exact"] = est.exact;
    j["grid_spacing"] = spacing;
    j["window"] = {est.window_lo, est.window_hi};
    j["window_rule"] =
        "theta = k/2^bits (most significant bit first); E = (-2 pi theta mod 2 pi)/t, shifted by multiples of "
        "2 pi/t into [exact - pi/t, exact + pi/t)";
    ojson hist = ojson::object();
    for (const auto &[b, n] : est.bitstrings) {
        hist[b] = n;
    }
    j["histogram"] = hist;
    ojson en = ojson::object();
    for (const auto &[e, n] : est.energies) {
        en[fmt(e)] = n;
    }
    j["energies"] = en;
    j["gate_count"] = tape.ops.size();
    emit(c, dump(j));
    return 0;
}

struct CalibrationArgs {
    std::size_t points = 40;
    double beta_min = 0.0;
    double beta_max = 2.0;
    std::vector<double> betas;
    std::string jaqal_dir;
};

int cmd_demo_calibration(const CalibrationArgs &a, Common c) {
    std::vector<double> betas = a.betas;
    if (betas.empty()) {
        if (a.points == 0) {
            throw hybc::Error("--points must be positive");
        }
        for (std::size_t i = 0; i < a.points; ++i) {
            betas.push_back(a.points == 1 ? a.beta_min
                                          : a.beta_min + (a.beta_max - a.beta_min) * static_cast<double>(i) /
                                                             static_cast<double>(a.points - 1));
        }
    }
    const bool lower = !c.device.empty() || !a.jaqal_dir.empty();
    const auto dev = device_of(c, true);
    hybc::SimOptions opts;
    opts.cutoffs = cutoffs(c);
    ojson pts = ojson::array();
    ojson warnings = ojson::array();
    std::string text;
    std::map<hybc::WireLabel, std::size_t> used_cutoffs;
    for (std::size_t i = 0; i < betas.size(); ++i) {
        const double b = betas[i];
        auto tape = hybc::build_calibration_tape(b);
        tape.shots = c.shots;
        const double n_mean = 4.0 * b * b;
        const auto cut = opts.cutoffs.cutoff(hybc::WireLabel("m1i1"));
        if (n_mean > static_cast<double>(cut) / 2.0) {
            const std::string w = "beta=" + fmt(b, 4) + ": 4 beta^2 = " + fmt(n_mean, 3) + " approaches cutoff " +
                                  std::to_string(cut) + "; truncation error likely";
            warnings.push_back(w);
            warn(w);
        }
        const auto r = hybc::run(tape, opts, c.seed + i);
        used_cutoffs = r.cutoffs;
        ojson p;
        p["beta"] = b;
        p["expval"] = *r.results.at(0).value;
        p["ideal"] = std::cos(n_mean);
        text += fmt(b, 4) + " " + fmt(*r.results.at(0).value, 8) + " " + fmt(std::cos(n_mean), 8);
        if (lower) {
            const auto low = hybc::lower_to_native(tape, dev);
            const auto state = hybc::simulate(low.tape, opts);
            const auto ps = hybc::postselected_expval(state, low.tape.measurements.at(0).obs.value(), low.ancillas);
            p["lowered_expval"] = ps.value;
            p["rejection"] = ps.rejection;
            text += " " + fmt(ps.value, 8) + " " + fmt(ps.rejection, 12);
            if (!a.jaqal_dir.empty()) {
                std::filesystem::create_directories(a.jaqal_dir);
                char name[64];
                std::snprintf(name, sizeof name, "calibration_%03zu.jaqal", i);
                const auto path = std::filesystem::path(a.jaqal_dir) / name;
                std::ofstream out(path, std::ios::binary);
                if (!out) {
                    throw hybc::Error("cannot write " + path.string());
                }
                out << hybc::emit_jaqal(low, dev);
                p["jaqal"] = path.filename().string();
            }
        }
        text += "\n";
        pts.push_back(p);
    }
    if (c.format == "text") {
        emit(c, text);
        return 0;
    }
    ojson j;
    j["metadata"] = hybc::metadata_json({c.seed, c.shots, used_cutoffs, "sim-native"});
    j["points"] = pts;
    j["warnings"] = warnings;
    emit(c, dump(j));
    return 0;
}

int run_cli(int argc, char **argv) {
    CLI::App app{"hybc: hybrid qubit-qumode circuit compiler"};
    app.set_version_flag("--version", HYBC_VERSION);
    app.require_subcommand(1);

    std::string file;
    Common c_check;
    Common c_decompose;
    Common c_simulate;
    Common c_jaqal;
    Common c_qasm;
    Common c_qpe;
    Common c_cal;
    c_cal.cutoff = 16;
    bool count = false;
    bool stdlib = false;
    QpeArgs qpe;
    CalibrationArgs cal;

    auto *check = app.add_subcommand("check", "Infer wire types and report diagnostics");
    check->add_option("file", file, "OpenQASM file")->required();
    add_common(check, c_check);
    c_check.format = "text";

    auto *decompose = app.add_subcommand("decompose", "Lower a circuit into a target gate set");
    decompose->add_option("file", file, "OpenQASM file")->required();
    decompose->add_flag("--count", count, "Print gate counts as JSON instead of QASM");
    add_common(decompose, c_decompose);

    auto *simulate = app.add_subcommand("simulate", "Simulate in the truncated Fock basis");
    simulate->add_option("file", file, "OpenQASM file")->required();
    add_common(simulate, c_simulate);

    auto *jaqal = app.add_subcommand("export-jaqal", "Compile for QSCOUT and print JAQAL");
    jaqal->add_option("file", file, "OpenQASM file")->required();
    add_common(jaqal, c_jaqal);

    auto *qasm = app.add_subcommand("export-qasm", "Print canonical OpenQASM, or the bundled cvstdgates.inc");
    qasm->add_option("file", file, "OpenQASM file");
    qasm->add_flag("--stdlib", stdlib, "Write cvstdgates.inc");
    add_common(qasm, c_qasm);

    auto *demo = app.add_subcommand("demo", "Reproducible demonstrations");
    demo->require_subcommand(1);
    auto *dq = demo->add_subcommand("qpe", "Phase estimation on the dispersive Hamiltonian");
    dq->add_option("--bits", qpe.bits, "Estimation qubits");
    dq->add_option("--t", qpe.t, "Evolution time");
    dq->add_option("--omega-r", qpe.omega_r, "Oscillator frequency");
    dq->add_option("--omega-q", qpe.omega_q, "Qubit frequency");
    dq->add_option("--chi", qpe.chi, "Dispersive shift");
    dq->add_option("--fock-level", qpe.fock_level, "Prepared Fock level of the system qumode");
    add_common(dq, c_qpe);
    auto *dc = demo->add_subcommand("calibration", "Conditional-displacement calibration curve");
    dc->add_option("--points", cal.points, "Number of beta points");
    dc->add_option("--beta-min", cal.beta_min, "First beta");
    dc->add_option("--beta-max", cal.beta_max, "Last beta");
    dc->add_option("--beta", cal.betas, "Explicit beta values (repeatable; overrides the range)");
    dc->add_option("--jaqal-dir", cal.jaqal_dir, "Write one JAQAL file per beta into this directory");
    add_common(dc, c_cal);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    if (check->parsed()) {
        return cmd_check(file, c_check);
    }
    if (decompose->parsed()) {
        return cmd_decompose(file, c_decompose, count);
    }
    if (simulate->parsed()) {
        return cmd_simulate(file, c_simulate);
    }
    if (jaqal->parsed()) {
        return cmd_export_jaqal(file, c_jaqal);
    }
    if (qasm->parsed()) {
        return cmd_export_qasm(file, c_qasm, stdlib);
    }
    if (dq->parsed()) {
        return cmd_demo_qpe(qpe, c_qpe);
    }
    if (dc->parsed()) {
        return cmd_demo_calibration(cal, c_cal);
    }
    return 1;
}

}  // namespace

int main(int argc, char **argv) {
    try {
        return run_cli(argc, argv);
    } catch (const hybc::QasmTypeError &e) {
        report("TypeConflict", e.what());
        return 1;
    } catch (const hybc::TypeError &e) {
        report("TypeConflict", e.what());
        return 1;
    } catch (const hybc::Error &e) {
        report("error", e.what());
        return 1;
    } catch (const std::exception &e) {
        report("internal error", e.what());
        return 2;
    }
}
