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

/// QSCOUT device model, wire allocation, native lowering and JAQAL text.
///
/// xCD convention: `xCD q m i u v` = exp[X_q ((u + iv) adag - (u - iv) a)] on
/// mode (m, i); it is the gate library's xCD(u, v).

#pragma once

#include <charconv>
#include <functional>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "hybc/rewrite.hpp"
#include "hybc/wire_types.hpp"

namespace hybc {

struct PhysicalMode {
    int manifold = 0;
    int index = 0;
    std::string label() const {
        return "m" + std::to_string(manifold) + "i" + std::to_string(index);
    }
    bool operator==(const PhysicalMode &) const = default;
};

/// Parses `m<manifold>i<index>`; nullopt for anything else.
inline std::optional<PhysicalMode> parse_mode_label(const WireLabel &w) {
    if (w.is_int()) {
        return std::nullopt;
    }
    static const std::regex re(R"(m(\d+)i(\d+))");
    std::smatch sm;
    const std::string s = w.as_string();
    if (!std::regex_match(s, sm, re)) {
        return std::nullopt;
    }
    return PhysicalMode{std::stoi(sm[1]), std::stoi(sm[2])};
}

struct QscoutDevice {
    std::size_t n_qubits = 2;
    bool enable_com = false;
    bool optimize = false;
    std::string usepulses = "Calibration_PulseDefinitions.QubitBosonPulses";
    /// Decimal places for emitted numbers.
    int precision = 4;
    /// Gate -> allowed (mode, mode) pairs; gates not listed are unrestricted.
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> couplings{{"BS", {{"m0i1", "m1i1"}}}};

    static QscoutDevice from_json(const nlohmann::json &j) {
        QscoutDevice d;
        d.n_qubits = j.value("n_qubits", d.n_qubits);
        d.enable_com = j.value("enable_com", d.enable_com);
        d.optimize = j.value("optimize", d.optimize);
        d.usepulses = j.value("usepulses", d.usepulses);
        d.precision = j.value("precision", d.precision);
        if (j.contains("couplings")) {
            d.couplings.clear();
            for (const auto &[gate, pairs] : j.at("couplings").items()) {
                for (const auto &p : pairs) {
                    d.couplings[gate].emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
                }
            }
        }
        if (d.n_qubits == 0) {
            throw Error("device n_qubits must be positive");
        }
        return d;
    }

    bool mode_exists(const PhysicalMode &m) const {
        return (m.manifold == 0 || m.manifold == 1) && m.index >= 0 && static_cast<std::size_t>(m.index) < n_qubits;
    }
    bool mode_enabled(const PhysicalMode &m) const {
        return mode_exists(m) && (m.index != 0 || enable_com);
    }

    /// Enabled modes in first-fit order: manifold 0 then 1, index ascending.
    std::vector<PhysicalMode> enabled_modes() const {
        std::vector<PhysicalMode> out;
        for (int man = 0; man < 2; ++man) {
            for (std::size_t i = 0; i < n_qubits; ++i) {
                PhysicalMode m{man, static_cast<int>(i)};
                if (mode_enabled(m)) {
                    out.push_back(m);
                }
            }
        }
        return out;
    }

    bool coupling_allowed(const std::string &gate, const std::string &a, const std::string &b) const {
        auto it = couplings.find(gate);
        if (it == couplings.end()) {
            return true;
        }
        for (const auto &[x, y] : it->second) {
            if ((x == a && y == b) || (x == b && y == a)) {
                return true;
            }
        }
        return false;
    }
};

struct DeviceDiagnostic {
    enum class Kind : std::uint8_t { ComModeDisabled, UnknownMode, DisallowedCoupling, QubitOutOfRange };
    Kind kind;
    std::size_t op_index;
    std::string message;
};

inline std::string diagnostic_kind_name(DeviceDiagnostic::Kind k) {
    switch (k) {
        case DeviceDiagnostic::Kind::ComModeDisabled:
            return "ComModeDisabled";
        case DeviceDiagnostic::Kind::UnknownMode:
            return "UnknownMode";
        case DeviceDiagnostic::Kind::DisallowedCoupling:
            return "DisallowedCoupling";
        case DeviceDiagnostic::Kind::QubitOutOfRange:
            return "QubitOutOfRange";
    }
    return "?";
}

namespace detail {

inline std::vector<WireLabel> qumode_wires_of(const GateInstruction &g, const TypeEnv &env) {
    std::vector<WireLabel> out;
    for (const auto &w : g.base_wires()) {
        if (env.get(w).tag == WireType::Tag::Qumode) {
            out.push_back(w);
        }
    }
    return out;
}

}  // namespace detail

inline std::vector<DeviceDiagnostic> validate_for_qscout(const QuantumTape &tape, const QscoutDevice &dev) {
    using K = DeviceDiagnostic::Kind;
    const TypeEnv env = infer_types(tape);
    std::vector<DeviceDiagnostic> out;
    for (std::size_t i = 0; i < tape.ops.size(); ++i) {
        const auto &g = tape.ops[i];
        for (const auto &w : g.wires) {
            const auto t = env.get(w);
            if (t.tag == WireType::Tag::Qumode) {
                auto pm = parse_mode_label(w);
                if (!pm) {
                    continue;  // virtual; placed by allocate_virtual_wires
                }
                if (!dev.mode_exists(*pm)) {
                    out.push_back({K::UnknownMode, i, "op #" + std::to_string(i) + ": unknown mode " + w.str()});
                } else if (!dev.mode_enabled(*pm)) {
                    out.push_back({K::ComModeDisabled, i,
                                   "op #" + std::to_string(i) + ": COM mode " + w.str() + " is disabled"});
                }
            } else if (w.is_int() && (w.as_int() < 0 || static_cast<std::size_t>(w.as_int()) >= dev.n_qubits)) {
                out.push_back({K::QubitOutOfRange, i,
                               "op #" + std::to_string(i) + ": qubit " + w.str() + " is outside q[0.." +
                                   std::to_string(dev.n_qubits - 1) + "]"});
            }
        }
        const auto modes = detail::qumode_wires_of(g, env);
        if (modes.size() == 2 && parse_mode_label(modes[0]) && parse_mode_label(modes[1]) &&
            !dev.coupling_allowed(g.gate->name, modes[0].as_string(), modes[1].as_string())) {
            out.push_back({K::DisallowedCoupling, i,
                           "op #" + std::to_string(i) + ": " + g.gate->name + " cannot couple " + modes[0].str() +
                               " and " + modes[1].str()});
        }
    }
    return out;
}

/// Maps virtual qumode wires to physical modes by first-fit search with
/// backtracking; physical labels map to themselves.
inline std::map<WireLabel, WireLabel> allocate_virtual_wires(const QuantumTape &tape, const QscoutDevice &dev) {
    const TypeEnv env = infer_types(tape);
    std::map<WireLabel, WireLabel> out;
    std::vector<WireLabel> virt;
    std::set<std::string> used;
    for (const auto &[w, t] : env.entries()) {
        if (t.tag != WireType::Tag::Qumode) {
            continue;
        }
        if (parse_mode_label(w)) {
            out.emplace(w, w);
            used.insert(w.as_string());
        } else {
            virt.push_back(w);
        }
    }
    // Two-mode gate constraints between wires.
    std::vector<std::pair<std::string, std::pair<WireLabel, WireLabel>>> pairs;
    for (const auto &g : tape.ops) {
        const auto modes = detail::qumode_wires_of(g, env);
        if (modes.size() == 2 && dev.couplings.count(g.gate->name)) {
            pairs.push_back({g.gate->name, {modes[0], modes[1]}});
        }
    }
    const auto candidates = dev.enabled_modes();
    std::map<WireLabel, std::string> assign;
    for (const auto &[w, p] : out) {
        assign[w] = p.as_string();
    }
    auto consistent = [&]() {
        for (const auto &[gate, ab] : pairs) {
            auto ia = assign.find(ab.first);
            auto ib = assign.find(ab.second);
            if (ia != assign.end() && ib != assign.end() && !dev.coupling_allowed(gate, ia->second, ib->second)) {
                return false;
            }
        }
        return true;
    };
    std::function<bool(std::size_t)> dfs = [&](std::size_t k) {
        if (k == virt.size()) {
            return true;
        }
        for (const auto &m : candidates) {
            const auto label = m.label();
            if (used.count(label)) {
                continue;
            }
            assign[virt[k]] = label;
            used.insert(label);
            if (consistent() && dfs(k + 1)) {
                return true;
            }
            used.erase(label);
            assign.erase(virt[k]);
        }
        return false;
    };
    if (!dfs(0)) {
        throw UnsatisfiableError("cannot place " + std::to_string(virt.size()) + " virtual qumode(s) on " +
                                 std::to_string(candidates.size()) + " enabled mode(s) under the coupling constraints");
    }
    for (const auto &w : virt) {
        out.emplace(w, WireLabel(assign.at(w)));
    }
    return out;
}

namespace detail {

inline GateInstruction relabel(GateInstruction g, const std::map<WireLabel, WireLabel> &map) {
    for (auto &w : g.wires) {
        if (auto it = map.find(w); it != map.end()) {
            w = it->second;
        }
    }
    for (auto &m : g.modifiers) {
        if (auto *c = std::get_if<CondZMod>(&m)) {
            if (auto it = map.find(c->qubit); it != map.end()) {
                c->qubit = it->second;
            }
        } else if (auto *c2 = std::get_if<CtrlMod>(&m)) {
            if (auto it = map.find(c2->qubit); it != map.end()) {
                c2->qubit = it->second;
            }
        }
    }
    return g;
}

}  // namespace detail

inline QuantumTape relabel_tape(const QuantumTape &tape, const std::map<WireLabel, WireLabel> &map) {
    QuantumTape out = tape;
    for (auto &p : out.prep) {
        if (auto it = map.find(p.wire); it != map.end()) {
            p.wire = it->second;
        }
    }
    for (auto &g : out.ops) {
        g = detail::relabel(std::move(g), map);
    }
    for (auto &m : out.measurements) {
        if (m.obs) {
            for (auto &f : m.obs->factors) {
                if (auto it = map.find(f.wire); it != map.end()) {
                    f.wire = it->second;
                }
            }
        } else {
            BasisSchema s;
            for (const auto &[w, b] : m.schema.entries()) {
                auto it = map.find(w);
                s.add(it == map.end() ? w : it->second, b);
            }
            m.schema = s;
        }
    }
    return out;
}

struct LoweredProgram {
    /// Native tape on physical labels: qubits are integers, modes `m<k>i<j>`.
    QuantumTape tape;
    /// Physical index of each ancilla qubit.
    std::vector<WireLabel> ancillas;
    std::map<WireLabel, WireLabel> wire_map;
};

namespace detail {

/// Removes H.H pairs that are adjacent on their qubit.
inline std::vector<GateInstruction> cancel_hadamard_pairs(std::vector<GateInstruction> ops) {
    bool changed = true;
    while (changed) {
        changed = false;
        std::map<WireLabel, std::size_t> last;
        std::vector<bool> drop(ops.size(), false);
        for (std::size_t i = 0; i < ops.size(); ++i) {
            const auto &g = ops[i];
            if (g.gate->name == "H" && g.modifiers.empty()) {
                auto it = last.find(g.wires[0]);
                if (it != last.end() && !drop[it->second] && ops[it->second].gate->name == "H") {
                    drop[it->second] = true;
                    drop[i] = true;
                    last.erase(it);
                    changed = true;
                    continue;
                }
            }
            for (const auto &w : g.wires) {
                last[w] = i;
            }
        }
        std::vector<GateInstruction> kept;
        for (std::size_t i = 0; i < ops.size(); ++i) {
            if (!drop[i]) {
                kept.push_back(std::move(ops[i]));
            }
        }
        ops = std::move(kept);
    }
    return ops;
}

}  // namespace detail

/// Validates, allocates modes and qubits, lowers to {RZ, RY, RX, CNOT, xCD}.
/// Ancilla qubits take the lowest free physical indices, then virtual
/// qubits in first-appearance order.
inline LoweredProgram lower_to_native(const QuantumTape &tape, const QscoutDevice &dev) {
    auto diags = validate_for_qscout(tape, dev);
    if (!diags.empty()) {
        std::string msg = "device validation failed:";
        for (const auto &d : diags) {
            msg += "\n  " + diagnostic_kind_name(d.kind) + ": " + d.message;
        }
        throw Error(msg);
    }
    GateSet target = enumerate_gateset("qscout-native");
    target.gates.insert("H");
    auto res = decompose_detailed(tape, target, {16, dev.optimize});
    auto ops = detail::cancel_hadamard_pairs(res.tape.ops);
    std::vector<GateInstruction> native;
    for (auto &g : ops) {
        if (g.gate->name == "H") {
            native.push_back(make_instruction("RZ", g.wires, {kPi}));
            native.push_back(make_instruction("RY", g.wires, {kPi / 2}));
        } else {
            native.push_back(std::move(g));
        }
    }
    QuantumTape lowered = build_tape(res.tape.prep, std::move(native), res.tape.measurements, res.tape.shots);

    LoweredProgram out;
    out.wire_map = allocate_virtual_wires(lowered, dev);
    const TypeEnv env = infer_types(lowered);
    std::set<std::int64_t> taken;
    std::vector<WireLabel> virt_qubits;
    std::set<WireLabel> anc(res.ancillas.begin(), res.ancillas.end());
    for (const auto &[w, t] : env.entries()) {
        if (t.tag == WireType::Tag::Qumode) {
            continue;
        }
        if (w.is_int()) {
            taken.insert(w.as_int());
            out.wire_map.emplace(w, w);
        } else if (!anc.count(w)) {
            virt_qubits.push_back(w);
        }
    }
    std::int64_t next = 0;
    auto take = [&](const WireLabel &w) {
        while (taken.count(next)) {
            ++next;
        }
        if (static_cast<std::size_t>(next) >= dev.n_qubits) {
            throw UnsatisfiableError("the lowered circuit needs more than " + std::to_string(dev.n_qubits) +
                                     " qubit(s); wire " + w.str() + " does not fit");
        }
        taken.insert(next);
        out.wire_map.emplace(w, WireLabel(next));
        return WireLabel(next);
    };
    for (const auto &a : res.ancillas) {
        out.ancillas.push_back(take(a));
    }
    for (const auto &w : virt_qubits) {
        take(w);
    }
    out.tape = relabel_tape(lowered, out.wire_map);
    return out;
}

/// Rounds to `precision` decimals and prints the shortest form, always with
/// a decimal point; the sign of zero is kept.
inline std::string jaqal_number(double v, int precision) {
    const double scale = std::pow(10.0, precision);
    double r = std::round(v * scale) / scale;
    if (r == 0.0) {
        r = std::signbit(v) ? -0.0 : 0.0;
    }
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), r);
    std::string s(buf, res.ptr);
    if (s.find_first_of(".eEn") == std::string::npos) {
        s += ".0";
    }
    return s;
}

/// Deterministic JAQAL text for a lowered program.
inline std::string emit_jaqal(const LoweredProgram &prog, const QscoutDevice &dev) {
    std::ostringstream out;
    out << "from " << dev.usepulses << " usepulses *\n\n";
    out << "register q[" << dev.n_qubits << "]\n\n";
    out << "subcircuit {\n";
    auto qubit = [](const WireLabel &w) { return "q[" + w.str() + "]"; };
    const double two_pi = 2.0 * kPi;
    for (const auto &g : prog.tape.ops) {
        const std::string &name = g.gate->name;
        if (!g.modifiers.empty()) {
            throw UnsupportedError("JAQAL cannot express " + instruction_str(g));
        }
        if (name == "RZ" || name == "RY" || name == "RX") {
            const double a = scalar(g.params[0]);
            if (dev.optimize) {
                const double rounded = std::round(std::fmod(a, two_pi) * std::pow(10.0, dev.precision));
                if (rounded == 0.0) {
                    continue;
                }
            }
            const std::string jn = name == "RZ" ? "Rz" : name == "RY" ? "Ry" : "Rx";
            out << '\t' << jn << ' ' << qubit(g.wires[0]) << ' ' << jaqal_number(a, dev.precision) << '\n';
        } else if (name == "xCD") {
            auto pm = parse_mode_label(g.wires[1]);
            if (!pm) {
                throw UnsupportedError("xCD on unallocated mode " + g.wires[1].str());
            }
            out << "\txCD " << qubit(g.wires[0]) << ' ' << pm->manifold << ' ' << pm->index << ' '
                << jaqal_number(scalar(g.params[0]), dev.precision) << ' '
                << jaqal_number(scalar(g.params[1]), dev.precision) << '\n';
        } else if (name == "CNOT") {
            out << "\tCNOT " << qubit(g.wires[0]) << ' ' << qubit(g.wires[1]) << '\n';
        } else {
            throw UnsupportedError("gate " + name + " is not native to the device");
        }
    }
    out << "}\n";
    return out.str();
}

inline std::string export_jaqal(const QuantumTape &tape, const QscoutDevice &dev) {
    return emit_jaqal(lower_to_native(tape, dev), dev);
}

struct JaqalStatement {
    std::string gate;
    std::vector<std::string> args;
    bool operator==(const JaqalStatement &) const = default;
};

struct JaqalProgram {
    std::string usepulses;
    std::size_t register_size = 0;
    std::vector<std::vector<JaqalStatement>> subcircuits;
};

/// Minimal reader for the emitted subset.
inline JaqalProgram read_jaqal(const std::string &text) {
    JaqalProgram p;
    std::istringstream in(text);
    std::string line;
    bool inside = false;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) {
            tok.push_back(t);
        }
        if (tok.empty()) {
            continue;
        }
        if (tok[0] == "from" && tok.size() == 4 && tok[2] == "usepulses") {
            p.usepulses = tok[1];
        } else if (tok[0] == "register" && tok.size() == 2) {
            const auto &r = tok[1];
            p.register_size = std::stoul(r.substr(r.find('[') + 1));
        } else if (tok[0] == "subcircuit" && tok.size() == 2 && tok[1] == "{") {
            inside = true;
            p.subcircuits.emplace_back();
        } else if (tok[0] == "}" && inside) {
            inside = false;
        } else if (inside) {
            p.subcircuits.back().push_back({tok[0], std::vector<std::string>(tok.begin() + 1, tok.end())});
        } else {
            throw ParseError("unexpected JAQAL line '" + line + "'", lineno, 1);
        }
    }
    return p;
}

}  // namespace hybc
