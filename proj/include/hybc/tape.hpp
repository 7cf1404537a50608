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

#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "hybc/circuit.hpp"
#include "hybc/gates.hpp"
#include "hybc/measurements.hpp"

namespace hybc {

/// Computational-basis preparation of one wire (qubit bit or Fock level).
struct PrepEntry {
    WireLabel wire;
    std::size_t level = 0;
    bool operator==(const PrepEntry &) const = default;
};

struct QuantumTape {
    std::vector<PrepEntry> prep;
    std::vector<GateInstruction> ops;
    std::vector<MeasurementSpec> measurements;
    std::optional<std::size_t> shots;

    /// Every wire, in order of first appearance (prep, then ops, then
    /// measurements).
    std::vector<WireLabel> wires() const {
        std::vector<WireLabel> out;
        std::unordered_set<WireLabel> seen;
        auto add = [&](const WireLabel &w) {
            if (seen.insert(w).second) {
                out.push_back(w);
            }
        };
        for (const auto &p : prep) {
            add(p.wire);
        }
        for (const auto &op : ops) {
            for (const auto &w : op.wires) {
                add(w);
            }
        }
        for (const auto &m : measurements) {
            for (const auto &w : m.wires()) {
                add(w);
            }
        }
        return out;
    }

    bool operator==(const QuantumTape &) const = default;
};

inline std::string format_number(double v) {
    std::ostringstream out;
    out.precision(6);
    out << v;
    return out.str();
}

inline std::string param_str(const Param &p) {
    if (const auto *d = std::get_if<double>(&p)) {
        return format_number(*d);
    }
    std::string s = "[";
    const auto &v = std::get<std::vector<double>>(p);
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + format_number(v[i]);
    }
    return s + "]";
}

/// Human-readable form, e.g. `Ctrl(c)[Adjoint[R(0.5)]](c, m)`.
inline std::string instruction_str(const GateInstruction &g) {
    std::string s = g.gate ? g.gate->name : "<null>";
    if (!g.params.empty()) {
        s += "(";
        for (std::size_t i = 0; i < g.params.size(); ++i) {
            s += (i ? ", " : "") + param_str(g.params[i]);
        }
        s += ")";
    }
    for (const auto &m : g.modifiers) {
        if (std::holds_alternative<AdjointMod>(m)) {
            s = "Adjoint[" + s + "]";
        } else if (const auto *p = std::get_if<PowMod>(&m)) {
            s = "Pow[" + s + ", " + p->exponent.str() + "]";
        } else if (const auto *c = std::get_if<CondZMod>(&m)) {
            s = "CondZ_" + c->qubit.str() + "[" + s + "]";
        } else if (const auto *c2 = std::get_if<CtrlMod>(&m)) {
            s = "Ctrl_" + c2->qubit.str() + "[" + s + "]";
        }
    }
    s += " on (";
    for (std::size_t i = 0; i < g.wires.size(); ++i) {
        s += (i ? ", " : "") + g.wires[i].str();
    }
    return s + ")";
}

inline void check_instruction(const GateInstruction &g, std::size_t index) {
    const std::string where = "instruction #" + std::to_string(index);
    if (!g.gate) {
        throw ConstructionError(where + ": no gate");
    }
    try {
        g.gate->check_params(g.params);
    } catch (const ConstructionError &e) {
        throw ConstructionError(where + ": " + e.what());
    }
    const std::size_t expected = g.gate->arity + g.modifier_wire_count();
    if (g.wires.size() != expected) {
        throw ConstructionError(where + " (" + g.gate->name + "): expected " + std::to_string(expected) +
                                " wire(s), got " + std::to_string(g.wires.size()));
    }
    std::unordered_set<WireLabel> seen;
    for (const auto &w : g.wires) {
        if (!seen.insert(w).second) {
            throw ConstructionError(where + " (" + g.gate->name + "): wire " + w.str() + " used twice");
        }
    }
    // Modifier wires must be the leading wires, outermost first.
    std::size_t k = g.modifier_wire_count();
    for (const auto &m : g.modifiers) {
        const WireLabel *q = nullptr;
        if (const auto *c = std::get_if<CondZMod>(&m)) {
            q = &c->qubit;
        } else if (const auto *c2 = std::get_if<CtrlMod>(&m)) {
            q = &c2->qubit;
        }
        if (q != nullptr) {
            --k;
            if (!(g.wires[k] == *q)) {
                throw ConstructionError(where + " (" + g.gate->name + "): modifier wire " + q->str() +
                                        " is not at position " + std::to_string(k));
            }
        }
    }
}

/// Validates and normalizes a tape.
inline QuantumTape build_tape(std::vector<PrepEntry> prep, std::vector<GateInstruction> ops,
                              std::vector<MeasurementSpec> measurements, std::optional<std::size_t> shots = std::nullopt) {
    if (shots && *shots == 0) {
        throw ConstructionError("shots must be positive");
    }
    std::unordered_set<WireLabel> prepped;
    for (const auto &p : prep) {
        if (!prepped.insert(p.wire).second) {
            throw ConstructionError("wire " + p.wire.str() + " prepared twice");
        }
    }
    for (std::size_t i = 0; i < ops.size(); ++i) {
        ops[i].modifiers = normalize_modifiers(ops[i].modifiers);
        check_instruction(ops[i], i);
    }
    return QuantumTape{std::move(prep), std::move(ops), std::move(measurements), shots};
}

/// U = exp(-i t G) -> exp(-i t Z_q (x) G).
inline GateInstruction condition_on_qubit(GateInstruction instr, const WireLabel &q) {
    if (std::find(instr.wires.begin(), instr.wires.end(), q) != instr.wires.end()) {
        throw ConstructionError("conditioning qubit " + q.str() + " is already a wire of " + instruction_str(instr));
    }
    instr.modifiers.push_back(CondZMod{q});
    instr.wires.insert(instr.wires.begin(), q);
    return instr;
}

inline GateInstruction controlled(GateInstruction instr, const WireLabel &c) {
    if (std::find(instr.wires.begin(), instr.wires.end(), c) != instr.wires.end()) {
        throw ConstructionError("control qubit " + c.str() + " is already a wire of " + instruction_str(instr));
    }
    instr.modifiers.push_back(CtrlMod{c});
    instr.wires.insert(instr.wires.begin(), c);
    return instr;
}

inline GateInstruction adjoint(GateInstruction instr) {
    instr.modifiers.push_back(AdjointMod{});
    instr.modifiers = normalize_modifiers(instr.modifiers);
    return instr;
}

inline GateInstruction power(GateInstruction instr, Rational k) {
    instr.modifiers.push_back(PowMod{k});
    instr.modifiers = normalize_modifiers(instr.modifiers);
    return instr;
}

/// Folds Adjoint/Pow modifiers into parameters where the gate allows it:
/// exponential gates with linear scale parameters absorb any rational
/// factor; involutions drop Adjoint and reduce integer powers mod 2;
/// S/Sdg swap under Adjoint. Everything else stays symbolic.
inline GateInstruction fold_modifiers(GateInstruction g) {
    g.modifiers = normalize_modifiers(g.modifiers);
    if (g.is_identity_marker()) {
        return g;
    }
    const GateDef &def = *g.gate;
    auto is_scaling = [](const Modifier &m) {
        return std::holds_alternative<AdjointMod>(m) || std::holds_alternative<PowMod>(m);
    };
    if (std::none_of(g.modifiers.begin(), g.modifiers.end(), is_scaling)) {
        return g;
    }
    if (def.is_exponential() && !def.scale_params.empty()) {
        double factor = 1.0;
        std::vector<Modifier> rest;
        for (const auto &m : g.modifiers) {
            if (std::holds_alternative<AdjointMod>(m)) {
                factor = -factor;
            } else if (const auto *p = std::get_if<PowMod>(&m)) {
                factor *= p->exponent.value();
            } else {
                rest.push_back(m);
            }
        }
        for (auto i : def.scale_params) {
            g.params[i] = scaled(g.params[i], factor);
        }
        g.modifiers = std::move(rest);
        return g;
    }
    auto fractional_pow = [](const Modifier &m) {
        const auto *p = std::get_if<PowMod>(&m);
        return p != nullptr && !p->exponent.is_integer();
    };
    if (def.self_inverse && std::none_of(g.modifiers.begin(), g.modifiers.end(), fractional_pow)) {
        std::vector<Modifier> rest;
        for (const auto &m : g.modifiers) {
            if (std::holds_alternative<AdjointMod>(m)) {
                continue;
            }
            if (const auto *p = std::get_if<PowMod>(&m)) {
                if (p->exponent.num % 2 == 0) {
                    rest.push_back(PowMod{Rational(0)});
                }
                continue;
            }
            rest.push_back(m);
        }
        g.modifiers = normalize_modifiers(rest);
        return g;
    }
    if (!def.adjoint_name.empty()) {
        bool flip = false;
        std::vector<Modifier> rest;
        for (const auto &m : g.modifiers) {
            if (std::holds_alternative<AdjointMod>(m)) {
                flip = !flip;
            } else {
                rest.push_back(m);
            }
        }
        if (flip) {
            g.gate = lookup(def.adjoint_name);
        }
        g.modifiers = normalize_modifiers(rest);
        return g;
    }
    return g;
}

}  // namespace hybc
