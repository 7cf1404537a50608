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

/// Single-pass wire type inference with first-wins bindings.

#pragma once

#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hybc/rewrite.hpp"
#include "hybc/tape.hpp"

namespace hybc {

struct TypeSignature {
    std::vector<std::pair<std::size_t, WireType>> constraints;
    bool operator==(const TypeSignature &) const = default;
};

struct TypeError : Error {
    TypeError(WireLabel wire_, WireType existing_, WireType required_, std::size_t index_, std::string gate_)
        : Error("wire " + wire_.str() + ": expected " + required_.str() + ", found " + existing_.str() + " at op #" +
                std::to_string(index_) + " (" + gate_ + ")"),
          wire(std::move(wire_)),
          existing(existing_),
          required(required_),
          index(index_),
          gate(std::move(gate_)) {
    }
    WireLabel wire;
    WireType existing;
    WireType required;
    std::size_t index;
    std::string gate;
};

/// Wire -> type, in first-appearance order.
class TypeEnv {
   public:
    std::optional<WireType> find(const WireLabel &w) const {
        for (const auto &[k, t] : entries_) {
            if (k == w) {
                return t;
            }
        }
        return std::nullopt;
    }
    WireType get(const WireLabel &w) const {
        return find(w).value_or(WireType::bottom());
    }
    void set(const WireLabel &w, WireType t) {
        for (auto &[k, v] : entries_) {
            if (k == w) {
                v = t;
                return;
            }
        }
        entries_.emplace_back(w, t);
    }
    void declare(const WireLabel &w) {
        if (!find(w)) {
            entries_.emplace_back(w, WireType::bottom());
        }
    }
    const std::vector<std::pair<WireLabel, WireType>> &entries() const {
        return entries_;
    }
    std::size_t size() const {
        return entries_.size();
    }
    bool operator==(const TypeEnv &) const = default;

   private:
    std::vector<std::pair<WireLabel, WireType>> entries_;
};

namespace detail {

inline Params placeholder_params(const GateDef &def) {
    Params ps;
    for (const auto &spec : def.params) {
        if (spec.kind == ParamKind::AngleVector) {
            ps.emplace_back(std::vector<double>{0.3, 0.7});
        } else {
            ps.emplace_back(0.3);
        }
    }
    return ps;
}

inline std::vector<WireLabel> placeholder_wires(std::size_t n) {
    std::vector<WireLabel> ws;
    for (std::size_t i = 0; i < n; ++i) {
        ws.emplace_back("_w" + std::to_string(i));
    }
    return ws;
}

inline std::vector<WireType> generator_signature(const GateDef &def) {
    std::map<std::size_t, WireType> slots;
    collect_slot_types(def.generator(placeholder_params(def)), slots);
    std::vector<WireType> sig(def.arity, WireType::bottom());
    for (const auto &[s, t] : slots) {
        if (s < sig.size()) {
            sig[s] = t;
        }
    }
    return sig;
}

}  // namespace detail

inline std::vector<WireType> gate_signature(const GatePtr &def);

/// Constraints of one instruction; CondZ and Ctrl wires are qubits.
inline TypeSignature signature_of(const GateInstruction &g) {
    TypeSignature sig;
    const std::size_t k = g.modifier_wire_count();
    for (std::size_t i = 0; i < k; ++i) {
        sig.constraints.emplace_back(i, WireType::qubit());
    }
    const auto base = gate_signature(g.gate);
    for (std::size_t i = 0; i < base.size(); ++i) {
        if (!base[i].is_bottom()) {
            sig.constraints.emplace_back(k + i, base[i]);
        }
    }
    return sig;
}

/// Position-basis sampling pins a qumode; discrete sampling pins nothing.
inline TypeSignature signature_of(const MeasurementSpec &m) {
    TypeSignature sig;
    if (m.obs) {
        for (std::size_t i = 0; i < m.obs->factors.size(); ++i) {
            sig.constraints.emplace_back(i, factor_wire_type(m.obs->factors[i].kind));
        }
        return sig;
    }
    const auto &entries = m.schema.entries();
    for (std::size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].second == Basis::Position) {
            sig.constraints.emplace_back(i, WireType::qumode());
        }
    }
    return sig;
}

namespace detail {

/// First-wins propagation over a sequence. Throws SignatureError on conflicts.
inline std::map<WireLabel, WireType> propagate(const std::vector<GateInstruction> &ops, const std::string &context) {
    std::map<WireLabel, WireType> env;
    for (std::size_t i = 0; i < ops.size(); ++i) {
        for (const auto &[pos, t] : signature_of(ops[i]).constraints) {
            const auto &w = ops[i].wires[pos];
            auto [it, fresh] = env.emplace(w, t);
            if (!fresh && it->second != t) {
                throw SignatureError(context + " > " + ops[i].gate->name + ": wire " + w.str() + " is used as " +
                                     it->second.str() + " and " + t.str());
            }
        }
    }
    return env;
}

inline std::vector<WireType> signature_from_ops(const std::vector<GateInstruction> &ops,
                                                const std::vector<WireLabel> &wires, const std::string &context) {
    auto env = propagate(ops, context);
    std::vector<WireType> sig;
    for (const auto &w : wires) {
        auto it = env.find(w);
        sig.push_back(it == env.end() ? WireType::bottom() : it->second);
    }
    return sig;
}

struct SignatureMemo {
    std::mutex mu;
    std::map<const GateDef *, std::pair<GatePtr, std::vector<WireType>>> table;
};

inline SignatureMemo &signature_memo() {
    static SignatureMemo memo;
    return memo;
}

}  // namespace detail

/// Declared signature, else recursion into the registered decomposition,
/// else the slot kinds of the generator. Memoized per definition.
inline std::vector<WireType> gate_signature(const GatePtr &def) {
    if (auto declared = def->declared_signature()) {
        return *declared;
    }
    auto &memo = detail::signature_memo();
    {
        std::lock_guard lock(memo.mu);
        if (auto it = memo.table.find(def.get()); it != memo.table.end()) {
            return it->second.second;
        }
    }
    std::vector<WireType> sig;
    if (def->decomposition) {
        const auto wires = detail::placeholder_wires(def->arity);
        sig = detail::signature_from_ops(def->decomposition(detail::placeholder_params(*def), wires), wires, def->name);
    } else if (def->generator) {
        sig = detail::generator_signature(*def);
    } else {
        throw SignatureError("cannot resolve a type signature for gate " + def->name +
                             ": no declared signature, decomposition or generator");
    }
    std::lock_guard lock(memo.mu);
    memo.table.emplace(def.get(), std::make_pair(def, sig));
    return sig;
}

/// Signature re-derived without the declaration: through the first
/// applicable rewrite rule, or the generator's slot kinds when no rule
/// applies. Ancilla wires introduced by the rule are ignored.
inline std::vector<WireType> derived_signature(const GatePtr &def) {
    const auto wires = detail::placeholder_wires(def->arity);
    GateInstruction g{def, detail::placeholder_params(*def), wires, {}};
    RewriteContext ctx;
    for (const auto &r : rules()) {
        if (auto out = r.apply(g, ctx)) {
            return detail::signature_from_ops(*out, wires, def->name);
        }
    }
    if (def->generator) {
        return detail::generator_signature(*def);
    }
    if (def->decomposition) {
        return detail::signature_from_ops(def->decomposition(g.params, wires), wires, def->name);
    }
    throw SignatureError("cannot derive a type signature for gate " + def->name);
}

namespace detail {

inline std::string measurement_label(const MeasurementSpec &m) {
    return m.str();
}

/// Walks every constraint in order: ops first, then measurements.
template <typename F>
void for_each_constraint(const QuantumTape &tape, F &&f) {
    for (std::size_t i = 0; i < tape.ops.size(); ++i) {
        const auto &op = tape.ops[i];
        for (const auto &[pos, t] : signature_of(op).constraints) {
            f(op.wires[pos], t, i, op.gate->name);
        }
    }
    for (std::size_t j = 0; j < tape.measurements.size(); ++j) {
        const auto &m = tape.measurements[j];
        const auto wires = m.wires();
        for (const auto &[pos, t] : signature_of(m).constraints) {
            f(wires[pos], t, tape.ops.size() + j, measurement_label(m));
        }
    }
}

inline TypeEnv declare_all(const QuantumTape &tape) {
    TypeEnv env;
    for (const auto &w : tape.wires()) {
        env.declare(w);
    }
    return env;
}

}  // namespace detail

/// Forward pass: Bottom -> tau on first constraint; any later mismatch is
/// a TypeError. Measurement indices continue after the last op.
inline TypeEnv infer_types(const QuantumTape &tape) {
    TypeEnv env = detail::declare_all(tape);
    detail::for_each_constraint(tape, [&](const WireLabel &w, const WireType &t, std::size_t idx, const std::string &gate) {
        const auto cur = env.get(w);
        if (cur.is_bottom()) {
            env.set(w, t);
        } else if (cur != t) {
            throw TypeError(w, cur, t, idx, gate);
        }
    });
    return env;
}

/// Like infer_types, but keeps the first binding and skips conflicts.
inline TypeEnv infer_types_lenient(const QuantumTape &tape) {
    TypeEnv env = detail::declare_all(tape);
    detail::for_each_constraint(tape, [&](const WireLabel &w, const WireType &t, std::size_t, const std::string &) {
        if (env.get(w).is_bottom()) {
            env.set(w, t);
        }
    });
    return env;
}

struct Diagnostic {
    enum class Kind : std::uint8_t { TypeConflict, UnresolvedWire };
    Kind kind;
    WireLabel wire;
    std::string message;
    bool operator==(const Diagnostic &) const = default;
};

inline std::vector<Diagnostic> validate(const QuantumTape &tape, const TypeEnv &env, bool strict = false) {
    std::vector<Diagnostic> out;
    detail::for_each_constraint(tape, [&](const WireLabel &w, const WireType &t, std::size_t idx, const std::string &gate) {
        const auto cur = env.get(w);
        if (cur != t) {
            out.push_back({Diagnostic::Kind::TypeConflict, w, TypeError(w, cur, t, idx, gate).what()});
        }
    });
    if (strict) {
        for (const auto &[w, t] : env.entries()) {
            if (t.is_bottom()) {
                out.push_back({Diagnostic::Kind::UnresolvedWire, w, "UnresolvedWire(" + w.str() + ")"});
            }
        }
    }
    return out;
}

/// Lenient default: unconstrained wires become qubits. Returns the wires
/// that were defaulted.
inline std::vector<WireLabel> default_bottom_to_qubit(TypeEnv &env) {
    std::vector<WireLabel> changed;
    for (const auto &[w, t] : std::vector(env.entries())) {
        if (t.is_bottom()) {
            env.set(w, WireType::qubit());
            changed.push_back(w);
        }
    }
    return changed;
}

}  // namespace hybc
