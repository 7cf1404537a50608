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

/// Decomposition rules and the search that lowers a tape into a target gate
/// set. Rule outputs are time-ordered: element 0 is applied first.

#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "hybc/tape.hpp"

namespace hybc {

struct RewriteContext {
    std::size_t next_ancilla = 0;
    /// Reuse one ancilla per qumode for displacement lowering.
    bool reuse_ancilla = false;
    std::map<WireLabel, WireLabel> mode_ancilla;
    std::vector<WireLabel> ancillas;

    WireLabel fresh() {
        WireLabel w("_anc" + std::to_string(next_ancilla++));
        ancillas.push_back(w);
        return w;
    }
};

using RuleFn = std::function<std::optional<std::vector<GateInstruction>>(const GateInstruction &, RewriteContext &)>;

struct RewriteRule {
    std::string id;
    double order = 0;
    std::size_t ancillae = 0;
    std::string description;
    RuleFn apply;
};

namespace detail {

inline GateInstruction gi(const std::string &gate, std::vector<WireLabel> wires, Params params = {}) {
    return GateInstruction{lookup(gate), std::move(params), std::move(wires), {}};
}

inline bool has_wire_modifier(const GateInstruction &g) {
    return g.modifier_wire_count() > 0;
}

inline bool has_condz(const GateInstruction &g) {
    return std::any_of(g.modifiers.begin(), g.modifiers.end(),
                       [](const Modifier &m) { return std::holds_alternative<CondZMod>(m); });
}

/// Applies `mods` (innermost first) to a time-ordered sequence that
/// implements the bare gate. CondZ and fractional powers only distribute
/// over a sequence when its factors commute.
inline std::optional<std::vector<GateInstruction>> lift(std::vector<GateInstruction> seq, const std::vector<Modifier> &mods,
                                                        bool commuting) {
    for (const auto &m : mods) {
        const bool single = seq.size() <= 1;
        if (std::holds_alternative<AdjointMod>(m)) {
            std::reverse(seq.begin(), seq.end());
            for (auto &g : seq) {
                g = adjoint(std::move(g));
            }
        } else if (const auto *p = std::get_if<PowMod>(&m)) {
            if (single || commuting) {
                for (auto &g : seq) {
                    g = power(std::move(g), p->exponent);
                }
            } else if (p->exponent.is_integer()) {
                auto k = p->exponent.num;
                if (k < 0) {
                    std::reverse(seq.begin(), seq.end());
                    for (auto &g : seq) {
                        g = adjoint(std::move(g));
                    }
                    k = -k;
                }
                std::vector<GateInstruction> rep;
                for (std::int64_t i = 0; i < k; ++i) {
                    rep.insert(rep.end(), seq.begin(), seq.end());
                }
                seq = std::move(rep);
            } else {
                return std::nullopt;
            }
        } else if (const auto *c = std::get_if<CondZMod>(&m)) {
            if (!single && !commuting) {
                return std::nullopt;
            }
            for (auto &g : seq) {
                g = condition_on_qubit(std::move(g), c->qubit);
            }
        } else if (const auto *c2 = std::get_if<CtrlMod>(&m)) {
            for (auto &g : seq) {
                g = controlled(std::move(g), c2->qubit);
            }
        }
    }
    return seq;
}

/// The instruction with its innermost modifier removed (and its wire, if any).
inline GateInstruction strip_innermost(GateInstruction g) {
    const Modifier first = g.modifiers.front();
    g.modifiers.erase(g.modifiers.begin());
    if (adds_wire(first)) {
        g.wires.erase(g.wires.begin() + static_cast<std::ptrdiff_t>(g.modifier_wire_count()));
    }
    return g;
}

/// The instruction with its outermost modifier removed (and its wire, if any).
inline GateInstruction strip_outermost(GateInstruction g) {
    const Modifier last = g.modifiers.back();
    g.modifiers.pop_back();
    if (adds_wire(last)) {
        g.wires.erase(g.wires.begin());
    }
    return g;
}

inline std::optional<WireLabel> innermost_condz(const GateInstruction &g) {
    if (g.modifiers.empty()) {
        return std::nullopt;
    }
    if (const auto *c = std::get_if<CondZMod>(&g.modifiers.front())) {
        return c->qubit;
    }
    return std::nullopt;
}

inline bool gate_is(const GateInstruction &g, const std::string &name) {
    return g.gate->name == name;
}

/// Rules of the form "named conditioned gate = CondZ(base gate)".
struct ConditionedPair {
    std::string id;
    std::string named;
    std::string base;
    double param_factor;  // base scale param = factor * named scale param
};

inline const std::vector<ConditionedPair> &conditioned_pairs() {
    static const std::vector<ConditionedPair> pairs{
        {"3", "CD", "D", 1.0},          {"4", "CR", "R", 0.5},        {"6", "CS", "Squeezing", 1.0},
        {"7", "CBS", "BS", 1.0},        {"8", "CTMS", "TMS", 1.0},    {"9", "CSUM", "SUM", 1.0},
    };
    return pairs;
}

inline std::vector<RewriteRule> build_rules() {
    std::vector<RewriteRule> r;
    const double pi = kPi;

    r.push_back({"1", 1, 0, "F = R(pi/2)", [pi](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "F")) {
                         return std::nullopt;
                     }
                     auto out = gi("R", g.base_wires(), {pi / 2});
                     return lift({out}, g.modifiers, false);
                 }});

    r.push_back({"2", 2, 0, "ModeSwap = R_i(-pi/2) R_j(-pi/2) BS_ij(pi, 0)",
                 [pi](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "ModeSwap")) {
                         return std::nullopt;
                     }
                     auto w = g.base_wires();
                     std::vector<GateInstruction> seq{gi("BS", {w[0], w[1]}, {pi, 0.0}), gi("R", {w[0]}, {-pi / 2}),
                                                      gi("R", {w[1]}, {-pi / 2})};
                     return lift(std::move(seq), g.modifiers, false);
                 }});

    for (const auto &pair : conditioned_pairs()) {
        const double order = std::stod(pair.id);
        r.push_back({pair.id, order, 0, pair.named + " = CondZ(" + pair.base + ")",
                     [pair](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                         if (!gate_is(g, pair.named)) {
                             return std::nullopt;
                         }
                         GateInstruction out = g;
                         out.gate = lookup(pair.base);
                         if (!out.params.empty()) {
                             out.params[0] = scaled(out.params[0], pair.param_factor);
                         }
                         const auto q = g.wires[g.modifier_wire_count()];
                         out.modifiers.insert(out.modifiers.begin(), CondZMod{q});
                         return std::vector<GateInstruction>{out};
                     }});
        r.push_back({pair.id + "r", order + 0.5, 0, "CondZ(" + pair.base + ") = " + pair.named,
                     [pair](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                         if (!gate_is(g, pair.base) || !innermost_condz(g)) {
                             return std::nullopt;
                         }
                         GateInstruction out = g;
                         out.gate = lookup(pair.named);
                         if (!out.params.empty()) {
                             out.params[0] = scaled(out.params[0], 1.0 / pair.param_factor);
                         }
                         out.modifiers.erase(out.modifiers.begin());
                         return std::vector<GateInstruction>{out};
                     }});
    }

    r.push_back({"5", 5, 0, "CP = CR(pi)", [pi](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "CP")) {
                         return std::nullopt;
                     }
                     GateInstruction out = g;
                     out.gate = lookup("CR");
                     out.params = {pi};
                     return std::vector<GateInstruction>{out};
                 }});
    r.push_back({"5r", 5.5, 0, "CondZ(F) = CP",
                 [](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "F") || !innermost_condz(g)) {
                         return std::nullopt;
                     }
                     GateInstruction out = g;
                     out.gate = lookup("CP");
                     out.modifiers.erase(out.modifiers.begin());
                     return std::vector<GateInstruction>{out};
                 }});

    r.push_back({"10", 10, 1, "SNAP(phi) = SQR(-pi, phi) SQR(pi, 0) with a |0> ancilla",
                 [pi](const GateInstruction &g, RewriteContext &ctx) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "SNAP") || has_condz(g)) {
                         return std::nullopt;
                     }
                     const auto &phi = vec(g.params[0]);
                     const std::vector<double> pis(phi.size(), pi);
                     const std::vector<double> neg_pis(phi.size(), -pi);
                     const std::vector<double> zeros(phi.size(), 0.0);
                     const auto anc = ctx.fresh();
                     const auto m = g.base_wires()[0];
                     std::vector<GateInstruction> seq{gi("SQR", {anc, m}, {pis, zeros}), gi("SQR", {anc, m}, {neg_pis, phi})};
                     return lift(std::move(seq), g.modifiers, false);
                 }});

    // CondZ(exp[A adag - A^dag a]) = CP exp[i(A adag + A^dag a)] CP^dag, realized
    // as a pi/2 phase shift of the unconditioned gate.
    r.push_back({"11", 11, 0, "CondZ(displacement-type) = CP . U(phase + pi/2) . CP^dag",
                 [pi](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     static const std::map<std::string, std::string> named{{"CD", "D"}, {"CBS", "BS"}, {"CTMS", "TMS"}};
                     std::string base;
                     WireLabel q;
                     std::vector<WireLabel> modes;
                     if (auto it = named.find(g.gate->name); it != named.end() && g.modifiers.empty()) {
                         base = it->second;
                         q = g.wires[0];
                         modes.assign(g.wires.begin() + 1, g.wires.end());
                     } else if (g.modifiers.size() == 1 && innermost_condz(g) &&
                                (gate_is(g, "D") || gate_is(g, "BS") || gate_is(g, "TMS"))) {
                         base = g.gate->name;
                         q = *innermost_condz(g);
                         modes = g.base_wires();
                     } else {
                         return std::nullopt;
                     }
                     Params ps = g.params;
                     ps[1] = scalar(ps[1]) + pi / 2;
                     auto cp = gi("CP", {q, modes[0]});
                     return std::vector<GateInstruction>{adjoint(cp), gi(base, modes, ps), cp};
                 }});

    r.push_back({"12", 12, 0, "multi-qubit CondZ = CNOT ladder . CondZ . CNOT ladder",
                 [](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     std::size_t k = 0;
                     while (k < g.modifiers.size() && std::holds_alternative<CondZMod>(g.modifiers[k])) {
                         ++k;
                     }
                     if (k < 2) {
                         return std::nullopt;
                     }
                     // qs[0] is the outermost of the leading CondZ block.
                     std::vector<WireLabel> qs;
                     for (std::size_t i = k; i-- > 0;) {
                         qs.push_back(std::get<CondZMod>(g.modifiers[i]).qubit);
                     }
                     GateInstruction core{g.gate, g.params, g.base_wires(), {}};
                     core = condition_on_qubit(std::move(core), qs.back());
                     std::vector<GateInstruction> seq;
                     for (std::size_t i = 0; i + 1 < qs.size(); ++i) {
                         seq.push_back(gi("CNOT", {qs[i], qs[i + 1]}));
                     }
                     seq.push_back(core);
                     for (std::size_t i = qs.size() - 1; i-- > 0;) {
                         seq.push_back(gi("CNOT", {qs[i], qs[i + 1]}));
                     }
                     std::vector<Modifier> rest(g.modifiers.begin() + static_cast<std::ptrdiff_t>(k), g.modifiers.end());
                     return lift(std::move(seq), rest, false);
                 }});

    r.push_back({"13", 13, 0, "Ctrl(U) = sqrt(U) sqrt(CondZ(U))^dag",
                 [](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (g.modifiers.empty() || !std::holds_alternative<CtrlMod>(g.modifiers.back()) ||
                         !g.gate->is_exponential()) {
                         return std::nullopt;
                     }
                     const auto c = std::get<CtrlMod>(g.modifiers.back()).qubit;
                     auto u = strip_outermost(g);
                     auto half = power(u, Rational(1, 2));
                     auto cond = power(condition_on_qubit(u, c), Rational(-1, 2));
                     return std::vector<GateInstruction>{half, cond};
                 }});

    // Qubit-level identities needed to reach the shipped targets.
    r.push_back({"14", 14, 0, "Ctrl(X) = CNOT",
                 [](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "X") || g.modifiers.size() != 1 || !std::holds_alternative<CtrlMod>(g.modifiers[0])) {
                         return std::nullopt;
                     }
                     return std::vector<GateInstruction>{gi("CNOT", {g.wires[0], g.wires[1]})};
                 }});

    auto condz_qubit_rule = [](std::string id, double order, std::string desc, std::string gate,
                               std::function<std::vector<GateInstruction>(const WireLabel &, const WireLabel &, double)> body) {
        return RewriteRule{
            std::move(id), order, 0, std::move(desc),
            [gate, body](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                auto c = innermost_condz(g);
                if (!gate_is(g, gate) || !c) {
                    return std::nullopt;
                }
                auto inner = strip_innermost(g);
                const auto t = inner.base_wires()[0];
                std::vector<Modifier> rest(g.modifiers.begin() + 1, g.modifiers.end());
                return lift(body(*c, t, scalar(g.params[0])), rest, false);
            }};
    };
    r.push_back(condz_qubit_rule("15", 15, "CondZ_c(RZ_t) = CNOT . RZ . CNOT", "RZ",
                                 [](const WireLabel &c, const WireLabel &t, double th) {
                                     return std::vector<GateInstruction>{gi("CNOT", {c, t}), gi("RZ", {t}, {th}),
                                                                         gi("CNOT", {c, t})};
                                 }));
    r.push_back(condz_qubit_rule("16", 16, "CondZ_c(RX_t) = H . CondZ_c(RZ_t) . H", "RX",
                                 [](const WireLabel &c, const WireLabel &t, double th) {
                                     return std::vector<GateInstruction>{
                                         gi("H", {t}), condition_on_qubit(gi("RZ", {t}, {th}), c), gi("H", {t})};
                                 }));
    r.push_back(condz_qubit_rule("17", 17, "CondZ_c(RY_t) = S . CondZ_c(RX_t) . Sdg", "RY",
                                 [](const WireLabel &c, const WireLabel &t, double th) {
                                     return std::vector<GateInstruction>{
                                         gi("Sdg", {t}), condition_on_qubit(gi("RX", {t}, {th}), c), gi("S", {t})};
                                 }));
    r.push_back(condz_qubit_rule("18", 18, "CondZ_c(PhaseShift_t(x)) = RZ_c(-x) CondZ_c(RZ_t(x))", "PhaseShift",
                                 [](const WireLabel &c, const WireLabel &t, double x) {
                                     return std::vector<GateInstruction>{gi("RZ", {c}, {-x}),
                                                                         condition_on_qubit(gi("RZ", {t}, {x}), c)};
                                 }));

    // Rules that hold only up to a global phase must not fire under a
    // CondZ or Ctrl modifier, where the phase would become relative.
    r.push_back({"19", 19, 0, "PhaseShift(x) = RZ(x) up to phase",
                 [](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "PhaseShift") || has_wire_modifier(g)) {
                         return std::nullopt;
                     }
                     return lift({gi("RZ", g.base_wires(), g.params)}, g.modifiers, false);
                 }});

    r.push_back({"20", 20, 0, "registered decomposition",
                 [](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!g.gate->decomposition) {
                         return std::nullopt;
                     }
                     return lift(g.gate->decomposition(g.params, g.base_wires()), g.modifiers,
                                 g.gate->commuting_decomposition);
                 }});

    r.push_back({"30", 30, 0, "CD = H . xCD . H",
                 [](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "CD") || has_condz(g)) {
                         return std::nullopt;
                     }
                     const auto w = g.base_wires();
                     const double r0 = scalar(g.params[0]);
                     const double phi = scalar(g.params[1]);
                     std::vector<GateInstruction> seq{gi("H", {w[0]}),
                                                      gi("xCD", {w[0], w[1]}, {r0 * std::cos(phi), r0 * std::sin(phi)}),
                                                      gi("H", {w[0]})};
                     return lift(std::move(seq), g.modifiers, false);
                 }});

    r.push_back({"31", 31, 1, "D = CD on a |0> ancilla",
                 [](const GateInstruction &g, RewriteContext &ctx) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "D") || !g.modifiers.empty()) {
                         return std::nullopt;
                     }
                     const auto m = g.wires[0];
                     WireLabel anc;
                     if (ctx.reuse_ancilla) {
                         auto it = ctx.mode_ancilla.find(m);
                         if (it == ctx.mode_ancilla.end()) {
                             it = ctx.mode_ancilla.emplace(m, ctx.fresh()).first;
                         }
                         anc = it->second;
                     } else {
                         anc = ctx.fresh();
                     }
                     return std::vector<GateInstruction>{gi("CD", {anc, m}, g.params)};
                 }});

    r.push_back({"32", 32, 0, "H = RY(pi/2) RZ(pi) up to phase",
                 [pi](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     if (!gate_is(g, "H") || has_wire_modifier(g)) {
                         return std::nullopt;
                     }
                     const auto w = g.base_wires();
                     return lift({gi("RZ", w, {pi}), gi("RY", w, {pi / 2})}, g.modifiers, false);
                 }});

    r.push_back({"33", 33, 0, "Pauli and S gates as rotations up to phase",
                 [pi](const GateInstruction &g, RewriteContext &) -> std::optional<std::vector<GateInstruction>> {
                     static const std::map<std::string, std::pair<std::string, double>> table{
                         {"X", {"RX", 1.0}}, {"Y", {"RY", 1.0}}, {"Z", {"RZ", 1.0}}, {"S", {"RZ", 0.5}}, {"Sdg", {"RZ", -0.5}}};
                     auto it = table.find(g.gate->name);
                     if (it == table.end() || has_wire_modifier(g)) {
                         return std::nullopt;
                     }
                     return lift({gi(it->second.first, g.base_wires(), {it->second.second * pi})}, g.modifiers, false);
                 }});

    std::stable_sort(r.begin(), r.end(), [](const RewriteRule &a, const RewriteRule &b) { return a.order < b.order; });
    return r;
}

}  // namespace detail

/// The shipped rule set, sorted by precedence (lowest id first).
inline const std::vector<RewriteRule> &rules() {
    static const std::vector<RewriteRule> all = detail::build_rules();
    return all;
}

inline const RewriteRule &rule(const std::string &id) {
    for (const auto &r : rules()) {
        if (r.id == id) {
            return r;
        }
    }
    throw Error("no rewrite rule '" + id + "'");
}

struct ResourceCount {
    std::map<std::string, std::size_t> gates;
    std::map<std::string, std::size_t> ancillas;

    ResourceCount &operator+=(const ResourceCount &o) {
        for (const auto &[k, v] : o.gates) {
            gates[k] += v;
        }
        for (const auto &[k, v] : o.ancillas) {
            ancillas[k] += v;
        }
        return *this;
    }
    bool operator==(const ResourceCount &) const = default;
};

struct DecomposeOptions {
    std::size_t max_depth = 16;
    bool reuse_ancilla = false;
};

struct DecomposeResult {
    QuantumTape tape;
    std::vector<WireLabel> ancillas;
    /// Rule id -> number of applications on the chosen routes.
    std::map<std::string, std::size_t> rule_uses;
};

inline bool in_target(const GateInstruction &g, const GateSet &target) {
    return g.modifiers.empty() && target.contains(g.gate->name);
}

/// Depth-bounded search for a rule sequence taking an instruction into the
/// target set. Rules are tried in precedence order; the first complete
/// route wins. Failures are memoized per (shape, remaining depth).
class Decomposer {
   public:
    Decomposer(const GateSet &target, DecomposeOptions opts) : target_(target), opts_(opts) {
        ctx_.reuse_ancilla = opts.reuse_ancilla;
    }

    void reserve_ancillas_after(const std::vector<WireLabel> &wires) {
        for (const auto &w : wires) {
            if (!w.is_int() && w.as_string().rfind("_anc", 0) == 0) {
                try {
                    ctx_.next_ancilla = std::max(ctx_.next_ancilla, std::stoul(w.as_string().substr(4)) + 1);
                } catch (const std::exception &) {
                }
            }
        }
    }

    std::vector<GateInstruction> decompose(const GateInstruction &g) {
        hit_depth_ = false;
        auto out = route(g, opts_.max_depth);
        if (!out) {
            if (hit_depth_) {
                throw DepthExceededError("decomposing " + instruction_str(g) + " into '" + target_.name +
                                         "' exceeded depth " + std::to_string(opts_.max_depth));
            }
            throw NoRouteError("no route from " + instruction_str(g) + " to gate set '" + target_.name + "'");
        }
        return std::move(*out);
    }

    const RewriteContext &context() const {
        return ctx_;
    }
    const std::map<std::string, std::size_t> &rule_uses() const {
        return uses_;
    }

   private:
    static std::string shape(const GateInstruction &g) {
        std::string s = g.gate->name;
        for (const auto &m : g.modifiers) {
            if (std::holds_alternative<AdjointMod>(m)) {
                s += "|A";
            } else if (const auto *p = std::get_if<PowMod>(&m)) {
                s += "|P" + p->exponent.str();
            } else if (std::holds_alternative<CondZMod>(m)) {
                s += "|Z";
            } else {
                s += "|C";
            }
        }
        return s;
    }

    std::optional<std::vector<GateInstruction>> route(const GateInstruction &in, std::size_t depth) {
        GateInstruction g = fold_modifiers(in);
        if (g.is_identity_marker()) {
            return std::vector<GateInstruction>{};
        }
        if (in_target(g, target_)) {
            return std::vector<GateInstruction>{g};
        }
        if (depth == 0) {
            hit_depth_ = true;
            return std::nullopt;
        }
        const auto key = shape(g);
        if (failed_.count({key, depth}) || on_stack_.count(key)) {
            cut_ = cut_ || on_stack_.count(key) > 0;
            return std::nullopt;
        }
        const bool outer_cut = cut_;
        cut_ = false;
        on_stack_.insert(key);
        std::optional<std::vector<GateInstruction>> result;
        for (const auto &r : rules()) {
            const RewriteContext saved = ctx_;
            const auto saved_uses = uses_;
            auto step = r.apply(g, ctx_);
            if (!step) {
                continue;
            }
            std::vector<GateInstruction> acc;
            bool ok = true;
            for (const auto &s : *step) {
                auto sub = route(s, depth - 1);
                if (!sub) {
                    ok = false;
                    break;
                }
                acc.insert(acc.end(), sub->begin(), sub->end());
            }
            if (ok) {
                uses_[r.id] += 1;
                result = std::move(acc);
                break;
            }
            ctx_ = saved;
            uses_ = saved_uses;
        }
        on_stack_.erase(key);
        if (!result && !cut_) {
            failed_.insert({key, depth});
        }
        cut_ = outer_cut || cut_;
        return result;
    }

    GateSet target_;
    DecomposeOptions opts_;
    RewriteContext ctx_;
    std::set<std::pair<std::string, std::size_t>> failed_;
    std::set<std::string> on_stack_;
    std::map<std::string, std::size_t> uses_;
    bool hit_depth_ = false;
    bool cut_ = false;
};

inline DecomposeResult decompose_detailed(const QuantumTape &tape, const GateSet &target, DecomposeOptions opts = {}) {
    if (target.gates.empty()) {
        throw Error("target gate set '" + target.name + "' is empty");
    }
    Decomposer d(target, opts);
    d.reserve_ancillas_after(tape.wires());
    std::vector<GateInstruction> ops;
    for (const auto &g : tape.ops) {
        auto seq = d.decompose(g);
        ops.insert(ops.end(), seq.begin(), seq.end());
    }
    DecomposeResult res;
    res.tape = build_tape(tape.prep, std::move(ops), tape.measurements, tape.shots);
    res.ancillas = d.context().ancillas;
    res.rule_uses = d.rule_uses();
    return res;
}

inline QuantumTape decompose_to_gateset(const QuantumTape &tape, const GateSet &target, std::size_t max_depth = 16) {
    return decompose_detailed(tape, target, {max_depth, false}).tape;
}

inline ResourceCount count_gates(const QuantumTape &tape, const std::vector<WireLabel> &ancillas = {}) {
    ResourceCount rc;
    for (const auto &g : tape.ops) {
        rc.gates[g.gate->name] += 1;
    }
    if (!ancillas.empty()) {
        rc.ancillas["qubit"] = ancillas.size();
    }
    return rc;
}

inline ResourceCount resource_count(const QuantumTape &tape, const GateSet &target, std::size_t max_depth = 16) {
    auto res = decompose_detailed(tape, target, {max_depth, false});
    return count_gates(res.tape, res.ancillas);
}

}  // namespace hybc
