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

/// The gate library. Every gate is a symbolic definition: a generator
/// expression H(params) with U = exp(-i H), or (ModeSwap only) an explicit
/// matrix builder. Matrices exist only once a cutoff is chosen.

#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hybc/circuit.hpp"
#include "hybc/generator.hpp"

namespace hybc {

enum class GateClass : std::uint8_t {
    Qubit,      // Pauli-representable: every wire is a qubit
    Qumode,     // CV gate: every wire is a qumode
    Hybrid,     // wire types given by an explicit annotation
    Composite,  // no declared signature; resolved through the decomposition
};

enum class ParamKind : std::uint8_t { Angle, Real, PolarMagnitude, PolarPhase, AngleVector };

struct ParamSpec {
    std::string name;
    ParamKind kind;
};

using Params = std::vector<Param>;
using DecompositionFn = std::function<std::vector<GateInstruction>(const Params &, const std::vector<WireLabel> &)>;

struct GateDef {
    std::string name;
    std::string qasm_name;
    std::size_t arity = 1;
    std::vector<ParamSpec> params;
    GateClass cls = GateClass::Composite;
    std::optional<std::vector<WireType>> annotation;

    /// Exponential form; empty for explicit gates.
    std::function<GeneratorExpr(const Params &)> generator;
    /// Explicit form: matrix at the given per-wire dimensions.
    std::function<Matrix(const Params &, std::span<const std::size_t>)> explicit_matrix;

    /// Parameters the generator is linear in; Adjoint and Pow fold into them.
    std::vector<std::size_t> scale_params;
    bool self_inverse = false;
    std::string adjoint_name;

    /// Registered decomposition (user and composite gates).
    DecompositionFn decomposition;
    /// The decomposition's factors commute, so CondZ distributes over them.
    bool commuting_decomposition = false;

    /// Verbatim `gate ... { ... }` text for gates defined in QASM sources.
    std::string qasm_definition;
    /// User gates called from `qasm_definition`, in definition order.
    std::vector<std::shared_ptr<const GateDef>> dependencies;
    std::string description;

    bool is_exponential() const {
        return static_cast<bool>(generator);
    }

    /// Declared signature (class or annotation), if any.
    std::optional<std::vector<WireType>> declared_signature() const {
        switch (cls) {
            case GateClass::Qubit:
                return std::vector<WireType>(arity, WireType::qubit());
            case GateClass::Qumode:
                return std::vector<WireType>(arity, WireType::qumode());
            case GateClass::Hybrid:
                return annotation;
            case GateClass::Composite:
                return std::nullopt;
        }
        return std::nullopt;
    }

    /// Checks parameter count and scalar/vector kinds.
    void check_params(const Params &ps) const {
        if (ps.size() != params.size()) {
            throw ConstructionError("gate " + name + " takes " + std::to_string(params.size()) + " parameter(s), got " +
                                    std::to_string(ps.size()));
        }
        std::optional<std::size_t> vector_len;
        for (std::size_t i = 0; i < ps.size(); ++i) {
            const bool want_vec = params[i].kind == ParamKind::AngleVector;
            if (want_vec != std::holds_alternative<std::vector<double>>(ps[i])) {
                throw ConstructionError("gate " + name + " parameter '" + params[i].name + "' must be a " +
                                        (want_vec ? "vector" : "scalar"));
            }
            if (want_vec) {
                auto n = std::get<std::vector<double>>(ps[i]).size();
                if (vector_len && *vector_len != n) {
                    throw ConstructionError("gate " + name + " vector parameters differ in length");
                }
                vector_len = n;
            }
        }
    }
};

using GatePtr = std::shared_ptr<const GateDef>;

namespace detail {

inline double p(const Params &ps, std::size_t i) {
    return scalar(ps[i]);
}
inline const std::vector<double> &pv(const Params &ps, std::size_t i) {
    return vec(ps[i]);
}
inline cd polar(double r, double phi) {
    return std::polar(1.0, phi) * r;
}

/// i (z b_dag - conj(z) b) on the given operator pair, the generator of
/// exp[z b_dag - conj(z) b].
inline GeneratorExpr displacement_like(cd z, GeneratorExpr create, GeneratorExpr annihilate) {
    return gen::sum({gen::product({gen::scalar(cd(0, 1) * z), std::move(create)}),
                     gen::product({gen::scalar(cd(0, -1) * std::conj(z)), std::move(annihilate)})});
}

inline GeneratorExpr displacement_gen(double r, double phi, std::size_t m) {
    return displacement_like(polar(r, phi), gen::adag(m), gen::a(m));
}

/// (i/2)(conj(z) a^2 - z adag^2), the generator of exp[(conj(z) a^2 - z adag^2)/2].
inline GeneratorExpr squeezing_gen(double r, double phi, std::size_t m) {
    cd z = polar(r, phi);
    return gen::sum({gen::product({gen::scalar(cd(0, 0.5) * std::conj(z)), gen::a(m), gen::a(m)}),
                     gen::product({gen::scalar(cd(0, -0.5) * z), gen::adag(m), gen::adag(m)})});
}

/// (theta/2)(e^{i phi} adag b + h.c.).
inline GeneratorExpr beamsplitter_gen(double theta, double phi, std::size_t ma, std::size_t mb) {
    cd e = std::polar(theta / 2.0, phi);
    return gen::sum({gen::product({gen::scalar(e), gen::adag(ma), gen::a(mb)}),
                     gen::product({gen::scalar(std::conj(e)), gen::a(ma), gen::adag(mb)})});
}

/// i (xi adag bdag - conj(xi) a b).
inline GeneratorExpr two_mode_squeezing_gen(double r, double phi, std::size_t ma, std::size_t mb) {
    cd xi = polar(r, phi);
    return gen::sum({gen::product({gen::scalar(cd(0, 1) * xi), gen::adag(ma), gen::adag(mb)}),
                     gen::product({gen::scalar(cd(0, -1) * std::conj(xi)), gen::a(ma), gen::a(mb)})});
}

/// i (lambda/2) (a + adag)(bdag - b).
inline GeneratorExpr sum_gen(double lambda, std::size_t ma, std::size_t mb) {
    return gen::product({gen::scalar(cd(0, lambda / 2.0)), gen::sum({gen::a(ma), gen::adag(ma)}),
                         gen::sum({gen::adag(mb), gen::product({gen::scalar(-1.0), gen::a(mb)})})});
}

inline GeneratorExpr conditioned(GeneratorExpr g) {
    return gen::product({gen::Z(0), std::move(g)});
}

inline GateDef make(std::string name, std::string qasm, std::size_t arity, GateClass cls, std::vector<ParamSpec> params,
                    std::function<GeneratorExpr(const Params &)> g, std::vector<std::size_t> scale, std::string desc) {
    GateDef d;
    d.name = std::move(name);
    d.qasm_name = std::move(qasm);
    d.arity = arity;
    d.cls = cls;
    d.params = std::move(params);
    d.generator = std::move(g);
    d.scale_params = std::move(scale);
    d.description = std::move(desc);
    return d;
}

inline std::vector<WireType> qm(std::size_t modes) {
    std::vector<WireType> s{WireType::qubit()};
    s.insert(s.end(), modes, WireType::qumode());
    return s;
}

inline Matrix mode_swap_matrix(std::span<const std::size_t> dims) {
    const std::size_t da = dims[0];
    const std::size_t db = dims[1];
    const auto n = static_cast<Eigen::Index>(da * db);
    Matrix m = Matrix::Zero(n, n);
    // |j,k> -> |k,j> on the subspace where both indices fit; elsewhere identity.
    for (std::size_t j = 0; j < da; ++j) {
        for (std::size_t k = 0; k < db; ++k) {
            const auto src = static_cast<Eigen::Index>(j * db + k);
            if (k < da && j < db) {
                m(static_cast<Eigen::Index>(k * db + j), src) = 1.0;
            } else {
                m(src, src) = 1.0;
            }
        }
    }
    return m;
}

inline std::map<std::string, GatePtr> build_registry() {
    using PK = ParamKind;
    using GC = GateClass;
    std::vector<GateDef> defs;
    const std::vector<ParamSpec> polar_r_phi{{"r", PK::PolarMagnitude}, {"phi", PK::PolarPhase}};
    const std::vector<ParamSpec> theta_phi{{"theta", PK::Angle}, {"phi", PK::Angle}};

    // Qumode-only gates.
    defs.push_back(make("D", "cv_d", 1, GC::Qumode, polar_r_phi,
                        [](const Params &ps) { return displacement_gen(p(ps, 0), p(ps, 1), 0); }, {0},
                        "displacement exp[alpha adag - conj(alpha) a], alpha = r e^{i phi}"));
    defs.push_back(make("R", "cv_r", 1, GC::Qumode, {{"theta", PK::Angle}},
                        [](const Params &ps) { return p(ps, 0) * gen::n(0); }, {0}, "rotation exp[-i theta n]"));
    defs.push_back(make("F", "cv_f", 1, GC::Qumode, {}, [](const Params &) { return (kPi / 2.0) * gen::n(0); }, {},
                        "Fourier exp[-i pi/2 n]"));
    defs.push_back(make("Squeezing", "cv_s", 1, GC::Qumode, polar_r_phi,
                        [](const Params &ps) { return squeezing_gen(p(ps, 0), p(ps, 1), 0); }, {0},
                        "squeezing exp[(conj(zeta) a^2 - zeta adag^2)/2]"));
    defs.push_back(make("K", "cv_k", 1, GC::Qumode, {{"kappa", PK::Real}},
                        [](const Params &ps) { return p(ps, 0) * (gen::n(0) * gen::n(0)); }, {0},
                        "Kerr exp[-i kappa n^2]"));
    defs.push_back(make("CubicPhase", "cv_c", 1, GC::Qumode, {{"r", PK::Real}},
                        [](const Params &ps) { return gen::product({gen::scalar(p(ps, 0)), gen::x(0), gen::x(0), gen::x(0)}); },
                        {0}, "cubic phase exp[-i r x^3]"));
    defs.push_back(make(
        "SNAP", "cv_snap", 1, GC::Qumode, {{"phi", PK::AngleVector}},
        [](const Params &ps) {
            std::vector<GeneratorExpr> terms;
            const auto &phi = pv(ps, 0);
            for (std::size_t k = 0; k < phi.size(); ++k) {
                terms.push_back(phi[k] * gen::proj(0, k));
            }
            return gen::sum(std::move(terms));
        },
        {0}, "selective number-dependent phase, diag e^{-i phi_n}"));
    defs.push_back(make("BS", "cv_bs", 2, GC::Qumode, theta_phi,
                        [](const Params &ps) { return beamsplitter_gen(p(ps, 0), p(ps, 1), 0, 1); }, {0},
                        "beamsplitter exp[-i theta/2 (e^{i phi} adag b + h.c.)]"));
    {
        GateDef swap;
        swap.name = "ModeSwap";
        swap.qasm_name = "cv_swap";
        swap.arity = 2;
        swap.cls = GC::Qumode;
        swap.self_inverse = true;
        swap.explicit_matrix = [](const Params &, std::span<const std::size_t> dims) { return mode_swap_matrix(dims); };
        swap.description = "exchange of two qumodes";
        defs.push_back(std::move(swap));
    }
    defs.push_back(make("TMS", "cv_tms", 2, GC::Qumode, polar_r_phi,
                        [](const Params &ps) { return two_mode_squeezing_gen(p(ps, 0), p(ps, 1), 0, 1); }, {0},
                        "two-mode squeezing exp[xi adag bdag - h.c.]"));
    defs.push_back(make("SUM", "cv_sum", 2, GC::Qumode, {{"lambda", PK::Real}},
                        [](const Params &ps) { return sum_gen(p(ps, 0), 0, 1); }, {0},
                        "two-mode sum exp[lambda/2 (a + adag)(bdag - b)]"));

    // Hybrid gates; the qubit is always slot 0.
    auto hybrid = [&](GateDef d, std::size_t modes) {
        d.annotation = qm(modes);
        defs.push_back(std::move(d));
    };
    hybrid(make("CR", "cv_cr", 2, GC::Hybrid, {{"theta", PK::Angle}},
                [](const Params &ps) { return (p(ps, 0) / 2.0) * (gen::Z(0) * gen::n(1)); }, {0},
                "conditional rotation exp[-i theta/2 Z n]"),
           1);
    hybrid(make("CP", "cv_cp", 2, GC::Hybrid, {}, [](const Params &) { return (kPi / 2.0) * (gen::Z(0) * gen::n(1)); },
                {}, "conditional parity exp[-i pi/2 Z n]"),
           1);
    hybrid(make("CD", "cv_cd", 2, GC::Hybrid, polar_r_phi,
                [](const Params &ps) { return conditioned(displacement_gen(p(ps, 0), p(ps, 1), 1)); }, {0},
                "conditional displacement exp[Z (alpha adag - conj(alpha) a)]"),
           1);
    hybrid(make("CS", "cv_cs", 2, GC::Hybrid, polar_r_phi,
                [](const Params &ps) { return conditioned(squeezing_gen(p(ps, 0), p(ps, 1), 1)); }, {0},
                "conditional squeezing"),
           1);
    hybrid(make(
               "SQR", "cv_sqr", 2, GC::Hybrid, {{"theta", PK::AngleVector}, {"phi", PK::AngleVector}},
               [](const Params &ps) {
                   std::vector<GeneratorExpr> terms;
                   const auto &th = pv(ps, 0);
                   const auto &ph = pv(ps, 1);
                   for (std::size_t k = 0; k < th.size(); ++k) {
                       auto axis = gen::sum({std::cos(ph[k]) * gen::X(0), std::sin(ph[k]) * gen::Y(0)});
                       terms.push_back(gen::product({gen::scalar(th[k] / 2.0), axis, gen::proj(1, k)}));
                   }
                   return gen::sum(std::move(terms));
               },
               {0}, "selective qubit rotation sum_n R_{phi_n}(theta_n) (x) |n><n|"),
           1);
    hybrid(make("JC", "cv_jc", 2, GC::Hybrid, theta_phi,
                [](const Params &ps) {
                    cd e = std::polar(p(ps, 0), p(ps, 1));
                    return gen::sum({gen::product({gen::scalar(e), gen::sigma_minus(0), gen::adag(1)}),
                                     gen::product({gen::scalar(std::conj(e)), gen::sigma_plus(0), gen::a(1)})});
                },
                {0}, "Jaynes-Cummings exp[-i theta (e^{i phi} sigma- adag + h.c.)]"),
           1);
    hybrid(make("AJC", "cv_ajc", 2, GC::Hybrid, theta_phi,
                [](const Params &ps) {
                    cd e = std::polar(p(ps, 0), p(ps, 1));
                    return gen::sum({gen::product({gen::scalar(e), gen::sigma_plus(0), gen::adag(1)}),
                                     gen::product({gen::scalar(std::conj(e)), gen::sigma_minus(0), gen::a(1)})});
                },
                {0}, "anti-Jaynes-Cummings exp[-i theta (e^{i phi} sigma+ adag + h.c.)]"),
           1);
    hybrid(make("RB", "cv_rb", 2, GC::Hybrid, polar_r_phi,
                [](const Params &ps) {
                    cd th = polar(p(ps, 0), p(ps, 1));
                    return gen::X(0) * gen::sum({gen::product({gen::scalar(th), gen::adag(1)}),
                                                 gen::product({gen::scalar(std::conj(th)), gen::a(1)})});
                },
                {0}, "Rabi exp[-i X (theta adag + conj(theta) a)]"),
           1);
    hybrid(make("CBS", "cv_cbs", 3, GC::Hybrid, theta_phi,
                [](const Params &ps) { return conditioned(beamsplitter_gen(p(ps, 0), p(ps, 1), 1, 2)); }, {0},
                "conditional beamsplitter"),
           2);
    hybrid(make("CTMS", "cv_ctms", 3, GC::Hybrid, polar_r_phi,
                [](const Params &ps) { return conditioned(two_mode_squeezing_gen(p(ps, 0), p(ps, 1), 1, 2)); }, {0},
                "conditional two-mode squeezing"),
           2);
    hybrid(make("CSUM", "cv_csum", 3, GC::Hybrid, {{"lambda", PK::Real}},
                [](const Params &ps) { return conditioned(sum_gen(p(ps, 0), 1, 2)); }, {0}, "conditional two-mode sum"),
           2);
    hybrid(make("xCD", "cv_xcd", 2, GC::Hybrid, {{"u", PK::Real}, {"v", PK::Real}},
                [](const Params &ps) {
                    // Rectangular so that the sign of a zero component survives.
                    cd alpha(p(ps, 0), p(ps, 1));
                    return gen::X(0) * displacement_like(alpha, gen::adag(1), gen::a(1));
                },
                {0, 1}, "X-conditioned displacement exp[X ((u+iv) adag - (u-iv) a)]"),
           1);

    // Qubit gates.
    auto one_minus_z = [] { return gen::sum({gen::id(0), gen::product({gen::scalar(-1.0), gen::Z(0)})}); };
    auto pauli = [&](std::string name, std::string qasm, GeneratorExpr (*prim)(std::size_t)) {
        GateDef d = make(
            name, std::move(qasm), 1, GC::Qubit, {},
            [prim](const Params &) { return (kPi / 2.0) * gen::sum({prim(0), gen::product({gen::scalar(-1.0), gen::id(0)})}); },
            {}, "Pauli " + name);
        d.self_inverse = true;
        defs.push_back(std::move(d));
    };
    pauli("X", "x", &gen::X);
    pauli("Y", "y", &gen::Y);
    pauli("Z", "z", &gen::Z);
    {
        GateDef h = make(
            "H", "h", 1, GC::Qubit, {},
            [](const Params &) {
                auto hd = (1.0 / std::sqrt(2.0)) * gen::sum({gen::X(0), gen::Z(0)});
                return (kPi / 2.0) * gen::sum({hd, gen::product({gen::scalar(-1.0), gen::id(0)})});
            },
            {}, "Hadamard");
        h.self_inverse = true;
        defs.push_back(std::move(h));
    }
    {
        GateDef s = make("S", "s", 1, GC::Qubit, {}, [=](const Params &) { return (-kPi / 4.0) * one_minus_z(); }, {},
                         "phase gate diag(1, i)");
        s.adjoint_name = "Sdg";
        defs.push_back(std::move(s));
        GateDef sdg = make("Sdg", "sdg", 1, GC::Qubit, {}, [=](const Params &) { return (kPi / 4.0) * one_minus_z(); }, {},
                           "inverse phase gate diag(1, -i)");
        sdg.adjoint_name = "S";
        defs.push_back(std::move(sdg));
    }
    defs.push_back(make("RX", "rx", 1, GC::Qubit, {{"theta", PK::Angle}},
                        [](const Params &ps) { return (p(ps, 0) / 2.0) * gen::X(0); }, {0}, "exp[-i theta/2 X]"));
    defs.push_back(make("RY", "ry", 1, GC::Qubit, {{"theta", PK::Angle}},
                        [](const Params &ps) { return (p(ps, 0) / 2.0) * gen::Y(0); }, {0}, "exp[-i theta/2 Y]"));
    defs.push_back(make("RZ", "rz", 1, GC::Qubit, {{"theta", PK::Angle}},
                        [](const Params &ps) { return (p(ps, 0) / 2.0) * gen::Z(0); }, {0}, "exp[-i theta/2 Z]"));
    defs.push_back(make("PhaseShift", "p", 1, GC::Qubit, {{"phi", PK::Angle}},
                        [=](const Params &ps) { return (-p(ps, 0) / 2.0) * one_minus_z(); }, {0}, "diag(1, e^{i phi})"));
    {
        GateDef cnot = make(
            "CNOT", "cx", 2, GC::Qubit, {},
            [](const Params &) {
                return gen::product({gen::scalar(kPi / 2.0), gen::qubit_one(0),
                                     gen::sum({gen::X(1), gen::product({gen::scalar(-1.0), gen::id(1)})})});
            },
            {}, "controlled NOT");
        cnot.self_inverse = true;
        defs.push_back(std::move(cnot));
    }

    std::map<std::string, GatePtr> out;
    for (auto &d : defs) {
        auto name = d.name;
        out.emplace(std::move(name), std::make_shared<const GateDef>(std::move(d)));
    }
    return out;
}

inline std::size_t edit_distance(const std::string &a, const std::string &b) {
    std::vector<std::size_t> prev(b.size() + 1);
    std::vector<std::size_t> cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) {
        prev[j] = j;
    }
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j) {
            const bool same = std::tolower(static_cast<unsigned char>(a[i - 1])) ==
                              std::tolower(static_cast<unsigned char>(b[j - 1]));
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (same ? 0 : 1)});
        }
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

}  // namespace detail

/// The built-in gates, keyed by IR name. Initialized once; read-only.
inline const std::map<std::string, GatePtr> &gate_registry() {
    static const std::map<std::string, GatePtr> registry = detail::build_registry();
    return registry;
}

inline GatePtr lookup(const std::string &name) {
    const auto &reg = gate_registry();
    if (auto it = reg.find(name); it != reg.end()) {
        return it->second;
    }
    std::vector<std::string> near;
    for (const auto &[n, g] : reg) {
        if (detail::edit_distance(n, name) <= 2 || detail::edit_distance(g->qasm_name, name) <= 1) {
            near.push_back(n);
        }
    }
    std::string msg = "unknown gate '" + name + "'";
    if (!near.empty()) {
        msg += "; did you mean ";
        for (std::size_t i = 0; i < near.size(); ++i) {
            msg += (i ? ", " : "") + near[i];
        }
        msg += "?";
    }
    throw UnknownGateError(msg);
}

/// Looks a gate up by its QASM token (`cv_cd`, `h`, ...).
inline GatePtr lookup_qasm(const std::string &token) {
    for (const auto &[n, g] : gate_registry()) {
        if (g->qasm_name == token) {
            return g;
        }
    }
    throw UnknownGateError("unknown QASM gate '" + token + "'");
}

inline std::vector<std::string> table_cv_gates() {
    return {"D", "R", "F", "Squeezing", "K", "CubicPhase", "SNAP", "BS", "ModeSwap", "TMS", "SUM"};
}
inline std::vector<std::string> table_hybrid_gates() {
    return {"CR", "CP", "CD", "CS", "SQR", "JC", "AJC", "RB", "CBS", "CTMS", "CSUM"};
}
inline std::vector<std::string> dv_gates() {
    return {"H", "X", "Y", "Z", "S", "Sdg", "RX", "RY", "RZ", "PhaseShift", "CNOT"};
}

struct GateSet {
    std::string name;
    std::set<std::string> gates;

    bool contains(const std::string &g) const {
        return gates.count(g) > 0;
    }
};

/// Named target sets: full, sim-native, qscout-native.
inline GateSet enumerate_gateset(const std::string &name) {
    GateSet s{name, {}};
    if (name == "full") {
        for (const auto &[n, g] : gate_registry()) {
            s.gates.insert(n);
        }
    } else if (name == "sim-native") {
        for (const auto &list : {table_cv_gates(), table_hybrid_gates(), dv_gates()}) {
            s.gates.insert(list.begin(), list.end());
        }
        s.gates.insert("xCD");
    } else if (name == "qscout-native") {
        s.gates = {"RZ", "RY", "RX", "CNOT", "xCD"};
    } else {
        throw UnknownGateError("unknown gate set '" + name + "' (expected full, sim-native or qscout-native)");
    }
    return s;
}

}  // namespace hybc
