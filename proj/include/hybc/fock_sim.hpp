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

/// Dense truncated-Fock statevector simulator.

#pragma once

#include <cmath>
#include <cstdint>
#include <algorithm>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "hybc/linalg.hpp"
#include "hybc/rewrite.hpp"
#include "hybc/wire_types.hpp"

namespace hybc {

struct CutoffConfig {
    std::size_t default_cutoff = 8;
    std::map<WireLabel, std::size_t> overrides;

    std::size_t cutoff(const WireLabel &w) const {
        auto it = overrides.find(w);
        const std::size_t c = it == overrides.end() ? default_cutoff : it->second;
        if (c < 2) {
            throw SimulationError("cutoff for wire " + w.str() + " must be >= 2");
        }
        return c;
    }
};

inline std::size_t wire_dim(const WireType &t, const WireLabel &w, const CutoffConfig &cut) {
    switch (t.tag) {
        case WireType::Tag::Qumode:
            return cut.cutoff(w);
        case WireType::Tag::Qudit:
            return t.dim;
        default:
            return 2;
    }
}

inline Matrix operator_matrix(Prim p, std::size_t cutoff, std::size_t level = 0) {
    if (cutoff < 2) {
        throw SimulationError("cutoff must be >= 2");
    }
    return detail::prim_matrix(p, level, cutoff);
}

/// Generator of an instruction over its full wire list, modifiers applied.
/// Wire-adding modifiers take slot 0 as they are applied, innermost first,
/// so the outermost modifier wire ends up in slot 0.
inline GeneratorExpr instruction_generator(const GateInstruction &g) {
    if (!g.gate->generator) {
        throw UnsupportedError("gate " + g.gate->name + " has no generator");
    }
    GeneratorExpr h = g.gate->generator(g.params);
    for (const auto &m : g.modifiers) {
        if (std::holds_alternative<AdjointMod>(m)) {
            h = -1.0 * h;
        } else if (const auto *p = std::get_if<PowMod>(&m)) {
            h = p->exponent.value() * h;
        } else if (std::holds_alternative<CondZMod>(m)) {
            h = gen::Z(0) * shift_slots(h, 1);
        } else {
            h = gen::qubit_one(0) * shift_slots(h, 1);
        }
    }
    return h;
}

namespace detail {

inline Matrix matrix_power(const Matrix &m, std::int64_t k) {
    Matrix base = k < 0 ? Matrix(m.adjoint()) : m;
    Matrix out = Matrix::Identity(m.rows(), m.cols());
    for (std::int64_t i = 0; i < std::abs(k); ++i) {
        out = out * base;
    }
    return out;
}

inline Matrix explicit_with_modifiers(const GateInstruction &g, std::span<const std::size_t> dims) {
    const std::size_t k = g.modifier_wire_count();
    Matrix m = g.gate->explicit_matrix(g.params, dims.subspan(k));
    std::size_t next_wire = k;
    for (const auto &mod : g.modifiers) {
        if (std::holds_alternative<AdjointMod>(mod)) {
            m = m.adjoint().eval();
        } else if (const auto *p = std::get_if<PowMod>(&mod)) {
            if (!p->exponent.is_integer()) {
                throw UnsupportedError("fractional power of explicit gate " + g.gate->name);
            }
            m = matrix_power(m, p->exponent.num);
        } else if (std::holds_alternative<CondZMod>(mod)) {
            throw UnsupportedError("CondZ of explicit gate " + g.gate->name + " has no generator to condition");
        } else {
            --next_wire;
            if (dims[next_wire] != 2) {
                throw SimulationError("control wire of " + g.gate->name + " is not a qubit");
            }
            Matrix c = Matrix::Identity(2 * m.rows(), 2 * m.cols());
            c.bottomRightCorner(m.rows(), m.cols()) = m;
            m = std::move(c);
        }
    }
    return m;
}

}  // namespace detail

/// Unitary of one instruction; `dims` follows `g.wires`.
inline Matrix gate_matrix(const GateInstruction &g, std::span<const std::size_t> dims) {
    if (dims.size() != g.wires.size()) {
        throw SimulationError("gate_matrix: expected " + std::to_string(g.wires.size()) + " dimensions");
    }
    if (g.is_identity_marker()) {
        const auto n = static_cast<Eigen::Index>(linalg::product(dims));
        return Matrix::Identity(n, n);
    }
    if (g.gate->generator) {
        return exponentiate(instruction_generator(g), dims);
    }
    if (g.gate->explicit_matrix) {
        return detail::explicit_with_modifiers(g, dims);
    }
    throw UnsupportedError("gate " + g.gate->name + " has no matrix; decompose it first");
}

/// Rewrites instructions the simulator cannot build a matrix for through
/// their registered decompositions.
inline void expand_for_simulation(const GateInstruction &in, std::vector<GateInstruction> &out, std::size_t depth = 0) {
    GateInstruction g = fold_modifiers(in);
    if (g.is_identity_marker()) {
        return;
    }
    const bool has_matrix = g.gate->generator || (g.gate->explicit_matrix && !detail::has_condz(g));
    if (has_matrix) {
        out.push_back(std::move(g));
        return;
    }
    if (depth > 16) {
        throw DepthExceededError("expanding " + instruction_str(in) + " for simulation");
    }
    std::optional<std::vector<GateInstruction>> seq;
    RewriteContext ctx;
    if (g.gate->decomposition) {
        seq = detail::lift(g.gate->decomposition(g.params, g.base_wires()), g.modifiers, g.gate->commuting_decomposition);
    } else if (g.gate->name == "ModeSwap") {
        seq = rule("2").apply(g, ctx);
    }
    if (!seq) {
        throw UnsupportedError("cannot simulate " + instruction_str(in));
    }
    for (const auto &s : *seq) {
        expand_for_simulation(s, out, depth + 1);
    }
}

struct StateVector {
    Vector amplitudes;
    std::vector<WireLabel> wires;
    std::vector<std::size_t> dims;
    std::vector<WireType> types;

    std::size_t index_of(const WireLabel &w) const {
        for (std::size_t i = 0; i < wires.size(); ++i) {
            if (wires[i] == w) {
                return i;
            }
        }
        throw SimulationError("wire " + w.str() + " is not part of the state");
    }
    double norm() const {
        return amplitudes.norm();
    }
};

struct SimOptions {
    CutoffConfig cutoffs;
    /// Throw if the norm drifts from 1 by more than this after any gate.
    double norm_tolerance = 1e-9;
    /// Wires to simulate even if absent from the tape (appended in order).
    std::vector<WireLabel> extra_wires;
};

struct PreparedCircuit {
    StateVector state;
    std::vector<GateInstruction> ops;
    std::vector<std::string> warnings;
};

/// Resolves types and dimensions, prepares the initial basis state and the
/// flat op list.
inline PreparedCircuit prepare(const QuantumTape &tape, const SimOptions &opts) {
    PreparedCircuit pc;
    TypeEnv env = infer_types(tape);
    for (const auto &w : opts.extra_wires) {
        env.declare(w);
    }
    for (const auto &w : default_bottom_to_qubit(env)) {
        pc.warnings.push_back("wire " + w.str() + " has no type constraint; simulating it as a qubit");
    }
    auto &st = pc.state;
    for (const auto &[w, t] : env.entries()) {
        st.wires.push_back(w);
        st.types.push_back(t);
        st.dims.push_back(wire_dim(t, w, opts.cutoffs));
    }
    const std::size_t n = linalg::product(st.dims);
    st.amplitudes = Vector::Zero(static_cast<Eigen::Index>(n));
    const auto strides = linalg::strides(st.dims);
    std::size_t index = 0;
    for (const auto &p : tape.prep) {
        const auto k = st.index_of(p.wire);
        if (p.level >= st.dims[k]) {
            throw SimulationError("prep level " + std::to_string(p.level) + " on wire " + p.wire.str() +
                                  " does not fit dimension " + std::to_string(st.dims[k]));
        }
        index += p.level * strides[k];
    }
    st.amplitudes(static_cast<Eigen::Index>(index)) = 1.0;
    for (const auto &op : tape.ops) {
        expand_for_simulation(op, pc.ops);
    }
    return pc;
}

inline void apply_instruction(StateVector &st, const GateInstruction &g) {
    std::vector<std::size_t> pos;
    std::vector<std::size_t> local;
    for (const auto &w : g.wires) {
        pos.push_back(st.index_of(w));
        local.push_back(st.dims[pos.back()]);
    }
    const Matrix u = gate_matrix(g, local);
    linalg::apply_local(u, pos, st.dims, st.amplitudes);
}

inline StateVector simulate(const QuantumTape &tape, const SimOptions &opts = {}, std::vector<std::string> *warnings = nullptr) {
    auto pc = prepare(tape, opts);
    if (warnings != nullptr) {
        warnings->insert(warnings->end(), pc.warnings.begin(), pc.warnings.end());
    }
    for (std::size_t i = 0; i < pc.ops.size(); ++i) {
        apply_instruction(pc.state, pc.ops[i]);
        const double drift = std::abs(pc.state.norm() - 1.0);
        if (drift > opts.norm_tolerance) {
            throw SimulationError("norm drifted by " + std::to_string(drift) + " after " + instruction_str(pc.ops[i]));
        }
    }
    return std::move(pc.state);
}

/// Full unitary of an op list on the given wires and dimensions.
inline Matrix circuit_unitary(const std::vector<GateInstruction> &ops, const std::vector<WireLabel> &wires,
                              const std::vector<std::size_t> &dims) {
    StateVector st;
    st.wires = wires;
    st.dims = dims;
    const auto n = static_cast<Eigen::Index>(linalg::product(dims));
    Matrix u = Matrix::Identity(n, n);
    std::vector<GateInstruction> flat;
    for (const auto &op : ops) {
        expand_for_simulation(op, flat);
    }
    for (const auto &g : flat) {
        std::vector<std::size_t> pos;
        std::vector<std::size_t> local;
        for (const auto &w : g.wires) {
            pos.push_back(st.index_of(w));
            local.push_back(dims[pos.back()]);
        }
        const Matrix m = gate_matrix(g, local);
        for (Eigen::Index c = 0; c < n; ++c) {
            auto col = u.col(c);
            linalg::apply_local(m, pos, dims, col);
        }
    }
    return u;
}

inline Matrix factor_matrix(FactorKind k, std::size_t dim) {
    switch (k) {
        case FactorKind::N:
            return linalg::number(dim);
        case FactorKind::Xquad:
            return linalg::position(dim);
        case FactorKind::PauliX:
            return linalg::pauli_x();
        case FactorKind::PauliY:
            return linalg::pauli_y();
        case FactorKind::PauliZ:
            return linalg::pauli_z();
    }
    throw MeasurementError("unsupported observable factor");
}

inline Vector apply_observable(const StateVector &st, const Observable &obs) {
    Vector v = st.amplitudes;
    for (const auto &f : obs.factors) {
        const auto k = st.index_of(f.wire);
        const bool qumode = st.types[k].tag == WireType::Tag::Qumode;
        if (qumode != (factor_wire_type(f.kind).tag == WireType::Tag::Qumode)) {
            throw MeasurementError("factor " + factor_name(f.kind) + " does not fit wire " + f.wire.str() + " of type " +
                                   st.types[k].str());
        }
        const std::size_t pos[] = {k};
        linalg::apply_local(factor_matrix(f.kind, st.dims[k]), pos, st.dims, v);
    }
    return obs.coefficient * v;
}

inline double expval(const StateVector &st, const Observable &obs) {
    return st.amplitudes.dot(apply_observable(st, obs)).real();
}

/// E[O^2] - E[O]^2 with E[O^2] = |O psi|^2 for Hermitian O.
inline double var(const StateVector &st, const Observable &obs) {
    const Vector v = apply_observable(st, obs);
    const double m = st.amplitudes.dot(v).real();
    return v.squaredNorm() - m * m;
}

/// Seeded generator; uniform draws use the top 53 bits.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {
    }
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

   private:
    std::mt19937_64 engine_;
};

/// Eigen-decomposition of the truncated x operator; nodes ascending.
struct PositionBasis {
    Eigen::VectorXd nodes;
    Matrix to_eigenbasis;  // V^dagger
};

inline const PositionBasis &position_basis(std::size_t cutoff) {
    static std::mutex mu;
    static std::map<std::size_t, PositionBasis> cache;
    std::lock_guard lock(mu);
    auto it = cache.find(cutoff);
    if (it == cache.end()) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(linalg::position(cutoff).real());
        PositionBasis pb{es.eigenvalues(), es.eigenvectors().cast<cd>().adjoint()};
        it = cache.emplace(cutoff, std::move(pb)).first;
    }
    return it->second;
}

using OutcomeTuple = std::vector<Outcome>;

/// Joint samples over the schema's wires, in schema order.
inline std::vector<OutcomeTuple> sample(const StateVector &state, const BasisSchema &schema, std::size_t shots, Rng &rng) {
    if (shots == 0) {
        throw MeasurementError("shots must be >= 1");
    }
    StateVector st = state;
    std::vector<std::size_t> pos;
    for (const auto &[w, b] : schema.entries()) {
        const auto k = st.index_of(w);
        pos.push_back(k);
        if (b == Basis::Position) {
            if (st.types[k].tag != WireType::Tag::Qumode) {
                throw MeasurementError("position basis requested on wire " + w.str() + " of type " + st.types[k].str());
            }
            const std::size_t p1[] = {k};
            linalg::apply_local(position_basis(st.dims[k]).to_eigenbasis, p1, st.dims, st.amplitudes);
        }
    }
    const auto strides = linalg::strides(st.dims);
    std::vector<std::size_t> mdims;
    for (auto k : pos) {
        mdims.push_back(st.dims[k]);
    }
    const auto mstrides = linalg::strides(mdims);
    std::vector<double> probs(linalg::product(mdims), 0.0);
    for (Eigen::Index i = 0; i < st.amplitudes.size(); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        std::size_t m = 0;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            m += ((idx / strides[pos[j]]) % st.dims[pos[j]]) * mstrides[j];
        }
        probs[m] += std::norm(st.amplitudes(i));
    }
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    std::vector<OutcomeTuple> out;
    out.reserve(shots);
    for (std::size_t s = 0; s < shots; ++s) {
        const double u = rng.uniform() * acc;
        auto m = static_cast<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin());
        m = std::min(m, cdf.size() - 1);
        OutcomeTuple t;
        for (std::size_t j = 0; j < pos.size(); ++j) {
            const std::size_t level = (m / mstrides[j]) % mdims[j];
            if (schema.entries()[j].second == Basis::Position) {
                t.emplace_back(position_basis(mdims[j]).nodes(static_cast<Eigen::Index>(level)));
            } else {
                t.emplace_back(static_cast<std::uint64_t>(level));
            }
        }
        out.push_back(std::move(t));
    }
    return out;
}

inline BasisSchema observable_schema(const Observable &obs) {
    BasisSchema s;
    for (const auto &f : obs.factors) {
        s.add(f.wire, preferred_basis(f.kind));
    }
    return s;
}

/// Finite-shot estimate: rotate into the measured basis, sample, and apply
/// the spectrum function.
inline std::pair<double, double> estimate(const StateVector &state, const Observable &obs, std::size_t shots, Rng &rng) {
    StateVector st = state;
    for (const auto &g : diagonalizing_gates(obs)) {
        apply_instruction(st, g);
    }
    const auto samples = sample(st, observable_schema(obs), shots, rng);
    double s1 = 0.0;
    double s2 = 0.0;
    for (const auto &t : samples) {
        const double f = eigenvalue_of(obs, t);
        s1 += f;
        s2 += f * f;
    }
    const double n = static_cast<double>(shots);
    const double mean = s1 / n;
    return {mean, s2 / n - mean * mean};
}

/// Product of the per-wire observables a sample schema implies.
inline Observable schema_observable(const StateVector &st, const BasisSchema &schema) {
    Observable o;
    for (const auto &[w, b] : schema.entries()) {
        const auto k = st.index_of(w);
        FactorKind f = FactorKind::PauliZ;
        if (b == Basis::Position) {
            f = FactorKind::Xquad;
        } else if (st.types[k].tag == WireType::Tag::Qumode) {
            f = FactorKind::N;
        }
        o.factors.push_back({f, w});
    }
    return o;
}

struct MeasurementResult {
    MeasurementSpec spec;
    std::optional<double> value;
    std::vector<OutcomeTuple> samples;
};

struct RunResult {
    std::vector<MeasurementResult> results;
    std::uint64_t seed = 0;
    std::optional<std::size_t> shots;
    std::map<WireLabel, std::size_t> cutoffs;
    std::vector<std::string> warnings;
    StateVector state;
};

/// Simulates a tape and evaluates its measurements: analytic when the tape
/// has no shots, sampled otherwise.
inline RunResult run(const QuantumTape &tape, const SimOptions &opts = {}, std::uint64_t seed = 0) {
    RunResult r;
    r.seed = seed;
    r.shots = tape.shots;
    infer_basis_schema(tape.measurements);
    r.state = simulate(tape, opts, &r.warnings);
    for (std::size_t i = 0; i < r.state.wires.size(); ++i) {
        if (r.state.types[i].tag == WireType::Tag::Qumode) {
            r.cutoffs[r.state.wires[i]] = r.state.dims[i];
        }
    }
    Rng rng(seed);
    for (const auto &m : tape.measurements) {
        MeasurementResult mr{m, std::nullopt, {}};
        switch (m.kind) {
            case MeasurementSpec::Kind::Expval:
                mr.value = tape.shots ? estimate(r.state, *m.obs, *tape.shots, rng).first : expval(r.state, *m.obs);
                break;
            case MeasurementSpec::Kind::Var:
                mr.value = tape.shots ? estimate(r.state, *m.obs, *tape.shots, rng).second : var(r.state, *m.obs);
                break;
            case MeasurementSpec::Kind::Sample:
                if (tape.shots) {
                    mr.samples = sample(r.state, m.schema, *tape.shots, rng);
                } else {
                    mr.value = expval(r.state, schema_observable(r.state, m.schema));
                }
                break;
        }
        r.results.push_back(std::move(mr));
    }
    return r;
}

}  // namespace hybc
