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

// Shared oracles for the unit tests and the acceptance binary.

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <sys/wait.h>

#include "hybc/hybc.hpp"

namespace hybc::testing {

using linalg::distance_up_to_phase;

/// Dimension of each wire given its type.
inline std::vector<std::size_t> dims_for(const std::vector<WireType> &types, std::size_t cutoff) {
    std::vector<std::size_t> d;
    for (const auto &t : types) {
        d.push_back(t == WireType::qumode() ? cutoff : 2);
    }
    return d;
}

/// Instruction of a gate on fresh wires `w0, w1, ...`.
inline GateInstruction on_fresh_wires(const GatePtr &g, Params ps) {
    std::vector<WireLabel> ws;
    for (std::size_t i = 0; i < g->arity; ++i) {
        ws.emplace_back("w" + std::to_string(i));
    }
    return GateInstruction{g, std::move(ps), std::move(ws), {}};
}

/// Parameters on a small deterministic grid point `k`.
inline Params sample_params(const GateDef &def, int k, double scale = 1.0) {
    Params ps;
    for (std::size_t i = 0; i < def.params.size(); ++i) {
        const double v = scale * (0.31 + 0.17 * static_cast<double>(i) + 0.23 * static_cast<double>(k));
        if (def.params[i].kind == ParamKind::AngleVector) {
            ps.emplace_back(std::vector<double>{v, -0.5 * v, 0.8 * v, 0.2});
        } else {
            ps.emplace_back(k % 2 ? -v : v);
        }
    }
    return ps;
}

/// Basis indices (over `dims`) whose qumode entries, at the positions
/// listed in `modes`, are all below `levels`; `total` instead bounds the
/// summed photon number.
inline std::vector<Eigen::Index> low_energy_columns(const std::vector<std::size_t> &dims,
                                                    const std::vector<std::size_t> &modes, std::size_t levels,
                                                    bool total = false) {
    const auto strides = linalg::strides(dims);
    std::vector<Eigen::Index> cols;
    const std::size_t n = linalg::product(dims);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t sum = 0;
        bool ok = true;
        for (auto m : modes) {
            const std::size_t level = (i / strides[m]) % dims[m];
            sum += level;
            ok = ok && level < levels;
        }
        if (total) {
            ok = sum < levels;
        }
        if (ok) {
            cols.push_back(static_cast<Eigen::Index>(i));
        }
    }
    return cols;
}

/// max |U1 e_c - g U2 e_c| over the selected columns, with the phase g
/// taken from the largest entry of U2 in those columns.
inline double distance_on_columns(const Matrix &u1, const Matrix &u2, const std::vector<Eigen::Index> &cols) {
    Matrix a(u1.rows(), static_cast<Eigen::Index>(cols.size()));
    Matrix b(u2.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        a.col(static_cast<Eigen::Index>(k)) = u1.col(cols[k]);
        b.col(static_cast<Eigen::Index>(k)) = u2.col(cols[k]);
    }
    return distance_up_to_phase(a, b);
}

/// Positions of the qumode wires in `types`.
inline std::vector<std::size_t> qumode_positions(const std::vector<WireType> &types) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < types.size(); ++i) {
        if (types[i] == WireType::qumode()) {
            out.push_back(i);
        }
    }
    return out;
}

/// Coherent-state amplitude <n|alpha> = e^{-|alpha|^2/2} alpha^n / sqrt(n!).
inline cd coherent_amplitude(cd alpha, std::size_t n) {
    cd v = std::exp(-std::norm(alpha) / 2.0);
    for (std::size_t k = 1; k <= n; ++k) {
        v *= alpha / std::sqrt(static_cast<double>(k));
    }
    return v;
}

/// Outcome of a rewrite-rule oracle check.
struct RuleCheck {
    std::string id;
    std::string what;
    double error = 0.0;
    double tolerance = 0.0;
    bool passed() const {
        return error <= tolerance;
    }
};

/// Copy of `e` with slot k moved to `to[k]`.
inline GeneratorExpr remap_slots(const GeneratorExpr &e, const std::vector<std::size_t> &to) {
    GeneratorExpr out = e;
    if (e.kind == GeneratorExpr::Kind::Prim) {
        out.slot = to.at(e.slot);
    }
    for (auto &c : out.children) {
        c = remap_slots(c, to);
    }
    return out;
}

/// exp(-i H) V by scaled Taylor series on a sparse H; independent of the
/// library's dense exponentiation.
inline Matrix expm_times(const SparseMatrix &h, Matrix v) {
    double norm1 = 0.0;
    bool diagonal = true;
    for (Eigen::Index k = 0; k < h.outerSize(); ++k) {
        double col = 0.0;
        for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
            col += std::abs(it.value());
            diagonal = diagonal && (it.row() == it.col() || it.value() == 0.0);
        }
        norm1 = std::max(norm1, col);
    }
    if (diagonal) {
        const Vector d = h.diagonal();
        for (Eigen::Index i = 0; i < v.rows(); ++i) {
            v.row(i) *= std::exp(cd(0.0, -1.0) * d(i));
        }
        return v;
    }
    const int steps = std::max(1, static_cast<int>(std::ceil(norm1 / 2.0)));
    const SparseMatrix step = h * cd(0.0, -1.0 / steps);
    for (int s = 0; s < steps; ++s) {
        Matrix term = v;
        Matrix acc = v;
        for (int k = 1; k < 60; ++k) {
            term = (step * term) / static_cast<double>(k);
            acc += term;
            if (term.cwiseAbs().maxCoeff() < 1e-17) {
                break;
            }
        }
        v = std::move(acc);
    }
    return v;
}

/// Applies `ops` (expanded as the simulator does) to the columns `v` of a
/// state space over `wires` with `dims`.
inline Matrix apply_ops(const std::vector<GateInstruction> &ops, const std::vector<WireLabel> &wires,
                        const std::vector<std::size_t> &dims, Matrix v) {
    std::vector<GateInstruction> flat;
    for (const auto &op : ops) {
        expand_for_simulation(op, flat);
    }
    for (const auto &g : flat) {
        std::vector<std::size_t> pos;
        for (const auto &w : g.wires) {
            pos.push_back(static_cast<std::size_t>(std::find(wires.begin(), wires.end(), w) - wires.begin()));
        }
        if (g.gate->generator && !g.is_identity_marker()) {
            v = expm_times(to_sparse(remap_slots(instruction_generator(g), pos), dims), std::move(v));
        } else {
            std::vector<std::size_t> local;
            for (auto p : pos) {
                local.push_back(dims[p]);
            }
            const Matrix m = gate_matrix(g, local);
            for (Eigen::Index c = 0; c < v.cols(); ++c) {
                auto col = v.col(c);
                linalg::apply_local(m, pos, dims, col);
            }
        }
    }
    return v;
}

/// `lhs` against the rule's output on the same wires, compared column by
/// column: fresh ancillas start in |0> and must end in |0>; with
/// `low_levels` set, only columns with every qumode below that Fock level
/// are compared.
inline RuleCheck check_rule(const std::string &id, const GateInstruction &lhs, std::size_t cutoff,
                            std::optional<std::size_t> low_levels, double tolerance) {
    RuleCheck out{id, instruction_str(lhs), 0.0, tolerance};
    RewriteContext ctx;
    const auto rhs = rule(id).apply(lhs, ctx);
    if (!rhs) {
        out.error = INFINITY;
        out.what += " (rule did not apply)";
        return out;
    }
    TypeEnv env;
    {
        QuantumTape t;
        t.ops = {lhs};
        t.ops.insert(t.ops.end(), rhs->begin(), rhs->end());
        env = infer_types(t);
        default_bottom_to_qubit(env);
    }
    std::vector<WireLabel> wires = lhs.wires;
    wires.insert(wires.end(), ctx.ancillas.begin(), ctx.ancillas.end());
    std::vector<WireType> types;
    for (const auto &w : wires) {
        types.push_back(env.get(w));
    }
    const auto dims = dims_for(types, cutoff);
    const auto strides = linalg::strides(dims);
    const auto qm = qumode_positions(types);
    const std::size_t n = linalg::product(dims);
    std::vector<Eigen::Index> cols;
    for (std::size_t i = 0; i < n; ++i) {
        bool ok = true;
        for (std::size_t k = lhs.wires.size(); k < wires.size(); ++k) {
            ok = ok && (i / strides[k]) % dims[k] == 0;
        }
        if (low_levels) {
            for (auto m : qm) {
                ok = ok && (i / strides[m]) % dims[m] < *low_levels;
            }
        }
        if (ok) {
            cols.push_back(static_cast<Eigen::Index>(i));
        }
    }
    Matrix basis = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        basis(cols[k], static_cast<Eigen::Index>(k)) = 1.0;
    }
    // The ancillas are untouched by the left-hand side.
    const Matrix u = apply_ops({lhs}, wires, dims, basis);
    const Matrix v = apply_ops(*rhs, wires, dims, basis);
    out.error = distance_up_to_phase(u, v);
    return out;
}

/// Rule oracle suite over the thirteen rules of the decomposition table.
/// Number-conserving rules are exact at cutoff 8; displacement-type rules
/// are compared on Fock levels < 8 at cutoff 32 with |parameter| <= 0.5.
inline std::vector<RuleCheck> rule_oracle_suite() {
    const WireLabel q("q");
    const WireLabel q2("q2");
    const WireLabel m("m");
    const WireLabel m2("m2");
    auto g = [](const std::string &name, std::vector<WireLabel> ws, Params ps = {}) {
        return make_instruction(name, std::move(ws), std::move(ps));
    };
    const double exact = 1e-9;
    const double disp = 1e-6;
    std::vector<RuleCheck> out;
    out.push_back(check_rule("1", g("F", {m}), 8, std::nullopt, exact));
    // ModeSwap: the truncated beamsplitter swaps exactly below total photon number = cutoff.
    {
        auto lhs = g("ModeSwap", {m, m2});
        RewriteContext ctx;
        const auto rhs = rule("2").apply(lhs, ctx);
        const std::vector<std::size_t> dims{8, 8};
        const auto cols = low_energy_columns(dims, {0, 1}, 8, true);
        out.push_back({"2", instruction_str(lhs),
                       distance_on_columns(gate_matrix(lhs, dims), circuit_unitary(*rhs, {m, m2}, dims), cols), exact});
    }
    for (double r : {0.5, -0.35}) {
        out.push_back(check_rule("3", g("CD", {q, m}, {r, 0.7}), 32, 8, disp));
    }
    out.push_back(check_rule("4", g("CR", {q, m}, {0.83}), 8, std::nullopt, exact));
    out.push_back(check_rule("5", g("CP", {q, m}), 8, std::nullopt, exact));
    out.push_back(check_rule("6", g("CS", {q, m}, {0.4, 0.3}), 32, 8, disp));
    out.push_back(check_rule("7", g("CBS", {q, m, m2}, {0.9, 0.4}), 8, std::nullopt, exact));
    out.push_back(check_rule("8", g("CTMS", {q, m, m2}, {0.3, -0.6}), 32, 8, disp));
    out.push_back(check_rule("9", g("CSUM", {q, m, m2}, {0.45}), 32, 8, disp));
    out.push_back(check_rule("10", g("SNAP", {m}, {std::vector<double>{0.3, -1.1, 2.0, 0.7, -0.4, 1.9, 0.1, 3.0}}), 8,
                             std::nullopt, 1e-10));
    out.push_back(check_rule("11", g("CD", {q, m}, {0.5, 0.3}), 32, 8, disp));
    out.push_back(check_rule("11", g("CBS", {q, m, m2}, {0.5, 0.2}), 32, 8, disp));
    out.push_back(check_rule("11", g("CTMS", {q, m, m2}, {0.4, 1.1}), 32, 8, disp));
    out.push_back(check_rule("12", condition_on_qubit(condition_on_qubit(g("R", {m}, {0.7}), q), q2), 8, std::nullopt,
                             exact));
    out.push_back(check_rule("13", controlled(g("R", {m}, {1.3}), q), 8, std::nullopt, exact));
    out.push_back(check_rule("13", controlled(g("BS", {m, m2}, {0.6, 0.2}), q), 8, std::nullopt, exact));
    return out;
}

/// Composite `cvstdgates.inc` definitions against the built-in gates at
/// `cutoff`: on the full truncated space and on the states whose total
/// photon number is below the cutoff.
struct LibraryCheck {
    std::string gate;
    double full = 0.0;
    double sector = 0.0;
};

inline std::vector<LibraryCheck> library_soundness(std::size_t cutoff) {
    std::vector<LibraryCheck> out;
    for (const auto &def : parse_gate_library(cvstdgates_inc())) {
        const auto builtin = lookup_qasm(def->qasm_name);
        LibraryCheck c{def->qasm_name};
        for (int k = 0; k < 3; ++k) {
            const auto ps = sample_params(*builtin, k, 0.8);
            const auto lhs = on_fresh_wires(builtin, ps);
            const auto types = gate_signature(builtin);
            const auto dims = dims_for(types, cutoff);
            const Matrix u = gate_matrix(lhs, dims);
            const Matrix v = circuit_unitary(def->decomposition(ps, lhs.wires), lhs.wires, dims);
            const auto cols = low_energy_columns(dims, qumode_positions(types), cutoff, true);
            c.full = std::max(c.full, distance_up_to_phase(u, v));
            c.sector = std::max(c.sector, distance_on_columns(u, v, cols));
        }
        out.push_back(c);
    }
    return out;
}

/// Every gate in the registry on a parameter grid: max |U^dag U - 1|.
inline double worst_unitarity_error(std::size_t cutoff) {
    double worst = 0.0;
    for (const auto &[name, def] : gate_registry()) {
        const auto types = gate_signature(def);
        const auto dims = dims_for(types, cutoff);
        for (int k = 0; k < 4; ++k) {
            const auto g = on_fresh_wires(def, sample_params(*def, k));
            const Matrix u = gate_matrix(g, dims);
            const auto n = u.rows();
            worst = std::max(worst, linalg::max_abs(u.adjoint() * u - Matrix::Identity(n, n)));
        }
    }
    return worst;
}

inline std::string fixture(const std::string &name) {
    return std::string(HYBC_FIXTURES) + "/" + name;
}

/// Runs a shell command and captures stdout and the exit status.
struct CommandResult {
    int status = -1;
    std::string out;
};

inline CommandResult run_command(const std::string &cmd) {
    CommandResult r;
    FILE *p = popen(cmd.c_str(), "r");
    if (p == nullptr) {
        return r;
    }
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) {
        r.out.append(buf.data(), n);
    }
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

}  // namespace hybc::testing
