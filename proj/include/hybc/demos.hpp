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

/// Phase estimation on a dispersive qubit-oscillator Hamiltonian and the
/// conditional-displacement calibration loop.

#pragma once

#include <cmath>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "hybc/fock_sim.hpp"

namespace hybc {

struct DispersiveParams {
    double omega_r = 1.0;
    double omega_q = -1.0;
    double chi = 0.1;
};

/// Evo(t) = exp(-i t H), H = w_r n - (w_q/2) Z - (chi/2) Z n, on (qubit, qumode).
inline GatePtr make_evo_gate(DispersiveParams h, bool annotated = true) {
    GateDef d;
    d.name = "Evo";
    d.qasm_name = "evo";
    d.arity = 2;
    d.params = {{"t", ParamKind::Real}};
    if (annotated) {
        d.cls = GateClass::Hybrid;
        d.annotation = std::vector<WireType>{WireType::qubit(), WireType::qumode()};
    }
    d.generator = [h](const Params &ps) {
        const double t = scalar(ps[0]);
        return gen::sum({(t * h.omega_r) * gen::n(1), (-t * h.omega_q / 2.0) * gen::Z(0),
                         (-t * h.chi / 2.0) * (gen::Z(0) * gen::n(1))});
    };
    d.scale_params = {0};
    d.decomposition = [h](const Params &ps, const std::vector<WireLabel> &w) {
        const double t = scalar(ps[0]);
        return std::vector<GateInstruction>{make_instruction("RZ", {w[0]}, {-h.omega_q * t}),
                                            make_instruction("R", {w[1]}, {h.omega_r * t}),
                                            make_instruction("CR", {w[0], w[1]}, {-h.chi * t})};
    };
    d.commuting_decomposition = true;
    d.description = "dispersive evolution exp(-i t H)";
    return std::make_shared<const GateDef>(std::move(d));
}

/// Diagonal energy of |b, n> under the dispersive Hamiltonian.
inline double dispersive_energy(DispersiveParams h, int qubit_bit, std::size_t n) {
    const double z = qubit_bit == 0 ? 1.0 : -1.0;
    const double nn = static_cast<double>(n);
    return h.omega_r * nn - h.omega_q / 2.0 * z - h.chi / 2.0 * z * nn;
}

struct QpeConfig {
    std::size_t bits = 10;
    double t = 1.0;
    DispersiveParams h;
    std::size_t fock_level = 4;
    std::optional<std::size_t> shots = 1024;
    bool annotated = true;
};

/// Estimation wires are the integers 0..bits-1 (wire 0 = most significant
/// bit); the system is ("q", "m"). Wire j controls Evo^(2^j); the inverse
/// QFT is the swap-free form.
inline QuantumTape build_qpe_tape(const QpeConfig &cfg) {
    const WireLabel q("q");
    const WireLabel m("m");
    const auto evo = make_evo_gate(cfg.h, cfg.annotated);
    const std::size_t n = cfg.bits;
    std::vector<GateInstruction> ops;
    for (std::size_t j = 0; j < n; ++j) {
        ops.push_back(make_instruction("H", {WireLabel(static_cast<std::int64_t>(j))}));
    }
    for (std::size_t j = 0; j < n; ++j) {
        GateInstruction u{evo, {cfg.t}, {q, m}, {}};
        u = power(std::move(u), Rational(static_cast<std::int64_t>(1) << j));
        ops.push_back(controlled(std::move(u), WireLabel(static_cast<std::int64_t>(j))));
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = n; j-- > i + 1;) {
            const double phi = -2.0 * kPi / std::ldexp(1.0, static_cast<int>(j - i + 1));
            auto ps = make_instruction("PhaseShift", {WireLabel(static_cast<std::int64_t>(i))}, {phi});
            ops.push_back(controlled(std::move(ps), WireLabel(static_cast<std::int64_t>(j))));
        }
        ops.push_back(make_instruction("H", {WireLabel(static_cast<std::int64_t>(i))}));
    }
    BasisSchema schema;
    for (std::size_t j = 0; j < n; ++j) {
        schema.add(WireLabel(static_cast<std::int64_t>(j)), Basis::Discrete);
    }
    return build_tape({{q, 0}, {m, cfg.fock_level}}, std::move(ops), {MeasurementSpec::sample(schema)}, cfg.shots);
}

struct QpeEstimate {
    std::map<std::string, std::size_t> bitstrings;
    std::map<double, std::size_t> energies;
    double estimate = 0.0;
    double exact = 0.0;
    double window_lo = 0.0;
    double window_hi = 0.0;
};

/// theta = k / 2^n (k read most significant bit first); E = (-2 pi theta mod
/// 2 pi) / t, shifted by multiples of 2 pi / t into the window of width
/// 2 pi / t centred on the exact diagonal energy.
inline double phase_to_energy(double theta, double t, double window_lo) {
    double e = std::fmod(-2.0 * kPi * theta, 2.0 * kPi);
    if (e < 0) {
        e += 2.0 * kPi;
    }
    e /= t;
    const double period = 2.0 * kPi / t;
    while (e < window_lo) {
        e += period;
    }
    while (e >= window_lo + period) {
        e -= period;
    }
    return e;
}

inline QpeEstimate postprocess_qpe(const std::vector<OutcomeTuple> &samples, const QpeConfig &cfg) {
    QpeEstimate est;
    est.exact = dispersive_energy(cfg.h, 0, cfg.fock_level);
    est.window_lo = est.exact - kPi / cfg.t;
    est.window_hi = est.exact + kPi / cfg.t;
    for (const auto &s : samples) {
        std::string bits;
        std::uint64_t k = 0;
        for (const auto &o : s) {
            const auto b = std::get<std::uint64_t>(o);
            bits += b ? '1' : '0';
            k = (k << 1) | b;
        }
        est.bitstrings[bits] += 1;
        const double theta = static_cast<double>(k) / std::ldexp(1.0, static_cast<int>(cfg.bits));
        est.energies[phase_to_energy(theta, cfg.t, est.window_lo)] += 1;
    }
    std::size_t best = 0;
    for (const auto &[e, c] : est.energies) {
        if (c > best) {
            best = c;
            est.estimate = e;
        }
    }
    return est;
}

/// H; CD(b, 0); D(b, pi/2); CD(-b, 0); D(-b, pi/2); H; <Z(q)>.
inline QuantumTape build_calibration_tape(double beta, const WireLabel &q = WireLabel("q"),
                                          const WireLabel &m = WireLabel("m1i1")) {
    std::vector<GateInstruction> ops{
        make_instruction("H", {q}),
        make_instruction("CD", {q, m}, {beta, 0.0}),
        make_instruction("D", {m}, {beta, kPi / 2}),
        make_instruction("CD", {q, m}, {-beta, 0.0}),
        make_instruction("D", {m}, {-beta, kPi / 2}),
        make_instruction("H", {q}),
    };
    return build_tape({}, std::move(ops), {MeasurementSpec::expval(obs_z(q))});
}

struct PostSelected {
    double value = 0.0;
    double rejection = 0.0;
};

/// <obs> on the branch where every wire in `ancillas` reads 0.
inline PostSelected postselected_expval(const StateVector &state, const Observable &obs,
                                        const std::vector<WireLabel> &ancillas) {
    StateVector st = state;
    const auto strides = linalg::strides(st.dims);
    std::vector<std::size_t> pos;
    for (const auto &a : ancillas) {
        pos.push_back(st.index_of(a));
    }
    for (Eigen::Index i = 0; i < st.amplitudes.size(); ++i) {
        for (auto p : pos) {
            if ((static_cast<std::size_t>(i) / strides[p]) % st.dims[p] != 0) {
                st.amplitudes(i) = 0.0;
                break;
            }
        }
    }
    const double kept = st.amplitudes.squaredNorm();
    PostSelected r;
    r.rejection = 1.0 - kept;
    if (kept > 0) {
        st.amplitudes /= std::sqrt(kept);
        r.value = expval(st, obs);
    }
    return r;
}

}  // namespace hybc
