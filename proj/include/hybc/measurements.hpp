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

/// Spectral observables, basis schemas and measurement specifications.
/// Observable spectra are functions of the basis outcome, never eigenvalue
/// lists, so the photon-number and quadrature spectra stay unbounded.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hybc/circuit.hpp"
#include "hybc/gates.hpp"

namespace hybc {

enum class Basis : std::uint8_t { Discrete, Position };

inline std::string basis_name(Basis b) {
    return b == Basis::Discrete ? "discrete" : "position";
}

struct BasisConflict : MeasurementError {
    using MeasurementError::MeasurementError;
};

/// Wire -> basis, in insertion order.
class BasisSchema {
   public:
    BasisSchema() = default;
    BasisSchema(std::initializer_list<std::pair<WireLabel, Basis>> entries) {
        for (const auto &[w, b] : entries) {
            add(w, b);
        }
    }

    /// Adds a binding; rebinding a wire to a different basis is a conflict.
    void add(const WireLabel &w, Basis b) {
        for (const auto &[ew, eb] : entries_) {
            if (ew == w) {
                if (eb != b) {
                    throw BasisConflict("wire " + w.str() + " is measured in both " + basis_name(eb) + " and " +
                                        basis_name(b) + " bases");
                }
                return;
            }
        }
        entries_.emplace_back(w, b);
    }

    std::optional<Basis> find(const WireLabel &w) const {
        for (const auto &[ew, eb] : entries_) {
            if (ew == w) {
                return eb;
            }
        }
        return std::nullopt;
    }

    const std::vector<std::pair<WireLabel, Basis>> &entries() const {
        return entries_;
    }
    std::size_t size() const {
        return entries_.size();
    }
    bool empty() const {
        return entries_.empty();
    }
    bool operator==(const BasisSchema &) const = default;

   private:
    std::vector<std::pair<WireLabel, Basis>> entries_;
};

enum class FactorKind : std::uint8_t { N, Xquad, PauliX, PauliY, PauliZ };

inline std::string factor_name(FactorKind k) {
    switch (k) {
        case FactorKind::N:
            return "N";
        case FactorKind::Xquad:
            return "X_quad";
        case FactorKind::PauliX:
            return "X";
        case FactorKind::PauliY:
            return "Y";
        case FactorKind::PauliZ:
            return "Z";
    }
    return "?";
}

inline WireType factor_wire_type(FactorKind k) {
    return (k == FactorKind::N || k == FactorKind::Xquad) ? WireType::qumode() : WireType::qubit();
}

struct ObsFactor {
    FactorKind kind;
    WireLabel wire;
    bool operator==(const ObsFactor &) const = default;
};

/// c * (F_1 (x) F_2 (x) ...), one factor per wire.
struct Observable {
    double coefficient = 1.0;
    std::vector<ObsFactor> factors;

    static Observable single(FactorKind k, WireLabel w) {
        return Observable{1.0, {ObsFactor{k, std::move(w)}}};
    }

    std::vector<WireLabel> wires() const {
        std::vector<WireLabel> out;
        for (const auto &f : factors) {
            out.push_back(f.wire);
        }
        return out;
    }

    std::string str() const {
        std::string s = coefficient == 1.0 ? "" : std::to_string(coefficient) + "*";
        for (std::size_t i = 0; i < factors.size(); ++i) {
            s += (i ? "@" : "") + factor_name(factors[i].kind) + "(" + factors[i].wire.str() + ")";
        }
        return s;
    }

    bool operator==(const Observable &) const = default;
};

inline Observable obs_n(WireLabel w) {
    return Observable::single(FactorKind::N, std::move(w));
}
inline Observable obs_x(WireLabel w) {
    return Observable::single(FactorKind::Xquad, std::move(w));
}
inline Observable obs_z(WireLabel w) {
    return Observable::single(FactorKind::PauliZ, std::move(w));
}
inline Observable obs_pauli_x(WireLabel w) {
    return Observable::single(FactorKind::PauliX, std::move(w));
}
inline Observable obs_pauli_y(WireLabel w) {
    return Observable::single(FactorKind::PauliY, std::move(w));
}

inline Observable operator*(const Observable &l, const Observable &r) {
    Observable out{l.coefficient * r.coefficient, l.factors};
    for (const auto &f : r.factors) {
        for (const auto &g : out.factors) {
            if (g.wire == f.wire) {
                throw MeasurementError("observable product repeats wire " + f.wire.str());
            }
        }
        out.factors.push_back(f);
    }
    return out;
}
inline Observable operator*(double c, Observable o) {
    o.coefficient *= c;
    return o;
}

/// A single basis outcome: bit / photon number, or a quadrature value.
using Outcome = std::variant<std::uint64_t, double>;

inline std::string outcome_str(const Outcome &o) {
    if (const auto *n = std::get_if<std::uint64_t>(&o)) {
        return std::to_string(*n);
    }
    return std::to_string(std::get<double>(o));
}

/// Spectrum function f(outcome tuple); tuple order = factor order.
inline double eigenvalue_of(const Observable &obs, const std::vector<Outcome> &outcome) {
    if (outcome.size() != obs.factors.size()) {
        throw MeasurementError("observable " + obs.str() + " expects " + std::to_string(obs.factors.size()) +
                               " outcome(s), got " + std::to_string(outcome.size()));
    }
    double v = obs.coefficient;
    for (std::size_t i = 0; i < outcome.size(); ++i) {
        const auto kind = obs.factors[i].kind;
        if (kind == FactorKind::Xquad) {
            const auto *x = std::get_if<double>(&outcome[i]);
            if (x == nullptr) {
                throw MeasurementError("quadrature factor needs a real outcome");
            }
            v *= *x;
            continue;
        }
        const auto *n = std::get_if<std::uint64_t>(&outcome[i]);
        if (n == nullptr) {
            throw MeasurementError("factor " + factor_name(kind) + " needs a discrete outcome");
        }
        if (kind == FactorKind::N) {
            v *= static_cast<double>(*n);
        } else {
            if (*n > 1) {
                throw MeasurementError("qubit outcome must be 0 or 1, got " + std::to_string(*n));
            }
            v *= *n == 0 ? 1.0 : -1.0;
        }
    }
    return v;
}

struct MeasurementSpec {
    enum class Kind : std::uint8_t { Expval, Var, Sample };
    Kind kind = Kind::Sample;
    std::optional<Observable> obs;
    BasisSchema schema;  // Sample only

    static MeasurementSpec expval(Observable o) {
        return {Kind::Expval, std::move(o), {}};
    }
    static MeasurementSpec var(Observable o) {
        return {Kind::Var, std::move(o), {}};
    }
    static MeasurementSpec sample(BasisSchema s) {
        return {Kind::Sample, std::nullopt, std::move(s)};
    }

    std::vector<WireLabel> wires() const {
        if (obs) {
            return obs->wires();
        }
        std::vector<WireLabel> out;
        for (const auto &[w, b] : schema.entries()) {
            out.push_back(w);
        }
        return out;
    }

    std::string str() const {
        switch (kind) {
            case Kind::Expval:
                return "expval(" + obs->str() + ")";
            case Kind::Var:
                return "var(" + obs->str() + ")";
            case Kind::Sample: {
                std::string s = "sample(";
                for (std::size_t i = 0; i < schema.entries().size(); ++i) {
                    const auto &[w, b] = schema.entries()[i];
                    s += (i ? ", " : "") + w.str() + ":" + basis_name(b);
                }
                return s + ")";
            }
        }
        return "?";
    }

    bool operator==(const MeasurementSpec &) const = default;
};

inline Basis preferred_basis(FactorKind k) {
    return k == FactorKind::Xquad ? Basis::Position : Basis::Discrete;
}

/// Combined schema of all measurements; conflicting demands throw BasisConflict.
inline BasisSchema infer_basis_schema(const std::vector<MeasurementSpec> &ms) {
    BasisSchema s;
    for (const auto &m : ms) {
        if (m.obs) {
            for (const auto &f : m.obs->factors) {
                s.add(f.wire, preferred_basis(f.kind));
            }
        } else {
            for (const auto &[w, b] : m.schema.entries()) {
                s.add(w, b);
            }
        }
    }
    return s;
}

inline GateInstruction make_instruction(const std::string &gate, std::vector<WireLabel> wires, Params params = {}) {
    return GateInstruction{lookup(gate), std::move(params), std::move(wires), {}};
}

/// Rotations taking every factor into its measured basis (Z or Fock/x).
inline std::vector<GateInstruction> diagonalizing_gates(const Observable &obs) {
    std::vector<GateInstruction> out;
    for (const auto &f : obs.factors) {
        if (f.kind == FactorKind::PauliX) {
            out.push_back(make_instruction("H", {f.wire}));
        } else if (f.kind == FactorKind::PauliY) {
            out.push_back(make_instruction("Sdg", {f.wire}));
            out.push_back(make_instruction("H", {f.wire}));
        }
    }
    return out;
}

}  // namespace hybc
