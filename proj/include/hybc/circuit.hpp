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

/// Core value types of the circuit IR: wire labels, wire types, parameters,
/// modifiers and gate instructions. The tape itself lives in tape.hpp since it
/// needs the complete gate and measurement definitions.

#pragma once

#include <cmath>
#include <compare>
#include <cstdint>
#include <functional>
#include <memory>
#include <numeric>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "hybc/errors.hpp"

namespace hybc {

/// Opaque wire token. Integers and strings never compare equal, so the
/// integer 0 and the string "0" are different wires.
class WireLabel {
   public:
    WireLabel() : value_(std::int64_t{0}) {
    }
    WireLabel(std::int64_t v) : value_(v) {
    }
    WireLabel(int v) : value_(std::int64_t{v}) {
    }
    WireLabel(std::string v) : value_(std::move(v)) {
    }
    WireLabel(const char *v) : value_(std::string(v)) {
    }

    bool is_int() const {
        return std::holds_alternative<std::int64_t>(value_);
    }
    std::int64_t as_int() const {
        return std::get<std::int64_t>(value_);
    }
    const std::string &as_string() const {
        return std::get<std::string>(value_);
    }

    std::string str() const {
        if (is_int()) {
            return std::to_string(as_int());
        }
        return as_string();
    }

    bool operator==(const WireLabel &) const = default;
    std::strong_ordering operator<=>(const WireLabel &other) const {
        if (value_.index() != other.value_.index()) {
            return value_.index() <=> other.value_.index();
        }
        if (is_int()) {
            return as_int() <=> other.as_int();
        }
        return as_string().compare(other.as_string()) <=> 0;
    }

    std::size_t hash() const {
        return std::visit([](const auto &v) { return std::hash<std::decay_t<decltype(v)>>{}(v); }, value_) ^
               (value_.index() * 0x9e3779b97f4a7c15ULL);
    }

   private:
    std::variant<std::int64_t, std::string> value_;
};

inline std::ostream &operator<<(std::ostream &out, const WireLabel &w) {
    return out << w.str();
}

struct WireLabelHash {
    std::size_t operator()(const WireLabel &w) const {
        return w.hash();
    }
};

/// Disjoint wire types. Bottom means "not determined yet".
struct WireType {
    enum class Tag : std::uint8_t { Bottom, Qubit, Qudit, Qumode };
    Tag tag = Tag::Bottom;
    std::uint32_t dim = 0;  // only meaningful for Qudit

    static WireType bottom() {
        return {};
    }
    static WireType qubit() {
        return {Tag::Qubit, 2};
    }
    static WireType qumode() {
        return {Tag::Qumode, 0};
    }
    static WireType qudit(std::uint32_t d) {
        if (d < 3) {
            throw ConstructionError("qudit dimension must be >= 3, got " + std::to_string(d));
        }
        return {Tag::Qudit, d};
    }

    bool is_bottom() const {
        return tag == Tag::Bottom;
    }
    bool operator==(const WireType &) const = default;

    std::string str() const {
        switch (tag) {
            case Tag::Bottom:
                return "bottom";
            case Tag::Qubit:
                return "qubit";
            case Tag::Qudit:
                return "qudit(" + std::to_string(dim) + ")";
            case Tag::Qumode:
                return "qumode";
        }
        return "?";
    }
};

inline std::ostream &operator<<(std::ostream &out, const WireType &t) {
    return out << t.str();
}

/// Exact rational number; used for Pow exponents so that square roots stay
/// symbolic.
struct Rational {
    std::int64_t num = 1;
    std::int64_t den = 1;

    constexpr Rational() = default;
    Rational(std::int64_t n, std::int64_t d = 1) : num(n), den(d) {
        if (den == 0) {
            throw ConstructionError("rational with zero denominator");
        }
        if (den < 0) {
            num = -num;
            den = -den;
        }
        auto g = std::gcd(num < 0 ? -num : num, den);
        if (g > 1) {
            num /= g;
            den /= g;
        }
    }

    /// Recovers a rational from a decimal value, accepting denominators up to
    /// `max_den` (exact for values like 0.5, 0.25, 1/3 printed to 12 digits).
    static Rational from_double(double v, std::int64_t max_den = 4096) {
        for (std::int64_t d = 1; d <= max_den; ++d) {
            double n = std::round(v * static_cast<double>(d));
            if (std::abs(n / static_cast<double>(d) - v) < 1e-9 * std::max(1.0, std::abs(v))) {
                return Rational(static_cast<std::int64_t>(n), d);
            }
        }
        throw ConstructionError("power exponent is not a simple rational: " + std::to_string(v));
    }

    double value() const {
        return static_cast<double>(num) / static_cast<double>(den);
    }
    bool is_integer() const {
        return den == 1;
    }
    bool is_zero() const {
        return num == 0;
    }
    bool is_one() const {
        return num == 1 && den == 1;
    }
    Rational operator*(const Rational &o) const {
        return Rational(num * o.num, den * o.den);
    }
    Rational operator-() const {
        return Rational(-num, den);
    }
    bool operator==(const Rational &) const = default;

    std::string str() const {
        return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
    }
};

/// Gate parameter: a real scalar or a real vector (SNAP/SQR angle lists).
/// Complex amplitudes are stored as two real parameters in polar form.
using Param = std::variant<double, std::vector<double>>;

inline double scalar(const Param &p) {
    if (const auto *d = std::get_if<double>(&p)) {
        return *d;
    }
    throw ConstructionError("expected a scalar parameter, got a vector");
}

inline const std::vector<double> &vec(const Param &p) {
    if (const auto *v = std::get_if<std::vector<double>>(&p)) {
        return *v;
    }
    throw ConstructionError("expected a vector parameter, got a scalar");
}

inline Param scaled(const Param &p, double k) {
    if (const auto *d = std::get_if<double>(&p)) {
        return *d * k;
    }
    auto v = std::get<std::vector<double>>(p);
    for (auto &x : v) {
        x *= k;
    }
    return v;
}

struct AdjointMod {
    bool operator==(const AdjointMod &) const = default;
};
struct PowMod {
    Rational exponent;
    bool operator==(const PowMod &) const = default;
};
/// Qubit-conditioned promotion exp(-i t G) -> exp(-i t Z_q (x) G). Adds one
/// qubit wire, prepended to the instruction's wires.
struct CondZMod {
    WireLabel qubit;
    bool operator==(const CondZMod &) const = default;
};
/// Ordinary control |0><0| (x) I + |1><1| (x) U. Adds one prepended qubit wire.
struct CtrlMod {
    WireLabel qubit;
    bool operator==(const CtrlMod &) const = default;
};

/// Modifiers are stored innermost first: {Adjoint, Ctrl(c)} is ctrl(inv(U)).
using Modifier = std::variant<AdjointMod, PowMod, CondZMod, CtrlMod>;

inline bool adds_wire(const Modifier &m) {
    return std::holds_alternative<CondZMod>(m) || std::holds_alternative<CtrlMod>(m);
}

/// Applies the cancellation rules left to right with a stack, which makes the
/// result independent of the order in which the local rules are applied:
/// adjacent Adjoint pairs cancel, adjacent Pows multiply, Pow(1) vanishes.
inline std::vector<Modifier> normalize_modifiers(const std::vector<Modifier> &mods) {
    std::vector<Modifier> out;
    for (const auto &m : mods) {
        if (std::holds_alternative<AdjointMod>(m)) {
            if (!out.empty() && std::holds_alternative<AdjointMod>(out.back())) {
                out.pop_back();
                continue;
            }
            out.push_back(m);
        } else if (const auto *p = std::get_if<PowMod>(&m)) {
            Rational k = p->exponent;
            if (!out.empty() && std::holds_alternative<PowMod>(out.back())) {
                k = std::get<PowMod>(out.back()).exponent * k;
                out.pop_back();
            }
            if (k.is_one()) {
                // An Adjoint exposed here cancels against the next one pushed.
                continue;
            }
            out.push_back(PowMod{k});
        } else {
            out.push_back(m);
        }
    }
    return out;
}

struct GateDef;

/// A gate application. `wires` lists the modifier-added qubits first (the
/// outermost modifier's wire leftmost) followed by the gate's own wires.
struct GateInstruction {
    std::shared_ptr<const GateDef> gate;
    std::vector<Param> params;
    std::vector<WireLabel> wires;
    std::vector<Modifier> modifiers;

    /// Number of leading wires owned by CondZ/Ctrl modifiers.
    std::size_t modifier_wire_count() const {
        std::size_t n = 0;
        for (const auto &m : modifiers) {
            n += adds_wire(m) ? 1 : 0;
        }
        return n;
    }

    /// The gate's own wires (without modifier-added qubits).
    std::vector<WireLabel> base_wires() const {
        return {wires.begin() + static_cast<std::ptrdiff_t>(modifier_wire_count()), wires.end()};
    }

    /// Pow(0) somewhere in the modifier list marks an identity placeholder.
    bool is_identity_marker() const {
        for (const auto &m : modifiers) {
            if (const auto *p = std::get_if<PowMod>(&m); p != nullptr && p->exponent.is_zero()) {
                return true;
            }
        }
        return false;
    }

    bool operator==(const GateInstruction &o) const {
        return gate == o.gate && params == o.params && wires == o.wires && modifiers == o.modifiers;
    }
};

}  // namespace hybc

template <>
struct std::hash<hybc::WireLabel> {
    std::size_t operator()(const hybc::WireLabel &w) const {
        return w.hash();
    }
};
