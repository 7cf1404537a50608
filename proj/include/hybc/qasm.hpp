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

/// OpenQASM 3.0 with qumode registers: emitter, restricted parser and the
/// bundled `cvstdgates.inc`.
///
/// Dialect notes:
///   - `qumode[n] m;` declares qumodes; `measure_n` and `measure_x` read a
///     qumode in the Fock and position bases.
///   - Built-in primitives appear in `cvstdgates.inc` as `opaque` lines.
///   - `pragma hybc.prep <wire> <level>` sets the Fock level of a reset wire.
///   - Vector parameters (SNAP, SQR) are brace lists: `cv_snap({0.1, 0.2}) m[0];`.

#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hybc/wire_types.hpp"

namespace hybc {

inline const std::string &cvstdgates_inc() {
    static const std::string text = R"QASM(// cvstdgates.inc: qumode and qubit-qumode gates.
// Displacement-type parameters are polar: alpha = r e^{i phi}.

opaque cv_d(r, phi) qumode m;
opaque cv_r(theta) qumode m;
gate cv_f qumode m { cv_r(pi / 2) m; }
opaque cv_s(r, phi) qumode m;
opaque cv_k(kappa) qumode m;
opaque cv_c(r) qumode m;
opaque cv_snap(phi) qumode m;
opaque cv_bs(theta, phi) qumode a, qumode b;
gate cv_swap qumode a, qumode b {
    cv_bs(pi, 0) a, b;
    cv_r(-pi / 2) a;
    cv_r(-pi / 2) b;
}
opaque cv_tms(r, phi) qumode a, qumode b;
opaque cv_sum(lambda) qumode a, qumode b;

gate cv_cr(theta) qubit q, qumode m {
    negctrl @ cv_r(theta / 2) q, m;
    ctrl @ cv_r(-theta / 2) q, m;
}
gate cv_cp qubit q, qumode m { cv_cr(pi) q, m; }
gate cv_cd(r, phi) qubit q, qumode m {
    negctrl @ cv_d(r, phi) q, m;
    ctrl @ inv @ cv_d(r, phi) q, m;
}
gate cv_cs(r, phi) qubit q, qumode m {
    negctrl @ cv_s(r, phi) q, m;
    ctrl @ inv @ cv_s(r, phi) q, m;
}
opaque cv_sqr(theta, phi) qubit q, qumode m;
opaque cv_jc(theta, phi) qubit q, qumode m;
opaque cv_ajc(theta, phi) qubit q, qumode m;
opaque cv_rb(r, phi) qubit q, qumode m;
gate cv_cbs(theta, phi) qubit q, qumode a, qumode b {
    negctrl @ cv_bs(theta, phi) q, a, b;
    ctrl @ inv @ cv_bs(theta, phi) q, a, b;
}
gate cv_ctms(r, phi) qubit q, qumode a, qumode b {
    negctrl @ cv_tms(r, phi) q, a, b;
    ctrl @ inv @ cv_tms(r, phi) q, a, b;
}
gate cv_csum(lambda) qubit q, qumode a, qumode b {
    negctrl @ cv_sum(lambda) q, a, b;
    ctrl @ inv @ cv_sum(lambda) q, a, b;
}
opaque cv_xcd(u, v) qubit q, qumode m;
)QASM";
    return text;
}

/// A gate, measurement or subroutine argument bound to a wire of the wrong type.
struct QasmTypeError : ParseError {
    using ParseError::ParseError;
};

/// Parsed document.
struct QasmProgram {
    QuantumTape tape;
    TypeEnv env;
    /// User `gate` definitions in source order.
    std::vector<GatePtr> gates;
    std::vector<std::string> warnings;
};

namespace qasm_detail {

struct Token {
    enum class Kind : std::uint8_t { Ident, Number, String, Symbol, End };
    Kind kind = Kind::End;
    std::string text;
    double number = 0.0;
    std::size_t line = 1;
    std::size_t col = 1;
    std::size_t offset = 0;
};

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    std::size_t i = 0;
    std::size_t line = 1;
    std::size_t col = 1;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
            if (src[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
    };
    // `$n` physical qubits lex as identifiers.
    auto is_ident_start = [](char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$'; };
    auto is_ident = [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.'; };
    while (i < src.size()) {
        const char c = src[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (src.substr(i, 2) == "//") {
            while (i < src.size() && src[i] != '\n') {
                advance(1);
            }
            continue;
        }
        if (src.substr(i, 2) == "/*") {
            const std::size_t l0 = line;
            const std::size_t c0 = col;
            const auto end = src.find("*/", i + 2);
            if (end == std::string_view::npos) {
                throw ParseError("unterminated block comment", l0, c0);
            }
            advance(end + 2 - i);
            continue;
        }
        Token t;
        t.line = line;
        t.col = col;
        t.offset = i;
        if (is_ident_start(c)) {
            std::size_t j = i + 1;
            while (j < src.size() && is_ident(src[j])) {
                ++j;
            }
            t.kind = Token::Kind::Ident;
            t.text = std::string(src.substr(i, j - i));
            advance(j - i);
        } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                   (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            std::size_t j = i;
            while (j < src.size() && (std::isdigit(static_cast<unsigned char>(src[j])) || src[j] == '.')) {
                ++j;
            }
            if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < src.size() && (src[k] == '+' || src[k] == '-')) {
                    ++k;
                }
                if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
                    j = k;
                    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) {
                        ++j;
                    }
                }
            }
            t.kind = Token::Kind::Number;
            t.text = std::string(src.substr(i, j - i));
            try {
                std::size_t used = 0;
                t.number = std::stod(t.text, &used);
                if (used != t.text.size()) {
                    throw std::invalid_argument("trailing");
                }
            } catch (const std::exception &) {
                throw ParseError("malformed number '" + t.text + "'", line, col);
            }
            advance(j - i);
        } else if (c == '"') {
            const auto end = src.find('"', i + 1);
            if (end == std::string_view::npos) {
                throw ParseError("unterminated string", line, col);
            }
            t.kind = Token::Kind::String;
            t.text = std::string(src.substr(i + 1, end - i - 1));
            advance(end + 1 - i);
        } else {
            static const std::vector<std::string> two{"->", "**", "==", "!=", "<=", ">=", "&&", "||", "++", "+=", "-="};
            std::string sym(1, c);
            for (const auto &s : two) {
                if (src.substr(i, 2) == s) {
                    sym = s;
                }
            }
            static const std::string singles = "()[]{},;@=+-*/^:<>!%&|~";
            if (sym.size() == 1 && singles.find(c) == std::string::npos) {
                throw ParseError(std::string("unexpected character '") + c + "'", line, col);
            }
            t.kind = Token::Kind::Symbol;
            t.text = sym;
            advance(sym.size());
        }
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.line = line;
    end.col = col;
    end.offset = src.size();
    out.push_back(end);
    return out;
}

class Cursor {
   public:
    explicit Cursor(std::shared_ptr<const std::vector<Token>> toks, std::size_t begin = 0, std::size_t end = SIZE_MAX)
        : toks_(std::move(toks)), pos_(begin), end_(std::min(end, toks_->size() - 1)) {
    }

    const Token &peek(std::size_t ahead = 0) const {
        const std::size_t k = pos_ + ahead;
        return k < end_ ? (*toks_)[k] : end_token();
    }
    const Token &next() {
        const Token &t = peek();
        if (pos_ < end_) {
            ++pos_;
        }
        return t;
    }
    bool at_end() const {
        return pos_ >= end_;
    }
    bool is(const std::string &text, std::size_t ahead = 0) const {
        const auto &t = peek(ahead);
        return (t.kind == Token::Kind::Symbol || t.kind == Token::Kind::Ident) && t.text == text;
    }
    bool accept(const std::string &text) {
        if (is(text)) {
            next();
            return true;
        }
        return false;
    }
    const Token &expect(const std::string &text) {
        if (!is(text)) {
            fail("expected '" + text + "', found " + describe(peek()));
        }
        return next();
    }
    std::string ident(const std::string &what) {
        const auto &t = peek();
        if (t.kind != Token::Kind::Ident) {
            fail("expected " + what + ", found " + describe(t));
        }
        return next().text;
    }
    [[noreturn]] void fail(const std::string &msg) const {
        fail_at(peek(), msg);
    }
    [[noreturn]] static void fail_at(const Token &t, const std::string &msg) {
        throw ParseError(msg, t.line, t.col);
    }
    static std::string describe(const Token &t) {
        switch (t.kind) {
            case Token::Kind::End:
                return "end of input";
            case Token::Kind::String:
                return "string \"" + t.text + "\"";
            default:
                return "'" + t.text + "'";
        }
    }
    std::size_t position() const {
        return pos_;
    }
    void seek(std::size_t p) {
        pos_ = p;
    }
    const std::shared_ptr<const std::vector<Token>> &tokens() const {
        return toks_;
    }

    /// Index just past the brace matching the `{` at the cursor.
    std::size_t skip_braces() {
        expect("{");
        int depth = 1;
        while (depth > 0) {
            if (at_end()) {
                fail("unbalanced '{'");
            }
            const auto &t = next();
            if (t.kind == Token::Kind::Symbol && t.text == "{") {
                ++depth;
            } else if (t.kind == Token::Kind::Symbol && t.text == "}") {
                --depth;
            }
        }
        return pos_;
    }

   private:
    const Token &end_token() const {
        return (*toks_)[std::min(end_, toks_->size() - 1)];
    }
    std::shared_ptr<const std::vector<Token>> toks_;
    std::size_t pos_;
    std::size_t end_;
};

/// Scalar bindings visible to expressions.
struct Scope {
    std::map<std::string, double> values;
    /// Quantum argument name -> wire (gate bodies and subroutines).
    std::map<std::string, WireLabel> wires;
    const Scope *parent = nullptr;

    std::optional<double> value(const std::string &n) const {
        if (auto it = values.find(n); it != values.end()) {
            return it->second;
        }
        return parent ? parent->value(n) : std::nullopt;
    }
    std::optional<WireLabel> wire(const std::string &n) const {
        if (auto it = wires.find(n); it != wires.end()) {
            return it->second;
        }
        return parent ? parent->wire(n) : std::nullopt;
    }
};

[[noreturn]] inline void type_fail(const Token &t, const std::string &msg) {
    throw QasmTypeError("type error: " + msg, t.line, t.col);
}

[[noreturn]] inline void reject_pauli_string(const Token &t) {
    Cursor::fail_at(t, "unsupported construct: Pauli string instructions are not part of this dialect");
}

inline double parse_expr(Cursor &c, const Scope &s);

inline double parse_primary(Cursor &c, const Scope &s) {
    const Token &t = c.peek();
    if (t.kind == Token::Kind::Number) {
        c.next();
        return t.number;
    }
    if (t.kind == Token::Kind::String) {
        reject_pauli_string(t);
    }
    if (c.accept("(")) {
        const double v = parse_expr(c, s);
        c.expect(")");
        return v;
    }
    if (t.kind == Token::Kind::Ident) {
        const Token name = c.next();
        static const std::map<std::string, double (*)(double)> funcs{
            {"sin", [](double x) { return std::sin(x); }},   {"cos", [](double x) { return std::cos(x); }},
            {"tan", [](double x) { return std::tan(x); }},   {"arcsin", [](double x) { return std::asin(x); }},
            {"arccos", [](double x) { return std::acos(x); }}, {"arctan", [](double x) { return std::atan(x); }},
            {"exp", [](double x) { return std::exp(x); }},   {"ln", [](double x) { return std::log(x); }},
            {"log", [](double x) { return std::log(x); }},   {"sqrt", [](double x) { return std::sqrt(x); }},
        };
        if (c.is("(")) {
            auto it = funcs.find(name.text);
            if (it == funcs.end()) {
                Cursor::fail_at(name, "unknown function '" + name.text + "'");
            }
            c.next();
            const double v = parse_expr(c, s);
            c.expect(")");
            return it->second(v);
        }
        if (name.text == "pi") {
            return kPi;
        }
        if (name.text == "tau") {
            return 2.0 * kPi;
        }
        if (name.text == "euler") {
            return std::exp(1.0);
        }
        if (auto v = s.value(name.text)) {
            return *v;
        }
        Cursor::fail_at(name, "unknown identifier '" + name.text + "'");
    }
    c.fail("expected an expression, found " + Cursor::describe(t));
}

inline double parse_unary(Cursor &c, const Scope &s);

inline double parse_power(Cursor &c, const Scope &s) {
    const double base = parse_primary(c, s);
    if (c.accept("**") || c.accept("^")) {
        return std::pow(base, parse_unary(c, s));
    }
    return base;
}

inline double parse_unary(Cursor &c, const Scope &s) {
    if (c.accept("-")) {
        return -parse_unary(c, s);
    }
    if (c.accept("+")) {
        return parse_unary(c, s);
    }
    return parse_power(c, s);
}

inline double parse_term(Cursor &c, const Scope &s) {
    double v = parse_unary(c, s);
    while (true) {
        if (c.accept("*")) {
            v *= parse_unary(c, s);
        } else if (c.is("/")) {
            const Token &t = c.next();
            const double d = parse_unary(c, s);
            if (d == 0.0) {
                Cursor::fail_at(t, "division by zero");
            }
            v /= d;
        } else {
            return v;
        }
    }
}

inline double parse_expr(Cursor &c, const Scope &s) {
    double v = parse_term(c, s);
    while (true) {
        if (c.accept("+")) {
            v += parse_term(c, s);
        } else if (c.accept("-")) {
            v -= parse_term(c, s);
        } else {
            return v;
        }
    }
}

inline Param parse_param(Cursor &c, const Scope &s) {
    if (c.accept("{")) {
        std::vector<double> v;
        if (!c.is("}")) {
            do {
                v.push_back(parse_expr(c, s));
            } while (c.accept(","));
        }
        c.expect("}");
        return v;
    }
    return parse_expr(c, s);
}

struct ModifierSyntax {
    enum class Kind : std::uint8_t { Ctrl, NegCtrl, Inv, Pow };
    Kind kind;
    std::size_t count = 1;
    double exponent = 1.0;
    Token at;
};

struct OperandSyntax {
    std::string name;
    std::optional<std::size_t> index;
    Token at;
};

struct CallSyntax {
    std::vector<ModifierSyntax> modifiers;  // outermost first, as written
    Token name;
    Params params;
    std::vector<OperandSyntax> operands;
};

inline OperandSyntax parse_operand(Cursor &c, const Scope &s) {
    OperandSyntax op;
    op.at = c.peek();
    if (op.at.kind == Token::Kind::String) {
        reject_pauli_string(op.at);
    }
    op.name = c.ident("a quantum operand");
    if (c.accept("[")) {
        const Token &it = c.peek();
        const double v = parse_expr(c, s);
        if (v < 0 || v != std::floor(v)) {
            Cursor::fail_at(it, "register index must be a non-negative integer");
        }
        op.index = static_cast<std::size_t>(v);
        c.expect("]");
    }
    return op;
}

inline CallSyntax parse_call(Cursor &c, const Scope &s) {
    CallSyntax call;
    while (c.is("ctrl") || c.is("negctrl") || c.is("inv") || c.is("pow")) {
        ModifierSyntax m;
        m.at = c.next();
        if (m.at.text == "inv") {
            m.kind = ModifierSyntax::Kind::Inv;
        } else if (m.at.text == "pow") {
            m.kind = ModifierSyntax::Kind::Pow;
            c.expect("(");
            m.exponent = parse_expr(c, s);
            c.expect(")");
        } else {
            m.kind = m.at.text == "ctrl" ? ModifierSyntax::Kind::Ctrl : ModifierSyntax::Kind::NegCtrl;
            if (c.accept("(")) {
                const double n = parse_expr(c, s);
                if (n < 1 || n != std::floor(n)) {
                    Cursor::fail_at(m.at, "control count must be a positive integer");
                }
                m.count = static_cast<std::size_t>(n);
                c.expect(")");
            }
        }
        c.expect("@");
        call.modifiers.push_back(m);
    }
    call.name = c.peek();
    if (call.name.kind == Token::Kind::String) {
        reject_pauli_string(call.name);
    }
    c.ident("a gate name");
    if (c.accept("(")) {
        if (!c.is(")")) {
            do {
                call.params.push_back(parse_param(c, s));
            } while (c.accept(","));
        }
        c.expect(")");
    }
    if (!c.is(";")) {
        do {
            call.operands.push_back(parse_operand(c, s));
        } while (c.accept(","));
    }
    c.expect(";");
    return call;
}

/// Gates visible by QASM name.
using GateTable = std::map<std::string, GatePtr>;

inline bool is_builtin(const GatePtr &g) {
    const auto &reg = gate_registry();
    auto it = reg.find(g->name);
    return it != reg.end() && it->second == g;
}

/// Builds the IR for one call on resolved wires (controls first). negctrl
/// becomes X(c) ctrl@G X(c).
inline std::vector<GateInstruction> build_call(const CallSyntax &call, const GatePtr &def,
                                               const std::vector<WireLabel> &wires) {
    std::size_t nctrl = 0;
    for (const auto &m : call.modifiers) {
        if (m.kind == ModifierSyntax::Kind::Ctrl || m.kind == ModifierSyntax::Kind::NegCtrl) {
            nctrl += m.count;
        }
    }
    if (wires.size() != nctrl + def->arity) {
        Cursor::fail_at(call.name, "gate " + call.name.text + " expects " + std::to_string(nctrl + def->arity) +
                                       " operand(s), got " + std::to_string(wires.size()));
    }
    try {
        def->check_params(call.params);
    } catch (const ConstructionError &e) {
        Cursor::fail_at(call.name, e.what());
    }
    GateInstruction g{def, call.params, {wires.begin() + static_cast<std::ptrdiff_t>(nctrl), wires.end()}, {}};
    std::vector<WireLabel> flipped;
    std::size_t next_ctrl = nctrl;
    try {
        for (auto it = call.modifiers.rbegin(); it != call.modifiers.rend(); ++it) {
            switch (it->kind) {
                case ModifierSyntax::Kind::Inv:
                    g = adjoint(std::move(g));
                    break;
                case ModifierSyntax::Kind::Pow:
                    g = power(std::move(g), Rational::from_double(it->exponent));
                    break;
                case ModifierSyntax::Kind::Ctrl:
                case ModifierSyntax::Kind::NegCtrl:
                    for (std::size_t k = 0; k < it->count; ++k) {
                        const auto &c = wires[--next_ctrl];
                        g = controlled(std::move(g), c);
                        if (it->kind == ModifierSyntax::Kind::NegCtrl) {
                            flipped.push_back(c);
                        }
                    }
                    break;
            }
        }
        check_instruction(g, 0);
    } catch (const ConstructionError &e) {
        Cursor::fail_at(call.name, e.what());
    }
    std::vector<GateInstruction> out;
    for (const auto &c : flipped) {
        out.push_back(make_instruction("X", {c}));
    }
    out.push_back(std::move(g));
    for (const auto &c : flipped) {
        out.push_back(make_instruction("X", {c}));
    }
    return out;
}

/// Rejects an instruction whose signature contradicts known wire types.
template <typename TypeOf>
void check_call_types(const CallSyntax &call, const std::vector<GateInstruction> &instrs, TypeOf &&type_of) {
    for (const auto &g : instrs) {
        TypeSignature sig;
        try {
            sig = signature_of(g);
        } catch (const SignatureError &e) {
            Cursor::fail_at(call.name, e.what());
        }
        for (const auto &[pos, want] : sig.constraints) {
            const auto &w = g.wires[pos];
            const std::optional<WireType> have = type_of(w);
            if (have && !have->is_bottom() && *have != want) {
                std::string who = g.gate->qasm_name.empty() ? g.gate->name : g.gate->qasm_name;
                type_fail(call.name, who + " expects a " + want.str() + " at argument " +
                                               std::to_string(pos) + ", but " + w.str() + " is a " + have->str());
            }
        }
    }
}

struct GateArg {
    std::string name;
    std::optional<WireType> type;
};

inline std::vector<GateInstruction> expand_gate_body(const std::shared_ptr<const std::vector<Token>> &toks,
                                                     std::size_t begin, std::size_t end,
                                                     const std::vector<std::string> &param_names,
                                                     const std::vector<GateArg> &args,
                                                     const std::shared_ptr<const GateTable> &table, const Params &ps,
                                                     const std::vector<WireLabel> &wires,
                                                     std::vector<GatePtr> *used = nullptr) {
    Scope scope;
    for (std::size_t i = 0; i < param_names.size(); ++i) {
        scope.values[param_names[i]] = scalar(ps[i]);
    }
    std::map<WireLabel, WireType> typed;
    for (std::size_t i = 0; i < args.size(); ++i) {
        scope.wires.emplace(args[i].name, wires[i]);
        if (args[i].type) {
            typed.emplace(wires[i], *args[i].type);
        }
    }
    Cursor c(toks, begin, end);
    std::vector<GateInstruction> out;
    while (!c.at_end()) {
        if (c.is("reset") || c.is("measure") || c.is("measure_n") || c.is("measure_x") || c.is("if") ||
            c.is("for") || c.is("while")) {
            c.fail("unsupported construct '" + c.peek().text + "' inside a gate body");
        }
        const auto call = parse_call(c, scope);
        auto it = table->find(call.name.text);
        if (it == table->end()) {
            Cursor::fail_at(call.name, "unknown gate '" + call.name.text + "'");
        }
        std::vector<WireLabel> ws;
        for (const auto &op : call.operands) {
            auto w = scope.wire(op.name);
            if (!w || op.index) {
                Cursor::fail_at(op.at, "'" + op.name + "' is not an argument of this gate");
            }
            ws.push_back(*w);
        }
        auto instrs = build_call(call, it->second, ws);
        check_call_types(call, instrs, [&](const WireLabel &w) -> std::optional<WireType> {
            auto t = typed.find(w);
            return t == typed.end() ? std::nullopt : std::optional<WireType>(t->second);
        });
        if (used && !is_builtin(it->second) &&
            std::find(used->begin(), used->end(), it->second) == used->end()) {
            used->push_back(it->second);
        }
        for (auto &g : instrs) {
            out.push_back(std::move(g));
        }
    }
    return out;
}

struct Register {
    std::string name;
    WireType type;
    std::size_t size = 1;
    bool scalar = false;
    Token at;

    WireLabel wire(std::size_t i) const {
        return WireLabel(scalar ? name : name + std::to_string(i));
    }
};

struct Subroutine {
    std::vector<std::pair<std::optional<WireType>, std::string>> params;  // nullopt: classical
    std::size_t body_begin = 0;
    std::size_t body_end = 0;
};

class Parser {
   public:
    explicit Parser(std::string_view src) : src_(src), toks_(std::make_shared<const std::vector<Token>>(lex(src))) {
    }

    QasmProgram parse() {
        Cursor c(toks_);
        if (c.is("OPENQASM")) {
            const Token &t = c.next();
            const Token &v = c.peek();
            if (v.kind != Token::Kind::Number || std::floor(v.number) != 3.0) {
                Cursor::fail_at(t, "unsupported OpenQASM version " + Cursor::describe(v) + " (expected 3.0)");
            }
            c.next();
            c.expect(";");
        }
        Scope global;
        while (!c.at_end()) {
            statement(c, global, true);
        }
        QasmProgram prog;
        std::vector<MeasurementSpec> ms;
        if (!schema_.empty()) {
            ms.push_back(MeasurementSpec::sample(schema_));
        }
        try {
            prog.tape = build_tape(prep_, ops_, ms);
        } catch (const ConstructionError &e) {
            throw ParseError(e.what(), 1, 1);
        }
        prog.env = env_;
        prog.gates = user_gates_;
        prog.warnings = warnings_;
        return prog;
    }

   private:
    void statement(Cursor &c, Scope &scope, bool top) {
        const Token &t = c.peek();
        if (t.kind == Token::Kind::String) {
            reject_pauli_string(t);
        }
        if (t.kind != Token::Kind::Ident) {
            c.fail("expected a statement, found " + Cursor::describe(t));
        }
        static const std::set<std::string> unsupported{
            "if",    "else",  "for",   "while",  "switch", "case",   "default",   "break",    "continue",
            "return", "end",  "box",   "delay",  "input",  "output", "extern",    "let",      "duration",
            "stretch", "durationof", "gphase", "barrier_all", "array", "complex", "OPENQASM"};
        const std::string &kw = t.text;
        if (unsupported.count(kw)) {
            c.fail("unsupported construct '" + kw + "'");
        }
        if (kw == "include") {
            return include(c, top);
        }
        if (kw == "qubit" || kw == "qumode") {
            return declare_register(c, top);
        }
        if (kw == "gate" || kw == "opaque") {
            if (!top) {
                c.fail("gate definitions are only allowed at the top level");
            }
            return kw == "gate" ? define_gate(c) : define_opaque(c);
        }
        if (kw == "def") {
            if (!top) {
                c.fail("nested subroutine definitions are not supported");
            }
            return define_subroutine(c);
        }
        if (kw == "defcal" || kw == "cal") {
            const Token at = c.next();
            while (!c.is("{")) {
                if (c.at_end()) {
                    c.fail("unterminated " + kw + " block");
                }
                c.next();
            }
            c.skip_braces();
            warnings_.push_back("line " + std::to_string(at.line) + ": " + kw + " block skipped");
            return;
        }
        if (kw == "pragma") {
            return pragma(c);
        }
        if (kw == "barrier") {
            while (!c.accept(";")) {
                if (c.at_end()) {
                    c.fail("expected ';'");
                }
                c.next();
            }
            return;
        }
        if (kw == "reset") {
            c.next();
            const auto op = parse_operand(c, scope);
            c.expect(";");
            for (const auto &w : resolve(op, scope)) {
                reset(w, op.at);
            }
            return;
        }
        if (kw == "measure" || kw == "measure_n" || kw == "measure_x") {
            measure_expr(c, scope);
            if (c.accept("->")) {
                parse_operand(c, scope);
            }
            c.expect(";");
            return;
        }
        if (kw == "bit" || kw == "uint" || kw == "int" || kw == "float" || kw == "angle" || kw == "bool" ||
            kw == "const") {
            return classical_declaration(c, scope);
        }
        // Assignment `c = measure ...;` / `c[0] = measure ...;` / `x = expr;`.
        {
            std::size_t k = 1;
            if (c.is("[", 1)) {
                int depth = 0;
                for (;; ++k) {
                    const auto &p = c.peek(k);
                    if (p.kind == Token::Kind::End) {
                        break;
                    }
                    if (p.text == "[") {
                        ++depth;
                    } else if (p.text == "]" && --depth == 0) {
                        ++k;
                        break;
                    }
                }
            }
            if (c.is("=", k)) {
                const Token name = c.next();
                c.seek(c.position() + k);
                if (c.is("measure") || c.is("measure_n") || c.is("measure_x")) {
                    measure_expr(c, scope);
                } else {
                    scope.values[name.text] = parse_expr(c, scope);
                }
                c.expect(";");
                return;
            }
        }
        if (auto it = subs_.find(kw); it != subs_.end() && c.is("(", 1)) {
            return call_subroutine(c, scope, it->second);
        }
        gate_call(c, scope);
    }

    void include(Cursor &c, bool top) {
        const Token at = c.next();
        if (!top) {
            Cursor::fail_at(at, "include is only allowed at the top level");
        }
        const Token &f = c.peek();
        if (f.kind != Token::Kind::String) {
            c.fail("expected a file name");
        }
        c.next();
        c.expect(";");
        if (f.text == "stdgates.inc") {
            for (const auto &[n, g] : gate_registry()) {
                if (g->cls == GateClass::Qubit && !g->qasm_name.empty()) {
                    visible_.emplace(g->qasm_name, g);
                }
            }
        } else if (f.text == "cvstdgates.inc") {
            for (const auto &[n, g] : gate_registry()) {
                if (g->cls != GateClass::Qubit && !g->qasm_name.empty()) {
                    visible_.emplace(g->qasm_name, g);
                }
            }
        } else {
            Cursor::fail_at(f, "cannot include \"" + f.text + "\" (only stdgates.inc and cvstdgates.inc are available)");
        }
    }

    void declare_register(Cursor &c, bool top) {
        const Token kw = c.next();
        if (!top) {
            Cursor::fail_at(kw, "register declarations are only allowed at the top level");
        }
        Register r;
        r.type = kw.text == "qubit" ? WireType::qubit() : WireType::qumode();
        r.scalar = true;
        if (c.accept("[")) {
            const Token &st = c.peek();
            const double n = parse_expr(c, Scope{});
            if (n < 1 || n != std::floor(n)) {
                Cursor::fail_at(st, "register size must be a positive integer");
            }
            r.size = static_cast<std::size_t>(n);
            r.scalar = false;
            c.expect("]");
        }
        r.at = c.peek();
        r.name = c.ident("a register name");
        c.expect(";");
        if (r.name.rfind("_anc", 0) == 0) {
            Cursor::fail_at(r.at, "register name '" + r.name + "' is reserved for ancillas");
        }
        if (registers_.count(r.name)) {
            Cursor::fail_at(r.at, "register '" + r.name + "' is already declared");
        }
        for (std::size_t i = 0; i < r.size; ++i) {
            const auto w = r.wire(i);
            if (env_.find(w)) {
                Cursor::fail_at(r.at, "wire name " + w.str() + " collides with an existing wire");
            }
            env_.set(w, r.type);
        }
        registers_.emplace(r.name, r);
    }

    std::vector<GateArg> gate_args(Cursor &c) {
        std::vector<GateArg> args;
        do {
            GateArg a;
            if (c.is("qubit") || c.is("qumode")) {
                a.type = c.next().text == "qubit" ? WireType::qubit() : WireType::qumode();
            }
            const Token &at = c.peek();
            a.name = c.ident("a gate argument");
            for (const auto &b : args) {
                if (b.name == a.name) {
                    Cursor::fail_at(at, "duplicate argument '" + a.name + "'");
                }
            }
            args.push_back(std::move(a));
        } while (c.accept(","));
        return args;
    }

    std::vector<std::string> gate_params(Cursor &c) {
        std::vector<std::string> ps;
        if (c.accept("(")) {
            if (!c.is(")")) {
                do {
                    ps.push_back(c.ident("a parameter name"));
                } while (c.accept(","));
            }
            c.expect(")");
        }
        return ps;
    }

    void define_opaque(Cursor &c) {
        c.next();
        const Token name = c.peek();
        c.ident("a gate name");
        const auto ps = gate_params(c);
        const auto args = gate_args(c);
        c.expect(";");
        GatePtr g;
        for (const auto &[n, d] : gate_registry()) {
            if (d->qasm_name == name.text) {
                g = d;
            }
        }
        if (!g) {
            Cursor::fail_at(name, "opaque gate '" + name.text + "' has no built-in implementation");
        }
        if (g->arity != args.size() || g->params.size() != ps.size()) {
            Cursor::fail_at(name, "opaque gate '" + name.text + "' does not match the built-in signature");
        }
        const auto sig = gate_signature(g);
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i].type && !sig[i].is_bottom() && *args[i].type != sig[i]) {
                Cursor::fail_at(name, "opaque gate '" + name.text + "' argument " + args[i].name + " must be a " +
                                          sig[i].str());
            }
        }
        visible_[name.text] = g;
    }

    void define_gate(Cursor &c) {
        const Token kw = c.next();
        const Token name = c.peek();
        c.ident("a gate name");
        if (visible_.count(name.text)) {
            Cursor::fail_at(name, "gate '" + name.text + "' is already defined");
        }
        const auto ps = gate_params(c);
        const auto args = gate_args(c);
        const std::size_t begin = c.position() + 1;
        const std::size_t after = c.skip_braces();
        const std::size_t end = after - 1;
        const std::size_t text_end = (*toks_)[end].offset + 1;

        auto table = std::make_shared<const GateTable>(visible_);
        auto toks = toks_;
        GateDef d;
        d.name = name.text;
        d.qasm_name = name.text;
        d.arity = args.size();
        for (const auto &p : ps) {
            d.params.push_back({p, ParamKind::Real});
        }
        const bool typed =
            std::all_of(args.begin(), args.end(), [](const GateArg &a) { return a.type.has_value(); });
        if (typed) {
            d.cls = GateClass::Hybrid;
            std::vector<WireType> ann;
            for (const auto &a : args) {
                ann.push_back(*a.type);
            }
            d.annotation = ann;
        }
        d.decomposition = [toks, begin, end, ps, args, table](const Params &params, const std::vector<WireLabel> &ws) {
            return expand_gate_body(toks, begin, end, ps, args, table, params, ws);
        };
        d.qasm_definition = std::string(src_.substr(kw.offset, text_end - kw.offset));
        d.description = "user gate";
        // Dry run: reports unknown gates and type errors at definition time.
        Params placeholder(ps.size(), Param(0.3));
        std::vector<WireLabel> ws;
        for (const auto &a : args) {
            ws.emplace_back("_arg_" + a.name);
        }
        std::vector<GatePtr> used;
        expand_gate_body(toks, begin, end, ps, args, table, placeholder, ws, &used);
        d.dependencies = std::move(used);
        auto g = std::make_shared<const GateDef>(std::move(d));
        visible_[name.text] = g;
        user_gates_.push_back(g);
    }

    void define_subroutine(Cursor &c) {
        c.next();
        const Token name = c.peek();
        c.ident("a subroutine name");
        if (subs_.count(name.text)) {
            Cursor::fail_at(name, "subroutine '" + name.text + "' is already defined");
        }
        Subroutine s;
        c.expect("(");
        if (!c.is(")")) {
            do {
                const Token &tt = c.peek();
                const std::string type = c.ident("a parameter type");
                if (c.accept("[")) {
                    if (type == "qubit" || type == "qumode") {
                        Cursor::fail_at(tt, "register parameters are not supported");
                    }
                    parse_expr(c, Scope{});
                    c.expect("]");
                }
                std::optional<WireType> q;
                if (type == "qubit") {
                    q = WireType::qubit();
                } else if (type == "qumode") {
                    q = WireType::qumode();
                }
                s.params.emplace_back(q, c.ident("a parameter name"));
            } while (c.accept(","));
        }
        c.expect(")");
        if (c.accept("->")) {
            c.fail("unsupported construct: subroutine return values");
        }
        s.body_begin = c.position() + 1;
        s.body_end = c.skip_braces() - 1;
        subs_.emplace(name.text, s);
    }

    void call_subroutine(Cursor &c, Scope &scope, const Subroutine &s) {
        const Token name = c.next();
        c.expect("(");
        Scope local;
        local.parent = &scope;
        std::size_t i = 0;
        if (!c.is(")")) {
            do {
                if (i >= s.params.size()) {
                    Cursor::fail_at(name, "too many arguments to " + name.text);
                }
                const auto &[qtype, pname] = s.params[i++];
                if (qtype) {
                    const auto op = parse_operand(c, scope);
                    const auto ws = resolve(op, scope);
                    if (ws.size() != 1) {
                        Cursor::fail_at(op.at, "expected a single wire");
                    }
                    const auto have = env_.get(ws[0]);
                    if (have != *qtype) {
                        type_fail(op.at, name.text + " expects a " + qtype->str() + ", but " +
                                                   ws[0].str() + " is a " + have.str());
                    }
                    local.wires.emplace(pname, ws[0]);
                } else {
                    local.values[pname] = parse_expr(c, scope);
                }
            } while (c.accept(","));
        }
        c.expect(")");
        c.expect(";");
        if (i != s.params.size()) {
            Cursor::fail_at(name, name.text + " expects " + std::to_string(s.params.size()) + " argument(s)");
        }
        if (++depth_ > 64) {
            Cursor::fail_at(name, "subroutine recursion is not supported");
        }
        Cursor body(toks_, s.body_begin, s.body_end);
        while (!body.at_end()) {
            statement(body, local, false);
        }
        --depth_;
    }

    void pragma(Cursor &c) {
        const Token at = c.next();
        std::vector<Token> line;
        while (!c.at_end() && c.peek().line == at.line) {
            line.push_back(c.next());
        }
        if (line.empty() || line[0].text != "hybc.prep") {
            return;
        }
        // hybc.prep <reg>[<i>] <level>
        if (line.size() < 3) {
            Cursor::fail_at(at, "malformed hybc.prep pragma");
        }
        std::string reg = line[1].text;
        std::optional<std::size_t> idx;
        std::size_t k = 2;
        if (line.size() >= 6 && line[2].text == "[" && line[4].text == "]") {
            idx = static_cast<std::size_t>(line[3].number);
            k = 5;
        }
        if (k >= line.size() || line[k].kind != Token::Kind::Number || line[k].number < 0 ||
            line[k].number != std::floor(line[k].number)) {
            Cursor::fail_at(at, "hybc.prep needs a non-negative integer level");
        }
        const auto ws = resolve(OperandSyntax{reg, idx, line[1]}, Scope{});
        for (const auto &w : ws) {
            reset(w, at);
            for (auto &p : prep_) {
                if (p.wire == w) {
                    p.level = static_cast<std::size_t>(line[k].number);
                }
            }
        }
    }

    void classical_declaration(Cursor &c, Scope &scope) {
        std::string type = c.next().text;
        if (type == "const") {
            type = c.ident("a type");
        }
        if (c.accept("[")) {
            parse_expr(c, scope);
            c.expect("]");
        }
        const std::string name = c.ident("a variable name");
        if (c.accept("=")) {
            if (c.is("measure") || c.is("measure_n") || c.is("measure_x")) {
                measure_expr(c, scope);
            } else {
                scope.values[name] = parse_expr(c, scope);
            }
        }
        c.expect(";");
    }

    void measure_expr(Cursor &c, const Scope &scope) {
        const Token kw = c.next();
        const auto op = parse_operand(c, scope);
        for (const auto &w : resolve(op, scope)) {
            const auto t = env_.get(w);
            Basis b = Basis::Discrete;
            if (kw.text == "measure") {
                if (t != WireType::qubit()) {
                    type_fail(op.at, "measure reads a qubit, but " + w.str() + " is a " + t.str() +
                                               " (use measure_n or measure_x)");
                }
            } else {
                if (t != WireType::qumode()) {
                    type_fail(op.at, kw.text + " reads a qumode, but " + w.str() + " is a " +
                                               t.str());
                }
                b = kw.text == "measure_x" ? Basis::Position : Basis::Discrete;
            }
            try {
                schema_.add(w, b);
            } catch (const BasisConflict &e) {
                Cursor::fail_at(op.at, e.what());
            }
            measured_.insert(w);
        }
    }

    void reset(const WireLabel &w, const Token &at) {
        if (touched_.count(w) || measured_.count(w)) {
            Cursor::fail_at(at, "unsupported construct: reset of " + w.str() + " after it was used");
        }
        for (const auto &p : prep_) {
            if (p.wire == w) {
                return;
            }
        }
        prep_.push_back({w, 0});
    }

    std::vector<WireLabel> resolve(const OperandSyntax &op, const Scope &scope) const {
        if (!op.index) {
            if (auto w = scope.wire(op.name)) {
                return {*w};
            }
        }
        auto it = registers_.find(op.name);
        if (it == registers_.end()) {
            Cursor::fail_at(op.at, "undeclared register '" + op.name + "'");
        }
        const auto &r = it->second;
        if (op.index) {
            if (r.scalar || *op.index >= r.size) {
                Cursor::fail_at(op.at, "index " + std::to_string(*op.index) + " out of range for register '" +
                                           op.name + "'");
            }
            return {r.wire(*op.index)};
        }
        std::vector<WireLabel> ws;
        for (std::size_t i = 0; i < r.size; ++i) {
            ws.push_back(r.wire(i));
        }
        return ws;
    }

    void gate_call(Cursor &c, const Scope &scope) {
        const auto call = parse_call(c, scope);
        auto it = visible_.find(call.name.text);
        if (it == visible_.end()) {
            std::string hint;
            for (const auto &[n, g] : gate_registry()) {
                if (g->qasm_name == call.name.text) {
                    hint = g->cls == GateClass::Qubit ? " (missing include \"stdgates.inc\"?)"
                                                      : " (missing include \"cvstdgates.inc\"?)";
                }
            }
            Cursor::fail_at(call.name, "unknown gate '" + call.name.text + "'" + hint);
        }
        // Broadcast over whole registers of equal size.
        std::vector<std::vector<WireLabel>> per;
        std::size_t n = 1;
        for (const auto &op : call.operands) {
            per.push_back(resolve(op, scope));
            if (per.back().size() > 1) {
                if (n > 1 && per.back().size() != n) {
                    Cursor::fail_at(op.at, "register sizes differ in broadcast");
                }
                n = per.back().size();
            }
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<WireLabel> ws;
            for (const auto &p : per) {
                ws.push_back(p.size() == 1 ? p[0] : p[k]);
            }
            auto instrs = build_call(call, it->second, ws);
            check_call_types(call, instrs, [&](const WireLabel &w) { return env_.find(w); });
            for (auto &g : instrs) {
                for (const auto &w : g.wires) {
                    if (measured_.count(w)) {
                        Cursor::fail_at(call.name, "unsupported construct: gate on " + w.str() + " after measurement");
                    }
                    touched_.insert(w);
                }
                ops_.push_back(std::move(g));
            }
        }
    }

    std::string_view src_;
    std::shared_ptr<const std::vector<Token>> toks_;
    GateTable visible_;
    std::vector<GatePtr> user_gates_;
    std::map<std::string, Register> registers_;
    std::map<std::string, Subroutine> subs_;
    TypeEnv env_;
    std::vector<PrepEntry> prep_;
    std::vector<GateInstruction> ops_;
    BasisSchema schema_;
    std::set<WireLabel> touched_;
    std::set<WireLabel> measured_;
    std::vector<std::string> warnings_;
    int depth_ = 0;
};

inline std::string fixed(double v, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", precision, v);
    return buf;
}

inline std::string param_text(const Param &p, int precision) {
    if (const auto *d = std::get_if<double>(&p)) {
        return fixed(*d, precision);
    }
    std::string s = "{";
    const auto &v = std::get<std::vector<double>>(p);
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? ", " : "") + fixed(v[i], precision);
    }
    return s + "}";
}

/// Rewrites an innermost CondZ into the named conditioned gate, folding
/// Adjoint/Pow first when they sit inside it. Throws if no named form exists.
inline GateInstruction promote_condz(GateInstruction g) {
    if (!detail::has_condz(g)) {
        return g;
    }
    if (!std::holds_alternative<CondZMod>(g.modifiers.front())) {
        g = fold_modifiers(std::move(g));
    }
    if (!std::holds_alternative<CondZMod>(g.modifiers.front())) {
        throw UnsupportedError("no QASM form for " + instruction_str(g) + "; decompose it first");
    }
    const std::string base = g.gate->name;
    for (const auto &pair : detail::conditioned_pairs()) {
        if (pair.base == base) {
            g.gate = lookup(pair.named);
            if (!g.params.empty()) {
                g.params[0] = scaled(g.params[0], 1.0 / pair.param_factor);
            }
            g.modifiers.erase(g.modifiers.begin());
            if (detail::has_condz(g)) {
                throw UnsupportedError("no QASM form for nested CondZ in " + instruction_str(g));
            }
            return g;
        }
    }
    if (base == "F") {
        g.gate = lookup("CP");
        g.modifiers.erase(g.modifiers.begin());
        return g;
    }
    throw UnsupportedError("no QASM form for CondZ of " + base + "; decompose it first");
}

/// Ops plus basis rotations for the observables, as emitted.
inline std::vector<GateInstruction> emitted_ops(const QuantumTape &tape) {
    std::vector<GateInstruction> ops;
    for (const auto &g : tape.ops) {
        ops.push_back(promote_condz(g));
    }
    for (const auto &m : tape.measurements) {
        if (m.obs) {
            for (auto &g : diagonalizing_gates(*m.obs)) {
                ops.push_back(std::move(g));
            }
        }
    }
    return ops;
}

/// QASM register slot of every typed wire, in env order.
inline std::map<WireLabel, std::string> register_slots(const TypeEnv &env, std::size_t *nq = nullptr,
                                                      std::size_t *nm = nullptr) {
    std::map<WireLabel, std::string> slot;
    std::size_t q = 0;
    std::size_t m = 0;
    for (const auto &[w, t] : env.entries()) {
        if (t.is_bottom()) {
            throw SignatureError("wire " + w.str() + " has no resolved type");
        }
        slot[w] = t == WireType::qubit() ? "q[" + std::to_string(q++) + "]" : "m[" + std::to_string(m++) + "]";
    }
    if (nq) {
        *nq = q;
    }
    if (nm) {
        *nm = m;
    }
    return slot;
}

/// Label the parser gives to a slot: q[3] -> q3.
inline WireLabel parsed_label(const std::string &slot) {
    std::string s;
    for (char ch : slot) {
        if (ch != '[' && ch != ']') {
            s += ch;
        }
    }
    return WireLabel(s);
}

inline void collect_user_gates(const GatePtr &g, std::vector<GatePtr> &out) {
    if (std::find(out.begin(), out.end(), g) != out.end()) {
        return;
    }
    for (const auto &d : g->dependencies) {
        collect_user_gates(d, out);
    }
    out.push_back(g);
}

}  // namespace qasm_detail

/// Deterministic OpenQASM 3.0 text. Parameters print with `precision`
/// decimals; an innermost CondZ prints as the named conditioned gate.
inline std::string emit_qasm(const QuantumTape &tape, const TypeEnv &env, int precision = 4) {
    using namespace qasm_detail;
    for (const auto &w : tape.wires()) {
        if (!env.find(w) || env.get(w).is_bottom()) {
            throw SignatureError("wire " + w.str() + " has no resolved type");
        }
    }
    std::size_t nq = 0;
    std::size_t nm = 0;
    const auto slot = register_slots(env, &nq, &nm);
    const auto ops = emitted_ops(tape);

    std::vector<GatePtr> user;
    for (const auto &g : ops) {
        if (is_builtin(g.gate)) {
            continue;
        }
        if (g.gate->qasm_definition.empty()) {
            throw UnsupportedError("gate " + g.gate->name + " has no QASM definition; decompose it first");
        }
        collect_user_gates(g.gate, user);
    }

    std::string out = "OPENQASM 3.0;\ninclude \"stdgates.inc\";\ninclude \"cvstdgates.inc\";\n";
    for (const auto &g : user) {
        out += "\n" + g->qasm_definition + "\n";
    }
    out += "\n";
    if (nq) {
        out += "qubit[" + std::to_string(nq) + "] q;\n";
    }
    if (nm) {
        out += "qumode[" + std::to_string(nm) + "] m;\n";
    }
    std::string body;
    for (const auto &p : tape.prep) {
        body += "reset " + slot.at(p.wire) + ";\n";
        if (p.level) {
            body += "pragma hybc.prep " + slot.at(p.wire) + " " + std::to_string(p.level) + "\n";
        }
    }
    for (const auto &g : ops) {
        std::string line;
        for (auto it = g.modifiers.rbegin(); it != g.modifiers.rend(); ++it) {
            if (std::holds_alternative<CtrlMod>(*it)) {
                line += "ctrl @ ";
            } else if (std::holds_alternative<AdjointMod>(*it)) {
                line += "inv @ ";
            } else if (const auto *p = std::get_if<PowMod>(&*it)) {
                line += "pow(" + p->exponent.str() + ") @ ";
            }
        }
        line += g.gate->qasm_name;
        if (!g.params.empty()) {
            line += "(";
            for (std::size_t i = 0; i < g.params.size(); ++i) {
                line += (i ? ", " : "") + param_text(g.params[i], precision);
            }
            line += ")";
        }
        for (std::size_t i = 0; i < g.wires.size(); ++i) {
            line += (i ? ", " : " ") + slot.at(g.wires[i]);
        }
        body += line + ";\n";
    }
    const auto schema = infer_basis_schema(tape.measurements);
    std::size_t k = 0;
    for (const auto &[w, b] : schema.entries()) {
        const std::string c = "c" + std::to_string(k++);
        if (b == Basis::Position) {
            body += "float " + c + " = measure_x " + slot.at(w) + ";\n";
        } else if (env.get(w) == WireType::qumode()) {
            body += "uint " + c + " = measure_n " + slot.at(w) + ";\n";
        } else {
            body += "bit " + c + " = measure " + slot.at(w) + ";\n";
        }
    }
    if (!body.empty()) {
        out += "\n" + body;
    }
    return out;
}

inline QasmProgram parse_qasm(std::string_view text) {
    return qasm_detail::Parser(text).parse();
}

/// Parses `cvstdgates.inc` (or any file of gate definitions) and returns
/// its `gate` definitions in source order.
inline std::vector<GatePtr> parse_gate_library(std::string_view text) {
    return parse_qasm(text).gates;
}

/// parse(emit(tape)) matches tape: same gates and modifiers, parameters
/// within 10^-precision, same preparation and TypeEnv. On mismatch `why`
/// says where.
inline bool roundtrip(const QuantumTape &tape, const TypeEnv &env, int precision = 4, std::string *why = nullptr) {
    using namespace qasm_detail;
    auto fail = [&](std::string m) {
        if (why) {
            *why = std::move(m);
        }
        return false;
    };
    const auto text = emit_qasm(tape, env, precision);
    QasmProgram back;
    try {
        back = parse_qasm(text);
    } catch (const Error &e) {
        return fail(std::string("re-parse failed: ") + e.what());
    }
    const auto slot = register_slots(env);
    auto rel = [&](const WireLabel &w) { return parsed_label(slot.at(w)); };

    // Registers group wires by type, so compare bindings, not order.
    std::map<WireLabel, WireType> expect_env;
    for (const auto &[w, t] : env.entries()) {
        expect_env.emplace(rel(w), t);
    }
    const std::map<WireLabel, WireType> got_env(back.env.entries().begin(), back.env.entries().end());
    if (expect_env != got_env) {
        return fail("type environments differ");
    }
    if (back.tape.prep.size() != tape.prep.size()) {
        return fail("preparation differs");
    }
    for (std::size_t i = 0; i < tape.prep.size(); ++i) {
        if (!(back.tape.prep[i] == PrepEntry{rel(tape.prep[i].wire), tape.prep[i].level})) {
            return fail("preparation differs at " + tape.prep[i].wire.str());
        }
    }
    const auto ops = emitted_ops(tape);
    if (ops.size() != back.tape.ops.size()) {
        return fail("op count " + std::to_string(ops.size()) + " vs " + std::to_string(back.tape.ops.size()));
    }
    const double tol = std::pow(10.0, -precision);
    for (std::size_t i = 0; i < ops.size(); ++i) {
        const auto &a = ops[i];
        const auto &b = back.tape.ops[i];
        const std::string at = "op #" + std::to_string(i) + " (" + instruction_str(a) + ")";
        if (a.gate->qasm_name != b.gate->qasm_name || a.params.size() != b.params.size() ||
            a.wires.size() != b.wires.size() || a.modifiers.size() != b.modifiers.size()) {
            return fail(at + " differs from " + instruction_str(b));
        }
        for (std::size_t j = 0; j < a.wires.size(); ++j) {
            if (!(rel(a.wires[j]) == b.wires[j])) {
                return fail(at + " wires differ");
            }
        }
        for (std::size_t j = 0; j < a.modifiers.size(); ++j) {
            const auto &ma = a.modifiers[j];
            const auto &mb = b.modifiers[j];
            if (ma.index() != mb.index()) {
                return fail(at + " modifiers differ");
            }
            if (const auto *p = std::get_if<PowMod>(&ma); p && !(p->exponent == std::get<PowMod>(mb).exponent)) {
                return fail(at + " exponents differ");
            }
        }
        for (std::size_t j = 0; j < a.params.size(); ++j) {
            const auto &pa = a.params[j];
            const auto &pb = b.params[j];
            if (pa.index() != pb.index()) {
                return fail(at + " parameter kinds differ");
            }
            if (const auto *d = std::get_if<double>(&pa)) {
                if (std::abs(*d - std::get<double>(pb)) > tol) {
                    return fail(at + " parameter " + std::to_string(j) + " differs");
                }
            } else {
                const auto &va = std::get<std::vector<double>>(pa);
                const auto &vb = std::get<std::vector<double>>(pb);
                if (va.size() != vb.size()) {
                    return fail(at + " vector parameter lengths differ");
                }
                for (std::size_t k = 0; k < va.size(); ++k) {
                    if (std::abs(va[k] - vb[k]) > tol) {
                        return fail(at + " vector parameter differs");
                    }
                }
            }
        }
    }
    BasisSchema expect_schema;
    const auto schema = infer_basis_schema(tape.measurements);
    for (const auto &[w, b] : schema.entries()) {
        expect_schema.add(rel(w), b);
    }
    const BasisSchema got = back.tape.measurements.empty() ? BasisSchema{} : back.tape.measurements[0].schema;
    if (!(expect_schema == got)) {
        return fail("measured wires differ");
    }
    return true;
}

}  // namespace hybc
