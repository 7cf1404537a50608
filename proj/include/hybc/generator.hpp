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

/// Symbolic gate generators. An exponential-form gate is U = exp(-i H) with H
/// a Hermitian expression over ladder, Pauli and projector primitives, each
/// tagged with the wire slot it acts on. Nothing here is a matrix until
/// `to_sparse` is asked for one at a concrete cutoff.

#pragma once

#include <complex>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hybc/circuit.hpp"
#include "hybc/linalg.hpp"

namespace hybc {

enum class Prim : std::uint8_t {
    Identity,
    A,           // annihilation
    Adag,        // creation
    N,           // number operator
    X,           // quadrature (a + a^dagger)/sqrt(2)
    FockProj,    // |k><k|
    PauliX,
    PauliY,
    PauliZ,
    SigmaMinus,  // |0><1|
    SigmaPlus,   // |1><0|
};

/// Wire kind demanded by a primitive, or Bottom for the identity.
inline WireType prim_type(Prim p) {
    switch (p) {
        case Prim::Identity:
            return WireType::bottom();
        case Prim::A:
        case Prim::Adag:
        case Prim::N:
        case Prim::X:
        case Prim::FockProj:
            return WireType::qumode();
        default:
            return WireType::qubit();
    }
}

struct GeneratorExpr {
    enum class Kind : std::uint8_t { Prim, Scalar, Sum, Product, Dagger };

    Kind kind = Kind::Scalar;
    Prim prim = Prim::Identity;
    std::size_t slot = 0;
    std::size_t level = 0;  // FockProj only
    cd value{0.0, 0.0};     // Scalar only
    std::vector<GeneratorExpr> children;

    static GeneratorExpr primitive(Prim p, std::size_t slot, std::size_t level = 0) {
        GeneratorExpr e;
        e.kind = Kind::Prim;
        e.prim = p;
        e.slot = slot;
        e.level = level;
        return e;
    }
    static GeneratorExpr constant(cd v) {
        GeneratorExpr e;
        e.kind = Kind::Scalar;
        e.value = v;
        return e;
    }
};

namespace gen {

inline GeneratorExpr a(std::size_t s) {
    return GeneratorExpr::primitive(Prim::A, s);
}
inline GeneratorExpr adag(std::size_t s) {
    return GeneratorExpr::primitive(Prim::Adag, s);
}
inline GeneratorExpr n(std::size_t s) {
    return GeneratorExpr::primitive(Prim::N, s);
}
inline GeneratorExpr x(std::size_t s) {
    return GeneratorExpr::primitive(Prim::X, s);
}
inline GeneratorExpr proj(std::size_t s, std::size_t k) {
    return GeneratorExpr::primitive(Prim::FockProj, s, k);
}
inline GeneratorExpr id(std::size_t s) {
    return GeneratorExpr::primitive(Prim::Identity, s);
}
inline GeneratorExpr X(std::size_t s) {
    return GeneratorExpr::primitive(Prim::PauliX, s);
}
inline GeneratorExpr Y(std::size_t s) {
    return GeneratorExpr::primitive(Prim::PauliY, s);
}
inline GeneratorExpr Z(std::size_t s) {
    return GeneratorExpr::primitive(Prim::PauliZ, s);
}
inline GeneratorExpr sigma_minus(std::size_t s) {
    return GeneratorExpr::primitive(Prim::SigmaMinus, s);
}
inline GeneratorExpr sigma_plus(std::size_t s) {
    return GeneratorExpr::primitive(Prim::SigmaPlus, s);
}
inline GeneratorExpr scalar(cd v) {
    return GeneratorExpr::constant(v);
}

inline GeneratorExpr sum(std::vector<GeneratorExpr> terms) {
    GeneratorExpr e;
    e.kind = GeneratorExpr::Kind::Sum;
    e.children = std::move(terms);
    return e;
}
inline GeneratorExpr product(std::vector<GeneratorExpr> factors) {
    GeneratorExpr e;
    e.kind = GeneratorExpr::Kind::Product;
    e.children = std::move(factors);
    return e;
}
inline GeneratorExpr dagger(GeneratorExpr inner) {
    GeneratorExpr e;
    e.kind = GeneratorExpr::Kind::Dagger;
    e.children.push_back(std::move(inner));
    return e;
}

/// |1><1| on a qubit slot, written as (I - Z)/2.
inline GeneratorExpr qubit_one(std::size_t s) {
    return product({scalar(0.5), sum({id(s), product({scalar(-1.0), Z(s)})})});
}

}  // namespace gen

inline GeneratorExpr operator+(GeneratorExpr l, GeneratorExpr r) {
    return gen::sum({std::move(l), std::move(r)});
}
inline GeneratorExpr operator-(GeneratorExpr l, GeneratorExpr r) {
    return gen::sum({std::move(l), gen::product({gen::scalar(-1.0), std::move(r)})});
}
inline GeneratorExpr operator*(GeneratorExpr l, GeneratorExpr r) {
    return gen::product({std::move(l), std::move(r)});
}
inline GeneratorExpr operator*(cd c, GeneratorExpr r) {
    return gen::product({gen::scalar(c), std::move(r)});
}
inline GeneratorExpr operator*(double c, GeneratorExpr r) {
    return gen::product({gen::scalar(c), std::move(r)});
}

/// Adds `k` to every slot index (used when a modifier prepends a wire).
inline GeneratorExpr shift_slots(const GeneratorExpr &e, std::size_t k) {
    GeneratorExpr out = e;
    if (out.kind == GeneratorExpr::Kind::Prim) {
        out.slot += k;
    }
    for (auto &c : out.children) {
        c = shift_slots(c, k);
    }
    return out;
}

/// Slot -> wire kind implied by the primitives used; Identity-only slots are
/// reported as Bottom. Conflicting uses of one slot throw.
inline void collect_slot_types(const GeneratorExpr &e, std::map<std::size_t, WireType> &out) {
    if (e.kind == GeneratorExpr::Kind::Prim) {
        auto t = prim_type(e.prim);
        auto [it, inserted] = out.emplace(e.slot, t);
        if (!inserted && it->second != t) {
            if (it->second.is_bottom()) {
                it->second = t;
            } else if (!t.is_bottom()) {
                throw SignatureError("generator uses slot " + std::to_string(e.slot) + " as both " +
                                     it->second.str() + " and " + t.str());
            }
        }
    }
    for (const auto &c : e.children) {
        collect_slot_types(c, out);
    }
}

inline std::set<std::size_t> slots_of(const GeneratorExpr &e) {
    std::set<std::size_t> s;
    if (e.kind == GeneratorExpr::Kind::Prim) {
        s.insert(e.slot);
    }
    for (const auto &c : e.children) {
        auto cs = slots_of(c);
        s.insert(cs.begin(), cs.end());
    }
    return s;
}

namespace detail {

inline Matrix prim_matrix(Prim p, std::size_t level, std::size_t dim) {
    switch (p) {
        case Prim::Identity:
            return Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        case Prim::A:
            return linalg::annihilation(dim);
        case Prim::Adag:
            return linalg::annihilation(dim).adjoint();
        case Prim::N:
            return linalg::number(dim);
        case Prim::X:
            return linalg::position(dim);
        case Prim::FockProj: {
            Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            if (level < dim) {
                m(static_cast<Eigen::Index>(level), static_cast<Eigen::Index>(level)) = 1.0;
            }
            return m;
        }
        default:
            break;
    }
    if (dim != 2) {
        throw SimulationError("Pauli primitive applied to a wire of dimension " + std::to_string(dim));
    }
    switch (p) {
        case Prim::PauliX:
            return linalg::pauli_x();
        case Prim::PauliY:
            return linalg::pauli_y();
        case Prim::PauliZ:
            return linalg::pauli_z();
        case Prim::SigmaMinus: {
            Matrix m = Matrix::Zero(2, 2);
            m(0, 1) = 1.0;
            return m;
        }
        case Prim::SigmaPlus: {
            Matrix m = Matrix::Zero(2, 2);
            m(1, 0) = 1.0;
            return m;
        }
        default:
            throw SimulationError("unknown primitive");
    }
}

inline SparseMatrix sparse_identity(std::size_t n) {
    SparseMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    m.setIdentity();
    return m;
}

inline SparseMatrix sparse_kron(const SparseMatrix &a, const SparseMatrix &b) {
    std::vector<Eigen::Triplet<cd>> t;
    for (Eigen::Index ka = 0; ka < a.outerSize(); ++ka) {
        for (SparseMatrix::InnerIterator ia(a, ka); ia; ++ia) {
            for (Eigen::Index kb = 0; kb < b.outerSize(); ++kb) {
                for (SparseMatrix::InnerIterator ib(b, kb); ib; ++ib) {
                    t.emplace_back(ia.row() * b.rows() + ib.row(), ia.col() * b.cols() + ib.col(),
                                   ia.value() * ib.value());
                }
            }
        }
    }
    SparseMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    out.setFromTriplets(t.begin(), t.end());
    return out;
}

}  // namespace detail

/// Matrix of a single-slot expression (all primitives on the same slot).
inline Matrix local_matrix(const GeneratorExpr &e, std::size_t dim) {
    using K = GeneratorExpr::Kind;
    switch (e.kind) {
        case K::Prim:
            return detail::prim_matrix(e.prim, e.level, dim);
        case K::Scalar:
            return e.value * Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
        case K::Sum: {
            Matrix m = Matrix::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            for (const auto &c : e.children) {
                m += local_matrix(c, dim);
            }
            return m;
        }
        case K::Product: {
            Matrix m = Matrix::Identity(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
            for (const auto &c : e.children) {
                m = (m * local_matrix(c, dim)).eval();
            }
            return m;
        }
        case K::Dagger:
            return local_matrix(e.children.front(), dim).adjoint();
    }
    return {};
}

/// Truncated matrix of `e` on the tensor product of `dims` (slot 0 most
/// significant). Products are taken between truncated factors.
inline SparseMatrix to_sparse(const GeneratorExpr &e, std::span<const std::size_t> dims) {
    using K = GeneratorExpr::Kind;
    const std::size_t total = linalg::product(dims);
    switch (e.kind) {
        case K::Prim: {
            if (e.slot >= dims.size()) {
                throw SimulationError("generator slot " + std::to_string(e.slot) + " out of range");
            }
            SparseMatrix left = detail::sparse_identity(linalg::product(dims.subspan(0, e.slot)));
            SparseMatrix mid = detail::prim_matrix(e.prim, e.level, dims[e.slot]).sparseView();
            SparseMatrix right = detail::sparse_identity(linalg::product(dims.subspan(e.slot + 1)));
            return detail::sparse_kron(detail::sparse_kron(left, mid), right);
        }
        case K::Scalar: {
            SparseMatrix m = detail::sparse_identity(total);
            return m * e.value;
        }
        case K::Sum: {
            SparseMatrix m(static_cast<Eigen::Index>(total), static_cast<Eigen::Index>(total));
            for (const auto &c : e.children) {
                m += to_sparse(c, dims);
            }
            return m;
        }
        case K::Product: {
            SparseMatrix m = detail::sparse_identity(total);
            for (const auto &c : e.children) {
                m = (m * to_sparse(c, dims)).pruned();
            }
            return m;
        }
        case K::Dagger:
            return SparseMatrix(to_sparse(e.children.front(), dims).adjoint());
    }
    return {};
}

/// c * prod_s F_s with every F_s confined to one slot.
struct SeparableForm {
    cd coefficient{1.0, 0.0};
    std::map<std::size_t, GeneratorExpr> factors;
};

inline std::optional<SeparableForm> separate(const GeneratorExpr &e) {
    using K = GeneratorExpr::Kind;
    switch (e.kind) {
        case K::Prim: {
            SeparableForm f;
            f.factors.emplace(e.slot, e);
            return f;
        }
        case K::Scalar: {
            SeparableForm f;
            f.coefficient = e.value;
            return f;
        }
        case K::Product: {
            SeparableForm f;
            for (const auto &c : e.children) {
                auto cf = separate(c);
                if (!cf) {
                    return std::nullopt;
                }
                f.coefficient *= cf->coefficient;
                for (auto &[slot, factor] : cf->factors) {
                    auto it = f.factors.find(slot);
                    if (it == f.factors.end()) {
                        f.factors.emplace(slot, factor);
                    } else {
                        it->second = it->second * factor;
                    }
                }
            }
            return f;
        }
        case K::Sum: {
            auto s = slots_of(e);
            if (s.size() > 1) {
                return std::nullopt;
            }
            SeparableForm f;
            if (s.empty()) {
                // Pure scalar sum.
                cd total = 0.0;
                for (const auto &c : e.children) {
                    auto cf = separate(c);
                    total += cf->coefficient;
                }
                f.coefficient = total;
                return f;
            }
            f.factors.emplace(*s.begin(), e);
            return f;
        }
        case K::Dagger: {
            auto inner = separate(e.children.front());
            if (!inner) {
                return std::nullopt;
            }
            inner->coefficient = std::conj(inner->coefficient);
            for (auto &[slot, factor] : inner->factors) {
                factor = gen::dagger(factor);
            }
            return inner;
        }
    }
    return std::nullopt;
}

/// exp(-i H) for a Hermitian generator H at the given slot dimensions.
/// Separable generators are exponentiated factor by factor; everything else
/// goes through the block-diagonal eigendecomposition.
inline Matrix exponentiate(const GeneratorExpr &h, std::span<const std::size_t> dims) {
    if (auto sep = separate(h)) {
        std::vector<Matrix> factors;
        cd c = sep->coefficient;
        bool ok = true;
        for (std::size_t s = 0; s < dims.size() && ok; ++s) {
            auto it = sep->factors.find(s);
            if (it == sep->factors.end()) {
                factors.push_back(Matrix::Identity(static_cast<Eigen::Index>(dims[s]), static_cast<Eigen::Index>(dims[s])));
                continue;
            }
            Matrix f = local_matrix(it->second, dims[s]);
            const double scale = std::max(1.0, linalg::max_abs(f));
            if (linalg::max_abs(f - f.adjoint()) <= 1e-12 * scale) {
                factors.push_back(f);
            } else if (linalg::max_abs(f + f.adjoint()) <= 1e-12 * scale) {
                // F = -i (i F) with i F Hermitian.
                factors.push_back(cd(0, 1) * f);
                c *= cd(0, -1);
            } else {
                ok = false;
            }
        }
        if (ok && std::abs(c.imag()) <= 1e-12 * std::max(1.0, std::abs(c))) {
            if (dims.size() == 1) {
                return linalg::expm_hermitian(c.real() * factors.front());
            }
            return linalg::expm_separable(c.real(), factors);
        }
    }
    return linalg::expm_hermitian_blocks(to_sparse(h, dims));
}

}  // namespace hybc
