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

#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "hybc/errors.hpp"

namespace hybc {

using cd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using SparseMatrix = Eigen::SparseMatrix<cd>;

inline constexpr double kPi = 3.14159265358979323846;

namespace linalg {

inline std::size_t product(std::span<const std::size_t> dims) {
    return std::accumulate(dims.begin(), dims.end(), std::size_t{1}, std::multiplies<>());
}

/// Row-major strides: the first factor is the most significant digit.
inline std::vector<std::size_t> strides(std::span<const std::size_t> dims) {
    std::vector<std::size_t> s(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        s[i - 1] = s[i] * dims[i];
    }
    return s;
}

inline Matrix annihilation(std::size_t cutoff) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(cutoff), static_cast<Eigen::Index>(cutoff));
    for (std::size_t n = 1; n < cutoff; ++n) {
        m(static_cast<Eigen::Index>(n - 1), static_cast<Eigen::Index>(n)) = std::sqrt(static_cast<double>(n));
    }
    return m;
}

inline Matrix number(std::size_t cutoff) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(cutoff), static_cast<Eigen::Index>(cutoff));
    for (std::size_t n = 0; n < cutoff; ++n) {
        m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n)) = static_cast<double>(n);
    }
    return m;
}

/// x = (a + a^dagger) / sqrt(2).
inline Matrix position(std::size_t cutoff) {
    Matrix a = annihilation(cutoff);
    return (a + a.adjoint()) / std::sqrt(2.0);
}

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}
inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0, cd(0, -1), cd(0, 1), 0;
    return m;
}
inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

inline Matrix kron(const Matrix &a, const Matrix &b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

/// Applies a k-wire operator `op` to `state`, where `positions[i]` is the
/// tensor factor of the state that the operator's i-th factor acts on.
/// Index arithmetic only; the full-space matrix is never formed.
inline void apply_local(const Matrix &op, std::span<const std::size_t> positions, std::span<const std::size_t> dims,
                        Eigen::Ref<Vector> state) {
    const auto st = strides(dims);
    std::vector<std::size_t> local_dims;
    for (auto p : positions) {
        local_dims.push_back(dims[p]);
    }
    const std::size_t local = product(local_dims);
    if (static_cast<std::size_t>(op.rows()) != local) {
        throw SimulationError("operator dimension does not match the wires it acts on");
    }
    // Offsets of every local basis state relative to the outer base index.
    std::vector<std::size_t> offsets(local, 0);
    const auto lst = strides(local_dims);
    for (std::size_t l = 0; l < local; ++l) {
        std::size_t off = 0;
        for (std::size_t k = 0; k < positions.size(); ++k) {
            off += ((l / lst[k]) % local_dims[k]) * st[positions[k]];
        }
        offsets[l] = off;
    }
    std::vector<bool> is_local(dims.size(), false);
    for (auto p : positions) {
        is_local[p] = true;
    }
    std::vector<std::size_t> outer_dims;
    std::vector<std::size_t> outer_strides;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (!is_local[i]) {
            outer_dims.push_back(dims[i]);
            outer_strides.push_back(st[i]);
        }
    }
    const std::size_t outer = product(outer_dims);
    Vector buf(static_cast<Eigen::Index>(local));
    Vector res(static_cast<Eigen::Index>(local));
    std::vector<std::size_t> digit(outer_dims.size(), 0);
    std::size_t base = 0;
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t l = 0; l < local; ++l) {
            buf(static_cast<Eigen::Index>(l)) = state(static_cast<Eigen::Index>(base + offsets[l]));
        }
        res.noalias() = op * buf;
        for (std::size_t l = 0; l < local; ++l) {
            state(static_cast<Eigen::Index>(base + offsets[l])) = res(static_cast<Eigen::Index>(l));
        }
        // Odometer increment over the outer digits, least significant last.
        for (std::size_t k = outer_dims.size(); k-- > 0;) {
            if (++digit[k] < outer_dims[k]) {
                base += outer_strides[k];
                break;
            }
            base -= (outer_dims[k] - 1) * outer_strides[k];
            digit[k] = 0;
        }
    }
}

/// exp(-i H) for dense Hermitian H via eigendecomposition; exactly unitary up
/// to rounding.
inline Matrix expm_hermitian(const Matrix &h) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) {
        throw SimulationError("eigendecomposition failed");
    }
    const Matrix &v = es.eigenvectors();
    Eigen::VectorXcd phases = (es.eigenvalues().cast<cd>() * cd(0, -1)).array().exp();
    return v * phases.asDiagonal() * v.adjoint();
}

/// exp(-i H) for sparse Hermitian H. The sparsity graph is split into
/// connected components and each block is exponentiated on its own; number-
/// or parity-conserving generators reduce to small blocks this way.
inline Matrix expm_hermitian_blocks(const SparseMatrix &h) {
    const auto n = static_cast<std::size_t>(h.rows());
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (Eigen::Index k = 0; k < h.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(h, k); it; ++it) {
            if (std::abs(it.value()) == 0.0) {
                continue;
            }
            auto a = find(static_cast<std::size_t>(it.row()));
            auto b = find(static_cast<std::size_t>(it.col()));
            if (a != b) {
                parent[std::max(a, b)] = std::min(a, b);
            }
        }
    }
    std::vector<std::vector<std::size_t>> blocks(n);
    for (std::size_t i = 0; i < n; ++i) {
        blocks[find(i)].push_back(i);
    }
    Matrix dense_h = Matrix(h);
    Matrix u = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto &b : blocks) {
        if (b.empty()) {
            continue;
        }
        const auto m = static_cast<Eigen::Index>(b.size());
        Matrix sub(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                sub(i, j) = dense_h(static_cast<Eigen::Index>(b[static_cast<std::size_t>(i)]),
                                    static_cast<Eigen::Index>(b[static_cast<std::size_t>(j)]));
            }
        }
        Matrix e = m == 1 ? Matrix::Constant(1, 1, std::exp(cd(0, -1) * sub(0, 0).real())) : expm_hermitian(sub);
        for (Eigen::Index i = 0; i < m; ++i) {
            for (Eigen::Index j = 0; j < m; ++j) {
                u(static_cast<Eigen::Index>(b[static_cast<std::size_t>(i)]),
                  static_cast<Eigen::Index>(b[static_cast<std::size_t>(j)])) = e(i, j);
            }
        }
    }
    return u;
}

/// exp(-i c (F_0 (x) F_1 (x) ... )) with each F_k Hermitian and c real:
/// eigendecompose every factor separately and assemble the product basis.
inline Matrix expm_separable(double c, const std::vector<Matrix> &factors) {
    std::vector<std::size_t> dims;
    std::vector<Eigen::VectorXd> values;
    std::vector<Matrix> vectors;
    for (const auto &f : factors) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(f);
        if (es.info() != Eigen::Success) {
            throw SimulationError("eigendecomposition failed");
        }
        dims.push_back(static_cast<std::size_t>(f.rows()));
        values.push_back(es.eigenvalues());
        vectors.push_back(es.eigenvectors());
    }
    const std::size_t total = product(dims);
    const auto st = strides(dims);
    const auto n = static_cast<Eigen::Index>(total);
    // M = diag(exp(-i c lambda)) W^dagger, then U = W M applied factor-wise.
    Matrix m(n, n);
    for (std::size_t i = 0; i < total; ++i) {
        double lambda = c;
        for (std::size_t k = 0; k < dims.size(); ++k) {
            lambda *= values[k](static_cast<Eigen::Index>((i / st[k]) % dims[k]));
        }
        const cd phase = std::exp(cd(0, -lambda));
        for (std::size_t j = 0; j < total; ++j) {
            cd w = 1.0;
            for (std::size_t k = 0; k < dims.size(); ++k) {
                w *= std::conj(vectors[k](static_cast<Eigen::Index>((j / st[k]) % dims[k]),
                                          static_cast<Eigen::Index>((i / st[k]) % dims[k])));
            }
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = phase * w;
        }
    }
    for (std::size_t k = 0; k < dims.size(); ++k) {
        const std::size_t pos[1] = {k};
        for (Eigen::Index col = 0; col < n; ++col) {
            apply_local(vectors[k], pos, dims, m.col(col));
        }
    }
    return m;
}

inline double max_abs(const Matrix &m) {
    return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff();
}

/// max |U1 - e^{i g} U2| with g taken from the largest-magnitude entry ratio.
inline double distance_up_to_phase(const Matrix &u1, const Matrix &u2) {
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    u2.cwiseAbs().maxCoeff(&r, &c);
    cd phase = 1.0;
    if (std::abs(u2(r, c)) > 0) {
        phase = u1(r, c) / u2(r, c);
        phase /= std::abs(phase);
    }
    return max_abs(u1 - phase * u2);
}

}  // namespace linalg
}  // namespace hybc
