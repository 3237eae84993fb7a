// Copyright 2026 The tclaw Authors
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

// Floating-point reference implementation used only by tests: explicit gate
// unitaries and the trace formula U_ij = 2^-n Tr(P_i U P_j U^dagger).

#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "tclaw/channel.hpp"

namespace tclaw::oracle {

using cd = std::complex<double>;

struct Dense {
    std::size_t dim = 0;
    std::vector<cd> a;  // row-major

    explicit Dense(std::size_t d = 0) : dim(d), a(d * d) {}
    cd& operator()(std::size_t i, std::size_t j) { return a[i * dim + j]; }
    cd operator()(std::size_t i, std::size_t j) const { return a[i * dim + j]; }

    static Dense identity(std::size_t d) {
        Dense m(d);
        for (std::size_t i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Dense operator*(const Dense& x, const Dense& y) {
    Dense r(x.dim);
    for (std::size_t i = 0; i < x.dim; ++i)
        for (std::size_t k = 0; k < x.dim; ++k) {
            const cd v = x(i, k);
            if (v == cd{}) continue;
            for (std::size_t j = 0; j < x.dim; ++j) r(i, j) += v * y(k, j);
        }
    return r;
}

inline Dense dagger(const Dense& x) {
    Dense r(x.dim);
    for (std::size_t i = 0; i < x.dim; ++i)
        for (std::size_t j = 0; j < x.dim; ++j) r(i, j) = std::conj(x(j, i));
    return r;
}

inline Dense scaled(const Dense& x, cd s) {
    Dense r = x;
    for (auto& v : r.a) v *= s;
    return r;
}

/// Pauli matrix with basis-state bit q belonging to qubit q.
inline Dense pauli_matrix(const Pauli& p) {
    const int n = p.num_qubits();
    const std::size_t d = std::size_t{1} << n;
    Dense m(d);
    for (std::size_t col = 0; col < d; ++col) {
        cd amp = 1.0;
        std::size_t row = col;
        for (int q = 0; q < n; ++q) {
            const unsigned bit = (col >> q) & 1u;
            switch (p.code(q)) {
                case 0: break;
                case 1: if (bit) amp = -amp; break;                 // Z
                case 2: row ^= std::size_t{1} << q; break;          // X
                case 3:                                             // Y
                    row ^= std::size_t{1} << q;
                    amp *= bit ? cd(0, -1) : cd(0, 1);
                    break;
            }
        }
        m(row, col) = amp;
    }
    return m;
}

/// Unitary of one gate on n qubits.
inline Dense gate_unitary(const Gate& g, int n) {
    const std::size_t d = std::size_t{1} << n;
    const double r = 1.0 / std::sqrt(2.0);
    const cd w = std::polar(1.0, std::numbers::pi / 4);
    Dense u(d);
    const int a = g.qubits[0], b = g.qubits[1];
    for (std::size_t col = 0; col < d; ++col) {
        const unsigned ba = (col >> a) & 1u;
        const std::size_t fa = std::size_t{1} << a;
        switch (g.kind) {
            case GateKind::H:
                u(col & ~fa, col) += r;
                u(col | fa, col) += ba ? -r : r;
                break;
            case GateKind::S: u(col, col) = ba ? cd(0, 1) : cd(1); break;
            case GateKind::Sdg: u(col, col) = ba ? cd(0, -1) : cd(1); break;
            case GateKind::T: u(col, col) = ba ? w : cd(1); break;
            case GateKind::Tdg: u(col, col) = ba ? std::conj(w) : cd(1); break;
            case GateKind::Z: u(col, col) = ba ? -1.0 : 1.0; break;
            case GateKind::X: u(col ^ fa, col) = 1.0; break;
            case GateKind::Y: u(col ^ fa, col) = ba ? cd(0, -1) : cd(0, 1); break;
            case GateKind::CNOT:
                u(ba ? col ^ (std::size_t{1} << b) : col, col) = 1.0;
                break;
            case GateKind::CZ:
                u(col, col) = (ba && ((col >> b) & 1u)) ? -1.0 : 1.0;
                break;
            case GateKind::SWAP: {
                const unsigned bb = (col >> b) & 1u;
                std::size_t row = col & ~(fa | (std::size_t{1} << b));
                row |= std::size_t{bb} << a;
                row |= std::size_t{ba} << b;
                u(row, col) = 1.0;
                break;
            }
        }
    }
    return u;
}

/// Product in temporal order (first gate applied first).
inline Dense circuit_unitary(const std::vector<Gate>& gates, int n) {
    Dense u = Dense::identity(std::size_t{1} << n);
    for (const Gate& g : gates) u = gate_unitary(g, n) * u;
    return u;
}

/// R(P) = (1+w)/2 I + (1-w)/2 P.
inline Dense rotation_unitary(const Pauli& p) {
    const cd w = std::polar(1.0, std::numbers::pi / 4);
    const Dense pm = pauli_matrix(p);
    Dense r = scaled(pm, (1.0 - w) / 2.0);
    for (std::size_t i = 0; i < r.dim; ++i) r(i, i) += (1.0 + w) / 2.0;
    return r;
}

inline bool is_unitary(const Dense& u, double tol = 1e-9) {
    const Dense p = dagger(u) * u;
    for (std::size_t i = 0; i < u.dim; ++i)
        for (std::size_t j = 0; j < u.dim; ++j)
            if (std::abs(p(i, j) - (i == j ? cd(1) : cd(0))) > tol) return false;
    return true;
}

/// Row-major 4^n x 4^n real matrix of 2^-n Tr(P_i U P_j U^dagger).
inline std::vector<double> channel_dense(const Dense& u, int n) {
    const std::size_t d = std::size_t{1} << n;
    if (u.dim != d) throw DomainError("oracle: unitary has wrong dimension");
    if (!is_unitary(u)) throw DomainError("oracle: matrix is not unitary");
    const std::size_t dim = pauli_count(n);
    std::vector<Dense> paulis;
    for (std::uint32_t i = 0; i < dim; ++i) paulis.push_back(pauli_matrix(Pauli::from_index(i, n)));
    const Dense ud = dagger(u);
    std::vector<double> out(dim * dim);
    for (std::size_t j = 0; j < dim; ++j) {
        const Dense conj = u * paulis[j] * ud;
        for (std::size_t i = 0; i < dim; ++i) {
            cd tr = 0;
            for (std::size_t r = 0; r < d; ++r)
                for (std::size_t k = 0; k < d; ++k) tr += paulis[i](r, k) * conj(k, r);
            tr /= static_cast<double>(d);
            if (std::abs(tr.imag()) > 1e-9) throw std::logic_error("oracle: complex trace");
            out[i * dim + j] = tr.real();
        }
    }
    return out;
}

inline double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
    double m = 0;
    for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
    return m;
}

}  // namespace tclaw::oracle
