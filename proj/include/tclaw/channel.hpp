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

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tclaw/exact_matrix.hpp"
#include "tclaw/pauli.hpp"

namespace tclaw {

enum class GateKind { H, S, Sdg, X, Y, Z, CNOT, CZ, SWAP, T, Tdg };

inline constexpr std::array<std::string_view, 11> kGateNames = {
    "H", "S", "Sdg", "X", "Y", "Z", "CNOT", "CZ", "SWAP", "T", "Tdg"};

inline std::string_view gate_name(GateKind k) { return kGateNames[static_cast<int>(k)]; }

inline std::optional<GateKind> gate_kind_from_name(std::string_view name) {
    for (std::size_t i = 0; i < kGateNames.size(); ++i) {
        if (kGateNames[i] == name) return static_cast<GateKind>(i);
    }
    return std::nullopt;
}

constexpr int gate_arity(GateKind k) {
    return (k == GateKind::CNOT || k == GateKind::CZ || k == GateKind::SWAP) ? 2 : 1;
}

constexpr bool is_clifford_kind(GateKind k) { return k != GateKind::T && k != GateKind::Tdg; }

struct Gate {
    GateKind kind = GateKind::H;
    std::array<int, 2> qubits{0, 0};

    static Gate one(GateKind k, int q) { return Gate{k, {q, q}}; }
    static Gate two(GateKind k, int a, int b) { return Gate{k, {a, b}}; }

    int arity() const { return gate_arity(kind); }

    /// Text form used by circuit files, e.g. "CNOT 0 1".
    std::string str() const {
        std::string s(gate_name(kind));
        s += ' ';
        s += std::to_string(qubits[0]);
        if (arity() == 2) {
            s += ' ';
            s += std::to_string(qubits[1]);
        }
        return s;
    }

    friend bool operator==(const Gate& a, const Gate& b) {
        return a.kind == b.kind && a.qubits[0] == b.qubits[0] &&
               (a.arity() == 1 || a.qubits[1] == b.qubits[1]);
    }
};

inline void validate_gate(const Gate& g, int n) {
    for (int k = 0; k < g.arity(); ++k) {
        if (g.qubits[k] < 0 || g.qubits[k] >= n) {
            throw DomainError("gate " + g.str() + " addresses a qubit outside [0, " +
                              std::to_string(n) + ")");
        }
    }
    if (g.arity() == 2 && g.qubits[0] == g.qubits[1]) {
        throw DomainError("gate " + g.str() + " repeats a qubit");
    }
}

/// Inverse gate of the same arity.
inline Gate inverse(const Gate& g) {
    Gate r = g;
    switch (g.kind) {
        case GateKind::S: r.kind = GateKind::Sdg; break;
        case GateKind::Sdg: r.kind = GateKind::S; break;
        case GateKind::T: r.kind = GateKind::Tdg; break;
        case GateKind::Tdg: r.kind = GateKind::T; break;
        default: break;
    }
    return r;
}

// ---------------------------------------------------------------------------
// Clifford conjugation through generator images.

/// Conjugation images of X_0, Z_0, X_1, Z_1, ... (index 2q is X_q, 2q+1 is Z_q).
using GeneratorImages = std::vector<PhasedPauli>;

inline GeneratorImages identity_images(int n) {
    GeneratorImages g;
    g.reserve(2 * static_cast<std::size_t>(n));
    for (int q = 0; q < n; ++q) {
        g.push_back({Pauli::single(n, q, 'X'), 0});
        g.push_back({Pauli::single(n, q, 'Z'), 0});
    }
    return g;
}

/// Image of q under the map fixed by `images`, using q = i^{|x&z|} prod_j X_j^x Z_j^z.
inline PhasedPauli conjugate_by_images(const Pauli& q, const GeneratorImages& images) {
    const int n = q.num_qubits();
    PhasedPauli acc{Pauli::identity(n), std::popcount(q.x() & q.z()) % 4};
    for (int j = 0; j < n; ++j) {
        if ((q.x() >> j) & 1u) acc = acc * images[2 * j];
        if ((q.z() >> j) & 1u) acc = acc * images[2 * j + 1];
    }
    return acc;
}

/// Generator images of a single Clifford gate on n qubits.
inline GeneratorImages clifford_gate_images(const Gate& g, int n) {
    if (!is_clifford_kind(g.kind)) {
        throw DomainError("gate " + g.str() + " is not a Clifford gate");
    }
    validate_gate(g, n);
    GeneratorImages im = identity_images(n);
    const int a = g.qubits[0];
    const int b = g.qubits[1];
    auto P = [n](int q, char k) { return Pauli::single(n, q, k); };
    auto pair = [n](int q1, char k1, int q2, char k2) {
        return pauli_mul(Pauli::single(n, q1, k1), Pauli::single(n, q2, k2)).pauli;
    };
    PhasedPauli& xa = im[2 * a];
    PhasedPauli& za = im[2 * a + 1];
    switch (g.kind) {
        case GateKind::H: xa = {P(a, 'Z'), 0}; za = {P(a, 'X'), 0}; break;
        case GateKind::S: xa = {P(a, 'Y'), 0}; break;
        case GateKind::Sdg: xa = {P(a, 'Y'), 2}; break;
        case GateKind::X: za.phase_exp = 2; break;
        case GateKind::Y: xa.phase_exp = 2; za.phase_exp = 2; break;
        case GateKind::Z: xa.phase_exp = 2; break;
        case GateKind::CNOT:
            im[2 * a] = {pair(a, 'X', b, 'X'), 0};
            im[2 * b + 1] = {pair(a, 'Z', b, 'Z'), 0};
            break;
        case GateKind::CZ:
            im[2 * a] = {pair(a, 'X', b, 'Z'), 0};
            im[2 * b] = {pair(a, 'Z', b, 'X'), 0};
            break;
        case GateKind::SWAP:
            std::swap(im[2 * a], im[2 * b]);
            std::swap(im[2 * a + 1], im[2 * b + 1]);
            break;
        default: break;
    }
    return im;
}

/// Signed permutation whose column Q holds the image of Q. Throws when an
/// image is not Hermitian (images do not describe a Clifford).
inline ChannelMatrix channel_from_images(const GeneratorImages& images, int n) {
    ChannelMatrix m;
    const std::uint32_t dim = pauli_count(n);
    m.begin_build(n, dim, 0);
    for (std::uint32_t j = 0; j < dim; ++j) {
        const PhasedPauli img = conjugate_by_images(Pauli::from_index(j, n), images);
        m.push_entry(img.pauli.index(), {img.sign(), 0});
        m.end_column();
    }
    m.finish_build();
    return m;
}

inline ChannelMatrix channel_clifford_gate(const Gate& g, int n) {
    return channel_from_images(clifford_gate_images(g, n), n);
}

// ---------------------------------------------------------------------------
// R(P) = (1+w)/2 I + (1-w)/2 P, w = e^{i pi/4}.

/// Column structure of the channel rep of R(P): a column Q commuting with P
/// is e_Q; otherwise it holds 1/sqrt2 at Q and sign/sqrt2 at partner, where
/// -i P Q = sign * partner.
class RotationAction {
   public:
    RotationAction() = default;
    explicit RotationAction(const Pauli& p) : pauli_(p) {
        if (p.is_identity()) {
            throw DomainError("R(P) is undefined for the identity Pauli");
        }
        const int n = p.num_qubits();
        const std::uint32_t dim = pauli_count(n);
        anti_.resize(dim);
        partner_.resize(dim);
        sign_.resize(dim);
        for (std::uint32_t q = 0; q < dim; ++q) {
            const Pauli Q = Pauli::from_index(q, n);
            if (commutes(p, Q)) {
                anti_[q] = 0;
                partner_[q] = q;
                sign_[q] = 1;
            } else {
                const PhasedPauli pq = pauli_mul(p, Q);
                anti_[q] = 1;
                partner_[q] = pq.pauli.index();
                sign_[q] = pq.phase_exp == 1 ? 1 : -1;  // -i * i^e
            }
        }
    }

    const Pauli& pauli() const { return pauli_; }
    bool anticommutes(std::uint32_t q) const { return anti_[q] != 0; }
    std::uint32_t partner(std::uint32_t q) const { return partner_[q]; }
    int sign(std::uint32_t q) const { return sign_[q]; }

    /// out = R * a (or R^T * a when `transposed`). `out` must not alias `a`.
    template <class Int>
    void left_multiply(const BasicChannelMatrix<Int>& a, BasicChannelMatrix<Int>& out,
                       ColumnAccumulator<Int>& acc, bool transposed = false) const {
        const std::uint32_t dim = static_cast<std::uint32_t>(anti_.size());
        if (a.dim() != dim) throw DomainError("matrix dimension mismatch in R(P) product");
        acc.resize(dim);
        out.begin_build(a.num_qubits(), dim, a.sde() + 1);
        out.reserve_entries(2 * a.nnz());
        for (std::uint32_t j = 0; j < dim; ++j) {
            const auto rows = a.column_rows(j);
            const auto vals = a.column_values(j);
            for (std::size_t k = 0; k < rows.size(); ++k) {
                const std::uint32_t r = rows[k];
                if (!anti_[r]) {
                    acc.add(r, vals[k].times_sqrt2());
                } else {
                    const std::uint32_t p = partner_[r];
                    const int s = transposed ? sign_[p] : sign_[r];
                    acc.add(r, vals[k]);
                    acc.add(p, s > 0 ? vals[k] : -vals[k]);
                }
            }
            out.end_column_from(acc);
        }
        out.finish_build();
    }

    /// Explicit matrix.
    ChannelMatrix matrix() const {
        const int n = pauli_.num_qubits();
        const std::uint32_t dim = pauli_count(n);
        ColumnAccumulator<std::int64_t> acc(dim);
        ChannelMatrix m;
        m.begin_build(n, dim, 1);
        for (std::uint32_t q = 0; q < dim; ++q) {
            if (!anti_[q]) {
                acc.add(q, {0, 1});  // sqrt2 / sqrt2
            } else {
                acc.add(q, {1, 0});
                acc.add(partner_[q], {sign_[q], 0});
            }
            m.end_column_from(acc);
        }
        m.finish_build();
        return m;
    }

   private:
    Pauli pauli_;
    std::vector<std::uint8_t> anti_;
    std::vector<std::uint32_t> partner_;
    std::vector<std::int8_t> sign_;
};

/// Channel representation of R(P), P non-identity.
inline ChannelMatrix channel_R(const Pauli& p) { return RotationAction(p).matrix(); }

/// Rotation tables for every non-identity Pauli, indexed by Pauli index - 1.
inline std::vector<RotationAction> all_rotations(int n) {
    check_qubit_count(n);
    std::vector<RotationAction> out;
    out.reserve(pauli_count(n) - 1);
    for (std::uint32_t i = 1; i < pauli_count(n); ++i) out.emplace_back(Pauli::from_index(i, n));
    return out;
}

/// Channel representation of a gate list in temporal order (the first gate
/// is the rightmost factor). T is R(Z_q); Tdg is its transpose.
inline ChannelMatrix channel_of_circuit(const std::vector<Gate>& gates, int n) {
    check_qubit_count(n);
    ChannelMatrix m = ChannelMatrix::identity(n);
    ChannelMatrix tmp;
    ColumnAccumulator<std::int64_t> acc(pauli_count(n));
    for (const Gate& g : gates) {
        validate_gate(g, n);
        if (is_clifford_kind(g.kind)) {
            mat_mul_into(channel_clifford_gate(g, n), m, tmp, acc);
        } else {
            RotationAction(Pauli::single(n, g.qubits[0], 'Z'))
                .left_multiply(m, tmp, acc, g.kind == GateKind::Tdg);
        }
        std::swap(m, tmp);
    }
    return m;
}

}  // namespace tclaw
