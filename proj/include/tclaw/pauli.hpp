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

#include <bit>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#ifndef TCLAW_MAX_QUBITS
#define TCLAW_MAX_QUBITS 6
#endif

namespace tclaw {

/// Largest qubit count accepted anywhere in the library. Channel matrices are
/// 4^n x 4^n, so this is a practical bound rather than a representational one.
inline constexpr int kMaxQubits = TCLAW_MAX_QUBITS;
static_assert(kMaxQubits >= 1 && kMaxQubits <= 15, "Pauli indices must fit in 32 bits");

class DomainError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

inline void check_qubit_count(int n) {
    if (n < 1 || n > kMaxQubits) {
        throw DomainError("qubit count " + std::to_string(n) + " outside [1, " +
                          std::to_string(kMaxQubits) + "]");
    }
}

/// 4^n.
constexpr std::uint32_t pauli_count(int n) { return std::uint32_t{1} << (2 * n); }

/// n-qubit Pauli operator without phase, in binary symplectic form.
///
/// Bit q of x() / z() is the X / Z part on qubit q. The single-qubit operator
/// with bits (x, z) is I, Z, X or Y for (0,0), (0,1), (1,0), (1,1), with the
/// convention Y = iXZ. Packed index: per-qubit code 2x+z, qubit 0 least
/// significant, so index() is a bijection onto [0, 4^n).
class Pauli {
   public:
    constexpr Pauli() = default;
    Pauli(int n, std::uint32_t x, std::uint32_t z) : n_(n), x_(x), z_(z) {
        check_qubit_count(n);
        const std::uint32_t mask = (std::uint32_t{1} << n) - 1;
        if ((x & ~mask) != 0 || (z & ~mask) != 0) {
            throw DomainError("Pauli bit vector wider than qubit count");
        }
    }

    static Pauli identity(int n) { return Pauli(n, 0, 0); }

    static Pauli from_index(std::uint32_t idx, int n) {
        check_qubit_count(n);
        if (idx >= pauli_count(n)) {
            throw DomainError("Pauli index " + std::to_string(idx) + " out of range for n=" +
                              std::to_string(n));
        }
        std::uint32_t x = 0, z = 0;
        for (int q = 0; q < n; ++q) {
            const std::uint32_t code = (idx >> (2 * q)) & 3u;
            x |= ((code >> 1) & 1u) << q;
            z |= (code & 1u) << q;
        }
        Pauli p;
        p.n_ = n;
        p.x_ = x;
        p.z_ = z;
        return p;
    }

    /// Single-qubit Pauli embedded on qubit q; `kind` is one of 'I', 'X', 'Y', 'Z'.
    static Pauli single(int n, int q, char kind) {
        check_qubit_count(n);
        if (q < 0 || q >= n) throw DomainError("qubit index out of range");
        const std::uint32_t bit = std::uint32_t{1} << q;
        switch (kind) {
            case 'I': return Pauli(n, 0, 0);
            case 'X': return Pauli(n, bit, 0);
            case 'Y': return Pauli(n, bit, bit);
            case 'Z': return Pauli(n, 0, bit);
            default: throw DomainError(std::string("unknown Pauli letter '") + kind + "'");
        }
    }

    /// Parses "XIZ..." with qubit 0 leftmost.
    static Pauli parse(std::string_view text) {
        const int n = static_cast<int>(text.size());
        check_qubit_count(n);
        std::uint32_t x = 0, z = 0;
        for (int q = 0; q < n; ++q) {
            const std::uint32_t bit = std::uint32_t{1} << q;
            switch (text[q]) {
                case 'I': break;
                case 'X': x |= bit; break;
                case 'Y': x |= bit; z |= bit; break;
                case 'Z': z |= bit; break;
                default: throw DomainError("bad Pauli string '" + std::string(text) + "'");
            }
        }
        return Pauli(n, x, z);
    }

    constexpr int num_qubits() const { return n_; }
    constexpr std::uint32_t x() const { return x_; }
    constexpr std::uint32_t z() const { return z_; }
    constexpr bool is_identity() const { return x_ == 0 && z_ == 0; }

    /// 0..3 for I, Z, X, Y on qubit q.
    constexpr unsigned code(int q) const {
        return (((x_ >> q) & 1u) << 1) | ((z_ >> q) & 1u);
    }

    std::uint32_t index() const {
        std::uint32_t idx = 0;
        for (int q = 0; q < n_; ++q) idx |= code(q) << (2 * q);
        return idx;
    }

    std::string str() const {
        static constexpr char kLetters[4] = {'I', 'Z', 'X', 'Y'};
        std::string s(static_cast<std::size_t>(n_), 'I');
        for (int q = 0; q < n_; ++q) s[q] = kLetters[code(q)];
        return s;
    }

    /// Qubits on which the operator acts non-trivially.
    constexpr std::uint32_t support() const { return x_ | z_; }

    friend constexpr bool operator==(const Pauli&, const Pauli&) = default;
    friend constexpr auto operator<=>(const Pauli&, const Pauli&) = default;

   private:
    int n_ = 0;
    std::uint32_t x_ = 0;
    std::uint32_t z_ = 0;
};

/// i^phase_exp * pauli.
struct PhasedPauli {
    Pauli pauli;
    int phase_exp = 0;

    /// +1 / -1 for Hermitian results; throws when the phase is +-i.
    int sign() const {
        if (phase_exp == 0) return 1;
        if (phase_exp == 2) return -1;
        throw DomainError("phased Pauli is not Hermitian");
    }

    friend bool operator==(const PhasedPauli&, const PhasedPauli&) = default;
};

inline void check_same_size(const Pauli& p, const Pauli& q) {
    if (p.num_qubits() != q.num_qubits()) {
        throw DomainError("Pauli operators act on different qubit counts");
    }
}

/// Symplectic inner product test.
inline bool commutes(const Pauli& p, const Pauli& q) {
    check_same_size(p, q);
    return (std::popcount((p.x() & q.z()) ^ (p.z() & q.x())) & 1) == 0;
}

/// Exact product with phase: p * q = i^phase_exp * r.
///
/// Writing each factor as i^{x z} X^x Z^z, moving Z^{z_p} past X^{x_q} costs
/// (-1)^{z_p x_q}, and the result absorbs i^{-x_r z_r}.
inline PhasedPauli pauli_mul(const Pauli& p, const Pauli& q) {
    check_same_size(p, q);
    const std::uint32_t rx = p.x() ^ q.x();
    const std::uint32_t rz = p.z() ^ q.z();
    const int phase = std::popcount(p.x() & p.z()) + std::popcount(q.x() & q.z()) +
                      2 * std::popcount(p.z() & q.x()) - std::popcount(rx & rz);
    return PhasedPauli{Pauli(p.num_qubits(), rx, rz), ((phase % 4) + 4) % 4};
}

/// Product of phased operators.
inline PhasedPauli operator*(const PhasedPauli& a, const PhasedPauli& b) {
    PhasedPauli r = pauli_mul(a.pauli, b.pauli);
    r.phase_exp = (r.phase_exp + a.phase_exp + b.phase_exp) % 4;
    return r;
}

}  // namespace tclaw
