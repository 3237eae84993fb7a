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

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <type_traits>
#include <vector>

#include "tclaw/pauli.hpp"

namespace tclaw {

class ArithmeticOverflow : public std::overflow_error {
   public:
    using std::overflow_error::overflow_error;
};

// Integer arithmetic used by the exact types. The 64-bit specialization traps
// overflow; wider types (e.g. boost::multiprecision::cpp_int) use plain ops.
template <class Int>
struct IntOps {
    static Int add(const Int& a, const Int& b) { return a + b; }
    static Int sub(const Int& a, const Int& b) { return a - b; }
    static Int mul(const Int& a, const Int& b) { return a * b; }
    static bool is_even(const Int& a) { return (a % 2) == 0; }
    static Int half(const Int& a) { return a / 2; }
    static double to_double(const Int& a) { return static_cast<double>(a); }
    static std::int64_t to_int64(const Int& a) {
        if (a > Int(INT64_MAX) || a < Int(INT64_MIN)) {
            throw ArithmeticOverflow("numerator does not fit in 64 bits");
        }
        return static_cast<std::int64_t>(a);
    }
};

template <>
struct IntOps<std::int64_t> {
    static std::int64_t add(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_add_overflow(a, b, &r)) throw ArithmeticOverflow("int64 add overflow");
        return r;
    }
    static std::int64_t sub(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_sub_overflow(a, b, &r)) throw ArithmeticOverflow("int64 sub overflow");
        return r;
    }
    static std::int64_t mul(std::int64_t a, std::int64_t b) {
        std::int64_t r;
        if (__builtin_mul_overflow(a, b, &r)) throw ArithmeticOverflow("int64 mul overflow");
        return r;
    }
    static bool is_even(std::int64_t a) { return (a & 1) == 0; }
    static std::int64_t half(std::int64_t a) { return a / 2; }
    static double to_double(std::int64_t a) { return static_cast<double>(a); }
    static std::int64_t to_int64(std::int64_t a) { return a; }
};

/// Element a + b*sqrt(2) of Z[sqrt 2].
template <class Int>
struct RootTwoInt {
    using Ops = IntOps<Int>;
    Int a{0};
    Int b{0};

    bool is_zero() const { return a == 0 && b == 0; }

    RootTwoInt operator-() const { return {Ops::sub(Int{0}, a), Ops::sub(Int{0}, b)}; }
    RootTwoInt operator+(const RootTwoInt& o) const { return {Ops::add(a, o.a), Ops::add(b, o.b)}; }
    RootTwoInt operator-(const RootTwoInt& o) const { return {Ops::sub(a, o.a), Ops::sub(b, o.b)}; }
    RootTwoInt operator*(const RootTwoInt& o) const {
        // (a + b r)(c + d r) = ac + 2bd + (ad + bc) r
        const Int bd = Ops::mul(b, o.b);
        return {Ops::add(Ops::mul(a, o.a), Ops::add(bd, bd)),
                Ops::add(Ops::mul(a, o.b), Ops::mul(b, o.a))};
    }
    RootTwoInt& operator+=(const RootTwoInt& o) { return *this = *this + o; }

    RootTwoInt times_sqrt2() const { return {Ops::add(b, b), a}; }
    /// Exact division by sqrt 2; requires a even.
    RootTwoInt div_sqrt2() const { return {b, Ops::half(a)}; }
    bool divisible_by_sqrt2() const { return Ops::is_even(a); }

    /// Sign of the pair (a, b) in lexicographic order: the first nonzero component.
    int lex_sign() const {
        if (a != 0) return a > 0 ? 1 : -1;
        if (b != 0) return b > 0 ? 1 : -1;
        return 0;
    }

    double to_double() const { return Ops::to_double(a) + Ops::to_double(b) * std::sqrt(2.0); }

    friend bool operator==(const RootTwoInt&, const RootTwoInt&) = default;
};

/// Scalar (a + b sqrt2) / sqrt2^sde, kept normalized: zero has sde 0, and a
/// nonzero value with sde >= 1 has an odd `a` (otherwise one sqrt2 cancels).
template <class Int>
class BasicRootTwoScalar {
   public:
    BasicRootTwoScalar() = default;
    BasicRootTwoScalar(RootTwoInt<Int> num, int sde) : num_(num), sde_(sde) {
        if (sde < 0) throw DomainError("negative denominator exponent");
        normalize();
    }
    static BasicRootTwoScalar integer(Int v) { return BasicRootTwoScalar({v, Int{0}}, 0); }

    const RootTwoInt<Int>& num() const { return num_; }
    int sde() const { return sde_; }
    double to_double() const { return num_.to_double() / std::pow(std::sqrt(2.0), sde_); }

    friend bool operator==(const BasicRootTwoScalar&, const BasicRootTwoScalar&) = default;

   private:
    void normalize() {
        if (num_.is_zero()) {
            sde_ = 0;
            return;
        }
        while (sde_ > 0 && num_.divisible_by_sqrt2()) {
            num_ = num_.div_sqrt2();
            --sde_;
        }
    }

    RootTwoInt<Int> num_{};
    int sde_ = 0;
};

using RootTwoScalar = BasicRootTwoScalar<std::int64_t>;

template <class Int>
class BasicChannelMatrix;

/// Dense scratch space that assembles one sparse column at a time.
template <class Int>
class ColumnAccumulator {
   public:
    explicit ColumnAccumulator(std::uint32_t dim = 0) { resize(dim); }

    void resize(std::uint32_t dim) {
        if (vals_.size() != dim) {
            vals_.assign(dim, RootTwoInt<Int>{});
            bits_.assign((dim + 63) / 64, 0);
            words_.clear();
        }
    }

    void add(std::uint32_t row, const RootTwoInt<Int>& v) {
        std::uint64_t& w = bits_[row >> 6];
        const std::uint64_t bit = std::uint64_t{1} << (row & 63);
        if (!(w & bit)) {
            if (!w) words_.push_back(row >> 6);
            w |= bit;
            vals_[row] = v;
        } else {
            vals_[row] += v;
        }
    }

    /// Appends the accumulated column (sorted, zeros dropped) and resets.
    void flush_into(std::vector<std::uint32_t>& rows, std::vector<RootTwoInt<Int>>& vals) {
        // Touched rows come out sorted by walking set bits word by word.
        if (words_.size() > 1) std::sort(words_.begin(), words_.end());
        for (std::uint32_t wi : words_) {
            std::uint64_t w = bits_[wi];
            bits_[wi] = 0;
            while (w) {
                const std::uint32_t r = (wi << 6) | static_cast<std::uint32_t>(std::countr_zero(w));
                w &= w - 1;
                if (!vals_[r].is_zero()) {
                    rows.push_back(r);
                    vals.push_back(vals_[r]);
                }
                vals_[r] = RootTwoInt<Int>{};
            }
        }
        words_.clear();
    }

   private:
    std::vector<RootTwoInt<Int>> vals_;
    std::vector<std::uint64_t> bits_;
    std::vector<std::uint32_t> words_;
};

/// Exact sparse square matrix with entries in Z[sqrt2] / sqrt2^sde, sharing
/// one denominator exponent. Storage is compressed sparse column with sorted
/// row indices and no explicit zeros.
///
/// Every operation returns a canonical matrix: when sde >= 1, at least one
/// numerator has an odd rational part. Raw construction through
/// `from_triplets(..., /*canonicalize=*/false)` is the only way to hold a
/// non-canonical value.
template <class Int>
class BasicChannelMatrix {
   public:
    using Entry = RootTwoInt<Int>;

    BasicChannelMatrix() = default;

    /// Identity on n qubits (dimension 4^n).
    static BasicChannelMatrix identity(int n) {
        check_qubit_count(n);
        return identity_dim(pauli_count(n), n);
    }

    static BasicChannelMatrix identity_dim(std::uint32_t dim, int n = 0) {
        BasicChannelMatrix m;
        m.n_ = n;
        m.dim_ = dim;
        m.col_start_.resize(dim + 1);
        m.rows_.resize(dim);
        m.vals_.assign(dim, Entry{Int{1}, Int{0}});
        for (std::uint32_t j = 0; j <= dim; ++j) m.col_start_[j] = j;
        for (std::uint32_t j = 0; j < dim; ++j) m.rows_[j] = j;
        return m;
    }

    /// Builds from (row, col, value) triplets; duplicates are summed.
    static BasicChannelMatrix from_triplets(
        int n, std::uint32_t dim, int sde,
        const std::vector<std::tuple<std::uint32_t, std::uint32_t, Entry>>& triplets,
        bool canonicalize = true) {
        if (sde < 0) throw DomainError("negative denominator exponent");
        std::vector<std::vector<std::pair<std::uint32_t, Entry>>> cols(dim);
        for (const auto& [r, c, v] : triplets) {
            if (r >= dim || c >= dim) throw DomainError("triplet index out of range");
            cols[c].emplace_back(r, v);
        }
        BasicChannelMatrix m;
        m.begin_build(n, dim, sde);
        ColumnAccumulator<Int> acc(dim);
        for (std::uint32_t c = 0; c < dim; ++c) {
            for (const auto& [r, v] : cols[c]) acc.add(r, v);
            m.end_column_from(acc);
        }
        m.finish_build(canonicalize);
        return m;
    }

    int num_qubits() const { return n_; }
    std::uint32_t dim() const { return dim_; }
    int sde() const { return sde_; }
    std::size_t nnz() const { return rows_.size(); }

    std::span<const std::uint32_t> column_rows(std::uint32_t j) const {
        return {rows_.data() + col_start_[j], rows_.data() + col_start_[j + 1]};
    }
    std::span<const Entry> column_values(std::uint32_t j) const {
        return {vals_.data() + col_start_[j], vals_.data() + col_start_[j + 1]};
    }

    /// Numerator at (row, col), zero when absent.
    Entry numerator(std::uint32_t row, std::uint32_t col) const {
        const auto rows = column_rows(col);
        const auto it = std::lower_bound(rows.begin(), rows.end(), row);
        if (it == rows.end() || *it != row) return Entry{};
        return column_values(col)[static_cast<std::size_t>(it - rows.begin())];
    }

    BasicRootTwoScalar<Int> entry(std::uint32_t row, std::uint32_t col) const {
        return BasicRootTwoScalar<Int>(numerator(row, col), sde_);
    }

    /// Row-major dense copy in floating point (for oracle comparisons).
    std::vector<double> to_dense() const {
        std::vector<double> d(static_cast<std::size_t>(dim_) * dim_, 0.0);
        const double scale = std::pow(std::sqrt(2.0), -sde_);
        for (std::uint32_t j = 0; j < dim_; ++j) {
            const auto rows = column_rows(j);
            const auto vals = column_values(j);
            for (std::size_t k = 0; k < rows.size(); ++k) {
                d[static_cast<std::size_t>(rows[k]) * dim_ + j] = vals[k].to_double() * scale;
            }
        }
        return d;
    }

    bool is_canonical() const {
        if (sde_ == 0) return true;
        return std::any_of(vals_.begin(), vals_.end(),
                           [](const Entry& e) { return !e.divisible_by_sqrt2(); });
    }

    /// Divides out common factors of sqrt2 from the shared denominator.
    void reduce() {
        if (vals_.empty()) {
            sde_ = 0;
            return;
        }
        while (sde_ > 0 && std::all_of(vals_.begin(), vals_.end(),
                                       [](const Entry& e) { return e.divisible_by_sqrt2(); })) {
            for (Entry& e : vals_) e = e.div_sqrt2();
            --sde_;
        }
    }

    BasicChannelMatrix canonical() const {
        BasicChannelMatrix c = *this;
        c.reduce();
        return c;
    }

    /// Raw field equality. Both operands canonical makes this value equality.
    friend bool operator==(const BasicChannelMatrix& a, const BasicChannelMatrix& b) {
        return a.dim_ == b.dim_ && a.sde_ == b.sde_ && a.col_start_ == b.col_start_ &&
               a.rows_ == b.rows_ && a.vals_ == b.vals_;
    }

    // Low-level column construction, used by specialized products. Callers
    // push columns in order and then call finish_build().
    void begin_build(int n, std::uint32_t dim, int sde) {
        n_ = n;
        dim_ = dim;
        sde_ = sde;
        col_start_.clear();
        rows_.clear();
        vals_.clear();
        col_start_.reserve(dim + 1);
        col_start_.push_back(0);
    }
    void reserve_entries(std::size_t nnz) {
        rows_.reserve(nnz);
        vals_.reserve(nnz);
    }
    void end_column_from(ColumnAccumulator<Int>& acc) {
        acc.flush_into(rows_, vals_);
        col_start_.push_back(static_cast<std::uint32_t>(rows_.size()));
    }
    void push_entry(std::uint32_t row, const Entry& v) {
        rows_.push_back(row);
        vals_.push_back(v);
    }
    void end_column() { col_start_.push_back(static_cast<std::uint32_t>(rows_.size())); }
    void finish_build(bool canonicalize = true) {
        if (col_start_.size() != static_cast<std::size_t>(dim_) + 1) {
            throw std::logic_error("matrix build finished with wrong column count");
        }
        if (canonicalize) reduce();
    }

   private:
    int n_ = 0;
    std::uint32_t dim_ = 0;
    int sde_ = 0;
    std::vector<std::uint32_t> col_start_{0};
    std::vector<std::uint32_t> rows_;
    std::vector<Entry> vals_;
};

using ChannelMatrix = BasicChannelMatrix<std::int64_t>;

template <class Int>
void check_same_dim(const BasicChannelMatrix<Int>& a, const BasicChannelMatrix<Int>& b) {
    if (a.dim() != b.dim()) {
        throw DomainError("matrix dimension mismatch: " + std::to_string(a.dim()) + " vs " +
                          std::to_string(b.dim()));
    }
}

/// Exact product a * b, written into `out` (whose storage is reused).
template <class Int>
void mat_mul_into(const BasicChannelMatrix<Int>& a, const BasicChannelMatrix<Int>& b,
                  BasicChannelMatrix<Int>& out, ColumnAccumulator<Int>& acc) {
    check_same_dim(a, b);
    acc.resize(a.dim());
    out.begin_build(a.num_qubits(), a.dim(), a.sde() + b.sde());
    for (std::uint32_t j = 0; j < b.dim(); ++j) {
        const auto brows = b.column_rows(j);
        const auto bvals = b.column_values(j);
        for (std::size_t t = 0; t < brows.size(); ++t) {
            const auto arows = a.column_rows(brows[t]);
            const auto avals = a.column_values(brows[t]);
            for (std::size_t s = 0; s < arows.size(); ++s) acc.add(arows[s], avals[s] * bvals[t]);
        }
        out.end_column_from(acc);
    }
    out.finish_build();
}

template <class Int>
BasicChannelMatrix<Int> mat_mul(const BasicChannelMatrix<Int>& a,
                                const BasicChannelMatrix<Int>& b) {
    BasicChannelMatrix<Int> out;
    ColumnAccumulator<Int> acc(a.dim());
    mat_mul_into(a, b, out, acc);
    return out;
}

template <class Int>
BasicChannelMatrix<Int> operator*(const BasicChannelMatrix<Int>& a,
                                  const BasicChannelMatrix<Int>& b) {
    return mat_mul(a, b);
}

template <class Int>
BasicChannelMatrix<Int> transpose(const BasicChannelMatrix<Int>& a) {
    const std::uint32_t dim = a.dim();
    std::vector<std::uint32_t> counts(dim + 1, 0);
    for (std::uint32_t j = 0; j < dim; ++j) {
        for (std::uint32_t r : a.column_rows(j)) ++counts[r + 1];
    }
    for (std::uint32_t i = 0; i < dim; ++i) counts[i + 1] += counts[i];
    std::vector<std::uint32_t> rows(a.nnz());
    std::vector<RootTwoInt<Int>> vals(a.nnz());
    std::vector<std::uint32_t> cursor(counts.begin(), counts.end() - 1);
    // Visiting source columns in order keeps each output column sorted.
    for (std::uint32_t j = 0; j < dim; ++j) {
        const auto r = a.column_rows(j);
        const auto v = a.column_values(j);
        for (std::size_t k = 0; k < r.size(); ++k) {
            const std::uint32_t pos = cursor[r[k]]++;
            rows[pos] = j;
            vals[pos] = v[k];
        }
    }
    BasicChannelMatrix<Int> t;
    t.begin_build(a.num_qubits(), dim, a.sde());
    for (std::uint32_t i = 0; i < dim; ++i) {
        for (std::uint32_t p = counts[i]; p < counts[i + 1]; ++p) t.push_entry(rows[p], vals[p]);
        t.end_column();
    }
    t.finish_build();
    return t;
}

template <class Int>
bool canonical_equal(const BasicChannelMatrix<Int>& a, const BasicChannelMatrix<Int>& b) {
    return a.canonical() == b.canonical();
}

/// sde 0 and exactly one +-1 entry in every row and column.
template <class Int>
bool is_signed_permutation(const BasicChannelMatrix<Int>& a) {
    const BasicChannelMatrix<Int> c = a.canonical();
    if (c.sde() != 0 || c.nnz() != c.dim()) return false;
    std::vector<std::uint8_t> seen(c.dim(), 0);
    for (std::uint32_t j = 0; j < c.dim(); ++j) {
        const auto rows = c.column_rows(j);
        if (rows.size() != 1) return false;
        const auto& v = c.column_values(j)[0];
        if (v.b != 0 || (v.a != 1 && v.a != -1)) return false;
        if (seen[rows[0]]++) return false;
    }
    return true;
}

/// Converts numerators to another integer type (e.g. to escalate to
/// arbitrary precision after an ArithmeticOverflow).
template <class To, class From>
BasicChannelMatrix<To> widen(const BasicChannelMatrix<From>& a) {
    BasicChannelMatrix<To> out;
    out.begin_build(a.num_qubits(), a.dim(), a.sde());
    for (std::uint32_t j = 0; j < a.dim(); ++j) {
        const auto r = a.column_rows(j);
        const auto v = a.column_values(j);
        for (std::size_t k = 0; k < r.size(); ++k) {
            out.push_entry(r[k], RootTwoInt<To>{To(v[k].a), To(v[k].b)});
        }
        out.end_column();
    }
    out.finish_build(false);
    return out;
}

// Little-endian fixed-width serialization.
namespace bytes {
inline void store_u32(std::uint8_t* p, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) p[i] = static_cast<std::uint8_t>(v >> (8 * i));
}
inline void store_i64(std::uint8_t* p, std::int64_t v) {
    const auto u = static_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) p[i] = static_cast<std::uint8_t>(u >> (8 * i));
}
inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.resize(out.size() + 4);
    store_u32(out.data() + out.size() - 4, v);
}
inline void put_i64(std::vector<std::uint8_t>& out, std::int64_t v) {
    out.resize(out.size() + 8);
    store_i64(out.data() + out.size() - 8, v);
}
}  // namespace bytes

/// Writes one column: entry count, then (row u32, a i64, b i64) per entry.
/// `sign` = -1 negates every numerator.
template <class Int>
void serialize_column(std::vector<std::uint8_t>& out, std::span<const std::uint32_t> rows,
                      std::span<const RootTwoInt<Int>> vals, int sign = 1) {
    const std::size_t at = out.size();
    out.resize(at + 4 + 20 * rows.size());
    std::uint8_t* p = out.data() + at;
    bytes::store_u32(p, static_cast<std::uint32_t>(rows.size()));
    p += 4;
    for (std::size_t k = 0; k < rows.size(); ++k, p += 20) {
        const RootTwoInt<Int> v = sign < 0 ? -vals[k] : vals[k];
        bytes::store_u32(p, rows[k]);
        bytes::store_i64(p + 4, IntOps<Int>::to_int64(v.a));
        bytes::store_i64(p + 12, IntOps<Int>::to_int64(v.b));
    }
}

/// dim u32, sde u32, then every column in index order.
template <class Int>
std::vector<std::uint8_t> serialize(const BasicChannelMatrix<Int>& a) {
    std::vector<std::uint8_t> out;
    bytes::put_u32(out, a.dim());
    bytes::put_u32(out, static_cast<std::uint32_t>(a.sde()));
    for (std::uint32_t j = 0; j < a.dim(); ++j) {
        serialize_column(out, a.column_rows(j), a.column_values(j));
    }
    return out;
}

}  // namespace tclaw
