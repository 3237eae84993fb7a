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
#include <cstdint>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "tclaw/exact_matrix.hpp"

namespace tclaw {

/// Canonical bytes for the right coset A * {Clifford channel reps}.
///
/// Right multiplication by a signed permutation fixing column 0 only permutes
/// and negates the remaining columns, so the label fixes the sign of each
/// non-identity column (first nonzero numerator lexicographically positive in
/// (a, b)) and sorts those columns. Layout is the matrix serialization with
/// column 0 first and the normalized columns in sorted order.
struct CosetLabel {
    std::vector<std::uint8_t> bytes;

    std::string hex() const {
        static constexpr char kDigits[] = "0123456789abcdef";
        std::string s;
        s.reserve(2 * bytes.size());
        for (std::uint8_t b : bytes) {
            s.push_back(kDigits[b >> 4]);
            s.push_back(kDigits[b & 15]);
        }
        return s;
    }

    friend bool operator==(const CosetLabel&, const CosetLabel&) = default;
    friend auto operator<=>(const CosetLabel&, const CosetLabel&) = default;
};

/// Reusable working memory for label computation in hot loops.
struct LabelScratch {
    std::vector<std::uint32_t> order;
    std::vector<std::int8_t> sign;
};

template <class Int>
void coset_label_into(const BasicChannelMatrix<Int>& a, std::vector<std::uint8_t>& out,
                      LabelScratch& scratch) {
    const std::uint32_t dim = a.dim();
    out.clear();
    bytes::put_u32(out, dim);
    bytes::put_u32(out, static_cast<std::uint32_t>(a.sde()));
    if (dim == 0) return;
    serialize_column(out, a.column_rows(0), a.column_values(0));

    scratch.sign.resize(dim);
    scratch.order.resize(dim - 1);
    for (std::uint32_t j = 1; j < dim; ++j) {
        const auto vals = a.column_values(j);
        scratch.sign[j] = static_cast<std::int8_t>(vals.empty() ? 1 : vals[0].lex_sign());
        scratch.order[j - 1] = j;
    }
    const auto& sign = scratch.sign;
    auto less = [&](std::uint32_t c1, std::uint32_t c2) {
        const auto r1 = a.column_rows(c1), r2 = a.column_rows(c2);
        const auto v1 = a.column_values(c1), v2 = a.column_values(c2);
        const std::size_t len = std::min(r1.size(), r2.size());
        const int s1 = sign[c1], s2 = sign[c2];
        for (std::size_t k = 0; k < len; ++k) {
            if (r1[k] != r2[k]) return r1[k] < r2[k];
            const auto e1 = s1 < 0 ? -v1[k] : v1[k];
            const auto e2 = s2 < 0 ? -v2[k] : v2[k];
            if (e1.a != e2.a) return e1.a < e2.a;
            if (e1.b != e2.b) return e1.b < e2.b;
        }
        return r1.size() < r2.size();
    };
    std::sort(scratch.order.begin(), scratch.order.end(), less);
    for (std::uint32_t j : scratch.order) {
        serialize_column(out, a.column_rows(j), a.column_values(j), sign[j]);
    }
}

template <class Int>
CosetLabel coset_label(const BasicChannelMatrix<Int>& a) {
    CosetLabel label;
    LabelScratch scratch;
    coset_label_into(a, label.bytes, scratch);
    return label;
}

/// transpose(a) * b when that is a signed permutation, else nothing.
template <class Int>
std::optional<BasicChannelMatrix<Int>> clifford_quotient(const BasicChannelMatrix<Int>& a,
                                                         const BasicChannelMatrix<Int>& b) {
    check_same_dim(a, b);
    BasicChannelMatrix<Int> q = mat_mul(transpose(a), b);
    if (!is_signed_permutation(q)) return std::nullopt;
    return q;
}

}  // namespace tclaw
