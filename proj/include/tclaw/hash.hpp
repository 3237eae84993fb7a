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

#include <sodium.h>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace tclaw {

/// Recorded in run metadata so results can be reproduced.
inline constexpr const char* kHashIdentifier = "siphashx24-128+siphash24-64/libsodium";

// Domain-separation tags.
inline constexpr std::uint64_t kTagStep = 0x0000000070657473ull;  // "step"
inline constexpr std::uint64_t kTagDp = 0x0000000000007064ull;    // "dp"
inline constexpr std::uint64_t kTagSalt = 0x0000746c61732d72ull;  // "r-salt"
inline constexpr std::uint64_t kTagStore = 0x00000065726f7473ull;  // "store"
inline constexpr std::uint64_t kTagMitm = 0x000000006d74696dull;   // "mitm"

inline void ensure_sodium() {
    static const bool ok = sodium_init() >= 0;
    if (!ok) throw std::runtime_error("libsodium initialization failed");
}

using u128 = unsigned __int128;

struct Hash128 {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;

    u128 value() const { return (static_cast<u128>(hi) << 64) | lo; }
    friend bool operator==(const Hash128&, const Hash128&) = default;
};

namespace detail {
inline std::array<unsigned char, 16> make_key(std::uint64_t salt, std::uint64_t tag) {
    std::array<unsigned char, 16> key{};
    for (int i = 0; i < 8; ++i) {
        key[i] = static_cast<unsigned char>(salt >> (8 * i));
        key[8 + i] = static_cast<unsigned char>(tag >> (8 * i));
    }
    return key;
}
inline std::uint64_t load_le64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}
}  // namespace detail

/// 128-bit keyed hash (SipHash-2-4 with 128-bit output) under key (salt, tag).
inline Hash128 keyed_hash128(std::span<const std::uint8_t> data, std::uint64_t salt,
                             std::uint64_t tag) {
    ensure_sodium();
    const auto key = detail::make_key(salt, tag);
    std::array<unsigned char, crypto_shorthash_siphashx24_BYTES> out{};
    crypto_shorthash_siphashx24(out.data(), data.data(), data.size(), key.data());
    return Hash128{detail::load_le64(out.data()), detail::load_le64(out.data() + 8)};
}

/// 64-bit keyed hash (SipHash-2-4) under key (salt, tag).
inline std::uint64_t keyed_hash64(std::span<const std::uint8_t> data, std::uint64_t salt,
                                  std::uint64_t tag) {
    ensure_sodium();
    const auto key = detail::make_key(salt, tag);
    std::array<unsigned char, crypto_shorthash_siphash24_BYTES> out{};
    crypto_shorthash_siphash24(out.data(), data.data(), data.size(), key.data());
    return detail::load_le64(out.data());
}

/// Hash of a list of 64-bit words (little-endian concatenation).
template <std::size_t N>
std::uint64_t hash_words(const std::array<std::uint64_t, N>& words, std::uint64_t salt,
                         std::uint64_t tag) {
    std::array<std::uint8_t, 8 * N> buf{};
    for (std::size_t w = 0; w < N; ++w) {
        for (int i = 0; i < 8; ++i) buf[8 * w + i] = static_cast<std::uint8_t>(words[w] >> (8 * i));
    }
    return keyed_hash64(buf, salt, tag);
}

}  // namespace tclaw
