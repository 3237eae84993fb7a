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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "tclaw/channel.hpp"
#include "tclaw/coset_label.hpp"
#include "tclaw/hash.hpp"

namespace tclaw {

/// x^k, throwing if the result does not fit in 128 bits.
inline u128 checked_pow128(std::uint64_t base, int k) {
    u128 r = 1;
    for (int i = 0; i < k; ++i) {
        if (base != 0 && r > (~u128{0}) / base) throw DomainError("walk space exceeds 128 bits");
        r *= base;
    }
    return r;
}

inline std::string u128_to_string(u128 v) {
    if (v == 0) return "0";
    std::string s;
    while (v > 0) {
        s.insert(s.begin(), static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    }
    return s;
}

/// Salt for one (seed, n, t, chunk, round) search.
inline std::uint64_t derive_salt(std::uint64_t seed, int n, int t, std::uint32_t chunk,
                                 int round) {
    return hash_words(std::array<std::uint64_t, 4>{static_cast<std::uint64_t>(n),
                                                   static_cast<std::uint64_t>(t), chunk,
                                                   static_cast<std::uint64_t>(round)},
                      seed, kTagSalt);
}

/// Parameters of one deterministic walk. Points are base-xi numbers with
/// `half` digits; for odd t the V side additionally carries the fixed Pauli
/// of `chunk` as its outermost factor.
struct WalkConfig {
    int n = 1;
    int t = 2;
    int half = 1;
    std::uint32_t xi = 3;
    std::uint32_t chunk = 0;
    int theta_exp = 1;
    std::uint64_t salt = 0;
    int max_trail_factor = 20;

    static WalkConfig make(int n, int t, std::uint32_t chunk, int theta_exp, std::uint64_t salt,
                           int max_trail_factor = 20) {
        check_qubit_count(n);
        if (t < 2) throw DomainError("walks need t >= 2");
        if (theta_exp < 0 || theta_exp > 62) throw DomainError("theta_exp outside [0, 62]");
        if (max_trail_factor < 1) throw DomainError("max_trail_factor must be positive");
        WalkConfig c;
        c.n = n;
        c.t = t;
        c.half = t / 2;
        c.xi = pauli_count(n) - 1;
        if (chunk >= c.xi) throw DomainError("chunk index out of range");
        c.chunk = chunk;
        c.theta_exp = theta_exp;
        c.salt = salt;
        c.max_trail_factor = max_trail_factor;
        (void)c.space_size();
        return c;
    }

    bool has_chunk() const { return (t % 2) == 1; }
    /// xi^half, the number of x values per side.
    u128 space_size() const { return checked_pow128(xi, half); }
    std::uint64_t max_trail_length() const {
        return static_cast<std::uint64_t>(max_trail_factor) << theta_exp;
    }
    Pauli chunk_pauli() const { return Pauli::from_index(chunk + 1, n); }
};

struct Point {
    u128 x = 0;
    std::uint8_t b = 1;  // 1: V side, 2: W side

    friend bool operator==(const Point&, const Point&) = default;
};

struct TrailTriple {
    Point start;
    Point end;
    std::uint64_t length = 0;
};

/// Base-xi digits of x, least significant first, each mapped to the Pauli
/// with index digit+1.
inline std::vector<Pauli> decode_point(u128 x, const WalkConfig& cfg) {
    if (x >= cfg.space_size()) throw DomainError("walk point out of range");
    std::vector<Pauli> out;
    out.reserve(static_cast<std::size_t>(cfg.half));
    for (int i = 0; i < cfg.half; ++i) {
        out.push_back(Pauli::from_index(static_cast<std::uint32_t>(x % cfg.xi) + 1, cfg.n));
        x /= cfg.xi;
    }
    return out;
}

/// Inverse of decode_point.
inline u128 encode_point(const std::vector<Pauli>& paulis, const WalkConfig& cfg) {
    if (static_cast<int>(paulis.size()) != cfg.half) throw DomainError("wrong digit count");
    u128 x = 0;
    for (int i = cfg.half - 1; i >= 0; --i) {
        const std::uint32_t idx = paulis[i].index();
        if (idx == 0) throw DomainError("identity is not a walk digit");
        x = x * cfg.xi + (idx - 1);
    }
    return x;
}

/// Read-only data shared by every walker of one search: config, target and
/// per-Pauli rotation tables.
class WalkContext {
   public:
    WalkContext(const WalkConfig& cfg, ChannelMatrix c_hat)
        : cfg_(cfg),
          c_hat_(std::move(c_hat)),
          rotations_(std::make_shared<const std::vector<RotationAction>>(all_rotations(cfg.n))),
          space_(cfg.space_size()) {
        if (c_hat_.dim() != pauli_count(cfg.n)) throw DomainError("target has wrong dimension");
    }

    WalkContext(const WalkConfig& cfg, ChannelMatrix c_hat,
                std::shared_ptr<const std::vector<RotationAction>> rotations)
        : cfg_(cfg), c_hat_(std::move(c_hat)), rotations_(std::move(rotations)),
          space_(cfg.space_size()) {}

    const WalkConfig& config() const { return cfg_; }
    const ChannelMatrix& target() const { return c_hat_; }
    const RotationAction& rotation(std::uint32_t pauli_index) const {
        return (*rotations_)[pauli_index - 1];
    }
    const std::shared_ptr<const std::vector<RotationAction>>& rotations() const {
        return rotations_;
    }
    u128 space_size() const { return space_; }

   private:
    WalkConfig cfg_;
    ChannelMatrix c_hat_;
    std::shared_ptr<const std::vector<RotationAction>> rotations_;
    u128 space_;
};

enum class TrailStatus { Complete, CycleAbandoned, BudgetExhausted };

struct TrailOutcome {
    TrailStatus status = TrailStatus::Complete;
    TrailTriple triple;
    std::uint64_t steps = 0;
};

/// Iterates `step` from `start` until `is_dp` holds. More than `max_length`
/// steps means the walk is presumed stuck in a cycle. `take_step()` returning
/// false stops the trail (budget exhausted) before the step is taken.
template <class StepFn, class DpFn, class BudgetFn>
TrailOutcome run_trail_with(const Point& start, std::uint64_t max_length, StepFn&& step,
                            DpFn&& is_dp, BudgetFn&& take_step) {
    TrailOutcome out;
    out.triple.start = start;
    Point cur = start;
    while (true) {
        if (out.steps >= max_length) {
            out.status = TrailStatus::CycleAbandoned;
            break;
        }
        if (!take_step()) {
            out.status = TrailStatus::BudgetExhausted;
            break;
        }
        cur = step(cur);
        ++out.steps;
        if (is_dp(cur)) {
            out.status = TrailStatus::Complete;
            break;
        }
    }
    out.triple.end = cur;
    out.triple.length = out.steps;
    return out;
}

/// Per-thread walker: evaluates f = h . label . mu over a shared context.
class Walker {
   public:
    explicit Walker(const WalkContext& ctx) : ctx_(&ctx) {}

    const WalkContext& context() const { return *ctx_; }
    const WalkConfig& config() const { return ctx_->config(); }

    /// V(x) = R(P_chunk) R(P_half) ... R(P_1) for b = 1 (chunk factor only
    /// for odd t); W(x) = R(P_1)^T ... R(P_half)^T C for b = 2.
    const ChannelMatrix& side_matrix(const Point& p) {
        const WalkConfig& cfg = config();
        if (p.x >= ctx_->space_size()) throw DomainError("walk point out of range");
        digits_.clear();
        u128 x = p.x;
        for (int i = 0; i < cfg.half; ++i) {
            digits_.push_back(static_cast<std::uint32_t>(x % cfg.xi) + 1);
            x /= cfg.xi;
        }
        if (p.b == 1) {
            cur_ = ChannelMatrix::identity(cfg.n);
            for (int i = 0; i < cfg.half; ++i) apply(digits_[i], false);
            if (cfg.has_chunk()) apply(cfg.chunk + 1, false);
        } else {
            cur_ = ctx_->target();
            for (int i = cfg.half - 1; i >= 0; --i) apply(digits_[i], true);
        }
        return cur_;
    }

    /// Coset label bytes of the side matrix (valid until the next call).
    const std::vector<std::uint8_t>& label_bytes(const Point& p) {
        coset_label_into(side_matrix(p), label_, scratch_);
        return label_;
    }

    Point step(const Point& p) {
        const Hash128 h = keyed_hash128(label_bytes(p), config().salt, kTagStep);
        Point next;
        next.x = h.value() % ctx_->space_size();
        next.b = static_cast<std::uint8_t>(((h.hi >> 63) & 1u) + 1u);
        return next;
    }

    bool is_distinguished(const Point& p) const {
        const int bits = config().theta_exp;
        if (bits == 0) return true;
        const std::uint64_t h = hash_words(
            std::array<std::uint64_t, 3>{static_cast<std::uint64_t>(p.x),
                                         static_cast<std::uint64_t>(p.x >> 64), p.b},
            config().salt, kTagDp);
        return (h >> (64 - bits)) == 0;
    }

    template <class BudgetFn>
    TrailOutcome run_trail(const Point& start, BudgetFn&& take_step) {
        return run_trail_with(
            start, config().max_trail_length(), [this](const Point& p) { return step(p); },
            [this](const Point& p) { return is_distinguished(p); },
            std::forward<BudgetFn>(take_step));
    }

    TrailOutcome run_trail(const Point& start) {
        return run_trail(start, [] { return true; });
    }

   private:
    void apply(std::uint32_t pauli_index, bool transposed) {
        ctx_->rotation(pauli_index).left_multiply(cur_, tmp_, acc_, transposed);
        std::swap(cur_, tmp_);
    }

    const WalkContext* ctx_;
    std::vector<std::uint32_t> digits_;
    ChannelMatrix cur_;
    ChannelMatrix tmp_;
    ColumnAccumulator<std::int64_t> acc_;
    std::vector<std::uint8_t> label_;
    LabelScratch scratch_;
};

}  // namespace tclaw
