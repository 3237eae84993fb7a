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
#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <stdexcept>
#include <stop_token>
#include <thread>
#include <utility>
#include <vector>

#include "tclaw/walk.hpp"

namespace tclaw {

/// Raised when exact checks contradict an invariant the search relies on.
class InternalConsistencyError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

struct SearchStats {
    std::uint64_t steps = 0;
    std::uint64_t traceback_steps = 0;
    std::uint64_t trails = 0;
    std::uint64_t abandoned_trails = 0;
    std::uint64_t dp_insertions = 0;
    std::uint64_t duplicate_starts = 0;
    std::uint64_t evictions = 0;
    std::uint64_t candidate_pairs = 0;
    std::uint64_t prefix_merges = 0;
    std::uint64_t same_side_collisions = 0;
    std::uint64_t claws = 0;
    std::uint64_t false_claws = 0;

    SearchStats& operator+=(const SearchStats& o) {
        steps += o.steps;
        traceback_steps += o.traceback_steps;
        trails += o.trails;
        abandoned_trails += o.abandoned_trails;
        dp_insertions += o.dp_insertions;
        duplicate_starts += o.duplicate_starts;
        evictions += o.evictions;
        candidate_pairs += o.candidate_pairs;
        prefix_merges += o.prefix_merges;
        same_side_collisions += o.same_side_collisions;
        claws += o.claws;
        false_claws += o.false_claws;
        return *this;
    }
    friend bool operator==(const SearchStats&, const SearchStats&) = default;
};

/// R(P_t) ... R(P_1) D = C, with pauli_sequence = P_1..P_t.
struct Solution {
    std::vector<Pauli> pauli_sequence;
    ChannelMatrix clifford;
    std::uint32_t chunk = 0;
    int t = 0;
};

/// Channel rep of R(P_t) ... R(P_1).
inline ChannelMatrix rotation_product(const std::vector<Pauli>& seq, int n) {
    ChannelMatrix m = ChannelMatrix::identity(n), tmp;
    ColumnAccumulator<std::int64_t> acc(pauli_count(n));
    for (const Pauli& p : seq) {
        RotationAction(p).left_multiply(m, tmp, acc);
        std::swap(m, tmp);
    }
    return m;
}

/// Builds the solution for a matching pair of side tuples: V digits become
/// P_1..P_half, then the chunk Pauli for odd t, then the W digits. Returns
/// nothing when D = (R-product)^T C is not a signed permutation.
inline std::optional<Solution> assemble_solution(const std::vector<Pauli>& v_digits,
                                                 std::optional<Pauli> chunk_pauli,
                                                 const std::vector<Pauli>& w_digits,
                                                 const ChannelMatrix& c_hat, int n) {
    Solution s;
    s.pauli_sequence = v_digits;
    if (chunk_pauli) s.pauli_sequence.push_back(*chunk_pauli);
    s.pauli_sequence.insert(s.pauli_sequence.end(), w_digits.begin(), w_digits.end());
    s.t = static_cast<int>(s.pauli_sequence.size());
    s.clifford = mat_mul(transpose(rotation_product(s.pauli_sequence, n)), c_hat);
    if (!is_signed_permutation(s.clifford)) return std::nullopt;
    return s;
}

// ---------------------------------------------------------------------------
// Distinguished-point store.

enum class InsertKind { Inserted, DuplicateStart, CandidatePair };

struct InsertResult {
    InsertKind kind = InsertKind::Inserted;
    TrailTriple other;  // resident triple for CandidatePair
    bool evicted = false;
};

/// Direct-mapped table of at most `capacity` trail triples. Each end point
/// hashes to exactly one slot, so a resident triple with a given end point is
/// always found; a different end point landing on an occupied slot evicts it.
class DPStore {
   public:
    explicit DPStore(std::size_t capacity, std::uint64_t salt = 0)
        : slots_(std::max<std::size_t>(capacity, 1)), salt_(salt) {}

    std::size_t capacity() const { return slots_.size(); }
    std::size_t size() const { return size_; }

    InsertResult insert(const TrailTriple& t) {
        Slot& s = slots_[slot_of(t.end)];
        InsertResult r;
        if (s.used && s.triple.end == t.end) {
            if (s.triple.start == t.start) {
                r.kind = InsertKind::DuplicateStart;
            } else {
                r.kind = InsertKind::CandidatePair;
                r.other = s.triple;
            }
            return r;
        }
        r.evicted = s.used;
        if (!s.used) ++size_;
        s.used = true;
        s.triple = t;
        return r;
    }

    std::optional<TrailTriple> find(const Point& end) const {
        const Slot& s = slots_[slot_of(end)];
        if (s.used && s.triple.end == end) return s.triple;
        return std::nullopt;
    }

   private:
    struct Slot {
        bool used = false;
        TrailTriple triple;
    };

    std::size_t slot_of(const Point& p) const {
        const std::uint64_t h = hash_words(
            std::array<std::uint64_t, 3>{static_cast<std::uint64_t>(p.x),
                                         static_cast<std::uint64_t>(p.x >> 64), p.b},
            salt_, kTagStore);
        return static_cast<std::size_t>(h % slots_.size());
    }

    std::vector<Slot> slots_;
    std::uint64_t salt_;
    std::size_t size_ = 0;
};

// ---------------------------------------------------------------------------
// Merge location.

enum class MergeKind { PrefixOrIdentical, SameSideCollision, Claw };

struct MergeOutcome {
    MergeKind kind = MergeKind::PrefixOrIdentical;
    // Distinct points with equal successors (unset for PrefixOrIdentical).
    // For a claw, first is on side 1 and second on side 2.
    Point first;
    Point second;
};

/// Walks two trails with a common end point back to the place they joined.
template <class StepFn>
MergeOutcome locate_merge(const TrailTriple& t1, const TrailTriple& t2, StepFn&& step,
                          std::uint64_t* steps_taken = nullptr) {
    if (!(t1.end == t2.end)) throw DomainError("locate_merge needs trails with equal ends");
    std::uint64_t taken = 0;
    const bool first_longer = t1.length >= t2.length;
    Point a = first_longer ? t1.start : t2.start;
    Point b = first_longer ? t2.start : t1.start;
    const std::uint64_t diff = first_longer ? t1.length - t2.length : t2.length - t1.length;
    const std::uint64_t remaining = std::min(t1.length, t2.length);
    for (std::uint64_t i = 0; i < diff; ++i) {
        a = step(a);
        ++taken;
    }
    MergeOutcome out;
    if (a == b) {
        if (steps_taken) *steps_taken += taken;
        out.kind = MergeKind::PrefixOrIdentical;
        return out;
    }
    for (std::uint64_t i = 0; i < remaining; ++i) {
        const Point na = step(a);
        const Point nb = step(b);
        taken += 2;
        if (na == nb) {
            if (steps_taken) *steps_taken += taken;
            if (a.b == b.b) {
                out.kind = MergeKind::SameSideCollision;
                out.first = a;
                out.second = b;
            } else {
                out.kind = MergeKind::Claw;
                out.first = a.b == 1 ? a : b;
                out.second = a.b == 1 ? b : a;
            }
            return out;
        }
        a = na;
        b = nb;
    }
    if (steps_taken) *steps_taken += taken;
    throw InternalConsistencyError("trails with a common end point never merged");
}

/// Exact check of a candidate claw (x1 on side 1, x2 on side 2).
inline std::optional<Solution> verify_claw(u128 x1, u128 x2, Walker& walker) {
    const WalkConfig& cfg = walker.config();
    const std::vector<std::uint8_t> l1 = walker.label_bytes(Point{x1, 1});
    if (l1 != walker.label_bytes(Point{x2, 2})) return std::nullopt;
    std::optional<Pauli> chunk;
    if (cfg.has_chunk()) chunk = cfg.chunk_pauli();
    auto s = assemble_solution(decode_point(x1, cfg), chunk, decode_point(x2, cfg),
                               walker.context().target(), cfg.n);
    if (!s) {
        throw InternalConsistencyError("equal coset labels without a Clifford quotient");
    }
    s->chunk = cfg.chunk;
    return s;
}

// ---------------------------------------------------------------------------
// Search driver.

/// Thread role counts. `inline_mode` runs worker, collector and verifier in
/// the calling thread, which makes the search bit-deterministic.
struct RoleConfig {
    int workers = 1;
    int collectors = 1;
    int verifiers = 1;
    bool inline_mode = true;

    static RoleConfig single() { return RoleConfig{}; }

    /// Desk defaults: 1/8 of threads collect, 1/4 verify, the rest walk.
    static RoleConfig for_threads(int threads) {
        RoleConfig r;
        threads = std::max(threads, 1);
        r.collectors = std::max(1, threads / 8);
        r.verifiers = std::max(1, threads / 4);
        r.workers = std::max(1, threads - r.collectors - r.verifiers);
        r.inline_mode = false;
        return r;
    }
};

struct SearchParams {
    std::uint64_t budget = 0;           // walk steps
    std::size_t store_capacity = 1u << 20;
    std::stop_token stop;               // external cancellation
};

struct SearchOutcome {
    std::optional<Solution> solution;
    SearchStats stats;
};

/// Bounded blocking MPMC queue.
template <class T>
class BoundedQueue {
   public:
    explicit BoundedQueue(std::size_t capacity) : capacity_(std::max<std::size_t>(capacity, 1)) {}

    bool push(T v) {
        std::unique_lock lock(mu_);
        not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
        if (closed_) return false;
        items_.push_back(std::move(v));
        not_empty_.notify_one();
        return true;
    }

    std::optional<T> pop() {
        std::unique_lock lock(mu_);
        not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
        if (items_.empty()) return std::nullopt;
        T v = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return v;
    }

    void close() {
        std::lock_guard lock(mu_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

   private:
    std::mutex mu_;
    std::condition_variable not_empty_, not_full_;
    std::deque<T> items_;
    std::size_t capacity_;
    bool closed_ = false;
};

namespace detail {

inline Point random_point(std::mt19937_64& rng, u128 space) {
    const u128 hi = rng();
    const u128 r = (hi << 64) | rng();
    return Point{r % space, static_cast<std::uint8_t>(1 + (rng() & 1))};
}

inline std::mt19937_64 worker_rng(std::uint64_t salt, int worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(salt), static_cast<std::uint32_t>(salt >> 32),
                      static_cast<std::uint32_t>(worker)};
    return std::mt19937_64(seq);
}

// Candidate pair handling shared by the inline and threaded drivers.
inline std::optional<Solution> examine_pair(const TrailTriple& resident, const TrailTriple& fresh,
                                            Walker& walker, SearchStats& st) {
    ++st.candidate_pairs;
    const MergeOutcome m = locate_merge(
        resident, fresh, [&](const Point& p) { return walker.step(p); }, &st.traceback_steps);
    switch (m.kind) {
        case MergeKind::PrefixOrIdentical: ++st.prefix_merges; return std::nullopt;
        case MergeKind::SameSideCollision: ++st.same_side_collisions; return std::nullopt;
        case MergeKind::Claw: break;
    }
    ++st.claws;
    auto s = verify_claw(m.first.x, m.second.x, walker);
    if (!s) ++st.false_claws;
    return s;
}

inline void record_insert(const InsertResult& r, SearchStats& st) {
    if (r.kind == InsertKind::Inserted) {
        ++st.dp_insertions;
        if (r.evicted) ++st.evictions;
    } else if (r.kind == InsertKind::DuplicateStart) {
        ++st.duplicate_starts;
    }
}

}  // namespace detail

inline SearchOutcome search_chunk_inline(const WalkContext& ctx, const SearchParams& params) {
    SearchOutcome out;
    SearchStats& st = out.stats;
    Walker walker(ctx);
    DPStore store(params.store_capacity, ctx.config().salt);
    auto rng = detail::worker_rng(ctx.config().salt, 0);
    auto take_step = [&] {
        if (st.steps >= params.budget || params.stop.stop_requested()) return false;
        ++st.steps;
        return true;
    };
    while (st.steps < params.budget && !params.stop.stop_requested()) {
        const Point start = detail::random_point(rng, ctx.space_size());
        const TrailOutcome trail = walker.run_trail(start, take_step);
        if (trail.status == TrailStatus::CycleAbandoned) ++st.abandoned_trails;
        if (trail.status != TrailStatus::Complete) continue;
        ++st.trails;
        const InsertResult r = store.insert(trail.triple);
        detail::record_insert(r, st);
        if (r.kind != InsertKind::CandidatePair) continue;
        if (auto s = detail::examine_pair(r.other, trail.triple, walker, st)) {
            out.solution = std::move(s);
            break;
        }
    }
    return out;
}

/// Workers generate trails, collectors own store shards, verifiers trace
/// candidate pairs back; all connected by bounded queues.
inline SearchOutcome search_chunk_threaded(const WalkContext& ctx, const SearchParams& params,
                                           const RoleConfig& roles) {
    const int nw = std::max(1, roles.workers);
    const int nc = std::max(1, roles.collectors);
    const int nv = std::max(1, roles.verifiers);
    const std::uint64_t salt = ctx.config().salt;

    std::stop_source internal;
    std::atomic<std::uint64_t> steps{0};
    std::mutex result_mu;
    std::optional<Solution> result;
    std::exception_ptr failure;

    std::vector<std::unique_ptr<BoundedQueue<TrailTriple>>> triple_q;
    for (int c = 0; c < nc; ++c) triple_q.push_back(std::make_unique<BoundedQueue<TrailTriple>>(4096));
    BoundedQueue<std::pair<TrailTriple, TrailTriple>> pair_q(4096);

    std::vector<SearchStats> wstats(nw), cstats(nc), vstats(nv);
    auto stopping = [&] { return internal.stop_requested() || params.stop.stop_requested(); };
    auto fail = [&](std::exception_ptr e) {
        std::lock_guard lock(result_mu);
        if (!failure) failure = e;
        internal.request_stop();
    };

    std::vector<std::thread> workers, collectors, verifiers;
    std::atomic<int> workers_left{nw}, collectors_left{nc};

    for (int v = 0; v < nv; ++v) {
        verifiers.emplace_back([&, v] {
            try {
                Walker walker(ctx);
                while (auto item = pair_q.pop()) {
                    if (stopping()) continue;
                    if (auto s = detail::examine_pair(item->first, item->second, walker, vstats[v])) {
                        std::lock_guard lock(result_mu);
                        if (!result) result = std::move(s);
                        internal.request_stop();
                    }
                }
            } catch (...) {
                fail(std::current_exception());
                while (pair_q.pop()) {
                }
            }
        });
    }
    for (int c = 0; c < nc; ++c) {
        collectors.emplace_back([&, c] {
            DPStore store(std::max<std::size_t>(params.store_capacity / nc, 1), salt ^ c);
            while (auto t = triple_q[c]->pop()) {
                const InsertResult r = store.insert(*t);
                detail::record_insert(r, cstats[c]);
                if (r.kind == InsertKind::CandidatePair && !stopping()) {
                    pair_q.push({r.other, *t});
                }
            }
            if (--collectors_left == 0) pair_q.close();
        });
    }
    for (int w = 0; w < nw; ++w) {
        workers.emplace_back([&, w] {
            try {
                Walker walker(ctx);
                auto rng = detail::worker_rng(salt, w);
                SearchStats& st = wstats[w];
                auto take_step = [&] {
                    if (stopping()) return false;
                    if (steps.fetch_add(1, std::memory_order_relaxed) >= params.budget) return false;
                    ++st.steps;
                    return true;
                };
                while (!stopping() && steps.load(std::memory_order_relaxed) < params.budget) {
                    const TrailOutcome trail =
                        walker.run_trail(detail::random_point(rng, ctx.space_size()), take_step);
                    if (trail.status == TrailStatus::CycleAbandoned) ++st.abandoned_trails;
                    if (trail.status != TrailStatus::Complete) continue;
                    ++st.trails;
                    const Point& e = trail.triple.end;
                    const std::uint64_t h = hash_words(
                        std::array<std::uint64_t, 3>{static_cast<std::uint64_t>(e.x),
                                                     static_cast<std::uint64_t>(e.x >> 64), e.b},
                        salt, kTagStore + 1);
                    triple_q[h % nc]->push(trail.triple);
                }
            } catch (...) {
                fail(std::current_exception());
            }
            if (--workers_left == 0) {
                for (auto& q : triple_q) q->close();
            }
        });
    }
    for (auto& t : workers) t.join();
    for (auto& t : collectors) t.join();
    for (auto& t : verifiers) t.join();
    if (failure) std::rethrow_exception(failure);

    SearchOutcome out;
    for (const auto& s : wstats) out.stats += s;
    for (const auto& s : cstats) out.stats += s;
    for (const auto& s : vstats) out.stats += s;
    out.solution = std::move(result);
    return out;
}

/// Claw search over one chunk until a verified solution is found or the
/// step budget runs out.
inline SearchOutcome search_chunk(const WalkContext& ctx, const SearchParams& params,
                                  const RoleConfig& roles = RoleConfig::single()) {
    if (params.budget == 0) throw DomainError("search budget must be positive");
    if (roles.inline_mode) return search_chunk_inline(ctx, params);
    return search_chunk_threaded(ctx, params, roles);
}

}  // namespace tclaw
