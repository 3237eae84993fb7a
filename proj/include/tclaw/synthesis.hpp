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
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <stop_token>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tclaw/claw_search.hpp"
#include "tclaw/cost_model.hpp"

namespace tclaw {

// ---------------------------------------------------------------------------
// Clifford tableaux.

/// Conjugation images of X_q (index 2q) and Z_q (index 2q + 1), each a
/// Hermitian Pauli with sign (phase_exp 0 or 2).
struct Tableau {
    int n = 0;
    GeneratorImages images;

    static Tableau identity(int n) { return Tableau{n, identity_images(n)}; }

    /// Signed image strings, e.g. "+XZ", in generator order.
    std::vector<std::string> rows() const {
        std::vector<std::string> out;
        for (const auto& im : images) out.push_back((im.phase_exp == 2 ? "-" : "+") + im.pauli.str());
        return out;
    }

    friend bool operator==(const Tableau& a, const Tableau& b) {
        if (a.n != b.n || a.images.size() != b.images.size()) return false;
        for (std::size_t k = 0; k < a.images.size(); ++k) {
            if (a.images[k].pauli != b.images[k].pauli ||
                a.images[k].phase_exp != b.images[k].phase_exp) {
                return false;
            }
        }
        return true;
    }
};

inline ChannelMatrix tableau_channel(const Tableau& tab) {
    return channel_from_images(tab.images, tab.n);
}

/// Reads the Clifford off a signed-permutation channel rep and checks that it
/// really is one: commutation relations and every column must agree.
inline Tableau extract_clifford(const ChannelMatrix& d) {
    if (!is_signed_permutation(d)) throw DomainError("not a signed permutation");
    const int n = d.num_qubits();
    Tableau tab{n, {}};
    for (int q = 0; q < n; ++q) {
        for (char k : {'X', 'Z'}) {
            const std::uint32_t col = Pauli::single(n, q, k).index();
            const auto rows = d.column_rows(col);
            const auto vals = d.column_values(col);
            tab.images.push_back({Pauli::from_index(rows[0], n), vals[0].a > 0 ? 0 : 2});
        }
    }
    const auto gens = identity_images(n);
    for (std::size_t i = 0; i < gens.size(); ++i) {
        if (tab.images[i].pauli.is_identity()) throw DomainError("generator mapped to identity");
        for (std::size_t j = i + 1; j < gens.size(); ++j) {
            if (commutes(tab.images[i].pauli, tab.images[j].pauli) !=
                commutes(gens[i].pauli, gens[j].pauli)) {
                throw DomainError("signed permutation breaks commutation relations");
            }
        }
    }
    if (!(tableau_channel(tab) == d)) {
        throw DomainError("signed permutation is not a Clifford channel rep");
    }
    return tab;
}

/// Images of outer . inner.
inline GeneratorImages compose_images(const GeneratorImages& outer, const GeneratorImages& inner) {
    GeneratorImages out;
    out.reserve(inner.size());
    for (const auto& im : inner) {
        PhasedPauli r = conjugate_by_images(im.pauli, outer);
        r.phase_exp = (r.phase_exp + im.phase_exp) % 4;
        out.push_back(r);
    }
    return out;
}

/// Gate list (temporal order) implementing the tableau up to global phase.
/// Plain Gaussian elimination: reduce the tableau to the identity qubit by
/// qubit, then invert the reducing gates.
inline std::vector<Gate> tableau_to_gates(const Tableau& tab) {
    const int n = tab.n;
    GeneratorImages cur = tab.images;
    std::vector<Gate> applied;
    auto apply = [&](const Gate& g) {
        cur = compose_images(clifford_gate_images(g, n), cur);
        applied.push_back(g);
    };
    auto bit = [](std::uint32_t v, int q) { return ((v >> q) & 1u) != 0; };

    for (int q = 0; q < n; ++q) {
        // Image of X_q -> X_q.
        Pauli p = cur[2 * q].pauli;
        if ((p.x() >> q) == 0) {
            int j = q;
            while (!bit(p.z(), j)) ++j;
            apply(Gate::one(GateKind::H, j));
            p = cur[2 * q].pauli;
        }
        if (!bit(p.x(), q)) {
            int j = q + 1;
            while (!bit(p.x(), j)) ++j;
            apply(Gate::two(GateKind::SWAP, q, j));
            p = cur[2 * q].pauli;
        }
        for (int k = q + 1; k < n; ++k)
            if (bit(p.x(), k)) apply(Gate::two(GateKind::CNOT, q, k));
        p = cur[2 * q].pauli;
        if (bit(p.z(), q)) apply(Gate::one(GateKind::S, q));
        for (int k = q + 1; k < n; ++k)
            if (bit(cur[2 * q].pauli.z(), k)) apply(Gate::two(GateKind::CZ, q, k));

        // Image of Z_q -> Z_q, using only gates that fix X_q.
        p = cur[2 * q + 1].pauli;
        if (bit(p.x(), q)) {
            apply(Gate::one(GateKind::H, q));
            apply(Gate::one(GateKind::S, q));
            apply(Gate::one(GateKind::H, q));
        }
        for (int k = q + 1; k < n; ++k) {
            const int code = cur[2 * q + 1].pauli.code(k);
            if (code == 0) continue;
            if (code == 3) apply(Gate::one(GateKind::Sdg, k));
            if (code != 1) apply(Gate::one(GateKind::H, k));
            apply(Gate::two(GateKind::CNOT, k, q));
        }
        if (cur[2 * q].phase_exp == 2) apply(Gate::one(GateKind::Z, q));
        if (cur[2 * q + 1].phase_exp == 2) apply(Gate::one(GateKind::X, q));
    }
    if (!(Tableau{n, cur} == Tableau::identity(n))) {
        throw InternalConsistencyError("tableau reduction did not reach the identity");
    }
    std::vector<Gate> out;
    out.reserve(applied.size());
    for (auto it = applied.rbegin(); it != applied.rend(); ++it) out.push_back(inverse(*it));
    return out;
}

/// R(P) as gates: a Clifford W with W P W^dag = Z_pivot, then T, then W^dag.
inline std::vector<Gate> rotation_gates(const Pauli& p) {
    if (p.is_identity()) throw DomainError("R(P) is undefined for the identity Pauli");
    const int n = p.num_qubits();
    std::vector<Gate> w;
    int pivot = -1;
    for (int k = 0; k < n; ++k) {
        const int code = p.code(k);
        if (code == 0) continue;
        if (pivot < 0) pivot = k;
        if (code == 3) w.push_back(Gate::one(GateKind::Sdg, k));
        if (code >= 2) w.push_back(Gate::one(GateKind::H, k));
    }
    for (int k = pivot + 1; k < n; ++k)
        if (p.code(k) != 0) w.push_back(Gate::two(GateKind::CNOT, k, pivot));
    std::vector<Gate> out = w;
    out.push_back(Gate::one(GateKind::T, pivot));
    for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(inverse(*it));
    return out;
}

/// Full circuit for R(P_t) ... R(P_1) D in temporal order: D first.
inline std::vector<Gate> emit_gates(const std::vector<Pauli>& seq, const Tableau& clifford) {
    std::vector<Gate> out = tableau_to_gates(clifford);
    for (const Pauli& p : seq) {
        const auto g = rotation_gates(p);
        out.insert(out.end(), g.begin(), g.end());
    }
    return out;
}

inline std::vector<Gate> emit_gates(const Solution& s) {
    return emit_gates(s.pauli_sequence, extract_clifford(s.clifford));
}

/// R(P_t) ... R(P_1) D == C exactly.
inline bool verify_solution(const std::vector<Pauli>& seq, const ChannelMatrix& d,
                            const ChannelMatrix& c_hat) {
    if (d.dim() != c_hat.dim()) return false;
    for (const Pauli& p : seq) {
        if (p.is_identity() || pauli_count(p.num_qubits()) != c_hat.dim()) return false;
    }
    if (!is_signed_permutation(d)) return false;
    return rotation_product(seq, d.num_qubits()) * d == c_hat;
}

inline bool verify_solution(const Solution& s, const ChannelMatrix& c_hat) {
    return verify_solution(s.pauli_sequence, s.clifford, c_hat);
}

inline bool verify_gates(const std::vector<Gate>& gates, int n, const ChannelMatrix& c_hat) {
    return channel_of_circuit(gates, n) == c_hat;
}

// ---------------------------------------------------------------------------
// Exhaustive meet in the middle.

struct MitmOutcome {
    std::optional<Solution> solution;
    u128 v_enumerated = 0;  // V-side tuples stored
    u128 w_enumerated = 0;  // W-side tuples probed
};

inline u128 side_size(int n, int k) { return checked_pow128(pauli_count(n) - 1, k); }

/// Complete search at T-count t: every V tuple (P_1..P_c) is labelled and
/// stored, then every W tuple (P_{c+1}..P_t) is probed. Empty only when no
/// T-count-t decomposition exists.
inline MitmOutcome mitm_exhaustive(const ChannelMatrix& c_hat, int t,
                                   std::uint64_t threshold = 1u << 20,
                                   std::stop_token stop = {}) {
    const int n = c_hat.num_qubits();
    check_qubit_count(n);
    if (t < 0) throw DomainError("negative T-count");
    const int c = (t + 1) / 2, f = t / 2;
    const std::uint32_t xi = pauli_count(n) - 1;
    if (side_size(n, c) > threshold) {
        throw DomainError("exhaustive search at t=" + std::to_string(t) + " needs " +
                          u128_to_string(side_size(n, c)) + " entries per side, above the " +
                          std::to_string(threshold) + " threshold");
    }
    const auto rotations = all_rotations(n);
    ColumnAccumulator<std::int64_t> acc(pauli_count(n));
    std::vector<std::uint8_t> label;
    LabelScratch scratch;

    struct Entry {
        u128 digest;
        u128 code;
    };
    std::vector<Entry> table;
    table.reserve(static_cast<std::size_t>(side_size(n, c)));

    auto digest_of = [&](const ChannelMatrix& m) {
        coset_label_into(m, label, scratch);
        return keyed_hash128(label, 0, kTagMitm).value();
    };
    auto digits_of = [&](u128 code, int k) {
        std::vector<Pauli> d;
        for (int i = 0; i < k; ++i) {
            d.push_back(Pauli::from_index(static_cast<std::uint32_t>(code % xi) + 1, n));
            code /= xi;
        }
        return d;
    };

    MitmOutcome out;
    // V(p_1..p_c) = R(p_c) ... R(p_1); digit i has weight xi^(i-1).
    std::vector<ChannelMatrix> level(static_cast<std::size_t>(std::max(c, f)) + 1);
    auto enumerate_v = [&](auto&& self, int depth, u128 code, u128 weight) -> void {
        if (depth == c) {
            table.push_back({digest_of(level[depth]), code});
            ++out.v_enumerated;
            return;
        }
        if (stop.stop_requested()) return;
        for (std::uint32_t p = 0; p < xi; ++p) {
            rotations[p].left_multiply(level[depth], level[depth + 1], acc);
            self(self, depth + 1, code + weight * p, weight * xi);
        }
    };
    level[0] = ChannelMatrix::identity(n);
    enumerate_v(enumerate_v, 0, 0, 1);
    std::sort(table.begin(), table.end(), [](const Entry& a, const Entry& b) {
        return a.digest != b.digest ? a.digest < b.digest : a.code < b.code;
    });

    // W(q_1..q_f) = R(q_1)^T ... R(q_f)^T C, built from q_f inwards.
    std::vector<std::uint8_t> w_label;
    auto probe = [&](const ChannelMatrix& w, u128 code) -> bool {
        ++out.w_enumerated;
        const u128 dg = digest_of(w);
        w_label = label;
        auto it = std::lower_bound(table.begin(), table.end(), dg,
                                   [](const Entry& e, u128 v) { return e.digest < v; });
        for (; it != table.end() && it->digest == dg; ++it) {
            const auto v_digits = digits_of(it->code, c);
            if (coset_label(rotation_product(v_digits, n)).bytes != w_label) continue;
            auto s = assemble_solution(v_digits, std::nullopt, digits_of(code, f), c_hat, n);
            if (!s) throw InternalConsistencyError("equal coset labels without a Clifford quotient");
            out.solution = std::move(s);
            return true;
        }
        return false;
    };
    auto enumerate_w = [&](auto&& self, int depth, u128 code) -> bool {
        if (depth == f) return probe(level[depth], code);
        if (stop.stop_requested()) return false;
        // Choosing q_{f-depth}, whose weight is xi^(f-depth-1).
        const u128 weight = checked_pow128(xi, f - depth - 1);
        for (std::uint32_t q = 0; q < xi; ++q) {
            rotations[q].left_multiply(level[depth], level[depth + 1], acc, true);
            if (self(self, depth + 1, code + weight * q)) return true;
        }
        return false;
    };
    level[0] = c_hat;
    enumerate_w(enumerate_w, 0, 0);
    return out;
}

// ---------------------------------------------------------------------------
// Orchestration.

enum class Engine { Auto, Walk, Exhaustive };
enum class Optimality { ProvenOptimal, HeuristicOptimal, Unknown };

inline std::string_view engine_name(Engine e) {
    switch (e) {
        case Engine::Auto: return "auto";
        case Engine::Walk: return "walk";
        case Engine::Exhaustive: return "exhaustive";
    }
    return "?";
}

inline std::optional<Engine> engine_from_name(std::string_view s) {
    if (s == "auto") return Engine::Auto;
    if (s == "walk") return Engine::Walk;
    if (s == "exhaustive") return Engine::Exhaustive;
    return std::nullopt;
}

inline std::string_view optimality_name(Optimality o) {
    switch (o) {
        case Optimality::ProvenOptimal: return "ProvenOptimal";
        case Optimality::HeuristicOptimal: return "HeuristicOptimal";
        case Optimality::Unknown: return "Unknown";
    }
    return "?";
}

struct SynthesisOptions {
    int t_min = 0;
    int t_max = 10;
    Engine engine = Engine::Auto;
    std::uint64_t exhaustive_threshold = 1u << 20;
    int theta_exp = -1;  // < 0: minimize the refined cost model
    std::size_t store_capacity = 1u << 20;
    std::uint64_t seed = 0;
    int threads = 1;  // 1: single-thread deterministic mode
    std::optional<RoleConfig> roles;
    bool chunk_parallel = false;
    int rounds = 3;
    std::uint64_t budget_factor = 10;
    int max_trail_factor = 20;
    bool emit_gate_list = true;
    std::stop_token stop;
};

/// What happened at one T-count.
struct TRecord {
    int t = 0;
    std::string engine;  // clifford-test, scan, exhaustive, walk
    bool found = false;
    bool complete = false;  // a miss here proves no decomposition exists
    u128 v_size = 0;
    u128 w_size = 0;
    int theta_exp = -1;
    std::uint64_t budget_per_chunk = 0;
    std::uint32_t chunks = 0;
    int rounds = 0;
    SearchStats stats;
    double wall_s = 0;
};

struct SynthesisResult {
    bool found = false;
    int n = 0;
    int t = -1;
    std::vector<Pauli> pauli_sequence;
    ChannelMatrix clifford;
    Tableau tableau;
    std::vector<Gate> gates;
    std::string engine;
    Optimality optimality = Optimality::Unknown;
    SearchStats stats;
    std::vector<TRecord> per_t;
    std::uint64_t seed = 0;
    double wall_s = 0;
};

namespace detail {

inline std::uint64_t saturating_mul(std::uint64_t a, u128 b) {
    const u128 r = static_cast<u128>(a) * b;
    return r > UINT64_MAX ? UINT64_MAX : static_cast<std::uint64_t>(r);
}

struct WalkRun {
    std::optional<Solution> solution;
    TRecord record;
};

inline WalkRun walk_at(const ChannelMatrix& c_hat, int t, const SynthesisOptions& opts,
                       const std::shared_ptr<const std::vector<RotationAction>>& rotations) {
    const int n = c_hat.num_qubits();
    WalkRun run;
    TRecord& rec = run.record;
    rec.t = t;
    rec.engine = "walk";
    rec.theta_exp = opts.theta_exp >= 0
                        ? opts.theta_exp
                        : cost::optimal_theta_exp(n, t, static_cast<double>(opts.store_capacity));
    const WalkConfig probe_cfg = WalkConfig::make(n, t, 0, rec.theta_exp, 0, opts.max_trail_factor);
    const u128 space = probe_cfg.space_size();
    rec.v_size = space * (probe_cfg.has_chunk() ? probe_cfg.xi : 1);
    rec.w_size = space;
    rec.budget_per_chunk = saturating_mul(opts.budget_factor, 2 * space);
    rec.chunks = probe_cfg.has_chunk() ? probe_cfg.xi : 1;

    SearchParams params;
    params.budget = rec.budget_per_chunk;
    // More slots than twice the space buy nothing but allocation time.
    const u128 useful = 8 * space;
    params.store_capacity =
        useful < opts.store_capacity ? static_cast<std::size_t>(useful) : opts.store_capacity;
    const RoleConfig roles =
        opts.roles ? *opts.roles
                   : (opts.threads > 1 ? RoleConfig::for_threads(opts.threads) : RoleConfig::single());

    for (int round = 0; round < opts.rounds && !opts.stop.stop_requested(); ++round) {
        ++rec.rounds;
        if (opts.chunk_parallel && rec.chunks > 1) {
            std::stop_source shared;
            std::stop_callback forward(opts.stop, [&] { shared.request_stop(); });
            std::atomic<std::uint32_t> next{0};
            std::mutex mu;
            std::exception_ptr failure;
            const int nthreads = std::max(1, std::min<int>(opts.threads, static_cast<int>(rec.chunks)));
            std::vector<std::thread> pool;
            for (int i = 0; i < nthreads; ++i) {
                pool.emplace_back([&] {
                    try {
                        SearchParams p = params;
                        p.stop = shared.get_token();
                        for (std::uint32_t ch; !shared.stop_requested() && (ch = next++) < rec.chunks;) {
                            const WalkConfig cfg =
                                WalkConfig::make(n, t, ch, rec.theta_exp,
                                                 derive_salt(opts.seed, n, t, ch, round),
                                                 opts.max_trail_factor);
                            const WalkContext ctx(cfg, c_hat, rotations);
                            SearchOutcome o = search_chunk(ctx, p);
                            std::lock_guard lock(mu);
                            rec.stats += o.stats;
                            if (o.solution && !run.solution) {
                                run.solution = std::move(o.solution);
                                shared.request_stop();
                            }
                        }
                    } catch (...) {
                        std::lock_guard lock(mu);
                        if (!failure) failure = std::current_exception();
                        shared.request_stop();
                    }
                });
            }
            for (auto& th : pool) th.join();
            if (failure) std::rethrow_exception(failure);
            if (run.solution) break;
            continue;
        }
        for (std::uint32_t ch = 0; ch < rec.chunks && !opts.stop.stop_requested(); ++ch) {
            const WalkConfig cfg = WalkConfig::make(
                n, t, ch, rec.theta_exp, derive_salt(opts.seed, n, t, ch, round), opts.max_trail_factor);
            const WalkContext ctx(cfg, c_hat, rotations);
            params.stop = opts.stop;
            SearchOutcome o = search_chunk(ctx, params, roles);
            rec.stats += o.stats;
            if (o.solution) {
                run.solution = std::move(o.solution);
                break;
            }
        }
        if (run.solution) break;
    }
    return run;
}

}  // namespace detail

/// Lowest T-count decomposition of a target channel rep within [t_min, t_max].
inline SynthesisResult synthesize_target(const ChannelMatrix& c_hat, const SynthesisOptions& opts) {
    using clock = std::chrono::steady_clock;
    const auto started = clock::now();
    const int n = c_hat.num_qubits();
    check_qubit_count(n);
    if (c_hat.dim() != pauli_count(n)) throw DomainError("target has wrong dimension");
    if (opts.t_min < 0 || opts.t_max < opts.t_min) throw DomainError("bad T-count range");
    if (opts.rounds < 1 || opts.budget_factor < 1) throw DomainError("rounds and budget must be positive");

    SynthesisResult res;
    res.n = n;
    res.seed = opts.seed;
    const auto rotations = std::make_shared<const std::vector<RotationAction>>(all_rotations(n));
    bool lower_complete = opts.t_min == 0;

    for (int t = opts.t_min; t <= opts.t_max && !opts.stop.stop_requested(); ++t) {
        const auto t_start = clock::now();
        TRecord rec;
        rec.t = t;
        std::optional<Solution> sol;
        const int c = (t + 1) / 2;
        const bool fits = side_size(n, c) <= opts.exhaustive_threshold;
        if (t == 0) {
            rec.engine = "clifford-test";
            rec.complete = true;
            rec.v_size = rec.w_size = 1;
            if (is_signed_permutation(c_hat)) sol = Solution{{}, c_hat, 0, 0};
        } else if (t == 1) {
            rec.engine = "scan";
            rec.complete = true;
            const CosetLabel target = coset_label(c_hat);
            for (std::uint32_t i = 1; i < pauli_count(n) && !sol; ++i) {
                ++rec.v_size;
                const Pauli p = Pauli::from_index(i, n);
                if (coset_label(channel_R(p)) != target) continue;
                sol = assemble_solution({p}, std::nullopt, {}, c_hat, n);
                if (!sol) throw InternalConsistencyError("equal coset labels without a Clifford quotient");
            }
            rec.w_size = 1;
        } else if (opts.engine == Engine::Exhaustive || (opts.engine == Engine::Auto && fits)) {
            rec.engine = "exhaustive";
            MitmOutcome m = mitm_exhaustive(c_hat, t, opts.exhaustive_threshold, opts.stop);
            rec.complete = !opts.stop.stop_requested();
            rec.v_size = m.v_enumerated;
            rec.w_size = m.w_enumerated;
            sol = std::move(m.solution);
        } else {
            detail::WalkRun w = detail::walk_at(c_hat, t, opts, rotations);
            rec = w.record;
            sol = std::move(w.solution);
        }
        rec.found = sol.has_value();
        rec.wall_s = std::chrono::duration<double>(clock::now() - t_start).count();
        res.stats += rec.stats;
        res.per_t.push_back(rec);

        if (sol) {
            if (!verify_solution(*sol, c_hat)) {
                throw InternalConsistencyError("search returned a decomposition that does not recompose");
            }
            res.found = true;
            res.t = t;
            res.engine = rec.engine;
            res.pauli_sequence = sol->pauli_sequence;
            res.clifford = sol->clifford;
            res.tableau = extract_clifford(sol->clifford);
            res.optimality = opts.t_min > 0   ? Optimality::Unknown
                             : lower_complete ? Optimality::ProvenOptimal
                                              : Optimality::HeuristicOptimal;
            if (opts.emit_gate_list) {
                res.gates = emit_gates(res.pauli_sequence, res.tableau);
                if (!verify_gates(res.gates, n, c_hat)) {
                    throw InternalConsistencyError("emitted gate list does not reproduce the target");
                }
            }
            break;
        }
        lower_complete = lower_complete && rec.complete;
    }
    res.wall_s = std::chrono::duration<double>(clock::now() - started).count();
    return res;
}

inline SynthesisResult synthesize(const std::vector<Gate>& gates, int n, const SynthesisOptions& opts) {
    return synthesize_target(channel_of_circuit(gates, n), opts);
}

}  // namespace tclaw
