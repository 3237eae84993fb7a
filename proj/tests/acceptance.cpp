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

// Acceptance run: one PASS/FAIL line per criterion. Exits non-zero if any
// criterion fails. Tolerances and seeds are fixed here; nothing is tuned per
// run. Pass --only=K to run a single criterion.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>

#include "dense_oracle.hpp"
#include "tclaw/circuit_io.hpp"
#include "tclaw/cost_model.hpp"

using namespace tclaw;

namespace {

// Pinned tolerances and sizes.
constexpr double kChannelTol = 1e-9;
constexpr int kRandomCircuits = 100;
constexpr int kLabelChecks = 1000;
constexpr int kPlantedN2 = 50;
constexpr int kScalingRuns = 21;
constexpr double kSpeedupRatio = 0.7;
constexpr int kTrailThetaExp = 6;
constexpr int kTrails = 10000;
constexpr double kTrailTol = 0.20;
constexpr int kDpSamples = 1000000;
constexpr double kDpSigmas = 3.0;
constexpr std::uint64_t kSeed = 0x61636365707431ull;

using clock_type = std::chrono::steady_clock;

struct Verdict {
    bool pass = false;
    std::string detail;
};

double seconds_since(clock_type::time_point t0) {
    return std::chrono::duration<double>(clock_type::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

std::vector<Gate> random_clifford_circuit(std::mt19937_64& rng, int n, int len) {
    static const GateKind kinds[] = {GateKind::H, GateKind::S,    GateKind::Sdg, GateKind::X,   GateKind::Y,
                                     GateKind::Z, GateKind::CNOT, GateKind::CZ,  GateKind::SWAP};
    std::vector<Gate> out;
    while (static_cast<int>(out.size()) < len) {
        const GateKind k = kinds[rng() % 9];
        const int a = static_cast<int>(rng() % n);
        if (gate_arity(k) == 1) {
            out.push_back(Gate::one(k, a));
        } else if (n > 1) {
            int b = static_cast<int>(rng() % (n - 1));
            if (b >= a) ++b;
            out.push_back(Gate::two(k, a, b));
        }
    }
    return out;
}

std::vector<Gate> random_circuit(std::mt19937_64& rng, int n, int len) {
    std::vector<Gate> out;
    for (int i = 0; i < len; ++i) {
        const auto k = static_cast<GateKind>(rng() % kGateNames.size());
        const int a = static_cast<int>(rng() % n);
        if (gate_arity(k) == 1) {
            out.push_back(Gate::one(k, a));
        } else if (n > 1) {
            out.push_back(Gate::two(k, a, 1 - a));
        } else {
            out.push_back(Gate::one(GateKind::T, 0));
        }
    }
    return out;
}

std::vector<Pauli> random_paulis(std::mt19937_64& rng, int n, int t) {
    std::vector<Pauli> seq;
    for (int k = 0; k < t; ++k)
        seq.push_back(Pauli::from_index(1 + static_cast<std::uint32_t>(rng() % (pauli_count(n) - 1)), n));
    return seq;
}

Circuit load(const std::string& name) {
    std::ifstream in(std::string(TCLAW_DATA_DIR) + "/circuits/" + name);
    if (!in) throw std::runtime_error("missing data file " + name);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_circuit(ss.str());
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

// 1. Exact channel reps against the dense oracle.
Verdict channel_rep() {
    const auto t0 = clock_type::now();
    double worst = 0;
    int checked = 0;
    auto check = [&](const std::vector<Gate>& gates, int n) {
        const auto dense = oracle::channel_dense(oracle::circuit_unitary(gates, n), n);
        worst = std::max(worst, oracle::max_abs_diff(dense, channel_of_circuit(gates, n).to_dense()));
        ++checked;
    };
    for (std::size_t i = 0; i < kGateNames.size(); ++i) {
        const auto k = static_cast<GateKind>(i);
        if (gate_arity(k) == 1) {
            check({Gate::one(k, 0)}, 1);
            check({Gate::one(k, 0)}, 2);
            check({Gate::one(k, 1)}, 2);
        } else {
            check({Gate::two(k, 0, 1)}, 2);
            check({Gate::two(k, 1, 0)}, 2);
        }
    }
    std::mt19937_64 rng(kSeed + 1);
    for (int i = 0; i < kRandomCircuits; ++i) {
        const int n = 1 + static_cast<int>(rng() % 2);
        check(random_circuit(rng, n, 1 + static_cast<int>(rng() % 6)), n);
    }
    const double s = seconds_since(t0);
    return {worst <= kChannelTol && s < 60,
            fmt("%d matrices, max |diff| = %.3g (tol %.0e), %.2f s", checked, worst, kChannelTol, s)};
}

// 2. Label invariance under Clifford right factors; soundness on all n=1
// products of at most three rotations times every single-qubit Clifford.
Verdict label_invariance() {
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(kSeed + 2);
    int invariant = 0;
    for (int i = 0; i < kLabelChecks; ++i) {
        const int n = 1 + static_cast<int>(rng() % 3);
        const ChannelMatrix a = rotation_product(random_paulis(rng, n, static_cast<int>(rng() % 5)), n);
        const ChannelMatrix d = channel_of_circuit(random_clifford_circuit(rng, n, 12), n);
        invariant += coset_label(a * d) == coset_label(a);
    }

    std::vector<ChannelMatrix> cliffords{ChannelMatrix::identity(1)};
    for (std::size_t i = 0; i < cliffords.size(); ++i) {
        for (GateKind k : {GateKind::H, GateKind::S}) {
            const ChannelMatrix m = channel_clifford_gate(Gate::one(k, 0), 1) * cliffords[i];
            if (std::find(cliffords.begin(), cliffords.end(), m) == cliffords.end()) cliffords.push_back(m);
        }
    }
    std::vector<ChannelMatrix> products{ChannelMatrix::identity(1)};
    for (std::size_t i = 0, level_end = 1, depth = 0; depth < 3; ++depth) {
        const std::size_t stop = level_end;
        for (; i < stop; ++i)
            for (std::uint32_t p = 1; p < 4; ++p) products.push_back(channel_R(Pauli::from_index(p, 1)) * products[i]);
        level_end = products.size();
    }
    std::vector<std::pair<ChannelMatrix, CosetLabel>> all;
    for (const auto& a : products)
        for (const auto& d : cliffords) {
            const ChannelMatrix m = a * d;
            all.emplace_back(m, coset_label(m));
        }
    std::uint64_t equal_pairs = 0, sound = 0, separated = 0, unequal = 0;
    for (std::size_t i = 0; i < all.size(); ++i)
        for (std::size_t j = i + 1; j < all.size(); ++j) {
            const bool q = clifford_quotient(all[i].first, all[j].first).has_value();
            if (all[i].second == all[j].second) {
                ++equal_pairs;
                sound += q;
            } else {
                ++unequal;
                separated += !q;
            }
        }
    const double s = seconds_since(t0);
    return {invariant == kLabelChecks && sound == equal_pairs && separated == unequal && s < 300,
            fmt("invariance %d/%d; %zu Cliffords x %zu products: %llu/%llu equal-label pairs have a "
                "signed-permutation quotient, %llu/%llu unequal pairs have none; %.1f s",
                invariant, kLabelChecks, cliffords.size(), products.size(), (unsigned long long)sound,
                (unsigned long long)equal_pairs, (unsigned long long)separated, (unsigned long long)unequal, s)};
}

// 3. Forced walk against exhaustive meet-in-the-middle on minimal t.
Verdict oracle_equivalence() {
    const auto t0 = clock_type::now();
    std::vector<ChannelMatrix> targets;
    {
        std::map<std::string, int> seen;
        std::vector<ChannelMatrix> frontier{ChannelMatrix::identity(1)};
        seen[coset_label(frontier[0]).hex()] = 0;
        targets.push_back(frontier[0]);
        for (int d = 1; d <= 4; ++d) {
            std::vector<ChannelMatrix> next;
            for (const auto& m : frontier)
                for (std::uint32_t p = 1; p < 4; ++p) {
                    ChannelMatrix r = channel_R(Pauli::from_index(p, 1)) * m;
                    if (seen.emplace(coset_label(r).hex(), d).second) {
                        targets.push_back(r);
                        next.push_back(std::move(r));
                    }
                }
            frontier = std::move(next);
        }
    }
    const std::size_t n1 = targets.size();
    std::mt19937_64 rng(kSeed + 3);
    for (int i = 0; i < kPlantedN2; ++i) {
        const int t = 1 + static_cast<int>(rng() % 4);
        targets.push_back(rotation_product(random_paulis(rng, 2, t), 2) *
                          channel_of_circuit(random_clifford_circuit(rng, 2, 6), 2));
    }
    int agree = 0;
    std::string misses;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        SynthesisOptions ex;
        ex.engine = Engine::Exhaustive;
        const auto a = synthesize_target(targets[i], ex);
        SynthesisOptions wk;
        wk.engine = Engine::Walk;
        wk.seed = kSeed + 1000 + i;
        const auto b = synthesize_target(targets[i], wk);
        if (a.found && b.found && a.t == b.t) {
            ++agree;
        } else {
            misses += fmt(" [target %zu: exhaustive t=%d, walk t=%d]", i, a.t, b.found ? b.t : -1);
        }
    }
    const double s = seconds_since(t0);
    return {agree == static_cast<int>(targets.size()) && s < 900,
            fmt("%d/%zu agree (%zu n=1 cosets with t<=4, %d planted n=2), %.1f s", agree, targets.size(), n1,
                kPlantedN2, s) +
                misses};
}

Verdict t7_circuit(const std::string& file, bool require_exhaustive_exclusion) {
    const auto t0 = clock_type::now();
    const Circuit c = load(file);
    SynthesisOptions o;
    o.seed = kSeed + 4;
    const SynthesisResult r = synthesize(c.gates, c.n, o);
    bool excluded = true;
    for (const auto& rec : r.per_t) {
        if (rec.t < 7) excluded = excluded && rec.complete && !rec.found;
    }
    const bool verified = r.found && verify_gates(r.gates, c.n, channel_of_circuit(c.gates, c.n)) &&
                          verify_result_json(result_to_json(r), c);
    const bool flag_ok = r.optimality == Optimality::ProvenOptimal || r.optimality == Optimality::HeuristicOptimal;
    std::string seq;
    for (const auto& p : r.pauli_sequence) seq += " " + p.str();
    return {r.found && r.t == 7 && verified && flag_ok && (!require_exhaustive_exclusion || excluded),
            fmt("%s: t=%d %s via %s, gates recompose: %s, t<=6 excluded exhaustively: %s, %.1f s; sequence",
                file.c_str(), r.t, std::string(optimality_name(r.optimality)).c_str(), r.engine.c_str(),
                verified ? "yes" : "no", excluded ? "yes" : "no", seconds_since(t0)) +
                seq};
}

// 4. Toffoli.
Verdict toffoli() { return t7_circuit("toffoli.txt", true); }

// 5. Fredkin and Peres.
Verdict fredkin_peres() {
    const Verdict a = t7_circuit("fredkin.txt", false), b = t7_circuit("peres.txt", false);
    return {a.pass && b.pass, a.detail + " | " + b.detail};
}

// 6. Scaling trends on a fixed planted n=2, t=5 instance.
Verdict scaling() {
    const auto t0 = clock_type::now();
    std::mt19937_64 rng(kSeed + 6);
    ChannelMatrix target;
    for (;;) {
        target = rotation_product(random_paulis(rng, 2, 5), 2) *
                 channel_of_circuit(random_clifford_circuit(rng, 2, 6), 2);
        SynthesisOptions ex;
        ex.t_max = 4;
        ex.engine = Engine::Exhaustive;
        if (!synthesize_target(target, ex).found) break;  // minimal t is exactly 5
    }
    auto walk_opts = [](std::uint64_t seed) {
        SynthesisOptions o;
        o.engine = Engine::Walk;
        o.t_min = o.t_max = 5;
        o.seed = seed;
        o.emit_gate_list = false;
        return o;
    };

    std::vector<double> one, four;
    int found_a = 0;
    for (int i = 0; i < kScalingRuns; ++i) {
        SynthesisOptions o = walk_opts(kSeed + 600 + i);
        auto s = clock_type::now();
        found_a += synthesize_target(target, o).found;
        one.push_back(seconds_since(s));
        o.threads = 6;
        o.roles = RoleConfig{4, 1, 1, false};
        s = clock_type::now();
        found_a += synthesize_target(target, o).found;
        four.push_back(seconds_since(s));
    }
    const double ratio = median(four) / median(one);

    std::vector<double> steps_half, steps_32;
    int found_b = 0;
    for (int i = 0; i < kScalingRuns; ++i) {
        SynthesisOptions o = walk_opts(kSeed + 700 + i);
        o.theta_exp = 1;
        auto r = synthesize_target(target, o);
        found_b += r.found;
        steps_half.push_back(static_cast<double>(r.stats.steps));
        o.theta_exp = 5;
        r = synthesize_target(target, o);
        found_b += r.found;
        steps_32.push_back(static_cast<double>(r.stats.steps));
    }
    const bool pass_a = ratio < kSpeedupRatio;
    const bool pass_b = median(steps_half) < median(steps_32);
    const double s = seconds_since(t0);
    return {pass_a && pass_b && s < 1800,
            fmt("(a) %s: median wall 4 workers / 1 worker = %.3f / %.3f s = %.2f (need < %.1f; %u hardware "
                "threads), %d/%d found; (b) %s: median steps theta=1/2 %.0f vs theta=1/32 %.0f, %d/%d found; "
                "%.1f s",
                pass_a ? "PASS" : "FAIL", median(four), median(one), ratio, kSpeedupRatio,
                std::thread::hardware_concurrency(), found_a, 2 * kScalingRuns, pass_b ? "PASS" : "FAIL",
                median(steps_half), median(steps_32), found_b, 2 * kScalingRuns, s)};
}

// 7. Cost model worked values and monotonicity.
Verdict cost_model() {
    const auto t0 = clock_type::now();
    int bad = 0;
    std::string why;
    auto expect = [&](bool ok, const char* what) {
        if (!ok) {
            ++bad;
            why += std::string(" ") + what;
        }
    };
    expect(cost::collision_steps(1 << 20, 1 << 10, 1.0 / 32) == 96.0, "collision_steps");
    double p = 1;
    for (int i = 0; i < 11; ++i) p *= 63;
    const double g = cost::runtime_general(63, 7, 1 << 20, 1, 1);
    expect(std::abs(g / (std::sqrt(p) / 1024) - 1) < 1e-12, "general");
    expect(cost::runtime_general(63, 7, 1 << 20, 2, 1) == g / 2, "general m");
    expect(cost::runtime_general(63, 7, 1 << 22, 1, 1) == g / 2, "general w");
    expect(cost::runtime_tcount(3, 7, 1 << 20, 4096, 3) == std::exp2(31), "tcount");
    expect(cost::runtime_refined(1, 2, 16, 1, 1, 2) == 160.0, "refined");
    const double w = std::pow(4.0, 3) * 1000;
    expect(std::abs(cost::runtime_refined(1, 7, w, 1, 0.5, 3) / cost::runtime_refined_limit(1, 7, 1, 0.5, 3) - 1) <
               0.01,
           "limit");
    const std::vector<double> ws = {1 << 8, 1 << 12, 1 << 16, 1 << 20};
    const std::vector<double> ms = {1, 2, 16, 4096};
    for (int n = 1; n <= 3; ++n)
        for (int t = 1; t <= 8; ++t) {
            for (std::size_t i = 0; i + 1 < ws.size(); ++i) {
                expect(cost::runtime_tcount(n, t, ws[i], 1, 2) > cost::runtime_tcount(n, t, ws[i + 1], 1, 2), "w");
                expect(cost::runtime_refined(n, t, ws[i], 1, 0.5, 2) > cost::runtime_refined(n, t, ws[i + 1], 1, 0.5, 2),
                       "w refined");
            }
            for (std::size_t i = 0; i + 1 < ms.size(); ++i)
                expect(cost::runtime_tcount(n, t, 1 << 20, ms[i], 2) > cost::runtime_tcount(n, t, 1 << 20, ms[i + 1], 2),
                       "m");
            expect(cost::runtime_tcount(n, t, 1 << 20, 1, 2) < cost::runtime_tcount(n, t + 1, 1 << 20, 1, 2), "t");
            expect(cost::runtime_tcount(n, t, 1 << 20, 1, 2) < cost::runtime_tcount(n + 1, t, 1 << 20, 1, 2), "n");
        }
    const double s = seconds_since(t0);
    return {bad == 0 && s < 1, fmt("%d mismatches, %.4f s", bad, s) + why};
}

// 8. Trail length and distinguished-point statistics.
Verdict walk_statistics() {
    const auto t0 = clock_type::now();
    // The mean is only 1/theta when the coset space reached by the walk is much
    // larger than 1/theta^2; at n=3, t=6 the distinct cosets are few enough
    // that short cycles truncate trails.
    const WalkConfig cfg = WalkConfig::make(3, 8, 0, kTrailThetaExp, kSeed + 8);
    const WalkContext ctx(cfg, channel_R(Pauli::parse("XYZ")));
    Walker walker(ctx);
    std::mt19937_64 rng(kSeed + 8);
    double total = 0;
    int complete = 0;
    for (int i = 0; i < kTrails; ++i) {
        const TrailOutcome o = walker.run_trail(detail::random_point(rng, cfg.space_size()));
        if (o.status != TrailStatus::Complete) continue;
        total += static_cast<double>(o.triple.length);
        ++complete;
    }
    const double expected = std::exp2(kTrailThetaExp);
    const double mean = total / std::max(complete, 1);

    const WalkConfig dcfg = WalkConfig::make(3, 8, 0, 4, kSeed + 9);
    const WalkContext dctx(dcfg, ChannelMatrix::identity(3));
    Walker dw(dctx);
    int hits = 0;
    for (int i = 0; i < kDpSamples; ++i) hits += dw.is_distinguished(detail::random_point(rng, dcfg.space_size()));
    const double th = 1.0 / 16, frac = static_cast<double>(hits) / kDpSamples;
    const double sigma = std::sqrt(th * (1 - th) / kDpSamples);
    const double s = seconds_since(t0);
    const bool ok = std::abs(mean - expected) <= kTrailTol * expected &&
                    std::abs(frac - th) <= kDpSigmas * sigma && complete >= kTrails * 99 / 100 && s < 60;
    return {ok, fmt("mean trail %.2f vs %.0f (+-%.0f%%), %d/%d complete; DP fraction %.5f vs %.5f "
                    "(%.2f sigma); %.1f s",
                    mean, expected, kTrailTol * 100, complete, kTrails, frac, th, std::abs(frac - th) / sigma, s)};
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i < argc; ++i) {
        if (std::strncmp(argv[i], "--only=", 7) == 0) only = std::atoi(argv[i] + 7);
    }
    const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria = {
        {"channel-rep matches dense oracle", channel_rep},
        {"coset label invariance and soundness", label_invariance},
        {"walk agrees with exhaustive search", oracle_equivalence},
        {"Toffoli T-count 7", toffoli},
        {"Fredkin and Peres T-count 7", fredkin_peres},
        {"scaling trends", scaling},
        {"cost model values and grids", cost_model},
        {"walk statistics", walk_statistics},
    };
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (only && only != static_cast<int>(k + 1)) continue;
        Verdict v;
        try {
            v = criteria[k].second();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        failed += !v.pass;
        std::printf("[%s] %zu. %s: %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first, v.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
