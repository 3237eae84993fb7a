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

// tclaw: T-count-optimal synthesis by parallel collision search.
//
// Exit codes: 0 success / found, 1 not found (or verification failed),
// 2 usage or input error, 3 internal-consistency error.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "tclaw/circuit_io.hpp"
#include "tclaw/cost_model.hpp"

namespace {

using namespace tclaw;

constexpr int kExitFound = 0;
constexpr int kExitNotFound = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw UsageError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

Circuit load_circuit(const std::string& path) {
    try {
        return parse_circuit(read_file(path));
    } catch (const ParseError& e) {
        throw UsageError(path + ": " + e.what());
    }
}

int default_threads() {
    if (const char* env = std::getenv("TCLAW_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 4096) return static_cast<int>(v);
        throw UsageError("TCLAW_THREADS must be an integer in [1, 4096]");
    }
    return 1;
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw UsageError("cannot write " + path);
    out << text << "\n";
}

std::string pow2(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v << " (2^" << std::fixed;
    os.precision(2);
    os << std::log2(v) << ")";
    return os.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"T-count-optimal Clifford+T synthesis by parallel collision search"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "tclaw 0.1.0");
    app.footer(
        "Exit codes: 0 found/success, 1 not found or verification failed, 2 usage error, "
        "3 internal-consistency error.\nTCLAW_THREADS sets the default --threads.");

    // synth
    std::string in_path, out_path, engine_name_opt = "auto";
    SynthesisOptions so;
    std::optional<std::uint64_t> seed;
    int threads = 0, workers = 0, collectors = 0, verifiers = 0;
    auto* synth = app.add_subcommand("synth", "Find a minimal-T decomposition of a circuit");
    synth->add_option("-i,--input", in_path, "Circuit file")->required();
    synth->add_option("-o,--output", out_path, "Result JSON path (default: stdout)");
    synth->add_option("--t-min", so.t_min, "Smallest T-count to try")->check(CLI::Range(0, 64));
    synth->add_option("--t-max", so.t_max, "Largest T-count to try")->check(CLI::Range(0, 64));
    synth->add_option("--theta-exp", so.theta_exp,
                      "Distinguished-point exponent (theta = 2^-e); default from the cost model")
        ->check(CLI::Range(0, 62));
    synth->add_option("--threads", threads, "Total threads (default: TCLAW_THREADS or 1)")
        ->check(CLI::Range(1, 4096));
    synth->add_option("--workers", workers, "Walk worker threads")->check(CLI::Range(1, 4096));
    synth->add_option("--collectors", collectors, "Distinguished-point collector threads")
        ->check(CLI::Range(1, 4096));
    synth->add_option("--verifiers", verifiers, "Claw verifier threads")->check(CLI::Range(1, 4096));
    synth->add_option("--store-capacity", so.store_capacity, "Distinguished-point store slots (w)")
        ->check(CLI::Range(std::size_t{1}, std::size_t{1} << 34));
    synth->add_option("--seed", seed, "Run seed (default: random, recorded in the output)");
    synth->add_flag("--chunk-parallel", so.chunk_parallel,
                    "Search chunks of odd T-counts concurrently instead of one chunk at a time");
    synth->add_option("--engine", engine_name_opt, "auto, walk or exhaustive")
        ->check(CLI::IsMember({"auto", "walk", "exhaustive"}));
    synth->add_option("--exhaustive-threshold", so.exhaustive_threshold,
                      "Largest meet-in-the-middle side enumerated exhaustively");
    synth->add_option("--rounds", so.rounds, "Walk rounds (fresh salt each) per T-count")
        ->check(CLI::Range(1, 1000));
    synth->add_option("--budget-factor", so.budget_factor, "Walk steps per chunk, in units of 2x the space")
        ->check(CLI::Range(std::uint64_t{1}, std::uint64_t{1} << 20));

    // verify
    std::string v_circuit, v_result;
    auto* verify = app.add_subcommand("verify", "Recheck a result file against a circuit");
    verify->add_option("-i,--input", v_circuit, "Circuit file")->required();
    verify->add_option("-r,--result", v_result, "Result JSON written by synth")->required();

    // label
    std::string l_circuit;
    auto* label = app.add_subcommand("label", "Print the Clifford-coset label of a circuit");
    label->add_option("-i,--input", l_circuit, "Circuit file")->required();

    // estimate
    int e_n = 3, e_t = 7;
    double e_w = std::exp2(20), e_m = 1, e_alpha = 3, e_theta = 0;
    auto* estimate = app.add_subcommand("estimate", "Print the runtime cost model");
    estimate->add_option("-n,--qubits", e_n, "Qubits")->check(CLI::Range(1, 16));
    estimate->add_option("-t,--t-count", e_t, "T-count")->check(CLI::Range(1, 64));
    estimate->add_option("-w,--memory", e_w, "Stored distinguished points")->check(CLI::PositiveNumber);
    estimate->add_option("-m,--processors", e_m, "Parallel processors")->check(CLI::PositiveNumber);
    estimate->add_option("--alpha", e_alpha, "Matrix-multiplication exponent")->check(CLI::PositiveNumber);
    estimate->add_option("--theta", e_theta, "Distinguished fraction (default: optimal)")
        ->check(CLI::Range(0.0, 1.0));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitUsage;
    }

    try {
        if (*synth) {
            const Circuit c = load_circuit(in_path);
            if (so.t_min > so.t_max) throw UsageError("--t-min exceeds --t-max");
            so.engine = *engine_from_name(engine_name_opt);
            so.seed = seed ? *seed : std::random_device{}() * 0x100000000ull + std::random_device{}();
            so.threads = threads > 0 ? threads : default_threads();
            if (workers || collectors || verifiers) {
                RoleConfig r = RoleConfig::for_threads(so.threads);
                if (workers) r.workers = workers;
                if (collectors) r.collectors = collectors;
                if (verifiers) r.verifiers = verifiers;
                r.inline_mode = false;
                so.roles = r;
            }
            const SynthesisResult r = synthesize(c.gates, c.n, so);
            write_output(out_path, result_to_json(r).dump(2));
            if (r.found) {
                std::cerr << "t = " << r.t << " (" << optimality_name(r.optimality) << ", " << r.engine
                          << ", seed " << r.seed << ")\n";
            } else {
                std::cerr << "no decomposition with T-count in [" << so.t_min << ", " << so.t_max
                          << "] found (seed " << r.seed << ")\n";
            }
            return r.found ? kExitFound : kExitNotFound;
        }
        if (*verify) {
            const Circuit c = load_circuit(v_circuit);
            nlohmann::json j;
            try {
                j = nlohmann::json::parse(read_file(v_result));
            } catch (const nlohmann::json::parse_error& e) {
                std::cerr << "FAIL: " << e.what() << "\n";
                return kExitNotFound;
            }
            std::string why;
            if (verify_result_json(j, c, &why)) {
                std::cout << "OK\n";
                return kExitFound;
            }
            std::cout << "FAIL: " << why << "\n";
            return kExitNotFound;
        }
        if (*label) {
            const Circuit c = load_circuit(l_circuit);
            std::cout << coset_label(channel_of_circuit(c.gates, c.n)).hex() << "\n";
            return kExitFound;
        }
        if (*estimate) {
            const double xi = std::pow(4.0, e_n) - 1;
            const double theta = e_theta > 0 ? e_theta : cost::optimal_theta(e_n, e_t, e_w);
            std::cout << "n=" << e_n << " t=" << e_t << " w=" << e_w << " m=" << e_m << " alpha=" << e_alpha
                      << " theta=" << theta << "\n";
            std::cout << "general (tau=1):          " << pow2(cost::runtime_general(xi, e_t, e_w, e_m, 1)) << "\n";
            std::cout << "matrix multiplication:    "
                      << pow2(cost::runtime_matmul(xi, e_t, e_w, e_m, e_alpha, e_n)) << "\n";
            std::cout << "T-count form:             " << pow2(cost::runtime_tcount(e_n, e_t, e_w, e_m, e_alpha))
                      << "\n";
            std::cout << "refined:                  "
                      << pow2(cost::runtime_refined(e_n, e_t, e_w, e_m, theta, e_alpha)) << "\n";
            std::cout << "refined, w -> infinity:   "
                      << pow2(cost::runtime_refined_limit(e_n, e_t, e_m, theta, e_alpha)) << "\n";
            std::cout << "optimal theta exponent:   " << cost::optimal_theta_exp(e_n, e_t, e_w) << "\n";
            return kExitFound;
        }
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const InternalConsistencyError& e) {
        std::cerr << "internal consistency error: " << e.what() << "\n";
        return kExitInternal;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitUsage;
}
