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
#include <charconv>
#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "tclaw/hash.hpp"
#include "tclaw/synthesis.hpp"

namespace tclaw {

inline constexpr int kResultSchemaVersion = 1;

class ParseError : public DomainError {
   public:
    ParseError(int line, const std::string& what)
        : DomainError("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

   private:
    int line_;
};

struct Circuit {
    int n = 0;
    std::vector<Gate> gates;
};

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
        std::size_t j = i;
        while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

inline int parse_index(std::string_view tok, int line) {
    int v = -1;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || v < 0) {
        throw ParseError(line, "bad qubit index '" + std::string(tok) + "'");
    }
    return v;
}

}  // namespace detail

/// One gate per line ("H 0", "CNOT 0 1", ...). '#' starts a comment. An
/// optional "qubits N" line fixes the register size; otherwise it is one more
/// than the largest index used.
inline Circuit parse_circuit(std::string_view text) {
    Circuit c;
    int declared = -1;
    int max_index = -1;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        const auto toks = detail::split_ws(line);
        if (toks.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (toks[0] == "qubits") {
            if (toks.size() != 2) throw ParseError(line_no, "expected 'qubits N'");
            if (declared >= 0 || !c.gates.empty()) {
                throw ParseError(line_no, "'qubits' must come once, before any gate");
            }
            declared = detail::parse_index(toks[1], line_no);
            if (declared < 1 || declared > kMaxQubits) {
                throw ParseError(line_no, "qubit count must lie in [1, " + std::to_string(kMaxQubits) + "]");
            }
            continue;
        }
        const auto kind = gate_kind_from_name(toks[0]);
        if (!kind) throw ParseError(line_no, "unknown gate '" + std::string(toks[0]) + "'");
        const int arity = gate_arity(*kind);
        if (static_cast<int>(toks.size()) != arity + 1) {
            throw ParseError(line_no, std::string(toks[0]) + " takes " + std::to_string(arity) +
                                          " qubit" + (arity == 1 ? "" : "s"));
        }
        Gate g = arity == 1 ? Gate::one(*kind, detail::parse_index(toks[1], line_no))
                            : Gate::two(*kind, detail::parse_index(toks[1], line_no),
                                        detail::parse_index(toks[2], line_no));
        if (arity == 2 && g.qubits[0] == g.qubits[1]) {
            throw ParseError(line_no, "repeated qubit in " + g.str());
        }
        if (declared >= 0) {
            for (int k = 0; k < arity; ++k) {
                if (g.qubits[k] >= declared) {
                    throw ParseError(line_no, "qubit " + std::to_string(g.qubits[k]) + " >= " +
                                                  std::to_string(declared));
                }
            }
        }
        max_index = std::max({max_index, g.qubits[0], g.qubits[1]});
        if (max_index >= kMaxQubits) throw ParseError(line_no, "too many qubits");
        c.gates.push_back(g);
        if (end == text.size()) break;
    }
    c.n = declared >= 0 ? declared : max_index + 1;
    if (c.n < 1) throw ParseError(line_no, "empty circuit needs a 'qubits N' line");
    return c;
}

inline std::string format_circuit(const Circuit& c) {
    std::string s = "qubits " + std::to_string(c.n) + "\n";
    for (const Gate& g : c.gates) s += g.str() + "\n";
    return s;
}

/// x bits in the low n bits, z bits above, lowercase hex.
inline std::string pauli_symplectic_hex(const Pauli& p) {
    const std::uint64_t v = std::uint64_t{p.x()} | (std::uint64_t{p.z()} << p.num_qubits());
    std::ostringstream os;
    os << std::hex << v;
    return os.str();
}

inline Pauli pauli_from_symplectic_hex(std::string_view hex, int n) {
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(hex.data(), hex.data() + hex.size(), v, 16);
    if (ec != std::errc() || p != hex.data() + hex.size() || hex.empty()) {
        throw DomainError("bad symplectic hex '" + std::string(hex) + "'");
    }
    const std::uint64_t mask = (std::uint64_t{1} << n) - 1;
    if ((v >> (2 * n)) != 0) throw DomainError("symplectic hex wider than 2n bits");
    return Pauli(n, static_cast<std::uint32_t>(v & mask), static_cast<std::uint32_t>((v >> n) & mask));
}

inline Tableau tableau_from_rows(const std::vector<std::string>& rows, int n) {
    if (static_cast<int>(rows.size()) != 2 * n) throw DomainError("tableau needs 2n rows");
    Tableau tab{n, {}};
    for (const auto& r : rows) {
        if (r.size() != static_cast<std::size_t>(n) + 1 || (r[0] != '+' && r[0] != '-')) {
            throw DomainError("bad tableau row '" + r + "'");
        }
        const Pauli p = Pauli::parse(std::string_view(r).substr(1));
        if (p.is_identity()) throw DomainError("tableau row maps a generator to the identity");
        tab.images.push_back(PhasedPauli{p, r[0] == '-' ? 2 : 0});
    }
    return tab;
}

namespace detail {

inline nlohmann::json stats_json(const SearchStats& s) {
    return {{"steps", s.steps},
            {"traceback_steps", s.traceback_steps},
            {"trails", s.trails},
            {"abandoned_trails", s.abandoned_trails},
            {"dp_insertions", s.dp_insertions},
            {"duplicate_starts", s.duplicate_starts},
            {"evictions", s.evictions},
            {"candidate_pairs", s.candidate_pairs},
            {"prefix_merges", s.prefix_merges},
            {"same_side_collisions", s.same_side_collisions},
            {"claws", s.claws},
            {"false_claws", s.false_claws}};
}

}  // namespace detail

inline nlohmann::json result_to_json(const SynthesisResult& r) {
    using nlohmann::json;
    json j;
    j["schema_version"] = kResultSchemaVersion;
    j["n"] = r.n;
    j["found"] = r.found;
    j["t"] = r.found ? json(r.t) : json(nullptr);
    j["optimality_flag"] = std::string(optimality_name(r.optimality));
    json hex = json::array(), strs = json::array();
    for (const Pauli& p : r.pauli_sequence) {
        hex.push_back(pauli_symplectic_hex(p));
        strs.push_back(p.str());
    }
    j["pauli_sequence"] = {{"symplectic_hex", hex}, {"strings", strs}};
    j["clifford_tableau"] = r.found ? json(r.tableau.rows()) : json(nullptr);
    json gl = json::array();
    for (const Gate& g : r.gates) gl.push_back(g.str());
    j["gate_list"] = gl;
    j["engine"] = r.engine;
    j["seed"] = std::to_string(r.seed);
    j["hash"] = kHashIdentifier;
    j["stats"] = detail::stats_json(r.stats);
    json per = json::array();
    for (const TRecord& rec : r.per_t) {
        per.push_back({{"t", rec.t},
                       {"engine", rec.engine},
                       {"found", rec.found},
                       {"complete", rec.complete},
                       {"v_size", u128_to_string(rec.v_size)},
                       {"w_size", u128_to_string(rec.w_size)},
                       {"theta_exp", rec.theta_exp},
                       {"budget_per_chunk", rec.budget_per_chunk},
                       {"chunks", rec.chunks},
                       {"rounds", rec.rounds},
                       {"stats", detail::stats_json(rec.stats)},
                       {"wall_s", rec.wall_s}});
    }
    j["per_t"] = per;
    j["wall_s"] = r.wall_s;
    return j;
}

/// Rechecks a result document against the circuit it claims to implement.
/// Returns false (with a reason) for anything that does not recompose;
/// malformed documents are reported the same way.
inline bool verify_result_json(const nlohmann::json& j, const Circuit& c, std::string* why = nullptr) {
    auto fail = [&](const std::string& m) {
        if (why) *why = m;
        return false;
    };
    try {
        if (j.at("schema_version").get<int>() != kResultSchemaVersion) return fail("schema version");
        if (!j.at("found").get<bool>()) return fail("result records no decomposition");
        const int n = j.at("n").get<int>();
        if (n != c.n) return fail("qubit count differs from the circuit");
        const int t = j.at("t").get<int>();
        const auto strs = j.at("pauli_sequence").at("strings").get<std::vector<std::string>>();
        const auto hex = j.at("pauli_sequence").at("symplectic_hex").get<std::vector<std::string>>();
        if (static_cast<int>(strs.size()) != t || hex.size() != strs.size()) {
            return fail("pauli_sequence length differs from t");
        }
        std::vector<Pauli> seq;
        for (std::size_t k = 0; k < strs.size(); ++k) {
            const Pauli p = Pauli::parse(strs[k]);
            if (p.num_qubits() != n || p.is_identity()) return fail("bad Pauli " + strs[k]);
            if (pauli_from_symplectic_hex(hex[k], n) != p) return fail("hex and string forms disagree");
            seq.push_back(p);
        }
        const Tableau tab = tableau_from_rows(j.at("clifford_tableau").get<std::vector<std::string>>(), n);
        const ChannelMatrix d = tableau_channel(tab);
        if (!(extract_clifford(d) == tab)) return fail("tableau is not a Clifford");
        const ChannelMatrix target = channel_of_circuit(c.gates, c.n);
        if (!verify_solution(seq, d, target)) return fail("Pauli sequence and tableau do not recompose");
        std::vector<Gate> gates;
        for (const auto& line : j.at("gate_list").get<std::vector<std::string>>()) {
            const Circuit one = parse_circuit("qubits " + std::to_string(n) + "\n" + line);
            if (one.gates.size() != 1) return fail("bad gate_list entry '" + line + "'");
            gates.push_back(one.gates[0]);
        }
        if (!verify_gates(gates, n, target)) return fail("gate_list does not reproduce the circuit");
        std::size_t tcount = 0;
        for (const Gate& g : gates) tcount += !is_clifford_kind(g.kind);
        if (static_cast<int>(tcount) != t) return fail("gate_list T-count differs from t");
    } catch (const nlohmann::json::exception& e) {
        return fail(std::string("malformed result: ") + e.what());
    } catch (const DomainError& e) {
        return fail(e.what());
    }
    return true;
}

}  // namespace tclaw
