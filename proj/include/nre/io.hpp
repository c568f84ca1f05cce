#pragma once

// JSON and CSV documents. Every integer is written as an exact decimal and
// object keys come out sorted (nlohmann::json default object type).

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nre/census.hpp"
#include "nre/chains.hpp"
#include "nre/digest.hpp"
#include "nre/verify.hpp"

namespace nre {

using json = nlohmann::json;

inline constexpr std::string_view kToolVersion = "1.0.0";

inline std::string bits_string(const Bits& bits) {
    std::string s;
    s.reserve(bits.size());
    for (auto b : bits) s.push_back(b ? '1' : '0');
    return s;
}

/// Run-length pairs [bit, count].
inline json run_length(const Bits& bits) {
    json out = json::array();
    for (std::size_t i = 0; i < bits.size();) {
        std::size_t j = i;
        while (j < bits.size() && bits[j] == bits[i]) ++j;
        out.push_back(json::array({bits[i], j - i}));
        i = j;
    }
    return out;
}

inline json manifest(std::string_view command, json params, json input_digests = json::object()) {
    return {{"command", command},
            {"params", std::move(params)},
            {"tool_version", kToolVersion},
            {"input_digests", std::move(input_digests)}};
}

inline json equation_to_json(const NeuronEquation& eq, json provenance = json::object()) {
    return {{"memory_k", eq.memory()},
            {"threshold2", eq.threshold2()},
            {"coeffs", std::vector<std::int64_t>(eq.coeffs().begin(), eq.coeffs().end())},
            {"digest", equation_digest(eq)},
            {"provenance", std::move(provenance)}};
}

inline NeuronEquation equation_from_json(const json& j) {
    try {
        auto coeffs = j.at("coeffs").get<std::vector<std::int64_t>>();
        if (j.at("memory_k").get<std::size_t>() != coeffs.size())
            throw ParameterError("equation file: memory_k does not match the coefficient count");
        return NeuronEquation(std::move(coeffs), j.at("threshold2").get<std::int64_t>());
    } catch (const json::exception& e) {
        throw ParameterError(std::string("malformed equation document: ") + e.what());
    }
}

inline json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParameterError("cannot parse " + path.string() + ": " + e.what());
    }
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline std::string dump_document(const json& j) { return j.dump(2) + "\n"; }

inline json summary_to_json(const CycleSummary& c) {
    return {{"transient", c.transient},
            {"period", c.period},
            {"attractor_key_hex", c.attractor_key.to_hex()},
            {"attractor_bits", bits_string(c.attractor_bits)},
            {"entry_hex", c.entry.to_hex()}};
}

inline json census_to_json(const BasinCensus& c) {
    json chi = json::array();
    for (const auto& [p, n] : c.chi) chi.push_back({{"period", p}, {"count", n}});
    json transients = json::array();
    for (const auto& [t, n] : c.transients) transients.push_back({{"transient", t}, {"count", n}});
    json attractors = json::array();
    for (const auto& a : c.attractors)
        attractors.push_back({{"key_hex", a.key.to_hex()},
                              {"period", a.period},
                              {"basin", a.basin},
                              {"witness_hex", a.witness.to_hex()}});
    json mode = {{"kind", c.mode.kind == CensusKind::Exact ? "exact" : "sampled"}};
    if (c.mode.kind == CensusKind::Sampled) {
        mode["samples"] = c.mode.samples;
        mode["seed"] = c.mode.seed;
    }
    return {{"memory_k", c.memory_k}, {"total", c.total},           {"counted", c.counted()},
            {"mode", mode},           {"chi", chi},                 {"transients", transients},
            {"attractors", attractors}};
}

/// `period,count` rows, preceded by a comment naming the manifest digest.
inline std::string census_csv(const BasinCensus& c, const std::string& manifest_digest) {
    std::ostringstream out;
    out << "# manifest-sha256=" << manifest_digest << '\n';
    out << "period,count\n";
    for (const auto& [p, n] : c.chi) out << p << ',' << n << '\n';
    return out.str();
}

inline json period_support_to_json(const PeriodSupportReport& r) {
    json violators = json::array();
    for (const auto& v : r.violators)
        violators.push_back({{"period", v.period}, {"count", v.count}, {"witness_hex", v.witness.to_hex()}});
    return {{"pass", r.pass}, {"predicted", r.predicted}, {"violators", violators}};
}

inline json attainment_to_json(const AttainmentReport& r) {
    json cases = json::array();
    for (const auto& c : r.cases) {
        json slots = json::array();
        for (const auto& s : c.slots) slots.push_back(s ? json(*s) : json("zero"));
        cases.push_back({{"slots", slots},
                         {"expected", c.expected},
                         {"measured", c.measured},
                         {"transient", c.transient},
                         {"ok", c.ok}});
    }
    json out = {{"pass", r.pass},
                {"surviving_primes", r.surviving},
                {"predicted", r.predicted},
                {"attained", r.attained},
                {"cases", cases}};
    out["d"] = r.d ? json(*r.d) : json(nullptr);
    return out;
}

inline json chain_profile_to_json(const ChainProfile& p) {
    json chains = json::array();
    for (const auto& e : p.chains) chains.push_back({{"step", e.step}, {"offsets", e.offsets}});
    return {{"null_attractor", p.null_attractor},
            {"violation", p.violation},
            {"reason", p.reason},
            {"prime_steps", p.prime_steps},
            {"chains", chains}};
}

inline json composition_to_json(const CompositionReport& r) {
    json out = {{"g", r.g},
                {"slot_transients", r.slot_transients},
                {"slot_periods", r.slot_periods},
                {"expected_transient", r.expected_transient},
                {"measured_transient", r.measured_transient},
                {"measured_period", r.measured_period},
                {"pass", r.pass}};
    out["expected_period"] = r.expected_period ? json(*r.expected_period) : json("divisor of g");
    return out;
}

inline json classic_to_json(const ClassicReport& r) {
    json violations = json::array();
    for (const auto& v : r.violations)
        violations.push_back({{"coeffs2", v.coeffs},
                              {"threshold2", v.threshold2},
                              {"init_hex", v.init.to_hex()},
                              {"period", v.period}});
    json kind = {{"shape", shape_name(r.kind.shape)}};
    if (r.kind.shape == ClassicShape::JPalindromic) kind["j"] = r.kind.j;
    if (r.kind.shape == ClassicShape::GeometricNeg || r.kind.shape == ClassicShape::GeometricPos)
        kind["b"] = {{"numerator", r.kind.b.numerator}, {"exponent", r.kind.b.exponent}};
    return {{"pass", r.pass},
            {"kind", kind},
            {"k", r.k},
            {"trials", r.trials},
            {"periods_seen", r.periods_seen},
            {"violations", violations}};
}

inline json sweep_to_json(const SweepReport& r) {
    json rows = json::array();
    for (const auto& row : r.rows) {
        json observed = json::array();
        for (const auto& [p, n] : row.observed) observed.push_back({{"period", p}, {"count", n}});
        rows.push_back({{"d", row.d},
                        {"surviving_primes", row.surviving},
                        {"predicted", row.predicted},
                        {"observed", observed},
                        {"contained", row.contained},
                        {"attained", row.attainment.pass},
                        {"attainment", attainment_to_json(row.attainment)}});
    }
    return {{"m", r.m},
            {"theta", r.theta},
            {"samples_per_d", r.samples_per_d},
            {"seed", r.seed},
            {"rows", rows},
            {"nested", r.nested},
            {"ends_fixed", r.ends_fixed},
            {"pass", r.pass}};
}

/// One row per (d, observed period): predicted membership and sample count.
inline std::string sweep_csv(const SweepReport& r, const std::string& manifest_digest) {
    std::ostringstream out;
    out << "# manifest-sha256=" << manifest_digest << '\n';
    out << "d,period,count,predicted\n";
    for (const auto& row : r.rows)
        for (const auto& [p, n] : row.observed)
            out << row.d << ',' << p << ',' << n << ',' << (row.predicted.contains(p) ? 1 : 0) << '\n';
    return out.str();
}

inline json lemma2_to_json(const Lemma2Suite& s) {
    json cases = json::array();
    for (const auto& c : s.cases) cases.push_back(composition_to_json(c));
    return {{"pass", s.pass},
            {"seed", s.seed},
            {"cases", cases},
            {"nonzero_transient_cases", s.nonzero_transient_cases}};
}

inline json lemma3_to_json(const Lemma3Suite& s) {
    json failures = json::array();
    for (const auto& t : s.failures)
        failures.push_back({{"a", t.a},
                            {"ell1", t.ell1},
                            {"b", t.b},
                            {"ell2", t.ell2},
                            {"t", t.spike.t},
                            {"i0", t.spike.i0},
                            {"j0", t.spike.j0},
                            {"crt_min", t.crt_min}});
    return {{"pass", s.pass}, {"seed", s.seed}, {"trials", s.trials}, {"failures", failures}};
}

}  // namespace nre
