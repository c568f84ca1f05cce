#pragma once

// Command-line frontend. Exit codes: 0 success/PASS, 1 verification FAIL,
// 2 usage or parameter error, 3 resource guard.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nre/io.hpp"
#include "nre/nre.hpp"

namespace nre::cli {

enum ExitCode : int { kOk = 0, kFail = 1, kUsage = 2, kResource = 3 };

namespace detail {

struct Options {
    std::optional<std::int64_t> m;
    std::optional<std::int64_t> theta;
    std::string family = "coef1";
    std::optional<std::size_t> d;
    std::optional<std::size_t> slots;
    std::string mode = "exact";
    std::uint64_t samples = 0;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string checkpoint;
    std::string out;
    std::uint64_t max_steps = kDefaultMaxSteps;
    std::string equation;
    std::string init = "zero";
    std::optional<std::uint64_t> steps;
    bool rle = false;
    std::string suite;
    std::string kind = "palindromic";
    std::size_t k = 8;
    std::size_t j = 2;
    std::string b = "1/2";
    std::uint64_t trials = 0;
};

inline ConstructionParams params_of(const Options& o, std::int64_t default_m) {
    return derive_params(o.m.value_or(default_m), o.theta);
}

inline std::string manifest_digest(const json& m) { return sha256_hex(m.dump()); }

// Writes `<prefix>.json` (and `<prefix>.csv` when given) or prints the JSON.
inline void emit(const Options& o, const json& doc, std::ostream& out, const std::string* csv = nullptr) {
    if (o.out.empty()) {
        out << dump_document(doc);
        return;
    }
    write_text_file(o.out + ".json", dump_document(doc));
    if (csv) write_text_file(o.out + ".csv", *csv);
}

inline std::pair<NeuronEquation, json> build_family(const Options& o) {
    const auto p = params_of(o, 5);
    json params = {{"m", p.m}, {"theta", p.theta}, {"family", o.family}};
    if (o.family == "coef1") return {build_coef1(p), params};
    if (o.family == "coef2") {
        const std::size_t s = o.slots.value_or(p.s());
        params["slots"] = s;
        return {interleave(build_coef1(p), s), params};
    }
    if (o.family == "coef3") return {build_coef3(p), params};
    if (o.family == "z") {
        if (!o.d) throw ParameterError("family z needs --d");
        params["d"] = *o.d;
        params["slots"] = p.s();
        return {build_z(p, *o.d), params};
    }
    throw ParameterError("unknown family '" + o.family + "' (coef1, coef2, coef3, z)");
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const auto v = std::stoull(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParameterError("bad " + what + ": '" + s + "'");
    }
}

/// zero | hex:<digits> | seed:<n> | canonical:<i>[,<i>|z ...]
inline StateWindow parse_init(const std::string& spec, const NeuronEquation& eq, const json& doc) {
    const std::size_t k = eq.memory();
    if (spec == "zero") return StateWindow(k);
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ParameterError("bad init spec '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (kind == "hex") {
        if (arg.size() > (k + 3) / 4) throw WindowSizeError(k, arg.size() * 4);
        return StateWindow::from_hex(k, arg);
    }
    if (kind == "seed") return random_window(k, parse_u64(arg, "seed"), 0);
    if (kind != "canonical") throw ParameterError("bad init spec '" + spec + "'");

    const json prov = doc.contains("provenance") ? doc["provenance"].value("params", json::object()) : json::object();
    if (!prov.contains("m")) throw ParameterError("canonical init needs an equation built by this tool");
    const auto p = derive_params(prov["m"].get<std::int64_t>(), prov["theta"].get<std::int64_t>());
    const auto family = prov.value("family", std::string("coef1"));
    const auto entries = split(arg, ',');
    if (family == "coef1") {
        if (entries.size() != 1) throw ParameterError("coef1 takes a single canonical index");
        return canonical_initial(p, parse_u64(entries[0], "prime index"));
    }
    if (family == "coef2" || family == "z") {
        const auto s = prov.at("slots").get<std::size_t>();
        if (entries.size() != s)
            throw ParameterError("canonical init needs " + std::to_string(s) + " comma-separated slot entries");
        std::vector<StateWindow> slots;
        for (const auto& e : entries)
            slots.push_back(e == "z" ? StateWindow(static_cast<std::size_t>(p.k))
                                     : canonical_initial(p, parse_u64(e, "prime index")));
        return interleave_windows(slots);
    }
    throw ParameterError("canonical init is not defined for family " + family);
}

inline Dyadic parse_dyadic(const std::string& s) {
    const auto parts = split(s, '/');
    if (parts.size() != 2) throw InvalidShapeParam("b must be written num/den with den a power of two");
    const auto num = parse_u64(parts[0], "b numerator");
    const auto den = parse_u64(parts[1], "b denominator");
    if (den < 2 || (den & (den - 1)) != 0) throw InvalidShapeParam("b denominator must be a power of two");
    return {num, static_cast<unsigned>(std::countr_zero(den))};
}

inline ClassicShape parse_shape(const std::string& s) {
    if (s == "palindromic") return ClassicShape::Palindromic;
    if (s == "j-palindromic") return ClassicShape::JPalindromic;
    if (s == "geometric-neg") return ClassicShape::GeometricNeg;
    if (s == "geometric-pos") return ClassicShape::GeometricPos;
    throw InvalidShapeParam("unknown classic kind '" + s + "'");
}

inline int cmd_build(const Options& o, std::ostream& out) {
    auto [eq, params] = build_family(o);
    const json doc = equation_to_json(eq, manifest("build", params));
    if (o.out.empty())
        out << dump_document(doc);
    else
        write_text_file(o.out, dump_document(doc));
    return kOk;
}

inline int cmd_simulate(const Options& o, std::ostream& out) {
    const json doc = read_json_file(o.equation);
    const NeuronEquation eq = equation_from_json(doc);
    const StateWindow init = parse_init(o.init, eq, doc);
    const auto summary = detect_cycle(eq, init, o.max_steps);
    const std::uint64_t steps = o.steps.value_or(summary.transient + summary.period);
    const Bits trajectory = simulate(eq, init, steps);
    json params = {{"init", o.init}, {"steps", steps}, {"max_steps", o.max_steps}, {"rle", o.rle}};
    json result = {{"manifest", manifest("simulate", params, {{"equation", equation_digest(eq)}})},
                   {"init_hex", init.to_hex()},
                   {"summary", summary_to_json(summary)},
                   {"steps", steps}};
    if (o.rle)
        result["trajectory_rle"] = run_length(trajectory);
    else
        result["trajectory"] = bits_string(trajectory);
    emit(o, result, out);
    return kOk;
}

inline int cmd_census(const Options& o, std::ostream& out) {
    const json doc = read_json_file(o.equation);
    const NeuronEquation eq = equation_from_json(doc);
    json params = {{"mode", o.mode}, {"max_steps", o.max_steps}};
    BasinCensus census;
    if (o.mode == "exact") {
        CensusOptions opt;
        opt.workers = o.workers;
        if (!o.checkpoint.empty()) opt.checkpoint = o.checkpoint;
        census = full_census(eq, opt);
    } else if (o.mode == "sampled") {
        if (o.samples < 1) throw ParameterError("sampled mode needs --samples >= 1");
        params["samples"] = o.samples;
        params["seed"] = o.seed;
        census = sampled_census(eq, o.samples, o.seed, o.max_steps, o.workers);
    } else {
        throw ParameterError("unknown mode '" + o.mode + "' (exact, sampled)");
    }
    const json man = manifest("census", params, {{"equation", equation_digest(eq)}});
    const std::string csv = census_csv(census, manifest_digest(man));
    emit(o, {{"manifest", man}, {"census", census_to_json(census)}}, out, &csv);
    return kOk;
}

inline int cmd_sweep(const Options& o, std::ostream& out) {
    const auto p = params_of(o, 8);
    const std::uint64_t samples = o.samples ? o.samples : 2000;
    const auto report = bifurcation_sweep(p, samples, o.seed, o.max_steps, o.workers);
    const json man = manifest("sweep", {{"m", p.m}, {"theta", p.theta}, {"samples", samples}, {"seed", o.seed},
                                        {"max_steps", o.max_steps}});
    const std::string csv = sweep_csv(report, manifest_digest(man));
    emit(o, {{"manifest", man}, {"sweep", sweep_to_json(report)}}, out, &csv);
    return report.pass ? kOk : kFail;
}

inline int cmd_verify(const Options& o, std::ostream& out) {
    json params = {{"suite", o.suite}};
    json details;
    bool pass = false;
    if (o.suite == "prop5") {
        const auto p = params_of(o, 5);
        params["m"] = p.m;
        params["theta"] = p.theta;
        const NeuronEquation eq = build_coef1(p);
        CensusOptions opt;
        opt.workers = o.workers;
        const auto census = full_census(eq, opt);
        std::set<std::uint64_t> predicted{1};
        for (auto q : p.primes) predicted.insert(static_cast<std::uint64_t>(q));
        const auto support = verify_period_support(census, predicted);
        json profiles = json::array();
        bool chains_ok = true;
        for (const auto& a : census.attractors) {
            const auto word = detect_cycle(eq, a.key).attractor_bits;
            const auto profile = attractor_chain_profile(word, p.primes, static_cast<std::uint64_t>(p.k));
            chains_ok = chains_ok && !profile.violation;
            profiles.push_back({{"key_hex", a.key.to_hex()}, {"period", a.period}, {"profile", chain_profile_to_json(profile)}});
        }
        pass = support.pass && chains_ok;
        details = {{"census", census_to_json(census)}, {"support", period_support_to_json(support)}, {"chain_profiles", profiles}};
    } else if (o.suite == "theorem1") {
        const auto p = params_of(o, 5);
        const std::uint64_t samples = o.samples ? o.samples : 10000;
        params.update({{"m", p.m}, {"theta", p.theta}, {"samples", samples}, {"seed", o.seed}});
        const auto census = sampled_census(interleave(build_coef1(p), p.s()), samples, o.seed, o.max_steps, o.workers);
        const auto support = verify_period_support(census, admissible_periods(p, p.primes));
        const auto attain = verify_attainment(p, std::nullopt, o.max_steps);
        pass = support.pass && attain.pass;
        details = {{"census", census_to_json(census)}, {"support", period_support_to_json(support)},
                   {"attainment", attainment_to_json(attain)}};
    } else if (o.suite == "theorem2") {
        const auto p = params_of(o, 8);
        const std::uint64_t samples = o.samples ? o.samples : 2000;
        params.update({{"m", p.m}, {"theta", p.theta}, {"samples", samples}, {"seed", o.seed}});
        const auto report = bifurcation_sweep(p, samples, o.seed, o.max_steps, o.workers);
        pass = report.pass;
        details = sweep_to_json(report);
    } else if (o.suite == "lemma2") {
        const std::uint64_t cases = o.trials ? o.trials : 60;
        params.update({{"cases", cases}, {"seed", o.seed}});
        const auto suite = lemma2_suite(o.seed, cases);
        pass = suite.pass;
        details = lemma2_to_json(suite);
    } else if (o.suite == "lemma3") {
        const std::uint64_t trials = o.trials ? o.trials : 1000;
        params.update({{"trials", trials}, {"seed", o.seed}});
        const auto suite = lemma3_suite(trials, o.seed);
        pass = suite.pass;
        details = lemma3_to_json(suite);
    } else if (o.suite == "classic") {
        ClassicKind kind{parse_shape(o.kind), o.j, parse_dyadic(o.b)};
        const std::uint64_t trials = o.trials ? o.trials : 500;
        params.update({{"kind", o.kind}, {"k", o.k}, {"trials", trials}, {"seed", o.seed}});
        if (kind.shape == ClassicShape::JPalindromic) params["j"] = o.j;
        if (kind.shape == ClassicShape::GeometricNeg || kind.shape == ClassicShape::GeometricPos) params["b"] = o.b;
        const auto report = classic_check(kind, o.k, trials, o.seed, o.max_steps);
        pass = report.pass;
        details = classic_to_json(report);
    } else {
        throw ParameterError("unknown suite '" + o.suite + "' (prop5, theorem1, theorem2, lemma2, lemma3, classic)");
    }
    emit(o, {{"manifest", manifest("verify", params)}, {"verdict", pass ? "PASS" : "FAIL"}, {"details", details}}, out);
    return pass ? kOk : kFail;
}

}  // namespace detail

/// Runs one command line; diagnostics go to `err`, documents to `out` when no --out is given.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Neuronal recurrence equations: constructions, simulation, censuses and verification suites"};
    app.require_subcommand(1);
    detail::Options o;

    auto add_params = [&](CLI::App* sub) {
        sub->add_option("--m", o.m, "construction parameter m (primes in (2m, 3m))");
        sub->add_option("--theta", o.theta, "integer threshold, default 2m");
    };

    auto* build = app.add_subcommand("build", "write an equation document");
    add_params(build);
    build->add_option("--family", o.family, "coef1 | coef2 | coef3 | z");
    build->add_option("--slots", o.slots, "interleaving factor for coef2 (default s)");
    build->add_option("--d", o.d, "suppression index for family z");
    build->add_option("--out", o.out, "output path (stdout when omitted)");

    auto* sim = app.add_subcommand("simulate", "trajectory and cycle summary");
    sim->add_option("--equation", o.equation, "equation document")->required();
    sim->add_option("--init", o.init, "zero | hex:<H> | seed:<n> | canonical:<i>[,<i>|z...]");
    sim->add_option("--steps", o.steps, "output bits to emit (default T + p)");
    sim->add_option("--max-steps", o.max_steps, "cycle detection budget");
    sim->add_flag("--rle", o.rle, "run-length encode the trajectory");
    sim->add_option("--out", o.out, "output prefix");

    auto* census = app.add_subcommand("census", "basin census of an equation");
    census->add_option("--equation", o.equation, "equation document")->required();
    census->add_option("--mode", o.mode, "exact | sampled");
    census->add_option("--samples", o.samples, "sample count for sampled mode");
    census->add_option("--seed", o.seed, "sampling seed");
    census->add_option("--workers", o.workers, "worker threads");
    census->add_option("--checkpoint", o.checkpoint, "checkpoint file for resumable exact censuses");
    census->add_option("--max-steps", o.max_steps, "cycle detection budget per sample");
    census->add_option("--out", o.out, "output prefix (<out>.json, <out>.csv)");

    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", o.suite, "prop5 | theorem1 | theorem2 | lemma2 | lemma3 | classic")->required();
    add_params(verify);
    verify->add_option("--samples", o.samples, "samples (theorem1, theorem2)");
    verify->add_option("--seed", o.seed, "seed");
    verify->add_option("--trials", o.trials, "trials or cases (lemma2, lemma3, classic)");
    verify->add_option("--kind", o.kind, "palindromic | j-palindromic | geometric-neg | geometric-pos");
    verify->add_option("--k", o.k, "memory length for classic");
    verify->add_option("--j", o.j, "leading zeros for j-palindromic");
    verify->add_option("--b", o.b, "geometric ratio num/2^e");
    verify->add_option("--workers", o.workers, "worker threads");
    verify->add_option("--max-steps", o.max_steps, "cycle detection budget");
    verify->add_option("--out", o.out, "output prefix");

    auto* sweep = app.add_subcommand("sweep", "bifurcation sweep over z(n, d)");
    add_params(sweep);
    sweep->add_option("--samples", o.samples, "samples per d (default 2000)");
    sweep->add_option("--seed", o.seed, "seed");
    sweep->add_option("--workers", o.workers, "worker threads");
    sweep->add_option("--max-steps", o.max_steps, "cycle detection budget");
    sweep->add_option("--out", o.out, "output prefix (<out>.json, <out>.csv)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*build) return detail::cmd_build(o, out);
        if (*sim) return detail::cmd_simulate(o, out);
        if (*census) return detail::cmd_census(o, out);
        if (*verify) return detail::cmd_verify(o, out);
        if (*sweep) return detail::cmd_sweep(o, out);
    } catch (const ResourceError& e) {
        err << "error: " << e.what() << '\n';
        return kResource;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace nre::cli
