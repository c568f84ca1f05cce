#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "nre/census.hpp"
#include "nre/constructions.hpp"
#include "nre/io.hpp"
#include "nre/verify.hpp"
#include "oracles.hpp"

using namespace nre;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / "nre-census-tests";
    fs::create_directories(dir);
    const auto p = dir / name;
    fs::remove(p);
    return p;
}

std::string file_bytes(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string census_bytes(const BasinCensus& c) { return census_to_json(c).dump(); }

}  // namespace

TEST(FullCensus, M3MatchesPerWindowOracle) {
    const auto p = derive_params(3, 6);
    const auto eq = build_coef1(p);
    const auto c = full_census(eq);
    const auto o = oracle::per_window_census(eq);
    EXPECT_EQ(c.chi, o.chi);
    EXPECT_EQ(c.transients, o.transients);
    EXPECT_EQ(c.total, std::uint64_t{1} << 18);
    EXPECT_EQ(c.counted(), c.total);
    for (const auto& [period, count] : c.chi) EXPECT_TRUE(period == 1 || period == 7);
    EXPECT_TRUE(verify_period_support(c, {1, 7}).pass);
}

TEST(FullCensus, RandomEquationsMatchOracle) {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t k = 1 + rng() % 16;
        const auto eq = oracle::random_equation(rng, k, 1 + static_cast<std::int64_t>(rng() % 8));
        CensusOptions opt;
        opt.chunk_bits = 1 + static_cast<unsigned>(rng() % 12);
        opt.workers = 1 + static_cast<unsigned>(rng() % 4);
        const auto c = full_census(eq, opt);
        const auto o = oracle::per_window_census(eq);
        ASSERT_EQ(c.chi, o.chi) << "trial " << trial;
        ASSERT_EQ(c.transients, o.transients) << "trial " << trial;
        ASSERT_EQ(c.counted(), std::uint64_t{1} << k);
        std::uint64_t basins = 0;
        for (const auto& a : c.attractors) {
            basins += a.basin;
            const auto d = detect_cycle(eq, a.key);
            ASSERT_EQ(d.transient, 0u);
            ASSERT_EQ(d.period, a.period);
            ASSERT_EQ(d.attractor_key, a.key);
        }
        ASSERT_EQ(basins, c.total);
    }
}

TEST(FullCensus, AttractorBasinsMatchPerWindowKeys) {
    std::mt19937_64 rng(43);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t k = 6 + rng() % 7;
        const auto eq = oracle::random_equation(rng, k, 5);
        const auto c = full_census(eq);
        std::map<std::uint64_t, std::uint64_t> basin;
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << k); ++v)
            ++basin[detect_cycle(eq, StateWindow::from_u64(k, v)).attractor_key.to_u64()];
        std::map<std::uint64_t, std::uint64_t> got;
        for (const auto& a : c.attractors) got[a.key.to_u64()] = a.basin;
        EXPECT_EQ(got, basin);
    }
}

TEST(FullCensus, PartitionIndependence) {
    const auto eq = build_coef1(derive_params(3, 6));
    const auto ref = compute_fire_bits(eq, 1);
    for (unsigned workers : {1U, 2U, 4U, 8U})
        for (unsigned chunk_bits : {4U, 10U, 20U}) {
            EXPECT_EQ(compute_fire_bits(eq, workers, chunk_bits), ref);
            CensusOptions opt;
            opt.workers = workers;
            opt.chunk_bits = chunk_bits;
            EXPECT_EQ(census_bytes(full_census(eq, opt)), census_bytes(full_census(eq)));
        }
}

TEST(FullCensus, FireBitsMatchNaivePotential) {
    std::mt19937_64 rng(44);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t k = 1 + rng() % 18;
        const auto eq = oracle::random_equation(rng, k, 50);
        const auto fire = compute_fire_bits(eq, 1 + static_cast<unsigned>(rng() % 3), 3);
        for (std::uint64_t v = 0; v < (std::uint64_t{1} << k); ++v)
            ASSERT_EQ(fire.get(v), oracle::fire(eq, v) == 1);
    }
}

TEST(FullCensus, MemoryGuard) {
    const NeuronEquation wide(std::vector<std::int64_t>(33, -1), 1);
    EXPECT_THROW(full_census(wide), MemoryGuard);
    CensusOptions opt;
    opt.max_memory_k = 10;
    EXPECT_THROW(full_census(build_coef1(derive_params(3, 6)), opt), MemoryGuard);
}

TEST(Checkpoint, ResumeIsByteIdenticalAfterInterruptions) {
    const auto eq = build_coef1(derive_params(3, 6));
    const auto full = full_census(eq);
    const auto expect = census_bytes(full);
    // 2^18 states in chunks of 2^10: 256 pass-1 units, then one unit per cycle
    const std::uint64_t units = 256 + full.attractors.size();
    for (std::uint64_t stop : std::vector<std::uint64_t>{1, 100, 255, 256, 257, units - 1, units}) {
        const auto path = scratch("resume-" + std::to_string(stop) + ".ckpt");
        CensusOptions opt;
        opt.chunk_bits = 10;
        opt.checkpoint = path;
        opt.checkpoint_every = 7;
        opt.stop_after_units = stop;
        EXPECT_THROW(full_census(eq, opt), CensusInterrupted) << stop;
        ASSERT_TRUE(fs::exists(path));
        EXPECT_EQ(file_bytes(path).substr(0, 12), "NRE-CENSUS-1");
        if (stop < units) {
            // a second interrupted leg of a single unit
            opt.stop_after_units = 1;
            EXPECT_THROW(full_census(eq, opt), CensusInterrupted) << stop;
        }
        opt.stop_after_units.reset();
        EXPECT_EQ(census_bytes(full_census(eq, opt)), expect) << "stop after " << stop;
    }
}

TEST(Checkpoint, CompletedCheckpointIsReusedAndFinal) {
    const auto eq = build_coef1(derive_params(3, 6));
    const auto path = scratch("complete.ckpt");
    CensusOptions opt;
    opt.chunk_bits = 12;
    opt.checkpoint = path;
    const auto first = census_bytes(full_census(eq, opt));
    const auto saved = file_bytes(path);
    EXPECT_EQ(census_bytes(full_census(eq, opt)), first);
    EXPECT_EQ(file_bytes(path), saved);
}

TEST(Checkpoint, MismatchIsRejected) {
    const auto path = scratch("mismatch.ckpt");
    CensusOptions opt;
    opt.chunk_bits = 10;
    opt.checkpoint = path;
    opt.stop_after_units = 3;
    EXPECT_THROW(full_census(build_coef1(derive_params(3, 6)), opt), CensusInterrupted);
    opt.stop_after_units.reset();
    EXPECT_THROW(full_census(build_coef1(derive_params(3, 7)), opt), CheckpointMismatch);
    opt.chunk_bits = 12;
    EXPECT_THROW(full_census(build_coef1(derive_params(3, 6)), opt), CheckpointMismatch);

    std::ofstream(path) << "garbage\n";
    EXPECT_THROW(full_census(build_coef1(derive_params(3, 6)), opt), CheckpointMismatch);
}

TEST(SampledCensus, DeterministicAndWorkerIndependent) {
    const auto p = derive_params(5, 12);
    const auto y = interleave(build_coef1(p), 2);
    const auto a = sampled_census(y, 300, 9);
    const auto b = sampled_census(y, 300, 9);
    const auto c = sampled_census(y, 300, 9, kDefaultMaxSteps, 4);
    EXPECT_EQ(census_bytes(a), census_bytes(b));
    EXPECT_EQ(census_bytes(a), census_bytes(c));
    EXPECT_EQ(a.counted(), 300u);
    EXPECT_TRUE(verify_period_support(a, admissible_periods(p, p.primes)).pass);
    EXPECT_NE(census_bytes(a), census_bytes(sampled_census(y, 300, 10)));
    EXPECT_THROW(sampled_census(y, 0, 1), ParameterError);
}

TEST(SampledCensus, GeneratorIsCounterBased) {
    EXPECT_EQ(random_window(60, 5, 17), random_window(60, 5, 17));
    EXPECT_NE(random_window(60, 5, 17), random_window(60, 5, 18));
    EXPECT_NE(random_window(60, 5, 17), random_window(60, 6, 17));
    EXPECT_EQ(random_window(200, 1, 2).size(), 200u);
    // roughly balanced bits over many samples
    std::size_t ones = 0;
    for (std::uint64_t i = 0; i < 1000; ++i) ones += random_window(64, 3, i).popcount();
    EXPECT_NEAR(static_cast<double>(ones) / 64000.0, 0.5, 0.02);
}

TEST(SampledCensus, SingleZeroWindow) {
    const auto eq = build_coef1(derive_params(5, 12));
    const auto c = census_of_windows(eq, {StateWindow(30)});
    EXPECT_EQ(c.chi, (std::map<std::uint64_t, std::uint64_t>{{1, 1}}));
}

TEST(SampledCensus, CycleNotFoundNamesTheFirstFailingSample) {
    const auto p = derive_params(5, 12);
    const auto eq = build_coef1(p);
    std::vector<StateWindow> inits{StateWindow(30), StateWindow(30), canonical_initial(p, 0), canonical_initial(p, 1)};
    for (unsigned workers : {1U, 2U, 4U}) {
        try {
            census_of_windows(eq, inits, 5, workers);
            FAIL() << "expected CycleNotFound";
        } catch (const CycleNotFound& e) {
            EXPECT_EQ(e.sample_index(), 2);
        }
    }
}

TEST(VerifyPeriodSupport, ReportsViolatorsWithWitness) {
    const auto eq = build_coef1(derive_params(3, 6));
    const auto c = full_census(eq);
    const auto r = verify_period_support(c, {1});
    EXPECT_FALSE(r.pass);
    ASSERT_EQ(r.violators.size(), 1u);
    EXPECT_EQ(r.violators[0].period, 7u);
    EXPECT_EQ(r.violators[0].count, c.chi.at(7));
    EXPECT_EQ(detect_cycle(eq, r.violators[0].witness).period, 7u);
}

TEST(BasinWalk, TransientsAgreeWithDetectCycle) {
    const auto p = derive_params(4, 8);
    const auto eq = build_coef1(p);
    const auto cyc = detect_cycle(eq, canonical_initial(p, 0));
    const auto walk = basin_walk(eq, cyc.entry, 3000);
    ASSERT_FALSE(walk.empty());
    std::set<StateWindow> seen;
    for (const auto& [w, t] : walk) {
        EXPECT_TRUE(seen.insert(w).second);
        const auto d = detect_cycle(eq, w);
        EXPECT_EQ(d.transient, t);
        EXPECT_EQ(d.attractor_key, cyc.attractor_key);
    }
}

TEST(Prop5, SupportIsNullOrSinglePrimeAcrossThetas) {
    for (std::int64_t m = 3; m <= 5; ++m)
        for (std::int64_t theta : {2 * m, 2 * m + 2}) {
            const auto p = derive_params(m, theta);
            const auto eq = build_coef1(p);
            const auto c = full_census(eq);
            std::set<std::uint64_t> allowed{1};
            for (auto q : p.primes) allowed.insert(static_cast<std::uint64_t>(q));
            const auto r = verify_period_support(c, allowed);
            EXPECT_TRUE(r.pass) << "m=" << m << " theta=" << theta;
            EXPECT_EQ(c.counted(), c.total);
            for (const auto& a : c.attractors) {
                const auto profile =
                    attractor_chain_profile(detect_cycle(eq, a.key).attractor_bits, p.primes, static_cast<std::uint64_t>(p.k));
                EXPECT_FALSE(profile.violation) << "m=" << m << " theta=" << theta << ": " << profile.reason;
            }
        }
}
