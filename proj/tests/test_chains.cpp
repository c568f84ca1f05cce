#include <gtest/gtest.h>

#include <random>

#include "nre/chains.hpp"
#include "nre/constructions.hpp"
#include "nre/cycle.hpp"
#include "oracles.hpp"

using namespace nre;

namespace {

using Seq = PeriodicBinarySequence;

Seq random_seq(std::mt19937_64& rng, std::uint64_t T, int density_pct) {
    std::set<std::uint64_t> s;
    for (std::uint64_t t = 0; t < T; ++t)
        if (static_cast<int>(rng() % 100) < density_pct) s.insert(t);
    return {T, s};
}

std::set<std::uint64_t> orbit(std::uint64_t T, std::uint64_t a, std::uint64_t ell) {
    std::set<std::uint64_t> out;
    for (std::uint64_t i = 0; i < T; ++i) out.insert((a + i * ell) % T);
    return out;
}

Bits spike_word(std::size_t period) {
    Bits w(period, 0);
    w[0] = 1;
    return w;
}

}  // namespace

TEST(PeriodicBinarySequence, Basics) {
    const Seq s(6, {0, 2, 4});
    EXPECT_TRUE(s.at(-2));
    EXPECT_FALSE(s.at(7));
    EXPECT_THROW(Seq(0, {}), ParameterError);
    EXPECT_THROW(Seq(4, {4}), ParameterError);
    const Bits word{1, 0, 1, 1};
    EXPECT_EQ(Seq::from_word(word).support(), (std::set<std::uint64_t>{0, 2, 3}));
}

TEST(SetPeriod, Examples) {
    EXPECT_EQ(set_period(Seq(6, {0, 2, 4})), 2u);
    EXPECT_EQ(set_period(Seq(7, {})), 1u);
    EXPECT_EQ(set_period(Seq(22, {0, 11})), 11u);
    EXPECT_EQ(set_period(Seq(5, {0, 1, 2, 3, 4})), 1u);
}

TEST(SetPeriod, MatchesExhaustiveShiftOracleAndDividesT) {
    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::uint64_t T = 1 + rng() % 40;
        const auto s = random_seq(rng, T, static_cast<int>(rng() % 101));
        const auto g = set_period(s);
        ASSERT_EQ(g, oracle::set_period(T, s.support()));
        ASSERT_EQ(T % g, 0u);
    }
}

TEST(SetPeriod, EmbeddedRepetitionsKeepThePeriod) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 300; ++trial) {
        const std::uint64_t p = 1 + rng() % 20;
        const auto base = random_seq(rng, p, 50);
        const auto g = set_period(base);
        const std::uint64_t q = 1 + rng() % 5;
        std::set<std::uint64_t> rep;
        for (std::uint64_t c = 0; c < q; ++c)
            for (auto t : base.support()) rep.insert(t + c * p);
        EXPECT_EQ(set_period(Seq(q * p, rep)), g);
    }
    // attractor words produced by the dynamics are irreducible
    const auto params = derive_params(5, 12);
    const auto eq = build_coef1(params);
    for (std::size_t i = 0; i < params.s(); ++i) {
        const auto word = detect_cycle(eq, canonical_initial(params, i)).attractor_bits;
        EXPECT_EQ(set_period(Seq::from_word(word)), word.size());
    }
}

TEST(DividesIffShift, Examples) {
    EXPECT_TRUE(divides_iff_shift(Seq(6, {0, 2, 4}), 4));
    EXPECT_TRUE(divides_iff_shift(Seq(22, {0, 11}), 22));
    EXPECT_FALSE(divides_iff_shift(Seq(22, {0, 11}), 4));
    EXPECT_THROW(divides_iff_shift(Seq(3, {}), 0), ParameterError);
}

TEST(DividesIffShift, EquivalentToSetPeriodDividingShift) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::uint64_t T = 1 + rng() % 36;
        const auto s = random_seq(rng, T, static_cast<int>(rng() % 101));
        const std::uint64_t k = 1 + rng() % 100;
        ASSERT_EQ(divides_iff_shift(s, k), k % set_period(s) == 0) << "T=" << T << " k=" << k;
    }
}

TEST(CompleteChains, Examples) {
    const auto c = find_complete_chains(Seq(22, {0, 11}), 11);
    ASSERT_EQ(c.size(), 1u);
    EXPECT_EQ(c[0].offset_t, 0u);
    EXPECT_TRUE(c[0].complete());

    std::set<std::uint64_t> full;
    for (std::uint64_t t = 0; t < 12; ++t) full.insert(t);
    for (std::uint64_t ell = 1; ell <= 12; ++ell)
        EXPECT_EQ(find_complete_chains(Seq(12, full), ell).size(), std::gcd(ell, std::uint64_t{12}));

    EXPECT_TRUE(find_complete_chains(Seq(6, {0, 2}), 2).empty());
}

TEST(CompleteChains, MatchOrbitOracle) {
    std::mt19937_64 rng(17);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::uint64_t T = 1 + rng() % 30;
        const auto s = random_seq(rng, T, 40 + static_cast<int>(rng() % 61));
        const std::uint64_t ell = 1 + rng() % 40;
        std::set<std::set<std::uint64_t>> expect;
        for (std::uint64_t a = 0; a < T; ++a)
            if (oracle::orbit_in_support(T, s.support(), a, ell)) expect.insert(orbit(T, a, ell));
        std::set<std::set<std::uint64_t>> got;
        for (const auto& w : find_complete_chains(s, ell)) {
            ASSERT_TRUE(w.complete());
            ASSERT_EQ(w.step_ell, ell);
            got.insert(orbit(T, w.offset_t, ell));
        }
        ASSERT_EQ(got, expect);
    }
}

TEST(LongestChain, FiniteAndCompleteWitnesses) {
    const Seq s(10, {1, 3, 5, 8});
    const auto w = longest_chain_at(s, 1, 2);
    ASSERT_FALSE(w.complete());
    EXPECT_EQ(*w.length_s, 3u);
    EXPECT_TRUE(longest_chain_at(Seq(22, {0, 11}), 0, 11).complete());
}

TEST(CommonSpike, Examples) {
    const auto a = common_spike(0, 2, 1, 3);
    EXPECT_EQ(a.t % 2, 0);
    EXPECT_EQ(a.t % 3, 1);
    EXPECT_EQ(oracle::crt_scan(0, 2, 1, 3), 4);
    EXPECT_EQ(a.t % 6, 4);

    for (auto [l1, l2] : {std::pair{2, 3}, {11, 13}, {7, 100}}) {
        const auto s = common_spike(5, l1, 5, l2);
        EXPECT_EQ(s.i0, l2);
        EXPECT_EQ(s.j0, l1);
        EXPECT_EQ(s.t, 5 + l1 * l2);
    }

    const auto c = common_spike(3, 11, 5, 13);
    EXPECT_EQ(c.t % 11, 3);
    EXPECT_EQ(c.t % 13, 5);
    EXPECT_EQ(c.t % 143, oracle::crt_scan(3, 11, 5, 13));
}

TEST(CommonSpike, Errors) {
    EXPECT_THROW(common_spike(0, 4, 1, 6), NotCoprime);
    EXPECT_THROW(common_spike(-1, 2, 1, 3), ParameterError);
}

TEST(CommonSpike, WitnessPropertiesOverTheFullRange) {
    std::mt19937_64 rng(18);
    int checked = 0;
    while (checked < 5000) {
        const auto l1 = static_cast<std::int64_t>(1 + rng() % 100);
        const auto l2 = static_cast<std::int64_t>(1 + rng() % 100);
        if (oracle::gcd(l1, l2) != 1) continue;
        const auto a = static_cast<std::int64_t>(rng() % 1001);
        const auto b = static_cast<std::int64_t>(rng() % 1001);
        const auto s = common_spike(a, l1, b, l2);
        ASSERT_GE(s.i0, 0);
        ASSERT_GE(s.j0, 0);
        ASSERT_EQ(s.t, a + s.i0 * l1);
        ASSERT_EQ(s.t, b + s.j0 * l2);
        ASSERT_EQ(s.n1 * l1 + s.n2 * l2, 1);
        ASSERT_EQ(s.t % (l1 * l2), oracle::crt_scan(a, l1, b, l2));
        ++checked;
    }
}

TEST(VerifyLemma3, Examples) {
    std::set<std::uint64_t> full{0, 1, 2, 3, 4, 5};
    const auto t = verify_lemma3(Seq(6, full), 2, 3);
    ASSERT_TRUE(t.has_value());

    std::set<std::uint64_t> support = orbit(66, 0, 2);
    for (auto r : orbit(66, 1, 3)) support.insert(r);
    const Seq s(66, support);
    const auto w = verify_lemma3(s, 2, 3);
    ASSERT_TRUE(w.has_value());
    EXPECT_TRUE(s.at(*w) && s.at(*w + 2) && s.at(*w + 3));
    bool scan = false;
    for (std::int64_t x = 0; x < 66; ++x) scan = scan || (s.at(x) && s.at(x + 2) && s.at(x + 3));
    EXPECT_TRUE(scan);

    EXPECT_FALSE(verify_lemma3(Seq(22, {0, 11}), 2, 11).has_value());
    EXPECT_THROW(verify_lemma3(Seq(22, {0, 11}), 2, 4), NotCoprime);
}

TEST(VerifyLemma3, NeverAbsentWhenBothChainsExist) {
    std::mt19937_64 rng(19);
    int checked = 0;
    while (checked < 500) {
        const auto l1 = static_cast<std::uint64_t>(1 + rng() % 12);
        const auto l2 = static_cast<std::uint64_t>(1 + rng() % 12);
        if (std::gcd(l1, l2) != 1) continue;
        const std::uint64_t T = l1 * l2 * (1 + rng() % 3);
        auto support = random_seq(rng, T, 20).support();
        if (rng() % 4 != 0) {
            for (auto r : orbit(T, rng() % T, l1)) support.insert(r);
            for (auto r : orbit(T, rng() % T, l2)) support.insert(r);
        }
        const Seq s(T, support);
        const bool both = !find_complete_chains(s, l1).empty() && !find_complete_chains(s, l2).empty();
        const auto t = verify_lemma3(s, static_cast<std::int64_t>(l1), static_cast<std::int64_t>(l2));
        ASSERT_EQ(t.has_value(), both);
        if (t) {
            ASSERT_TRUE(s.at(*t));
            ASSERT_TRUE(s.at(*t + static_cast<std::int64_t>(l1)));
            ASSERT_TRUE(s.at(*t + static_cast<std::int64_t>(l2)));
        }
        ++checked;
    }
}

TEST(AttractorChainProfile, Examples) {
    const std::vector<std::int64_t> primes{11, 13};
    const auto p11 = attractor_chain_profile(spike_word(11), primes, 30);
    EXPECT_FALSE(p11.violation) << p11.reason;
    EXPECT_EQ(p11.prime_steps, std::vector<std::int64_t>{11});
    for (const auto& e : p11.chains) EXPECT_EQ(e.step % 11, 0u);
    ASSERT_EQ(p11.chains.size(), 2u);
    EXPECT_EQ(p11.chains[0].step, 11u);
    EXPECT_EQ(p11.chains[1].step, 22u);

    const auto null = attractor_chain_profile(Bits{0}, primes, 30);
    EXPECT_TRUE(null.null_attractor);
    EXPECT_TRUE(null.chains.empty());
    EXPECT_FALSE(null.violation);

    const auto p13 = attractor_chain_profile(spike_word(13), primes, 30);
    EXPECT_FALSE(p13.violation);
    EXPECT_EQ(p13.prime_steps, std::vector<std::int64_t>{13});
}

TEST(AttractorChainProfile, FlagsViolations) {
    const std::vector<std::int64_t> primes{11, 13};
    EXPECT_TRUE(attractor_chain_profile(Bits{1, 0}, primes, 30).violation);

    Bits both(143, 0);
    for (std::size_t t = 0; t < 143; t += 11) both[t] = 1;
    for (std::size_t t = 0; t < 143; t += 13) both[t] = 1;
    const auto r = attractor_chain_profile(both, primes, 30);
    EXPECT_TRUE(r.violation);
    EXPECT_EQ(r.prime_steps, primes);
}
