#include "helpers.hpp"

#include <gtest/gtest.h>

#include <pfacap/fixtures.hpp>

#include <random>

using namespace pfacap;
using testutil::w;
namespace sk = pfacap::skeleton;

namespace {

// a^{n_1} b ... a^{n_t} b
Word block_word(const std::vector<unsigned>& lengths) {
    Word out;
    for (auto n : lengths) {
        out.insert(out.end(), n, "a");
        out.push_back("b");
    }
    return out;
}

// Enumerates every length vector with 1 <= t <= max_t and 1 <= n_i <= max_n.
void for_each_lengths(unsigned max_t, unsigned max_n, const std::function<void(const std::vector<unsigned>&)>& fn) {
    std::vector<unsigned> v;
    std::function<void()> rec = [&] {
        if (!v.empty()) fn(v);
        if (v.size() == max_t) return;
        for (unsigned n = 1; n <= max_n; ++n) {
            v.push_back(n);
            rec();
            v.pop_back();
        }
    };
    rec();
}

// 1 - prod(1 - coin^n), multiplied out by hand.
Rational closed(const Rational& coin, const std::vector<unsigned>& lengths) {
    Rational survive{1};
    for (auto n : lengths) {
        Rational c{1};
        for (unsigned i = 0; i < n; ++i) c *= coin;
        survive *= 1 - c;
    }
    return 1 - survive;
}

}  // namespace

TEST(Dxy, RejectsBadParameters) {
    EXPECT_THROW(build_D_xy({Rational{3, 2}, Rational{1, 4}}), Error);
    EXPECT_THROW(build_D_xy({Rational{1, 2}, Rational{3, 5}}), Error);
    EXPECT_THROW(build_D_xy({Rational{1, 2}, Rational{-1, 5}}), Error);
}

TEST(Dxy, ClosedFormsMatchSimulation) {
    for (const Rational& x : {Rational{0}, Rational{1, 4}, Rational{1, 2}, Rational{3, 5}, Rational{3, 4}, Rational{1}}) {
        const Pfa g = build_D_xy({x, Rational{1, 2}});
        EXPECT_TRUE(validate_pfa(g).empty());
        for_each_lengths(4, 5, [&](const std::vector<unsigned>& ns) {
            const Word word = block_word(ns);
            ASSERT_EQ(reach_prob(g, sk::q1, word, sk::q3), closed(x, ns));
            ASSERT_EQ(reach_prob(g, sk::q4, word, sk::q6), closed(1 - x, ns));
        });
    }
}

TEST(Dxy, ZeroCoinNeverReachesQ3) {
    const Pfa g = build_D_xy({Rational{0}, Rational{1, 4}});
    for (unsigned n = 1; n <= 8; ++n) EXPECT_EQ(reach_prob(g, sk::q1, block_word({n}), sk::q3), 0);
}

TEST(Dxy, DoubleSeparatorGivesExactlyY) {
    for (const Rational& y : {Rational{1, 4}, Rational{1, 2}, Rational{1, 3}}) {
        const Pfa g = build_D_xy({Rational{3, 5}, y});
        testutil::for_each_word(g.alphabet, 7, [&](const Word& word) {
            for (std::size_t i = 0; i + 1 < word.size(); ++i)
                if (word[i] == "b" && word[i + 1] == "b") {
                    ASSERT_EQ(value(g, word), y) << format_word(word);
                    return;
                }
        });
    }
}

TEST(Dxy, NeverExceedsTwoY) {
    const Rational y{1, 3};
    const auto r = brute_force_value(build_D_xy({Rational{3, 4}, y}), 10);
    EXPECT_LE(r.best_value, 2 * y);
}

TEST(Dxy, LowCoinStaysAtY) {
    const auto r = brute_force_value(build_D_xy({Rational{2, 5}, Rational{1, 2}}), 10);
    EXPECT_LE(r.best_value, Rational(1, 2));
}

TEST(DAy, StateCountAndAlphabet) {
    const Pfa d = build_D_Ay(fixtures::example1(), Rational{1, 2});
    EXPECT_EQ(d.num_states(), 2 * 3 + kSkeletonStates);
    EXPECT_EQ(d.alphabet, (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_TRUE(validate_pfa(d).empty());
}

TEST(DAy, EmbeddedReachEqualsInnerValue) {
    for (const Pfa& inner : {fixtures::example1(), fixtures::amplify3()}) {
        const Pfa d = build_D_Ay(inner, Rational{1, 2});
        testutil::for_each_word(inner.alphabet, 5, [&](const Word& word) {
            Word full{"a"};
            full.insert(full.end(), word.begin(), word.end());
            full.push_back("c");
            const Rational v = value(inner, word);
            ASSERT_EQ(reach_prob(d, sk::q1, full, sk::q1), v);
            ASSERT_EQ(reach_prob(d, sk::q4, full, sk::q5), v);
        });
    }
}

TEST(DAy, ExampleOneWordB) {
    const Pfa d = build_D_Ay(fixtures::example1(), Rational{1, 2});
    EXPECT_EQ(reach_prob(d, sk::q1, w({"a", "b", "c"}), sk::q1), value(fixtures::example1(), w({"b"})));
    EXPECT_EQ(reach_prob(d, sk::q1, w({"a", "b", "c"}), sk::q1), 1);
}

TEST(DAy, AlwaysAcceptingBehavesLikeUnitCoin) {
    const Pfa d = build_D_Ay(fixtures::constant(true), Rational{1, 2});
    const Pfa unit = build_D_xy({Rational{1}, Rational{1, 2}});
    for_each_lengths(3, 3, [&](const std::vector<unsigned>& ns) {
        Word lifted;
        for (auto n : ns) {
            for (unsigned i = 0; i < n; ++i) lifted.insert(lifted.end(), {"a", "c"});
            lifted.push_back("b");
        }
        ASSERT_EQ(value(d, lifted), value(unit, block_word(ns)));
    });
}

TEST(DAy, EmptyInnerLanguageKeepsValueAtY) {
    // No inner word exceeds 1/2, so no gadget word may exceed y.
    const Pfa d = build_D_Ay(fixtures::constant(false), Rational{1, 2});
    EXPECT_LE(brute_force_value(d, 8).best_value, Rational(1, 2));
}

TEST(DAy, RejectsForeignSymbols) {
    Pfa inner = fixtures::example1();
    inner.alphabet[1] = "c";
    EXPECT_THROW(build_D_Ay(inner, Rational{1, 2}), Error);
    EXPECT_THROW(build_D_Ay(fixtures::example1(), Rational{2, 3}), Error);
}

TEST(Amplifier, ExampleValues) {
    const Pfa a = fixtures::example1();
    const Word baa = w({"b", "a", "a"});
    EXPECT_EQ(value(build_B_p(a, Rational{1, 2}), baa), Rational(1, 8));
    EXPECT_EQ(value(build_C_p(a, Rational{1, 2}), baa), Rational(5, 8));
    EXPECT_EQ(value(build_B_p(a, Rational{1, 2}), Word{}), 0);
}

TEST(Amplifier, IdentitiesHoldExhaustively) {
    const Pfa a = fixtures::amplify3();
    for (const Rational& p : {Rational{1, 3}, Rational{1, 2}, Rational{4, 5}}) {
        const Pfa b = build_B_p(a, p), c = build_C_p(a, p);
        EXPECT_TRUE(validate_pfa(b).empty());
        EXPECT_TRUE(validate_pfa(c).empty());
        EXPECT_EQ(b.num_states(), a.num_states() + 2);
        testutil::for_each_word(a.alphabet, 6, [&](const Word& word) {
            if (word.empty()) return;
            const Rational v = testutil::naive_value(a, word);
            ASSERT_EQ(value(b, word), p * v);
            ASSERT_EQ(value(c, word), p * v + 1 - p);
        });
        EXPECT_EQ(value(c, Word{}), 0);
    }
}

TEST(Amplifier, RejectsBoundaryP) {
    EXPECT_THROW(build_B_p(fixtures::example1(), 1), Error);
    EXPECT_THROW(build_C_p(fixtures::example1(), 0), Error);
}

TEST(Family, CountsForTwentySevenStates) {
    const Pfa f = build_family_member(fixtures::inner27(), {Rational{1}});
    EXPECT_EQ(f.num_states(), kFamilyTargetStates);
    EXPECT_EQ(f.alphabet, (std::vector<std::string>{"a", "b", "c", "id", "rt"}));
    EXPECT_TRUE(validate_pfa(f).empty());
    const auto fr = detect_freeze_reset(f);
    EXPECT_TRUE(fr.freeze && fr.reset);
    EXPECT_EQ(build_V(f).num_inputs(), 10U);
}

TEST(Family, AnyInnerGivesFiveSymbols) {
    for (const Pfa& inner : {fixtures::example1(), fixtures::amplify3(), fixtures::constant(false)}) {
        const Pfa f = build_family_member(inner, {Rational{2, 3}});
        EXPECT_EQ(f.num_symbols(), 5U);
        EXPECT_EQ(f.num_states(), 2 * inner.num_states() + kSkeletonStates);
    }
    EXPECT_THROW(build_family_member(fixtures::example1(), {Rational{0}}), Error);
}

TEST(Family, DichotomyOnSmallInstances) {
    // Never-accepting inner: value at most lambda/2.
    const Rational lambda{1};
    const auto low = brute_force_value(build_family_member(fixtures::constant(false), {lambda}), 6);
    EXPECT_LE(low.best_value, lambda / 2);
    // Always-accepting inner: the word "acbac" already reaches lambda.
    const Pfa hi = build_family_member(fixtures::constant(true), {lambda});
    EXPECT_EQ(value(hi, w({"a", "c", "b", "a", "c"})), lambda);
}

TEST(Sigma, Examples) {
    EXPECT_EQ(sigma_encode({Rational{1, 2}}).value, 18);
    EXPECT_EQ(sigma_decode({BigInt{18}, 1}), (std::vector<Rational>{Rational{1, 2}}));
    EXPECT_EQ(sigma_encode({Rational{1}, Rational{2, 3}}).value, 30870);
    EXPECT_EQ(sigma_decode({BigInt{30870}, 2}), (std::vector<Rational>{Rational{1}, Rational{2, 3}}));
}

TEST(Sigma, RoundTripRandomTuples) {
    std::mt19937_64 rng{2024};
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 1 + rng() % 3;
        std::vector<Rational> xs;
        for (std::size_t i = 0; i < n; ++i) xs.emplace_back(1 + static_cast<long>(rng() % 12), 1 + static_cast<long>(rng() % 12));
        const auto code = sigma_encode(xs);
        EXPECT_GE(code.value, 1);
        EXPECT_EQ(sigma_decode(code), xs);
    }
}

TEST(Sigma, RejectsNonCodes) {
    EXPECT_THROW(sigma_encode({Rational{0}}), Error);
    EXPECT_THROW(sigma_encode({}), Error);
    EXPECT_THROW(sigma_decode({BigInt{2}, 1}), Error);    // no denominator exponent
    EXPECT_THROW(sigma_decode({BigInt{35}, 1}), Error);   // primes outside the first two
    EXPECT_THROW(sigma_decode({BigInt{36}, 1}), Error);   // 2/2 not in lowest terms
}
