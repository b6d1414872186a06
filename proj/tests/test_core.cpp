#include "helpers.hpp"

#include <gtest/gtest.h>

#include <pfacap/fixtures.hpp>

#include <random>

using namespace pfacap;
using testutil::w;

namespace {

Pfa ex1() { return fixtures::example1(); }

}  // namespace

TEST(Rational, ParsesFractionsIntegersAndDecimals) {
    EXPECT_EQ(parse_rational("3/6"), Rational(1, 2));
    EXPECT_EQ(parse_rational(" -4 "), Rational(-4));
    EXPECT_EQ(parse_rational("0.25"), Rational(1, 4));
    EXPECT_EQ(parse_rational("0.89"), Rational(89, 100));
    EXPECT_EQ(parse_rational("010/3"), Rational(10, 3));
    EXPECT_EQ(parse_rational("-3.5e-2"), Rational(-7, 200));
    EXPECT_EQ(parse_rational("2E3"), Rational(2000));
    EXPECT_THROW(parse_rational("1/0"), Error);
    EXPECT_THROW(parse_rational("abc"), Error);
    EXPECT_THROW(parse_rational("1/-2"), Error);
    EXPECT_THROW(parse_rational(""), Error);
}

TEST(Rational, LowestTermsAndFormatting) {
    Rational r{6, 8};
    EXPECT_EQ(numerator(r), 3);
    EXPECT_EQ(denominator(r), 4);
    EXPECT_EQ(to_string(r), "3/4");
    EXPECT_EQ(to_string(Rational{4, 2}), "2");
    EXPECT_EQ(pow(Rational{0}, 0), 1);
    EXPECT_EQ(pow(Rational{2, 3}, 3), Rational(8, 27));
}

TEST(Validate, ExampleIsValid) { EXPECT_TRUE(validate_pfa(ex1()).empty()); }

TEST(Validate, ReportsBadColumnSum) {
    Pfa p = ex1();
    p.matrices[0](2, 0) = Rational{1, 10};
    auto v = validate_pfa(p);
    ASSERT_EQ(v.size(), 1U);
    EXPECT_EQ(v[0].location, "matrix a");
    EXPECT_NE(v[0].detail.find("column 0 sums to 11/10"), std::string::npos);
}

TEST(Validate, ReportsUnknownAcceptingState) {
    Pfa p = ex1();
    p.accepting.push_back(7);
    EXPECT_EQ(validate_pfa(p).size(), 1U);
}

TEST(Validate, ReportsNegativeAndSizeProblems) {
    Pfa p = ex1();
    p.matrices[1](0, 0) = Rational{-1, 2};
    p.matrices[1](1, 0) = Rational{1, 2};
    p.matrices[1](2, 0) = 1;
    auto v = validate_pfa(p);
    ASSERT_EQ(v.size(), 1U);
    EXPECT_NE(v[0].detail.find("negative"), std::string::npos);
    p = ex1();
    p.initial.pop_back();
    EXPECT_FALSE(validate_pfa(p).empty());
}

TEST(Evolve, Examples) {
    const Pfa p = ex1();
    EXPECT_EQ(evolve(p, Word{}), (ProbVector{1, 0, 0}));
    EXPECT_EQ(evolve(p, w({"b"})), (ProbVector{0, 0, 1}));
    const auto x = evolve(p, w({"b", "a", "a"}));
    EXPECT_EQ(x[2], Rational(1, 4));
    EXPECT_THROW(evolve(p, w({"z"})), Error);
}

TEST(Value, Examples) {
    const Pfa p = ex1();
    EXPECT_EQ(value(p, w({"b", "a", "a"})), Rational(1, 4));
    EXPECT_EQ(value(p, Word{}), 0);
    EXPECT_EQ(value(p, w({"b"})), 1);
}

TEST(ReachProb, Examples) {
    const Pfa p = ex1();
    EXPECT_EQ(reach_prob(p, "q1", w({"a"}), "q2"), Rational(1, 2));
    EXPECT_EQ(reach_prob(p, "q2", {}, "q2"), 1);
    EXPECT_EQ(reach_prob(p, "q1", w({"a", "a"}), "q3"), 0);
    EXPECT_EQ(reach_prob(p, "q3", w({"a"}), "q2"), Rational(1, 2));
}

TEST(Evolve, MatchesNaiveProductOracle) {
    for (const Pfa& p : {ex1(), fixtures::amplify3(), build_D_xy({Rational{3, 5}, Rational{1, 3}})}) {
        testutil::for_each_word(p.alphabet, 6, [&](const Word& word) {
            ASSERT_EQ(value(p, word), testutil::naive_value(p, word)) << format_word(word);
        });
    }
}

TEST(Evolve, ConservesMassAndComposes) {
    const Pfa p = fixtures::amplify3();
    std::mt19937_64 rng{7};
    for (int trial = 0; trial < 200; ++trial) {
        Word word;
        const std::size_t len = rng() % 12;
        for (std::size_t i = 0; i < len; ++i) word.push_back(p.alphabet[rng() % p.alphabet.size()]);
        ProbVector x = p.initial;
        for (const auto& sym : word) {
            x = p.matrix(sym).apply(x);
            ASSERT_EQ(sum(x), 1);
        }
        const std::size_t cut = len == 0 ? 0 : rng() % (len + 1);
        Word u(word.begin(), word.begin() + static_cast<std::ptrdiff_t>(cut));
        Word v(word.begin() + static_cast<std::ptrdiff_t>(cut), word.end());
        const auto mid = evolve(p, u);
        ASSERT_EQ(evolve_from(p, mid, p.encode(v)), evolve(p, word));
    }
}

TEST(FreezeReset, Detection) {
    auto fr = detect_freeze_reset(ex1());
    EXPECT_FALSE(fr.freeze);
    EXPECT_FALSE(fr.reset);
    fr = detect_freeze_reset(gamma(ex1()));
    EXPECT_EQ(fr.freeze, "id");
    EXPECT_EQ(fr.reset, "rt");

    Pfa p = ex1();
    p.alphabet.push_back("home");
    p.matrices.push_back(StochMatrix::constant_columns(point_mass(3, 0)));
    fr = detect_freeze_reset(p);
    EXPECT_EQ(fr.reset, "home");
}

TEST(Gamma, AddsTwoSymbolsAndPreservesValues) {
    const Pfa p = fixtures::amplify3();
    const Pfa g = gamma(p);
    EXPECT_EQ(g.num_symbols(), p.num_symbols() + 2);
    EXPECT_EQ(g.num_states(), p.num_states());
    EXPECT_TRUE(g.matrix("id").is_identity());
    EXPECT_TRUE(g.matrix("rt").all_columns_equal(p.initial));
    testutil::for_each_word(p.alphabet, 5, [&](const Word& word) { ASSERT_EQ(value(g, word), value(p, word)); });
    EXPECT_THROW(gamma(g), Error);
}

TEST(Gamma, SevenStatesThreeSymbols) {
    Pfa p;
    for (int i = 0; i < 7; ++i) p.states.push_back("s" + std::to_string(i));
    p.alphabet = {"x", "y", "z"};
    p.matrices.assign(3, StochMatrix::identity(7));
    p.initial = point_mass(7, 0);
    const Pfa g = gamma(p);
    EXPECT_EQ(g.num_symbols(), 5U);
    EXPECT_EQ(g.num_states(), 7U);
}

TEST(Gamma, LeadingFreezeKeepsValue) {
    const Pfa p = ex1();
    const Pfa g = gamma(p);
    testutil::for_each_word(p.alphabet, 4, [&](const Word& word) {
        Word ext{"id"};
        ext.insert(ext.end(), word.begin(), word.end());
        ASSERT_EQ(value(g, ext), value(p, word));
    });
}

TEST(Reduce, Examples) {
    EXPECT_EQ(reduce_extended_word(w({"a", "id", "b"})), w({"a", "b"}));
    EXPECT_EQ(reduce_extended_word(w({"a", "b", "rt", "a"})), w({"a"}));
    EXPECT_EQ(reduce_extended_word(w({"rt"})), Word{});
}

TEST(Reduce, PreservesValueOnLiftedExample) {
    const Pfa g = gamma(ex1());
    testutil::for_each_word(g.alphabet, 6, [&](const Word& word) {
        ASSERT_EQ(value(g, word), value(g, reduce_extended_word(word))) << format_word(word);
    });
}

TEST(BruteForce, Examples) {
    auto r = brute_force_value(ex1(), 1);
    EXPECT_EQ(r.best_word, w({"b"}));
    EXPECT_EQ(r.best_value, 1);
    r = brute_force_value(ex1(), 0);
    EXPECT_EQ(r.best_word, Word{});
    EXPECT_EQ(r.best_value, 0);
    Pfa none = ex1();
    none.accepting.clear();
    r = brute_force_value(none, 4);
    EXPECT_EQ(r.best_word, Word{});
    EXPECT_EQ(r.best_value, 0);
}

TEST(BruteForce, MatchesEnumerationAndIsMonotone) {
    const Pfa p = fixtures::amplify3();
    Rational prev{-1};
    for (std::size_t len = 0; len <= 6; ++len) {
        Rational best{-1};
        testutil::for_each_word(p.alphabet, len, [&](const Word& word) { best = std::max(best, testutil::naive_value(p, word)); });
        const auto r = brute_force_value(p, len);
        EXPECT_EQ(r.best_value, best);
        EXPECT_EQ(value(p, r.best_word), best);
        EXPECT_GE(r.best_value, prev);
        prev = r.best_value;
    }
}

TEST(BruteForce, ThreadCountDoesNotChangeResult) {
    const Pfa p = gamma(fixtures::amplify3());
    const auto one = brute_force_value(p, 5, {1U << 24, 1});
    const auto four = brute_force_value(p, 5, {1U << 24, 4});
    EXPECT_EQ(one.best_word, four.best_word);
    EXPECT_EQ(one.best_value, four.best_value);
    ASSERT_EQ(one.best_by_length.size(), four.best_by_length.size());
    for (std::size_t i = 0; i < one.best_by_length.size(); ++i)
        EXPECT_EQ(one.best_by_length[i].symbols, four.best_by_length[i].symbols);
}

TEST(BruteForce, BudgetExceeded) { EXPECT_THROW(brute_force_value(ex1(), 30, {1000, 1}), Error); }

TEST(Emptiness, Examples) {
    EXPECT_EQ(emptiness_semidecide(ex1(), Rational{1, 2}, 1), w({"b"}));
    Pfa none = ex1();
    none.accepting.clear();
    EXPECT_FALSE(emptiness_semidecide(none, 0, 5));
    EXPECT_FALSE(emptiness_semidecide(ex1(), Rational{99, 100} + Rational{1, 100} - Rational{1, 1000000}, 0));
    EXPECT_THROW(emptiness_semidecide(ex1(), 1, 5), Error);
}

TEST(Words, ParseAndFormat) {
    const Pfa g = gamma(ex1());
    EXPECT_EQ(parse_word(g.alphabet, "baa"), w({"b", "a", "a"}));
    EXPECT_EQ(parse_word(g.alphabet, "a id b"), w({"a", "id", "b"}));
    EXPECT_EQ(parse_word(g.alphabet, "aidrtb"), w({"a", "id", "rt", "b"}));
    EXPECT_EQ(parse_word(g.alphabet, "eps"), Word{});
    EXPECT_THROW(parse_word(g.alphabet, "ax"), Error);
    EXPECT_EQ(format_word(w({"a", "b"})), "ab");
    EXPECT_EQ(format_word(w({"a", "id"})), "a id");
    EXPECT_EQ(format_word({}), "eps");
}

TEST(PfaIo, RoundTrip) {
    for (const Pfa& p : {ex1(), gamma(fixtures::amplify3()), build_D_xy({Rational{3, 4}, Rational{1, 2}})}) {
        const Pfa q = parse_pfa(format_pfa(p));
        EXPECT_EQ(q.states, p.states);
        EXPECT_EQ(q.alphabet, p.alphabet);
        EXPECT_EQ(q.initial, p.initial);
        EXPECT_EQ(q.accepting, p.accepting);
        ASSERT_EQ(q.matrices.size(), p.matrices.size());
        for (std::size_t k = 0; k < p.matrices.size(); ++k) EXPECT_TRUE(q.matrices[k] == p.matrices[k]);
    }
}

TEST(PfaIo, LineAnchoredErrors) {
    const std::string good = format_pfa(ex1());
    auto message = [](const std::string& text) {
        try {
            parse_pfa(text);
        } catch (const Error& e) {
            return std::string{e.what()};
        }
        return std::string{"no error"};
    };
    std::string bad = good;
    bad.replace(bad.find("1/2 1 0"), 7, "1/2 1 1");  // first row of matrix a
    EXPECT_EQ(message(bad).rfind("line 5:", 0), 0U) << message(bad);
    EXPECT_NE(message(bad).find("sums to"), std::string::npos);
    EXPECT_EQ(message("states q1\nalphabet a\ninitial 1\naccepting q9\nmatrix a\n1\n").rfind("line 4:", 0), 0U);
    EXPECT_EQ(message("states q1\nbogus\n").rfind("line 2:", 0), 0U);
    EXPECT_EQ(message("states q1 q2\nalphabet a\ninitial 1 0\naccepting\nmatrix a\n1 0\n").rfind("line 6:", 0), 0U);
}

TEST(PfaIo, ShippedFixturesParse) {
    const std::string dir = PFACAP_FIXTURE_DIR;
    for (const char* name : {"example1", "amplify3", "d_3_4_1_2", "d_2_5_1_2", "inner27", "family27", "toy3", "always",
                             "never"})
        EXPECT_NO_THROW(load_pfa(dir + "/" + name + ".pfa")) << name;
    EXPECT_EQ(value(load_pfa(dir + "/example1.pfa"), w({"b", "a", "a"})), Rational(1, 4));
}
