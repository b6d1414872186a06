#include "helpers.hpp"

#include <gtest/gtest.h>

#include <pfacap/fixtures.hpp>

#include <cmath>

using namespace pfacap;
using testutil::w;

namespace {

// Start state moves to an accepting or rejecting absorber, 9 to 1.
Pfa coin90() {
    Pfa p;
    p.states = {"s", "acc", "rej"};
    p.alphabet = {"a"};
    p.initial = point_mass(3, 0);
    p.accepting = {1};
    StochMatrix a{3};
    a(1, 0) = Rational{9, 10}, a(2, 0) = Rational{1, 10};
    a(1, 1) = 1, a(2, 2) = 1;
    p.matrices = {a};
    return p;
}

Fsmc lifted(const Pfa& a) { return build_V(gamma(a)); }

BlockChannel block_of(const Pfa& a, const Word& word, std::size_t free) {
    ControlSchedule s;
    s.word = word;
    s.free = free;
    return induced_block_channel(lifted(a), s);
}

}  // namespace

TEST(Schedule, ControlsForOnePeriod) {
    ControlSchedule s;
    s.word = w({"a", "b"});
    s.free = 3;
    EXPECT_EQ(s.controls(), w({"a", "b", "id", "id", "rt"}));
    EXPECT_EQ(s.period(), 5U);
    s.free = 0;
    EXPECT_THROW(s.controls(), Error);
}

TEST(Block, AlwaysAcceptingIsIdentity) {
    const auto b = block_of(fixtures::constant(true), w({"a", "b"}), 3);
    EXPECT_EQ(b.noise(0), 1);
    for (std::uint64_t e = 1; e < 32; ++e) EXPECT_EQ(b.noise(e), 0);
    const auto dense = b.dense();
    for (std::size_t x = 0; x < 32; ++x)
        for (std::size_t y = 0; y < 32; ++y) EXPECT_EQ(dense(x, y), x == y ? 1.0 : 0.0);
    EXPECT_DOUBLE_EQ(achievable_rate(b).rate, 1.0);
}

TEST(Block, NeverAcceptingIsUniform) {
    const auto b = block_of(fixtures::constant(false), w({"a"}), 4);
    for (std::uint64_t e = 0; e < 32; ++e) EXPECT_EQ(b.noise(e), Rational(1, 32));
    EXPECT_NEAR(achievable_rate(b).rate, 0.0, 1e-9);
    EXPECT_NEAR(achievable_rate(b, InputChoice::BlahutArimoto).rate, 0.0, 1e-9);
}

TEST(Block, NoiseMatchesFullPeriodSequenceLaw) {
    const Pfa a = build_D_xy({Rational{3, 4}, Rational{1, 2}});
    for (const Word& word : {w({"a", "b"}), w({"a", "a", "b"}), w({"b", "a"})})
        for (std::size_t free : {1U, 2U, 4U}) {
            ControlSchedule s;
            s.word = word;
            s.free = free;
            const Fsmc ch = lifted(a);
            const auto blk = induced_block_channel(ch, s);
            const auto law = joint_seq_dist(ch, schedule_inputs(ch, s.controls())).output_marginal();
            ASSERT_EQ(law.size(), std::size_t{1} << blk.length());
            for (std::uint64_t e = 0; e < law.size(); ++e) ASSERT_EQ(blk.noise(e), law[e]) << e;
            EXPECT_EQ(blk.success(), value(a, word));
        }
}

TEST(Block, ConsecutivePeriodsAreIdenticallyDistributed) {
    const Pfa a = build_D_xy({Rational{3, 4}, Rational{1, 2}});
    ControlSchedule s;
    s.word = w({"a", "a", "b", "a"});
    s.free = 2;
    EXPECT_TRUE(blocks_identically_distributed(lifted(a), s));
}

TEST(Block, RejectsNonLiftedChannel) {
    ControlSchedule s;
    s.word = w({"a"});
    EXPECT_THROW(induced_block_channel(build_V(fixtures::example1()), s), Error);
}

TEST(Block, BudgetApplies) {
    ControlSchedule s;
    s.word = Word(12, "a");
    EXPECT_THROW(induced_block_channel(lifted(fixtures::constant(true)), s, 1024), Error);
}

TEST(Rate, WitnessBlockMeetsBound) {
    const Pfa a = coin90();
    const double v = 0.9, delta = 0.1;
    const std::size_t m = 1;
    const std::size_t n = static_cast<std::size_t>(std::ceil((1.0 + (v - 2 * delta) * m) / delta));
    EXPECT_EQ(n, 17U);
    const auto blk = block_of(a, w({"a"}), n);
    EXPECT_EQ(blk.success(), Rational(9, 10));
    const double rate = achievable_rate(blk).rate;
    EXPECT_GE(rate, 0.7);
    EXPECT_GE(rate, (static_cast<double>(n) * (v - delta) - 1.0) / static_cast<double>(m + n));
}

TEST(Rate, ChainInequalitiesHold) {
    const Pfa d = build_D_xy({Rational{3, 4}, Rational{1, 2}});
    for (const auto& [word, free] : std::vector<std::pair<Word, std::size_t>>{
             {w({"a", "b"}), 3}, {w({"a", "a", "b", "a"}), 6}, {w({"a"}), 17}}) {
        const Pfa& a = word.size() == 1 ? coin90() : d;
        const auto blk = block_of(a, word, free);
        const auto c = achievability_chain(blk);
        EXPECT_NEAR(c.total, c.chain_rule, 1e-9);
        EXPECT_LE(c.total, c.bound_by_m + 1e-9);
        EXPECT_LE(c.bound_by_m, c.remove_conditioning + 1e-9);
        EXPECT_LE(c.remove_conditioning, c.final_bound + 1e-9);
        EXPECT_NEAR(c.free_entropy, c.free_entropy_closed_form, 1e-9);
    }
}

TEST(Rate, BlahutArimotoNeverWorseThanUniform) {
    const Pfa a = build_D_xy({Rational{3, 5}, Rational{1, 2}});
    for (std::size_t free : {1U, 2U, 3U}) {
        const auto blk = block_of(a, w({"a", "b"}), free);
        const auto uni = achievable_rate(blk);
        const auto ba = achievable_rate(blk, InputChoice::BlahutArimoto);
        EXPECT_TRUE(ba.ba_dense);
        EXPECT_GE(ba.rate, uni.rate - 1e-12);
        EXPECT_NEAR(ba.rate, uni.rate, 1e-6);  // additive noise: uniform input is optimal
    }
}

TEST(Converse, AlwaysAndNever) {
    const auto hi = converse_check(lifted(fixtures::constant(true)), 3, 20, 4);
    EXPECT_EQ(hi.violations, 0U);
    EXPECT_EQ(hi.val_horizon, 1);
    for (const auto& r : hi.rows) EXPECT_NEAR(r.conditional_entropy, 0.0, 1e-12);

    const auto lo = converse_check(lifted(fixtures::constant(false)), 3, 20, 4);
    EXPECT_EQ(lo.violations, 0U);
    for (const auto& r : lo.rows) {
        EXPECT_NEAR(r.conditional_entropy, 3.0, 1e-9);
        EXPECT_NEAR(r.entropy_bound, 3.0, 1e-12);
        EXPECT_NEAR(r.rate, 0.0, 1e-9);
    }
}

TEST(Converse, LowGadgetRespectsHalf) {
    const auto rep = converse_check(build_V(fixtures::find("d25").value()), 4, 100, 1);
    EXPECT_EQ(rep.trials, 100U);
    EXPECT_EQ(rep.violations, 0U);
    EXPECT_LE(rep.val_horizon, Rational(1, 2));
    EXPECT_LE(rep.max_rate, 0.5 + kConverseTolerance);
    EXPECT_GE(rep.horizon, 3U);
    EXPECT_TRUE(rep.diagnosis.empty());
}

TEST(Converse, SeedDeterminesTrials) {
    const Fsmc ch = lifted(fixtures::example1());
    const auto a = converse_check(ch, 3, 10, 77), b = converse_check(ch, 3, 10, 77);
    ASSERT_EQ(a.rows.size(), b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) EXPECT_EQ(a.rows[i].conditional_entropy, b.rows[i].conditional_entropy);
    EXPECT_THROW(converse_check(ch, 7, 1), Error);
}

TEST(Bracket, AlwaysAcceptingIsOne) {
    BracketBudget budget;
    budget.block = 12;
    const auto br = capacity_bracket(fixtures::constant(true), Rational{1, 10}, budget);
    EXPECT_NEAR(br.lower, 1.0, 1e-12);
    EXPECT_DOUBLE_EQ(br.upper, 1.0);
    EXPECT_TRUE(br.upper_exact);
    EXPECT_EQ(br.upper_label, "exact");
}

TEST(Bracket, ExampleOneUnitWord) {
    const double delta = 0.1;
    const auto br = capacity_bracket(fixtures::example1(), Rational{1, 10});
    EXPECT_DOUBLE_EQ(br.upper, 1.0);
    EXPECT_TRUE(br.upper_exact);
    EXPECT_GE(br.lower, 1.0 - 2 * delta);
    EXPECT_LE(br.lower, br.upper + 1e-9);
}

TEST(Bracket, LowGadgetUpperAtMostHalf) {
    const auto br = capacity_bracket(fixtures::find("d25").value(), Rational{1, 10});
    EXPECT_LE(br.upper, 0.5);
    EXPECT_FALSE(br.upper_exact);
    EXPECT_EQ(br.upper_label, "heuristic horizon bound");
    EXPECT_GE(br.lower, 0.0);
    EXPECT_LE(br.lower, br.upper + 1e-9);
    for (const auto& p : br.curve) EXPECT_LE(p.lower, p.upper + 1e-9);
}

TEST(Bracket, LargerBlockBudgetNeverLowersLower) {
    const Pfa a = fixtures::find("d34").value();
    double prev = 0.0;
    for (std::size_t block : {4U, 8U, 12U, 16U}) {
        BracketBudget b;
        b.block = block;
        const auto br = capacity_bracket(a, Rational{1, 10}, b);
        EXPECT_GE(br.lower, prev - 1e-12) << block;
        EXPECT_LE(br.lower, br.upper + 1e-9);
        prev = br.lower;
    }
}

TEST(Bracket, LambdaSeparation) {
    const Rational lambda{1};
    const double delta = 0.1;
    BracketBudget b;
    b.horizon = 5;
    b.block = 64;
    const auto hi = capacity_bracket(build_family_member(fixtures::constant(true), {lambda}), Rational{1, 10}, b);
    EXPECT_GE(hi.lower, to_double(lambda) - 2 * delta);
    const auto lo = capacity_bracket(build_family_member(fixtures::constant(false), {lambda}), Rational{1, 10}, b);
    EXPECT_LE(lo.upper, to_double(lambda) / 2);
}

TEST(Bracket, BudgetParsing) {
    const auto b = parse_budget("horizon=6,block=10");
    EXPECT_EQ(b.horizon, 6U);
    EXPECT_EQ(b.block, 10U);
    EXPECT_EQ(b.table, BracketBudget{}.table);
    EXPECT_THROW(parse_budget("depth=3"), Error);
    EXPECT_THROW(parse_budget("block=x"), Error);
}

TEST(Stability, ScheduleDominatesSquares) {
    for (double val : {0.5, 0.9, 1.0})
        for (double delta : {0.05, 0.1, 0.2}) {
            const auto s = stability_schedule(val, delta, {20, 24, 30, 40});
            ASSERT_EQ(s.stages.size(), 3U);
            const std::vector<std::size_t> ns{20, 24, 30, 40};
            for (std::size_t t = 0; t < s.stages.size(); ++t) {
                EXPECT_GE(s.stages[t].m, ns[t + 1] * ns[t + 1]);
                EXPECT_GE(s.stages[t].m, s.stages[t].m_formula);
                EXPECT_EQ(s.stages[t].n, ns[t]);
            }
        }
    EXPECT_THROW(stability_schedule(0.9, 0.1, {20}), Error);
    EXPECT_THROW(stability_schedule(0.9, 0.1, {24, 20}), Error);
}

TEST(Stability, FirstStageFormula) {
    // t = 1: m_1 = ceil(2 / (n_1 delta) * n_2 (val - delta)).
    const auto s = stability_schedule(0.9, 0.1, {20, 24});
    EXPECT_EQ(s.stages[0].m_formula, static_cast<std::uint64_t>(std::ceil(2.0 / (20 * 0.1) * 24 * (0.9 - 0.1))));
    EXPECT_EQ(s.stages[0].m, 576U);
}

TEST(Stability, DeterministicChannelHasNoTail) {
    const Pfa a = fixtures::constant(true);
    const auto sched = stability_schedule(1.0, 0.1, {4, 6});
    const auto rep = spectrum_concentration_demo(lifted(a), w({"a"}), sched, 1, 200, 3, {0.5, 1.0, 2.0});
    EXPECT_DOUBLE_EQ(rep.c_n, 1.0);
    for (const auto& r : rep.rows) {
        EXPECT_EQ(r.empirical, 0.0);
        EXPECT_TRUE(r.within);
    }
}

TEST(Stability, ToyDemoWithinHoeffding) {
    const Pfa toy = fixtures::toy3();
    const Word word = w({"a", "a"});
    const double val = to_double(value(toy, word));
    EXPECT_EQ(val, 1.0);
    const auto sched = stability_schedule(val, 0.1, {20, 24});
    const auto rep = spectrum_concentration_demo(lifted(toy), word, sched, 1, 10000, 1, {2.0});
    ASSERT_EQ(rep.rows.size(), 1U);
    EXPECT_TRUE(rep.rows[0].within) << rep.rows[0].empirical << " vs " << rep.rows[0].analytic;
    EXPECT_GT(rep.c_n, 0.0);
    EXPECT_LE(rep.c_n, 1.0);
    const auto again = spectrum_concentration_demo(lifted(toy), word, sched, 1, 10000, 1, {2.0});
    EXPECT_EQ(again.mean_density, rep.mean_density);
}
