#pragma once

// Bracket on C(V_A) = val(A).
//
// lower: best uniform-input block rate over candidate words (brute-force
//        winners per length plus caller-supplied words) and free-slot counts
//        within the block budget. Every rate is an exact block computation.
// upper: best value found by exhaustive search up to the horizon. It is a
//        certified upper bound only if value 1 is reached; otherwise it is a
//        heuristic estimate of the supremum from below.
// Candidate words never exceed the horizon, so every prefix value that
// enters a block rate is covered by the upper estimate and lower <= upper.

#include "block.hpp"
#include "search.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <vector>

namespace pfacap {

struct BracketBudget {
    std::size_t horizon = 8;                            // longest word searched
    std::size_t block = 14;                             // largest m + n
    std::uint64_t table = std::uint64_t{1} << 14;       // 2^m prefix table entries
    std::uint64_t search_words = std::uint64_t{1} << 22;  // brute-force tree size
};

/// "horizon=8,block=12,table=16384,words=1000000"; missing keys keep defaults.
inline BracketBudget parse_budget(std::string_view spec) {
    BracketBudget b;
    std::size_t pos = 0;
    while (pos < spec.size()) {
        auto end = spec.find(',', pos);
        if (end == std::string_view::npos) end = spec.size();
        const auto item = spec.substr(pos, end - pos);
        pos = end + 1;
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string_view::npos) throw Error("budget item '" + std::string{item} + "' lacks '='");
        const auto key = item.substr(0, eq);
        const auto text = item.substr(eq + 1);
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
        if (ec != std::errc{} || ptr != text.data() + text.size())
            throw Error("budget value '" + std::string{text} + "' is not a non-negative integer");
        if (key == "horizon") b.horizon = v;
        else if (key == "block") b.block = v;
        else if (key == "table") b.table = v;
        else if (key == "words") b.search_words = v;
        else throw Error("unknown budget key '" + std::string{key} + "'");
    }
    if (b.block < 1) throw Error("block budget must be at least 1");
    return b;
}

struct BlockPoint {
    std::size_t block = 0;  // m + n
    double lower = 0.0;     // best rate with exactly this block size
    double upper = 0.0;
};

struct CapacityBracket {
    double lower = 0.0;
    double upper = 1.0;
    double gap = 1.0;
    bool upper_exact = false;
    std::string upper_label;  // "exact" or "heuristic horizon bound"
    // provenance of the lower bound
    Word word;
    std::size_t m = 0;
    std::size_t n = 0;
    Rational delta;
    Rational word_value;
    // provenance of the upper bound
    std::size_t horizon = 0;
    Word upper_word;
    Rational upper_value;
    bool budget_exceeded = false;
    std::vector<BlockPoint> curve;
};

namespace bracket_detail {

// A is used as is when it already has freeze and reset symbols, else lifted.
inline Pfa channel_automaton(const Pfa& a, ControlSchedule& sched) {
    const auto fr = detect_freeze_reset(a);
    if (fr.freeze && fr.reset) {
        sched.freeze = *fr.freeze;
        sched.reset = *fr.reset;
        return a;
    }
    return gamma(a);
}

inline std::size_t feasible_horizon(const Pfa& a, const BracketBudget& b, bool& cut) {
    std::size_t h = b.horizon;
    while (h > 0 && detail::tree_size(a.num_symbols(), h, b.search_words) > b.search_words) --h;
    cut = h < b.horizon;
    return h;
}

}  // namespace bracket_detail

/// n suggested by the protocol for a word of value v and length m.
inline std::size_t suggested_free_slots(double v, double delta, std::size_t m) {
    const double raw = (1.0 + (v - 2.0 * delta) * static_cast<double>(m)) / delta;
    return raw < 1.0 ? 1 : static_cast<std::size_t>(std::ceil(raw));
}

inline CapacityBracket capacity_bracket(const Pfa& a, const Rational& delta, const BracketBudget& budget = {},
                                        const std::vector<Word>& extra_words = {}) {
    require_valid(a);
    if (delta.sign() <= 0 || delta >= 1) throw Error("delta must lie in (0, 1)");
    CapacityBracket br;
    br.delta = delta;
    ControlSchedule base;
    const Pfa chan_pfa = bracket_detail::channel_automaton(a, base);
    const Fsmc ch = build_V(chan_pfa);

    br.horizon = bracket_detail::feasible_horizon(a, budget, br.budget_exceeded);
    const auto search = brute_force_value(a, br.horizon, {budget.search_words, default_threads()});
    br.upper_word = search.best_word;
    br.upper_value = search.best_value;
    br.upper = std::min(1.0, to_double(search.best_value));
    br.upper_exact = search.best_value == 1;
    br.upper_label = br.upper_exact ? "exact" : "heuristic horizon bound";

    std::vector<Word> candidates;
    for (const auto& s : search.best_by_length) candidates.push_back(a.decode(s.symbols));
    for (const auto& w : extra_words) {
        if (w.size() > br.horizon) {
            br.budget_exceeded = true;  // outside the searched range, rate not covered by the upper value
            continue;
        }
        for (const auto& sym : w) chan_pfa.symbol_index(sym);
        candidates.push_back(w);
    }

    br.curve.resize(budget.block);
    for (std::size_t i = 0; i < budget.block; ++i) br.curve[i] = {i + 1, 0.0, br.upper};
    bool have = false;
    for (const auto& w : candidates) {
        const std::size_t m = w.size();
        if (m + 1 > budget.block) continue;
        if (m >= 63 || (std::uint64_t{1} << m) > budget.table) {
            br.budget_exceeded = true;
            continue;
        }
        ControlSchedule sched = base;
        sched.word = w;
        sched.free = 1;
        const BlockChannel first = induced_block_channel(ch, sched, budget.table);
        for (std::size_t n = 1; m + n <= budget.block; ++n) {
            const BlockChannel blk{m, n, first.prefix_clean(), first.prefix_noisy()};
            const double rate = achievable_rate(blk).rate;
            auto& point = br.curve[m + n - 1];
            point.lower = std::max(point.lower, rate);
            if (!have || rate > br.lower) {
                have = true;
                br.lower = rate;
                br.word = w;
                br.m = m;
                br.n = n;
                br.word_value = first.success();
            }
        }
    }
    br.lower = std::max(0.0, br.lower);
    br.gap = br.upper - br.lower;
    return br;
}

}  // namespace pfacap
