#pragma once

// Converse side of the capacity identity, checked exactly on short blocks.
//
// At use i the output is a fair coin unless the automaton state reached by
// c_1 ... c_{i-1} is accepting, which happens with probability at most
// val(A) over words of length <= i - 1. Hence for every input law
//   H(Y^n | X^n C^n) >= n (1 - v)   and   I / n <= v
// with v the best value over words of length <= n - 1. The brute-force
// horizon is never below n - 1, so the check is sound, but it is one-sided:
// a pass says nothing about how tight v is.

#include "fsmc.hpp"
#include "info.hpp"
#include "search.hpp"

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace pfacap {

inline constexpr double kConverseTolerance = 1e-9;

/// Recovers the automaton behind a channel built by build_V.
inline Pfa pfa_of_V(const Fsmc& ch) {
    if (ch.controls.empty()) throw Error("channel was not built from an automaton");
    Pfa a;
    a.states = ch.states;
    a.alphabet = ch.controls;
    for (std::size_t c = 0; c < ch.controls.size(); ++c) a.matrices.push_back(ch.state_law[2 * c]);
    a.initial = point_mass(ch.num_states(), ch.initial);
    const auto& law = ch.output_law[0];
    for (StateIndex s = 0; s < ch.num_states(); ++s)
        if (law[s][0] == 1) a.accepting.push_back(s);
    return a;
}

struct ConverseTrial {
    double conditional_entropy = 0.0;  // H(Y^n | X^n C^n)
    double entropy_bound = 0.0;        // n (1 - v)
    double rate = 0.0;                 // I(X^n C^n ; Y^n) / n
    bool violated = false;
};

struct ConverseReport {
    std::size_t n = 0;
    std::size_t horizon = 0;
    Rational val_horizon;
    std::size_t trials = 0;
    std::size_t violations = 0;
    double min_entropy_slack = 0.0;
    double max_rate = 0.0;
    std::string diagnosis;  // empty when no violation
    std::vector<ConverseTrial> rows;
};

namespace converse_detail {

struct SequenceTable {
    std::size_t n = 0;
    std::size_t k = 0;                  // channel inputs per use
    std::vector<double> law;            // law[x * 2^n + y] = W(y | x)
    std::vector<double> cond_entropy;   // H(Y^n | x)
};

inline SequenceTable tabulate(const Fsmc& ch, std::size_t n, std::uint64_t budget) {
    SequenceTable t;
    t.n = n;
    t.k = ch.num_inputs();
    std::uint64_t count = 1;
    for (std::size_t i = 0; i < n; ++i) {
        count *= t.k;
        if (count * (std::uint64_t{1} << n) > budget) throw Error("converse table exceeds budget; lower n");
    }
    const std::size_t ny = std::size_t{1} << n;
    t.law.resize(count * ny);
    t.cond_entropy.resize(count);
    parallel_for(count, default_threads(), [&](std::size_t x) {
        std::vector<std::size_t> input(n);
        std::uint64_t rest = x;
        for (std::size_t i = n; i-- > 0;) {
            input[i] = rest % t.k;
            rest /= t.k;
        }
        const auto out = joint_seq_dist(ch, input).output_marginal();
        double h = 0.0;
        for (std::size_t y = 0; y < ny; ++y) {
            const double p = to_double(out[y]);
            t.law[x * ny + y] = p;
            h += plogp(p);
        }
        t.cond_entropy[x] = h;
    });
    return t;
}

inline std::vector<std::vector<double>> random_product_input(std::size_t n, std::size_t k, Rng& rng) {
    // Flat Dirichlet per slot.
    std::vector<std::vector<double>> slots(n, std::vector<double>(k));
    for (auto& slot : slots) {
        double total = 0.0;
        for (auto& w : slot) {
            w = -std::log(1.0 - rng.uniform());
            total += w;
        }
        for (auto& w : slot) w /= total;
    }
    return slots;
}

inline std::size_t count_violations(const std::vector<ConverseTrial>& rows) {
    std::size_t v = 0;
    for (const auto& r : rows) v += r.violated ? 1 : 0;
    return v;
}

}  // namespace converse_detail

inline ConverseReport converse_check(const Fsmc& ch, std::size_t n, std::size_t trials, std::uint64_t seed = 1,
                                     std::size_t horizon = 0, std::uint64_t budget = std::uint64_t{1} << 22) {
    if (n == 0 || n > 6) throw Error("converse_check needs 1 <= n <= 6");
    const Pfa a = pfa_of_V(ch);
    ConverseReport rep;
    rep.n = n;
    rep.trials = trials;
    rep.horizon = std::max(horizon, n - 1);
    auto val_at = [&](std::size_t h) { return brute_force_value(a, h).best_value; };
    rep.val_horizon = val_at(rep.horizon);

    const auto table = converse_detail::tabulate(ch, n, budget);
    const std::size_t ny = std::size_t{1} << n;
    const std::size_t count = table.cond_entropy.size();
    const double dn = static_cast<double>(n);

    auto evaluate = [&](const std::vector<std::vector<double>>& slots, double v) {
        ConverseTrial row;
        std::vector<double> py(ny, 0.0);
        std::vector<std::size_t> digits(n, 0);
        for (std::size_t x = 0; x < count; ++x) {
            double px = 1.0;
            for (std::size_t i = 0; i < n; ++i) px *= slots[i][digits[i]];
            // odometer, last slot fastest, matching the table layout
            for (std::size_t i = n; i-- > 0;) {
                if (++digits[i] < table.k) break;
                digits[i] = 0;
            }
            if (px == 0.0) continue;
            row.conditional_entropy += px * table.cond_entropy[x];
            for (std::size_t y = 0; y < ny; ++y) py[y] += px * table.law[x * ny + y];
        }
        double hy = 0.0;
        for (double p : py) hy += plogp(p);
        row.entropy_bound = dn * (1.0 - v);
        row.rate = std::max(0.0, hy - row.conditional_entropy) / dn;
        row.violated = row.conditional_entropy < row.entropy_bound - kConverseTolerance ||
                       row.rate > v + kConverseTolerance;
        return row;
    };

    Rng rng{seed};
    std::vector<std::vector<std::vector<double>>> inputs;
    const double v = to_double(rep.val_horizon);
    rep.min_entropy_slack = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < trials; ++t) {
        inputs.push_back(converse_detail::random_product_input(n, table.k, rng));
        auto row = evaluate(inputs.back(), v);
        rep.min_entropy_slack = std::min(rep.min_entropy_slack, row.conditional_entropy - row.entropy_bound);
        rep.max_rate = std::max(rep.max_rate, row.rate);
        rep.rows.push_back(row);
    }
    if (trials == 0) rep.min_entropy_slack = 0.0;
    rep.violations = converse_detail::count_violations(rep.rows);

    if (rep.violations > 0) {
        // A larger horizon can only raise v. If that clears every violation
        // the horizon was too short; otherwise the engine is at fault.
        const double wider = to_double(val_at(rep.horizon + 2));
        std::size_t remaining = 0;
        for (const auto& slots : inputs) remaining += evaluate(slots, wider).violated ? 1 : 0;
        rep.diagnosis = remaining == 0 ? "value underestimated at horizon " + std::to_string(rep.horizon)
                                       : "bound violated beyond the horizon value (engine bug)";
    }
    return rep;
}

}  // namespace pfacap
