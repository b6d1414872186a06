#pragma once

// Near-optimal words for the two-branch gadgets.
//
// For x > 1/2 the words w_k = B^{n_2} b B^{n_3} b ... B^{n_k} b, where B is
// the block "a" (plain gadget) or "a w_A c" (embedded automaton), use
//   n_i = ceil(log_x(1/i) + C_eps),  C_eps = (1/b) log_x((b-1)/b * eps),
// with b > 1 solving x^b = 1 - x. They keep p[q4 -> q6] <= eps for every k
// while p[q1 -> q3] tends to one.

#include "gadgets.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

namespace pfacap {

inline double solve_b(const Rational& x) {
    if (x <= Rational{1, 2} || x >= 1) throw Error("solve_b needs 1/2 < x < 1, got " + to_string(x));
    const double xd = to_double(x);
    auto f = [&](double b) { return std::pow(xd, b) - (1.0 - xd); };
    double lo = 1.0, hi = 2.0;
    while (f(hi) > 0) {
        lo = hi;
        hi *= 2;
    }
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < 400; ++it) {
        mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if (std::abs(fm) <= 1e-13 || hi - lo <= 1e-15 * hi) break;
        (fm > 0 ? lo : hi) = mid;
    }
    return mid;
}

/// b / (b - 1), an upper bound on zeta(b) for b > 1.
inline double zeta_tail_bound(double b) {
    if (!(b > 1.0)) throw Error("zeta_tail_bound needs b > 1");
    const double r = b / (b - 1.0);
    return std::isfinite(r) ? r : std::numeric_limits<double>::infinity();
}

struct WitnessParams {
    Rational x;
    Rational eps;
    std::size_t k = 2;
};

inline void check_witness_params(const WitnessParams& p) {
    if (p.x <= Rational{1, 2} || p.x > 1) throw Error("witness needs 1/2 < x <= 1, got " + to_string(p.x));
    if (p.eps.sign() <= 0 || p.eps >= p.x) throw Error("witness needs 0 < eps < x, got " + to_string(p.eps));
    if (p.k < 2) throw Error("witness needs k >= 2");
}

inline double c_eps(double x, double b, double eps) { return std::log((b - 1.0) / b * eps) / (b * std::log(x)); }

/// n_2, ..., n_k (clamped to at least 1). With x = 1 the coin never fails
/// and every block has length 1.
inline std::vector<unsigned> witness_lengths(const WitnessParams& p) {
    check_witness_params(p);
    std::vector<unsigned> out;
    if (p.x == 1) {
        out.assign(p.k - 1, 1U);
        return out;
    }
    const double xd = to_double(p.x);
    const double b = solve_b(p.x);
    const double c = c_eps(xd, b, to_double(p.eps));
    for (std::size_t i = 2; i <= p.k; ++i) {
        const double raw = std::log(1.0 / static_cast<double>(i)) / std::log(xd) + c;
        const double n = std::ceil(raw);
        out.push_back(n < 1.0 ? 1U : static_cast<unsigned>(n));
    }
    return out;
}

/// Target of synthesis: the plain gadget D(x, y), or D(A, y) driven by an
/// inner word of A whose value is used as x.
struct PlainMode {};
struct LiftedMode {
    Pfa inner;
    Word inner_word;
};
using WitnessMode = std::variant<PlainMode, LiftedMode>;

struct WitnessRow {
    std::size_t k = 0;
    Rational p_q1_q3;
    Rational p_q4_q6;
    Rational value;  // acceptance of w_k followed by the tail blocks
};

struct WitnessReport {
    Rational x;
    Rational eps;
    Rational y;
    std::vector<unsigned> lengths;  // n_2 .. n_k
    Word word;                      // w_k
    std::size_t tail_blocks = 0;    // blocks appended to push q4 mass into q5: (1-x)^t <= eps^2
    Rational p_q1_q3;
    Rational p_q4_q6;
    Rational value;
    bool requirement1_met = false;  // p_q4_q6 <= eps
    bool requirement2_met = false;  // p_q1_q3 >= 1 - eps
    std::vector<WitnessRow> rows;   // one per prefix w_2 .. w_k
};

/// 1 - prod(1 - c^{n_i})
inline Rational block_closed_form(const Rational& coin, const std::vector<unsigned>& lengths) {
    Rational prod{1};
    for (auto n : lengths) prod *= 1 - pow(coin, n);
    return 1 - prod;
}

namespace witness_detail {

inline std::size_t tail_blocks(const Rational& x, const Rational& eps) {
    if (x == 1) return 1;
    // smallest t with (1 - x)^t <= eps^2
    const Rational target = eps * eps;
    std::size_t t = 1;
    Rational miss = 1 - x;
    while (miss > target) {
        miss *= 1 - x;
        ++t;
    }
    return t;
}

}  // namespace witness_detail

/// Builds w_k, simulates it on the gadget from q1, q4 and the start state,
/// and checks the two reach probabilities against the closed forms exactly.
/// `rows` records every prefix w_2, ..., w_k (each is a prefix of the next).
inline WitnessReport synthesize_word(const WitnessParams& params, const WitnessMode& mode,
                                     const Rational& y = Rational{1, 2}) {
    WitnessReport rep;
    rep.eps = params.eps;
    rep.y = y;

    Pfa gadget;
    Word block;
    if (const auto* lifted = std::get_if<LiftedMode>(&mode)) {
        for (const auto& sym : lifted->inner_word)
            if (sym == "b")
                throw Error("inner word must not contain the separator symbol 'b' (it would move idle gadget mass)");
        rep.x = value(lifted->inner, lifted->inner_word);
        gadget = build_D_Ay(lifted->inner, y);
        block.push_back("a");
        block.insert(block.end(), lifted->inner_word.begin(), lifted->inner_word.end());
        block.push_back("c");
    } else {
        rep.x = params.x;
        gadget = build_D_xy({params.x, y});
        block = {"a"};
    }
    WitnessParams effective = params;
    effective.x = rep.x;
    rep.lengths = witness_lengths(effective);
    rep.tail_blocks = witness_detail::tail_blocks(rep.x, rep.eps);

    const auto block_idx = gadget.encode(block);
    const auto sep = gadget.symbol_index("b");
    ProbVector top = point_mass(gadget.num_states(), skeleton::q1);
    ProbVector bottom = point_mass(gadget.num_states(), skeleton::q4);
    ProbVector start = gadget.initial;
    std::vector<SymbolIndex> word_idx;

    std::vector<unsigned> seen;
    for (std::size_t i = 0; i < rep.lengths.size(); ++i) {
        const unsigned n = rep.lengths[i];
        std::vector<SymbolIndex> segment;
        for (unsigned r = 0; r < n; ++r) segment.insert(segment.end(), block_idx.begin(), block_idx.end());
        segment.push_back(sep);
        top = evolve_from(gadget, std::move(top), segment);
        bottom = evolve_from(gadget, std::move(bottom), segment);
        start = evolve_from(gadget, std::move(start), segment);
        word_idx.insert(word_idx.end(), segment.begin(), segment.end());
        seen.push_back(n);

        WitnessRow row;
        row.k = i + 2;
        row.p_q1_q3 = top[skeleton::q3];
        row.p_q4_q6 = bottom[skeleton::q6];
        const Rational closed13 = block_closed_form(rep.x, seen);
        const Rational closed46 = block_closed_form(1 - rep.x, seen);
        if (row.p_q1_q3 != closed13 || row.p_q4_q6 != closed46)
            throw Error("closed form disagrees with simulation at k = " + std::to_string(row.k) +
                        " (gadget wiring bug)");

        ProbVector tailed = start;
        for (std::size_t t = 0; t < rep.tail_blocks; ++t) tailed = evolve_from(gadget, std::move(tailed), block_idx);
        row.value = accepting_mass(gadget, tailed);
        rep.rows.push_back(std::move(row));
    }

    const auto& last = rep.rows.back();
    rep.word = gadget.decode(word_idx);
    rep.p_q1_q3 = last.p_q1_q3;
    rep.p_q4_q6 = last.p_q4_q6;
    rep.value = last.value;
    rep.requirement1_met = rep.p_q4_q6 <= rep.eps;
    rep.requirement2_met = rep.p_q1_q3 >= 1 - rep.eps;
    return rep;
}

/// The tail blocks that follow w_k in the value word.
inline Word witness_tail(const WitnessReport& rep, const WitnessMode& mode) {
    Word block{"a"};
    if (const auto* lifted = std::get_if<LiftedMode>(&mode)) {
        block.insert(block.end(), lifted->inner_word.begin(), lifted->inner_word.end());
        block.push_back("c");
    }
    Word tail;
    for (std::size_t t = 0; t < rep.tail_blocks; ++t) tail.insert(tail.end(), block.begin(), block.end());
    return tail;
}

}  // namespace pfacap
