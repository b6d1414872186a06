#pragma once

// Automaton constructions used by the hardness argument: the two-branch
// gadget D(x, y), its variant D(A, y) that replaces the coin x by the
// acceptance probability of an embedded automaton A, the amplifiers B_p and
// C_p, and the lifted family members.
//
// Skeleton shared by D(x, y) and D(A, y) (8 states):
//
//   init  deterministic start. Reading symbol s from init moves mass y to
//         wherever q1 would go on s, y to wherever q4 would go on s, and
//         1 - 2y to sink.
//   q1 -a-> q1 (x) | q2 (1-x)      q1 -b-> q3
//   q2 -a-> q2                     q2 -b-> q1
//   q4 -a-> q4 (1-x) | q5 (x)      q4 -b-> q6
//   q5 -a-> q5                     q5 -b-> q4
//   q3, q6, sink absorbing. Accepting: q3, q5.
//
// Reading a^{n_1} b ... a^{n_t} b from q1 lands in q3 with probability
// 1 - prod(1 - x^{n_i}); from q4 it lands in q6 with probability
// 1 - prod(1 - (1-x)^{n_i}). Two consecutive b's absorb everything into
// q3 (mass y), q6 or sink, so such words have value exactly y.
//
// In D(A, y) the coin is replaced by two copies of A ("u." above, "l."
// below): q1 -a-> u-copy at A's initial distribution and q4 -a-> l-copy. The
// copies evolve under A's own symbols (a symbol A lacks leaves a copy
// unchanged). Symbol c leaves the copies: accepting u-states go to q1, the
// rest to q2; accepting l-states go to q5, the rest to q4. Skeleton states
// ignore c. Hence p[q1 -(a w c)-> q1] = p[q4 -(a w c)-> q5] = val(A, w).

#include "pfa.hpp"

#include <string>
#include <vector>

namespace pfacap {

inline constexpr std::size_t kSkeletonStates = 8;
/// Target state count of a family member built from a 27-state automaton.
inline constexpr std::size_t kFamilyTargetStates = 62;

namespace skeleton {
inline constexpr StateIndex init = 0, q1 = 1, q2 = 2, q3 = 3, q4 = 4, q5 = 5, q6 = 6, sink = 7;
inline const std::vector<std::string>& names() {
    static const std::vector<std::string> n{"init", "q1", "q2", "q3", "q4", "q5", "q6", "sink"};
    return n;
}
}  // namespace skeleton

struct GadgetDxyParams {
    Rational x;
    Rational y;
};

struct FamilyParams {
    Rational lambda;
};

namespace gadget_detail {

inline void check_y(const Rational& y) {
    if (y.sign() < 0 || y > Rational{1, 2}) throw Error("y must lie in [0, 1/2], got " + to_string(y));
}

// Column of `init`: y * (image of q1) + y * (image of q4) + (1 - 2y) * sink.
inline void fill_init_column(StochMatrix& m, const Rational& y) {
    for (std::size_t r = 0; r < m.size(); ++r)
        m(r, skeleton::init) = y * m(r, skeleton::q1) + y * m(r, skeleton::q4);
    m(skeleton::sink, skeleton::init) += 1 - 2 * y;
}

inline void skeleton_b(StochMatrix& m) {
    using namespace skeleton;
    m(q3, q1) = 1;
    m(q1, q2) = 1;
    m(q3, q3) = 1;
    m(q6, q4) = 1;
    m(q4, q5) = 1;
    m(q6, q6) = 1;
    m(sink, sink) = 1;
}

inline std::string fresh_name(const std::vector<std::string>& taken, std::string name) {
    while (std::find(taken.begin(), taken.end(), name) != taken.end()) name += "'";
    return name;
}

}  // namespace gadget_detail

/// D(x, y): value 2y when x > 1/2, at most y otherwise.
inline Pfa build_D_xy(const GadgetDxyParams& params) {
    using namespace skeleton;
    const auto& [x, y] = params;
    if (x.sign() < 0 || x > 1) throw Error("x must lie in [0, 1], got " + to_string(x));
    gadget_detail::check_y(y);

    Pfa p;
    p.states = names();
    p.alphabet = {"a", "b"};
    p.initial = point_mass(kSkeletonStates, init);
    p.accepting = {q3, q5};

    StochMatrix a{kSkeletonStates};
    a(q1, q1) = x;
    a(q2, q1) = 1 - x;
    a(q2, q2) = 1;
    a(q3, q3) = 1;
    a(q4, q4) = 1 - x;
    a(q5, q4) = x;
    a(q5, q5) = 1;
    a(q6, q6) = 1;
    a(sink, sink) = 1;
    gadget_detail::fill_init_column(a, y);

    StochMatrix b{kSkeletonStates};
    gadget_detail::skeleton_b(b);
    gadget_detail::fill_init_column(b, y);

    p.matrices = {std::move(a), std::move(b)};
    return p;
}

/// D(A, y) over the alphabet {a, b, c}; A must use symbols from {a, b}.
/// Has 2|Q_A| + 8 states.
inline Pfa build_D_Ay(const Pfa& inner, const Rational& y) {
    using namespace skeleton;
    require_valid(inner);
    gadget_detail::check_y(y);
    for (const auto& sym : inner.alphabet)
        if (sym != "a" && sym != "b")
            throw Error("embedded automaton must use symbols from {a, b}; found '" + sym + "'");

    const std::size_t k = inner.num_states();
    const std::size_t n = kSkeletonStates + 2 * k;
    auto upper = [&](StateIndex s) { return kSkeletonStates + s; };
    auto lower = [&](StateIndex s) { return kSkeletonStates + k + s; };

    Pfa p;
    p.states = names();
    for (const auto& s : inner.states) p.states.push_back("u." + s);
    for (const auto& s : inner.states) p.states.push_back("l." + s);
    p.alphabet = {"a", "b", "c"};
    p.initial = point_mass(n, init);
    p.accepting = {q3, q5};

    auto copy_block = [&](StochMatrix& m, const std::string& sym) {
        auto idx = inner.find_symbol(sym);
        for (StateIndex src = 0; src < k; ++src)
            for (StateIndex dst = 0; dst < k; ++dst) {
                Rational v = idx ? inner.matrices[*idx](dst, src) : Rational{dst == src ? 1 : 0};
                m(upper(dst), upper(src)) = v;
                m(lower(dst), lower(src)) = v;
            }
    };

    StochMatrix a{n};
    for (StateIndex s : {q2, q3, q5, q6, sink}) a(s, s) = 1;
    for (StateIndex s = 0; s < k; ++s) {
        a(upper(s), q1) = inner.initial[s];
        a(lower(s), q4) = inner.initial[s];
    }
    copy_block(a, "a");
    gadget_detail::fill_init_column(a, y);

    StochMatrix b{n};
    gadget_detail::skeleton_b(b);
    copy_block(b, "b");
    gadget_detail::fill_init_column(b, y);

    StochMatrix c{n};
    for (StateIndex s : {q1, q2, q3, q4, q5, q6, sink}) c(s, s) = 1;
    for (StateIndex s = 0; s < k; ++s) {
        bool acc = inner.is_accepting(s);
        c(acc ? q1 : q2, upper(s)) = 1;
        c(acc ? q5 : q4, lower(s)) = 1;
    }
    gadget_detail::fill_init_column(c, y);

    p.matrices = {std::move(a), std::move(b), std::move(c)};
    return p;
}

namespace gadget_detail {

inline Pfa amplifier(const Pfa& inner, const Rational& p, bool sink_accepting) {
    require_valid(inner);
    if (p.sign() <= 0 || p >= 1) throw Error("p must lie in (0, 1), got " + to_string(p));
    const std::size_t k = inner.num_states();
    const StateIndex init = k, sink = k + 1;

    Pfa out;
    out.states = inner.states;
    out.states.push_back(fresh_name(inner.states, "init"));
    out.states.push_back(fresh_name(out.states, "sink"));
    out.alphabet = inner.alphabet;
    out.initial = point_mass(k + 2, init);
    out.accepting = inner.accepting;
    if (sink_accepting) out.accepting.push_back(sink);

    for (const auto& m : inner.matrices) {
        StochMatrix y{k + 2};
        for (std::size_t r = 0; r < k; ++r)
            for (std::size_t c = 0; c < k; ++c) y(r, c) = m(r, c);
        ProbVector image = m.apply(inner.initial);
        for (std::size_t r = 0; r < k; ++r) y(r, init) = p * image[r];
        y(sink, init) = 1 - p;
        y(sink, sink) = 1;
        out.matrices.push_back(std::move(y));
    }
    return out;
}

}  // namespace gadget_detail

/// For every non-empty word w: val(B_p, w) = p * val(A, w).
inline Pfa build_B_p(const Pfa& inner, const Rational& p) { return gadget_detail::amplifier(inner, p, false); }

/// For every non-empty word w: val(C_p, w) = p * val(A, w) + 1 - p.
inline Pfa build_C_p(const Pfa& inner, const Rational& p) { return gadget_detail::amplifier(inner, p, true); }

/// Freeze/reset lift of D(A, lambda/2). Alphabet {a, b, c, id, rt}.
inline Pfa build_family_member(const Pfa& inner, const FamilyParams& params) {
    if (params.lambda.sign() <= 0 || params.lambda > 1)
        throw Error("lambda must lie in (0, 1], got " + to_string(params.lambda));
    return gamma(build_D_Ay(inner, params.lambda / 2));
}

}  // namespace pfacap
