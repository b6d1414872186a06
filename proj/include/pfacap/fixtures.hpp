#pragma once

// Small named automata used by the tools and tests. The same automata ship
// as text files under fixtures/.

#include "gadgets.hpp"

#include <functional>
#include <map>
#include <optional>

namespace pfacap::fixtures {

/// Three states, alphabet {a, b}, start q1, accepting q3; value("baa") = 1/4.
inline Pfa example1() {
    Pfa p;
    p.states = {"q1", "q2", "q3"};
    p.alphabet = {"a", "b"};
    p.initial = {Rational{1}, Rational{0}, Rational{0}};
    p.accepting = {2};
    StochMatrix a{3}, b{3};
    a(0, 0) = Rational{1, 2}, a(0, 1) = 1;
    a(1, 0) = Rational{1, 2}, a(1, 2) = Rational{1, 2};
    a(2, 2) = Rational{1, 2};
    b(1, 1) = 1, b(1, 2) = Rational{1, 2};
    b(2, 0) = 1, b(2, 2) = Rational{1, 2};
    p.matrices = {a, b};
    return p;
}

/// Three states with a spread initial law and two accepting states, so
/// every word has a different value.
inline Pfa amplify3() {
    Pfa p;
    p.states = {"r0", "r1", "r2"};
    p.alphabet = {"a", "b"};
    p.initial = {Rational{1, 2}, Rational{1, 3}, Rational{1, 6}};
    p.accepting = {1, 2};
    StochMatrix a{3}, b{3};
    a(0, 0) = Rational{1, 3}, a(1, 0) = Rational{2, 3};
    a(1, 1) = Rational{1, 4}, a(2, 1) = Rational{3, 4};
    a(0, 2) = Rational{1, 2}, a(2, 2) = Rational{1, 2};
    b(0, 0) = Rational{1, 5}, b(2, 0) = Rational{4, 5};
    b(0, 1) = 1;
    b(1, 2) = Rational{2, 7}, b(2, 2) = Rational{5, 7};
    p.matrices = {a, b};
    return p;
}

/// Single state over {a, b}, accepting or not.
inline Pfa constant(bool accepting) {
    Pfa p;
    p.states = {"s"};
    p.alphabet = {"a", "b"};
    p.initial = {Rational{1}};
    if (accepting) p.accepting = {0};
    p.matrices = {StochMatrix::identity(1), StochMatrix::identity(1)};
    return p;
}

/// 27 states over {a, b}: on a, s_i moves to s_{i+1} or s_{2i} (mod 27)
/// with probability 1/2 each; on b it moves to s_{3i+1} with probability
/// 1/3 and stays otherwise. Start s0; accepting are multiples of 3.
inline Pfa inner27() {
    constexpr std::size_t n = 27;
    Pfa p;
    for (std::size_t i = 0; i < n; ++i) p.states.push_back("s" + std::to_string(i));
    p.alphabet = {"a", "b"};
    p.initial = point_mass(n, 0);
    for (std::size_t i = 0; i < n; i += 3) p.accepting.push_back(i);
    StochMatrix a{n}, b{n};
    for (std::size_t i = 0; i < n; ++i) {
        a((i + 1) % n, i) += Rational{1, 2};
        a((2 * i) % n, i) += Rational{1, 2};
        b((3 * i + 1) % n, i) += Rational{1, 3};
        b(i, i) += Rational{2, 3};
    }
    p.matrices = {a, b};
    return p;
}

/// Toy automaton for the stability demo: on a, q1 splits evenly to q2 and
/// q3, q2 moves to q3, q3 is absorbing and accepting.
inline Pfa toy3() {
    Pfa p;
    p.states = {"q1", "q2", "q3"};
    p.alphabet = {"a"};
    p.initial = point_mass(3, 0);
    p.accepting = {2};
    StochMatrix a{3};
    a(1, 0) = Rational{1, 2}, a(2, 0) = Rational{1, 2};
    a(2, 1) = 1;
    a(2, 2) = 1;
    p.matrices = {a};
    return p;
}

inline const std::map<std::string, std::function<Pfa()>>& registry() {
    static const std::map<std::string, std::function<Pfa()>> r{
        {"example1", example1},
        {"amplify3", amplify3},
        {"always", [] { return constant(true); }},
        {"never", [] { return constant(false); }},
        {"inner27", inner27},
        {"toy3", toy3},
        {"d34", [] { return build_D_xy({Rational{3, 4}, Rational{1, 2}}); }},
        {"d25", [] { return build_D_xy({Rational{2, 5}, Rational{1, 2}}); }},
        {"family27", [] { return build_family_member(inner27(), {Rational{1}}); }},
    };
    return r;
}

inline std::optional<Pfa> find(const std::string& name) {
    const auto& r = registry();
    auto it = r.find(name);
    if (it == r.end()) return std::nullopt;
    return it->second();
}

}  // namespace pfacap::fixtures
