#pragma once

#include <pfacap/pfacap.hpp>

#include <functional>
#include <string>
#include <vector>

namespace testutil {

using namespace pfacap;

/// Calls fn on every word over `alphabet` of length <= max_len (shortlex).
inline void for_each_word(const std::vector<std::string>& alphabet, std::size_t max_len,
                          const std::function<void(const Word&)>& fn) {
    Word w;
    std::function<void(std::size_t)> rec = [&](std::size_t depth) {
        fn(w);
        if (depth == max_len) return;
        for (const auto& s : alphabet) {
            w.push_back(s);
            rec(depth + 1);
            w.pop_back();
        }
    };
    rec(0);
}

/// Independent oracle: forms the full product matrix with plain triple
/// loops over a row-major table, then contracts with v and the accepting
/// indicator. Shares nothing with the engine except the input data.
inline Rational naive_value(const Pfa& p, const Word& w) {
    const std::size_t n = p.states.size();
    std::vector<std::vector<Rational>> prod(n, std::vector<Rational>(n));
    for (std::size_t i = 0; i < n; ++i) prod[i][i] = 1;
    for (const auto& sym : w) {
        std::size_t k = 0;
        while (p.alphabet[k] != sym) ++k;
        std::vector<std::vector<Rational>> next(n, std::vector<Rational>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                Rational acc{0};
                for (std::size_t l = 0; l < n; ++l) acc += p.matrices[k](i, l) * prod[l][j];
                next[i][j] = acc;
            }
        prod = std::move(next);
    }
    Rational total{0};
    for (auto f : p.accepting)
        for (std::size_t j = 0; j < n; ++j) total += prod[f][j] * p.initial[j];
    return total;
}

inline Word w(std::initializer_list<const char*> syms) {
    Word out;
    for (auto s : syms) out.emplace_back(s);
    return out;
}

}  // namespace testutil
