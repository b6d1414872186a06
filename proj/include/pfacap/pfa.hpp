#pragma once

// Probabilistic finite automata over exact rationals.

#include "matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace pfacap {

/// Reserved symbols appended by the freeze/reset lift.
inline constexpr std::string_view kFreezeSymbol = "id";
inline constexpr std::string_view kResetSymbol = "rt";

using Word = std::vector<std::string>;
using SymbolIndex = std::size_t;
using StateIndex = std::size_t;

struct Pfa {
    std::vector<std::string> states;
    std::vector<std::string> alphabet;
    std::vector<StochMatrix> matrices;  // matrices[i] acts for alphabet[i]
    ProbVector initial;
    std::vector<StateIndex> accepting;

    std::size_t num_states() const noexcept { return states.size(); }
    std::size_t num_symbols() const noexcept { return alphabet.size(); }

    std::optional<SymbolIndex> find_symbol(std::string_view name) const {
        auto it = std::find(alphabet.begin(), alphabet.end(), name);
        if (it == alphabet.end()) return std::nullopt;
        return static_cast<SymbolIndex>(it - alphabet.begin());
    }

    SymbolIndex symbol_index(std::string_view name) const {
        if (auto i = find_symbol(name)) return *i;
        throw Error("unknown symbol '" + std::string{name} + "'");
    }

    StateIndex state_index(std::string_view name) const {
        auto it = std::find(states.begin(), states.end(), name);
        if (it == states.end()) throw Error("unknown state '" + std::string{name} + "'");
        return static_cast<StateIndex>(it - states.begin());
    }

    const StochMatrix& matrix(std::string_view symbol) const { return matrices[symbol_index(symbol)]; }

    bool is_accepting(StateIndex s) const {
        return std::find(accepting.begin(), accepting.end(), s) != accepting.end();
    }

    std::vector<bool> accepting_mask() const {
        std::vector<bool> mask(num_states(), false);
        for (auto s : accepting)
            if (s < mask.size()) mask[s] = true;
        return mask;
    }

    std::vector<SymbolIndex> encode(const Word& w) const {
        std::vector<SymbolIndex> out;
        out.reserve(w.size());
        for (const auto& sym : w) out.push_back(symbol_index(sym));
        return out;
    }

    Word decode(std::span<const SymbolIndex> w) const {
        Word out;
        out.reserve(w.size());
        for (auto i : w) out.push_back(alphabet.at(i));
        return out;
    }
};

struct Violation {
    std::string location;
    std::string detail;

    std::string str() const { return location + ": " + detail; }
};

inline void check_distribution(const ProbVector& v, const std::string& location, const std::string& what,
                               std::vector<Violation>& out) {
    Rational total{0};
    for (std::size_t r = 0; r < v.size(); ++r) {
        if (v[r].sign() < 0) out.push_back({location, what + " entry " + std::to_string(r) + " is negative"});
        total += v[r];
    }
    if (total != 1) out.push_back({location, what + " sums to " + to_string(total)});
}

/// Every invariant violation of `p`; an empty result means the automaton is
/// well formed.
inline std::vector<Violation> validate_pfa(const Pfa& p) {
    std::vector<Violation> out;
    const std::size_t n = p.num_states();
    if (n == 0) out.push_back({"states", "no states declared"});
    if (p.matrices.size() != p.alphabet.size())
        out.push_back({"matrices", std::to_string(p.matrices.size()) + " matrices for " +
                                       std::to_string(p.alphabet.size()) + " symbols"});
    for (std::size_t i = 0; i < p.alphabet.size(); ++i)
        for (std::size_t j = i + 1; j < p.alphabet.size(); ++j)
            if (p.alphabet[i] == p.alphabet[j]) out.push_back({"alphabet", "duplicate symbol '" + p.alphabet[i] + "'"});
    for (std::size_t i = 0; i < p.states.size(); ++i)
        for (std::size_t j = i + 1; j < p.states.size(); ++j)
            if (p.states[i] == p.states[j]) out.push_back({"states", "duplicate state '" + p.states[i] + "'"});

    for (std::size_t k = 0; k < p.matrices.size(); ++k) {
        const auto& m = p.matrices[k];
        const std::string loc = "matrix " + (k < p.alphabet.size() ? p.alphabet[k] : std::to_string(k));
        if (m.size() != n) {
            out.push_back({loc, "is " + std::to_string(m.size()) + "x" + std::to_string(m.size()) + ", expected " +
                                    std::to_string(n) + "x" + std::to_string(n)});
            continue;
        }
        for (std::size_t c = 0; c < n; ++c) check_distribution(m.column(c), loc, "column " + std::to_string(c), out);
    }

    if (p.initial.size() != n)
        out.push_back({"initial", "has " + std::to_string(p.initial.size()) + " entries, expected " + std::to_string(n)});
    else
        check_distribution(p.initial, "initial", "distribution", out);

    for (auto s : p.accepting)
        if (s >= n) out.push_back({"accepting", "unknown state id " + std::to_string(s)});
    return out;
}

inline void require_valid(const Pfa& p) {
    auto violations = validate_pfa(p);
    if (!violations.empty()) throw Error("invalid PFA: " + violations.front().str());
}

/// Pushes `x` through the symbols of `w` in reading order.
inline ProbVector evolve_from(const Pfa& p, ProbVector x, std::span<const SymbolIndex> w) {
    for (auto sym : w) x = p.matrices.at(sym).apply(x);
    return x;
}

inline ProbVector evolve(const Pfa& p, const Word& w) { return evolve_from(p, p.initial, p.encode(w)); }

inline Rational accepting_mass(const Pfa& p, const ProbVector& x) {
    Rational mass{0};
    for (auto s : p.accepting) mass += x.at(s);
    return mass;
}

/// Acceptance probability of `w`.
inline Rational value(const Pfa& p, const Word& w) { return accepting_mass(p, evolve(p, w)); }

inline Rational value(const Pfa& p, std::span<const SymbolIndex> w) {
    return accepting_mass(p, evolve_from(p, p.initial, w));
}

inline Rational reach_prob(const Pfa& p, StateIndex src, const Word& w, StateIndex dst) {
    if (src >= p.num_states() || dst >= p.num_states()) throw Error("state index out of range");
    return evolve_from(p, point_mass(p.num_states(), src), p.encode(w))[dst];
}

inline Rational reach_prob(const Pfa& p, std::string_view src, const Word& w, std::string_view dst) {
    return reach_prob(p, p.state_index(src), w, p.state_index(dst));
}

struct FreezeReset {
    std::optional<std::string> freeze;
    std::optional<std::string> reset;
};

inline FreezeReset detect_freeze_reset(const Pfa& p) {
    FreezeReset fr;
    for (std::size_t k = 0; k < p.num_symbols(); ++k) {
        const auto& m = p.matrices[k];
        if (!fr.freeze && m.is_identity()) fr.freeze = p.alphabet[k];
        if (!fr.reset && m.all_columns_equal(p.initial)) fr.reset = p.alphabet[k];
    }
    return fr;
}

/// Appends the freeze symbol (identity matrix) and the reset symbol (every
/// column equal to the initial distribution).
inline Pfa gamma(const Pfa& p) {
    require_valid(p);
    if (p.find_symbol(kFreezeSymbol) || p.find_symbol(kResetSymbol))
        throw Error("alphabet already contains a reserved symbol ('id' or 'rt')");
    Pfa out = p;
    out.alphabet.emplace_back(kFreezeSymbol);
    out.matrices.push_back(StochMatrix::identity(p.num_states()));
    out.alphabet.emplace_back(kResetSymbol);
    out.matrices.push_back(StochMatrix::constant_columns(p.initial));
    return out;
}

/// Drops freeze symbols and everything up to and including the last reset.
/// On a lifted automaton the result has the same acceptance probability.
inline Word reduce_extended_word(const Word& w) {
    auto last_reset = std::find(w.rbegin(), w.rend(), kResetSymbol);
    auto start = last_reset == w.rend() ? w.begin() : last_reset.base();
    Word out;
    for (auto it = start; it != w.end(); ++it)
        if (*it != kFreezeSymbol) out.push_back(*it);
    return out;
}

/// Splits a textual word into alphabet symbols. Whitespace separates tokens;
/// inside a token the longest matching symbol is taken greedily, so "baa",
/// "b a a" and "aidb" all work. "" and "eps" denote the empty word.
inline Word parse_word(const std::vector<std::string>& alphabet, std::string_view text) {
    Word out;
    std::size_t i = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == ',' || c == '\n'; };
    std::string trimmed{text};
    if (trimmed == "eps" || trimmed == "-") return out;
    while (i < text.size()) {
        if (is_space(text[i])) {
            ++i;
            continue;
        }
        std::size_t best = 0;
        const std::string* match = nullptr;
        for (const auto& sym : alphabet) {
            if (sym.size() > best && text.substr(i, sym.size()) == sym) {
                best = sym.size();
                match = &sym;
            }
        }
        if (match == nullptr)
            throw Error("cannot parse word '" + std::string{text} + "' at offset " + std::to_string(i));
        out.push_back(*match);
        i += best;
    }
    return out;
}

/// Symbols joined without separators when every symbol is a single
/// character, otherwise space separated. The empty word prints as "eps".
inline std::string format_word(const Word& w) {
    if (w.empty()) return "eps";
    bool single = std::all_of(w.begin(), w.end(), [](const std::string& s) { return s.size() == 1; });
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!single && i != 0) out.push_back(' ');
        out += w[i];
    }
    return out;
}

}  // namespace pfacap
