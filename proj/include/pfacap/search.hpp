#pragma once

// Finite-horizon oracles over the word tree: exact maximum of the acceptance
// probability and the emptiness semi-procedure.

#include "parallel.hpp"
#include "pfa.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace pfacap {

struct SearchOptions {
    std::uint64_t max_words = std::uint64_t{1} << 24;
    unsigned threads = default_threads();
};

struct ScoredWord {
    std::vector<SymbolIndex> symbols;
    Rational value;
};

struct BruteForceResult {
    Word best_word;
    Rational best_value;
    /// best_by_length[L] is the best word of length exactly L.
    std::vector<ScoredWord> best_by_length;
    std::uint64_t words_examined = 0;
};

namespace detail {

// Higher value first, then shorter, then lexicographic in alphabet order.
inline bool better(const ScoredWord& a, const ScoredWord& b) {
    if (a.value != b.value) return a.value > b.value;
    if (a.symbols.size() != b.symbols.size()) return a.symbols.size() < b.symbols.size();
    return a.symbols < b.symbols;
}

inline std::uint64_t tree_size(std::size_t branching, std::size_t max_len, std::uint64_t cap) {
    std::uint64_t total = 1, level = 1;
    for (std::size_t l = 1; l <= max_len; ++l) {
        if (branching != 0 && level > cap / branching) return cap + 1;
        level *= branching;
        total += level;
        if (total > cap) return cap + 1;
    }
    return total;
}

struct SubtreeBest {
    std::vector<std::optional<ScoredWord>> by_length;
};

inline void dfs(const Pfa& p, const std::vector<bool>& mask, std::vector<SymbolIndex>& prefix, const ProbVector& x,
                std::size_t max_len, SubtreeBest& acc) {
    Rational v{0};
    for (std::size_t s = 0; s < x.size(); ++s)
        if (mask[s]) v += x[s];
    auto& slot = acc.by_length[prefix.size()];
    if (!slot || better(ScoredWord{prefix, v}, *slot)) slot = ScoredWord{prefix, v};
    if (prefix.size() == max_len) return;
    for (SymbolIndex sym = 0; sym < p.num_symbols(); ++sym) {
        prefix.push_back(sym);
        dfs(p, mask, prefix, p.matrices[sym].apply(x), max_len, acc);
        prefix.pop_back();
    }
}

}  // namespace detail

/// Exact maximum of the acceptance probability over all words of length at
/// most `max_len`.
inline BruteForceResult brute_force_value(const Pfa& p, std::size_t max_len, const SearchOptions& opt = {}) {
    require_valid(p);
    const std::uint64_t total = detail::tree_size(p.num_symbols(), max_len, opt.max_words);
    if (total > opt.max_words)
        throw Error("brute-force budget exceeded: more than " + std::to_string(opt.max_words) + " words");

    const auto mask = p.accepting_mask();
    std::vector<detail::SubtreeBest> parts(std::max<std::size_t>(p.num_symbols(), 1));
    for (auto& part : parts) part.by_length.resize(max_len + 1);

    detail::SubtreeBest root;
    root.by_length.resize(max_len + 1);
    root.by_length[0] = ScoredWord{{}, accepting_mass(p, p.initial)};

    if (max_len > 0 && p.num_symbols() > 0) {
        parallel_for(p.num_symbols(), opt.threads, [&](std::size_t sym) {
            std::vector<SymbolIndex> prefix{sym};
            detail::dfs(p, mask, prefix, p.matrices[sym].apply(p.initial), max_len, parts[sym]);
        });
    }

    for (const auto& part : parts)
        for (std::size_t l = 0; l <= max_len; ++l) {
            const auto& cand = part.by_length[l];
            if (cand && (!root.by_length[l] || detail::better(*cand, *root.by_length[l]))) root.by_length[l] = cand;
        }

    BruteForceResult result;
    result.words_examined = total;
    const ScoredWord* best = nullptr;
    for (auto& slot : root.by_length) {
        if (!slot) continue;
        result.best_by_length.push_back(*slot);
        if (best == nullptr || detail::better(*slot, *best)) best = &*slot;
    }
    result.best_word = p.decode(best->symbols);
    result.best_value = best->value;
    return result;
}

namespace detail {

inline bool first_above(const Pfa& p, const std::vector<bool>& mask, std::vector<SymbolIndex>& prefix,
                        const ProbVector& x, std::size_t target_len, const Rational& threshold) {
    if (prefix.size() == target_len) {
        Rational v{0};
        for (std::size_t s = 0; s < x.size(); ++s)
            if (mask[s]) v += x[s];
        return v > threshold;
    }
    for (SymbolIndex sym = 0; sym < p.num_symbols(); ++sym) {
        prefix.push_back(sym);
        if (first_above(p, mask, prefix, p.matrices[sym].apply(x), target_len, threshold)) return true;
        prefix.pop_back();
    }
    return false;
}

}  // namespace detail

/// First word (shortest, then lexicographic) whose value exceeds
/// `threshold`, searching lengths up to `max_len`. An empty result does not
/// certify that no such word exists.
inline std::optional<Word> emptiness_semidecide(const Pfa& p, const Rational& threshold, std::size_t max_len,
                                                const SearchOptions& opt = {}) {
    require_valid(p);
    if (threshold.sign() < 0 || threshold >= 1) throw Error("threshold must lie in [0, 1)");
    if (detail::tree_size(p.num_symbols(), max_len, opt.max_words) > opt.max_words)
        throw Error("emptiness search budget exceeded: more than " + std::to_string(opt.max_words) + " words");
    const auto mask = p.accepting_mask();
    for (std::size_t len = 0; len <= max_len; ++len) {
        std::vector<SymbolIndex> prefix;
        if (detail::first_above(p, mask, prefix, p.initial, len, threshold)) return p.decode(prefix);
    }
    return std::nullopt;
}

}  // namespace pfacap
