#pragma once

// Finite-state machine channels in product form p(y|x,s') p(s|x,s'), the
// lift V_A of an automaton, exact output/state laws for a fixed input
// sequence, and a seeded sampler.

#include "pfa.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace pfacap {

struct Fsmc {
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<std::string> states;
    /// output_law[x][s'][y] = p(y | x, s')
    std::vector<std::vector<std::vector<Rational>>> output_law;
    /// state_law[x](s, s') = p(s | x, s'), column-stochastic like a PFA matrix
    std::vector<StochMatrix> state_law;
    StateIndex initial = 0;
    /// Non-empty for channels built by build_V: input (d, c) has index
    /// 2 * c + d, c indexing this list.
    std::vector<std::string> controls;

    std::size_t num_inputs() const noexcept { return inputs.size(); }
    std::size_t num_outputs() const noexcept { return outputs.size(); }
    std::size_t num_states() const noexcept { return states.size(); }

    std::size_t input_index(std::string_view name) const {
        auto it = std::find(inputs.begin(), inputs.end(), name);
        if (it == inputs.end()) throw Error("unknown channel input '" + std::string{name} + "'");
        return static_cast<std::size_t>(it - inputs.begin());
    }

    /// Index of the input whose data bit is `data` and control is `control`.
    std::size_t v_input(unsigned data, std::string_view control) const {
        auto it = std::find(controls.begin(), controls.end(), control);
        if (it == controls.end()) throw Error("unknown control symbol '" + std::string{control} + "'");
        return 2 * static_cast<std::size_t>(it - controls.begin()) + (data & 1U);
    }
};

inline std::vector<Violation> validate_fsmc(const Fsmc& ch) {
    std::vector<Violation> out;
    const std::size_t nx = ch.num_inputs(), ns = ch.num_states(), ny = ch.num_outputs();
    if (ns == 0) out.push_back({"states", "no states declared"});
    if (ny == 0) out.push_back({"outputs", "no outputs declared"});
    if (ch.output_law.size() != nx) out.push_back({"output", "law count does not match input count"});
    if (ch.state_law.size() != nx) out.push_back({"transition", "law count does not match input count"});
    if (ch.initial >= ns) out.push_back({"initial", "initial state out of range"});
    for (std::size_t x = 0; x < std::min(nx, ch.output_law.size()); ++x) {
        const auto& law = ch.output_law[x];
        const std::string loc = "output " + ch.inputs[x];
        if (law.size() != ns) {
            out.push_back({loc, "expected one row per state"});
            continue;
        }
        for (std::size_t s = 0; s < ns; ++s) {
            if (law[s].size() != ny) {
                out.push_back({loc, "row " + std::to_string(s) + " has wrong length"});
                continue;
            }
            check_distribution(law[s], loc, "row " + std::to_string(s), out);
        }
    }
    for (std::size_t x = 0; x < std::min(nx, ch.state_law.size()); ++x) {
        const auto& m = ch.state_law[x];
        const std::string loc = "transition " + ch.inputs[x];
        if (m.size() != ns) {
            out.push_back({loc, "wrong size"});
            continue;
        }
        for (std::size_t c = 0; c < ns; ++c) check_distribution(m.column(c), loc, "column " + std::to_string(c), out);
    }
    return out;
}

/// V_A: inputs {0,1} x W, binary output. The data bit passes unchanged
/// when the automaton's previous state is accepting and is replaced by a
/// fair coin otherwise; the control symbol drives the automaton.
inline Fsmc build_V(const Pfa& a) {
    require_valid(a);
    std::optional<StateIndex> start;
    for (StateIndex s = 0; s < a.num_states(); ++s) {
        if (a.initial[s] == 1) start = s;
    }
    if (!start) throw Error("build_V needs a deterministic initial distribution");

    Fsmc ch;
    ch.states = a.states;
    ch.outputs = {"0", "1"};
    ch.controls = a.alphabet;
    ch.initial = *start;
    const auto mask = a.accepting_mask();
    for (std::size_t c = 0; c < a.num_symbols(); ++c) {
        for (unsigned d = 0; d < 2; ++d) {
            ch.inputs.push_back(std::to_string(d) + ":" + a.alphabet[c]);
            std::vector<std::vector<Rational>> law(a.num_states());
            for (StateIndex s = 0; s < a.num_states(); ++s) {
                if (mask[s]) {
                    law[s] = {Rational{d == 0 ? 1 : 0}, Rational{d == 1 ? 1 : 0}};
                } else {
                    law[s] = {Rational{1, 2}, Rational{1, 2}};
                }
            }
            ch.output_law.push_back(std::move(law));
            ch.state_law.push_back(a.matrices[c]);
        }
    }
    return ch;
}

/// Exact joint law of (y^n, s_n) given the input sequence.
struct SequenceDist {
    std::vector<std::size_t> input;
    std::size_t num_outputs = 0;
    std::size_t num_states = 0;
    /// table[yidx * num_states + s]; yidx encodes y_1 .. y_n base
    /// num_outputs with y_1 most significant.
    std::vector<Rational> table;

    std::size_t length() const noexcept { return input.size(); }
    std::size_t num_sequences() const noexcept { return num_states == 0 ? 0 : table.size() / num_states; }

    const Rational& at(std::size_t yidx, StateIndex s) const { return table[yidx * num_states + s]; }

    /// W^n(y^n | x^n)
    std::vector<Rational> output_marginal() const {
        std::vector<Rational> out(num_sequences());
        for (std::size_t y = 0; y < out.size(); ++y)
            for (std::size_t s = 0; s < num_states; ++s) out[y] += at(y, s);
        return out;
    }

    /// W^n(s_n | x^n)
    std::vector<Rational> state_marginal() const {
        std::vector<Rational> out(num_states);
        for (std::size_t y = 0; y < num_sequences(); ++y)
            for (std::size_t s = 0; s < num_states; ++s) out[s] += at(y, s);
        return out;
    }

    Rational total() const { return sum(table); }
};

inline constexpr std::uint64_t kDefaultTableBudget = std::uint64_t{1} << 22;

inline SequenceDist joint_seq_dist(const Fsmc& ch, const std::vector<std::size_t>& input,
                                   std::uint64_t budget = kDefaultTableBudget) {
    const std::size_t ny = ch.num_outputs(), ns = ch.num_states();
    std::uint64_t size = ns;
    for (std::size_t i = 0; i < input.size(); ++i) {
        size *= ny;
        if (size > budget) throw Error("sequence table exceeds budget of " + std::to_string(budget) + " entries");
    }
    for (auto x : input)
        if (x >= ch.num_inputs()) throw Error("channel input index out of range");

    SequenceDist dist;
    dist.input = input;
    dist.num_outputs = ny;
    dist.num_states = ns;
    dist.table.assign(ns, Rational{0});
    dist.table[ch.initial] = 1;

    for (auto x : input) {
        const auto& out_law = ch.output_law[x];
        const auto& trans = ch.state_law[x];
        const std::size_t prev_sequences = dist.table.size() / ns;
        std::vector<Rational> next(prev_sequences * ny * ns);
        for (std::size_t yp = 0; yp < prev_sequences; ++yp) {
            for (StateIndex sp = 0; sp < ns; ++sp) {
                const Rational& w = dist.table[yp * ns + sp];
                if (is_zero(w)) continue;
                for (std::size_t y = 0; y < ny; ++y) {
                    const Rational& py = out_law[sp][y];
                    if (is_zero(py)) continue;
                    const Rational wy = w * py;
                    Rational* row = &next[(yp * ny + y) * ns];
                    for (StateIndex s = 0; s < ns; ++s) {
                        const Rational& ps = trans(s, sp);
                        if (!is_zero(ps)) row[s] += wy * ps;
                    }
                }
            }
        }
        dist.table = std::move(next);
    }
    return dist;
}

/// Pinned generator: std::mt19937_64 (fully specified by the standard) with
/// uniforms formed from the top 53 bits, so runs are reproducible
/// bit-for-bit across platforms.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_{seed} {}

    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    std::uint64_t bits() { return engine_(); }

    /// Index drawn from cumulative weights (last entry ~ 1).
    std::size_t pick(const std::vector<double>& cumulative) {
        const double u = uniform();
        for (std::size_t i = 0; i + 1 < cumulative.size(); ++i)
            if (u < cumulative[i]) return i;
        return cumulative.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

/// Floating-point tables for repeated trajectory sampling.
class ChannelSampler {
public:
    explicit ChannelSampler(const Fsmc& ch) : ns_{ch.num_states()}, initial_{ch.initial} {
        out_cdf_.resize(ch.num_inputs());
        state_cdf_.resize(ch.num_inputs());
        for (std::size_t x = 0; x < ch.num_inputs(); ++x) {
            for (StateIndex s = 0; s < ns_; ++s) {
                out_cdf_[x].push_back(cumulative(ch.output_law[x][s]));
                state_cdf_[x].push_back(cumulative(ch.state_law[x].column(s)));
            }
        }
    }

    /// Output sequence for `input`, starting from the initial state.
    std::vector<std::size_t> run(const std::vector<std::size_t>& input, Rng& rng) const {
        std::vector<std::size_t> out;
        out.reserve(input.size());
        StateIndex s = initial_;
        for (auto x : input) {
            out.push_back(rng.pick(out_cdf_[x][s]));
            s = rng.pick(state_cdf_[x][s]);
        }
        return out;
    }

private:
    static std::vector<double> cumulative(const std::vector<Rational>& p) {
        std::vector<double> c;
        Rational acc{0};
        for (const auto& v : p) {
            acc += v;
            c.push_back(to_double(acc));
        }
        return c;
    }

    std::size_t ns_;
    StateIndex initial_;
    std::vector<std::vector<std::vector<double>>> out_cdf_;
    std::vector<std::vector<std::vector<double>>> state_cdf_;
};

/// One sampled output trajectory; identical (channel, input, seed) give
/// identical outputs.
inline std::vector<std::size_t> sample(const Fsmc& ch, const std::vector<std::size_t>& input, std::uint64_t seed) {
    Rng rng{seed};
    return ChannelSampler{ch}.run(input, rng);
}

}  // namespace pfacap
