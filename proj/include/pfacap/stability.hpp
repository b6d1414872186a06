#pragma once

// Information stability at desk scale. The staged source repeats block
// input X^t (uniform data on a block of n_t uses) m_t times per stage, with
//   m_t = max( ceil( 2^t/(n_t delta) * ( sum_{i<t} m_i n_i delta (2^-i - 2^-(t-1))
//                                        + n_{t+1} (val - delta 2^-(t-1)) ) ),
//              n_{t+1}^2 ).
// The demo samples the information density of the first t <= 2 stages and
// compares its tail with the Hoeffding estimate
//   2 exp( -2 (n C_n delta (eta - 1/(val 2^(t-1))))^2 / n^(3/2) ).
// C_n is taken as the exact rate of the staged source itself, which is at
// most the true n-use maximum; the tail normalized by n val is reported too.

#include "block.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

namespace pfacap {

struct StabilityStage {
    std::size_t t = 0;
    std::size_t n = 0;           // n_t
    std::uint64_t m_formula = 0;  // ceiling term, clamped at 0
    std::uint64_t m = 0;         // max(m_formula, n_{t+1}^2)
};

struct StabilitySchedule {
    double val = 0.0;
    double delta = 0.0;
    std::vector<StabilityStage> stages;  // t = 1 .. |n_list| - 1
};

inline constexpr double kMaxStageCopies = 9007199254740992.0;  // 2^53

inline StabilitySchedule stability_schedule(double val, double delta, const std::vector<std::size_t>& n_list) {
    if (!(val >= 0.0 && val <= 1.0)) throw Error("val must lie in [0, 1]");
    if (!(delta > 0.0)) throw Error("delta must be positive");
    if (n_list.size() < 2) throw Error("need at least two block lengths (n_t and n_{t+1})");
    for (std::size_t i = 0; i < n_list.size(); ++i) {
        if (n_list[i] == 0) throw Error("block lengths must be positive");
        if (i > 0 && n_list[i] < n_list[i - 1]) throw Error("block lengths must be nondecreasing");
    }
    StabilitySchedule s{val, delta, {}};
    for (std::size_t t = 1; t < n_list.size(); ++t) {
        const double scale = std::ldexp(1.0, -static_cast<int>(t - 1));
        double prefix = 0.0;
        for (std::size_t i = 1; i < t; ++i) {
            const auto& st = s.stages[i - 1];
            prefix += static_cast<double>(st.m) * static_cast<double>(st.n) * delta *
                      (std::ldexp(1.0, -static_cast<int>(i)) - scale);
        }
        const double nt = static_cast<double>(n_list[t - 1]);
        const double next = static_cast<double>(n_list[t]);
        const double raw =
            std::ceil(std::ldexp(1.0, static_cast<int>(t)) / (nt * delta) * (prefix + next * (val - delta * scale)));
        if (!(raw < kMaxStageCopies) || next * next >= kMaxStageCopies)
            throw Error("stage " + std::to_string(t) + " copy count exceeds 2^53");
        StabilityStage st;
        st.t = t;
        st.n = n_list[t - 1];
        st.m_formula = raw > 0.0 ? static_cast<std::uint64_t>(raw) : 0;
        st.m = std::max<std::uint64_t>(st.m_formula, static_cast<std::uint64_t>(n_list[t]) * n_list[t]);
        s.stages.push_back(st);
    }
    return s;
}

struct ConcentrationRow {
    double eta = 0.0;
    double empirical = 0.0;      // P(|i/(n C_n) - 1| >= eta delta)
    double empirical_val = 0.0;  // same with n val
    double analytic = 0.0;       // Hoeffding estimate, capped at 1
    double slack = 0.0;          // 3 sigma binomial
    bool within = false;         // empirical <= analytic + slack
};

struct ConcentrationReport {
    std::size_t stages = 0;
    std::uint64_t uses = 0;    // n
    std::uint64_t blocks = 0;  // independent terms per sample
    double c_n = 0.0;
    double val = 0.0;
    double delta = 0.0;
    double mean_density = 0.0;  // empirical mean of i / n
    std::size_t samples = 0;
    std::uint64_t seed = 0;
    std::vector<ConcentrationRow> rows;
};

namespace stability_detail {

// Draws log2 P(E = e) for the block's noise; outcomes of the prefix table
// are interleaved as (clean, noisy) per prefix pattern.
class DensitySampler {
public:
    explicit DensitySampler(const BlockChannel& b) : n_{b.free_slots()}, len_{static_cast<double>(b.length())} {
        const auto& clean = b.prefix_clean();
        const auto& noisy = b.prefix_noisy();
        const double tiny = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(n_, 1000)));
        tiny_ = tiny;
        double acc = 0.0;
        for (std::size_t e = 0; e < clean.size(); ++e) {
            const double a = to_double(clean[e]), r = to_double(noisy[e]);
            const double zero_free = a + r * tiny;
            for (int cls = 0; cls < 2; ++cls) {
                acc += cls == 0 ? a : r;
                cdf_.push_back(acc);
                log_zero_.push_back(zero_free > 0.0 ? std::log2(zero_free) : 0.0);
                log_noisy_.push_back(r > 0.0 ? std::log2(r) - static_cast<double>(n_) : 0.0);
            }
        }
        if (!cdf_.empty()) cdf_.back() = 1.0;
    }

    double density(Rng& rng) const {
        const std::size_t k = rng.pick(cdf_);
        const bool noisy = (k & 1U) != 0;
        const bool free_zero = !noisy || rng.uniform() < tiny_;
        return len_ + (free_zero ? log_zero_[k] : log_noisy_[k]);
    }

private:
    std::size_t n_;
    double len_;
    double tiny_ = 0.0;
    std::vector<double> cdf_, log_zero_, log_noisy_;
};

}  // namespace stability_detail

inline ConcentrationReport spectrum_concentration_demo(const Fsmc& ch, const Word& w, const StabilitySchedule& sched,
                                                       std::size_t stages, std::size_t samples, std::uint64_t seed,
                                                       const std::vector<double>& etas,
                                                       std::uint64_t draw_budget = std::uint64_t{1} << 32) {
    if (stages < 1 || stages > 2) throw Error("demo covers t = 1 or t = 2 only");
    if (stages > sched.stages.size()) throw Error("schedule has fewer stages than requested");
    if (samples == 0) throw Error("need at least one sample");

    ConcentrationReport rep;
    rep.stages = stages;
    rep.val = sched.val;
    rep.delta = sched.delta;
    rep.samples = samples;
    rep.seed = seed;

    std::vector<stability_detail::DensitySampler> samplers;
    double info = 0.0;
    for (std::size_t t = 0; t < stages; ++t) {
        const auto& st = sched.stages[t];
        if (st.n <= w.size()) throw Error("block length n_" + std::to_string(t + 1) + " must exceed the word length");
        ControlSchedule cs;
        cs.word = w;
        cs.free = st.n - w.size();
        const auto block = induced_block_channel(ch, cs);
        samplers.emplace_back(block);
        info += static_cast<double>(st.m) * achievable_rate(block).mutual_information;
        rep.uses += st.m * st.n;
        rep.blocks += st.m;
    }
    if (static_cast<double>(rep.blocks) * static_cast<double>(samples) > static_cast<double>(draw_budget))
        throw Error("stage budget exceeded: " + std::to_string(rep.blocks) + " blocks per sample");
    const double n = static_cast<double>(rep.uses);
    rep.c_n = info / n;

    Rng rng{seed};
    std::vector<double> density(samples);
    double mean = 0.0;
    for (auto& d : density) {
        double total = 0.0;
        for (std::size_t t = 0; t < stages; ++t)
            for (std::uint64_t j = 0; j < sched.stages[t].m; ++j) total += samplers[t].density(rng);
        d = total;
        mean += total / n;
    }
    rep.mean_density = mean / static_cast<double>(samples);

    const double t_last = static_cast<double>(stages);
    for (double eta : etas) {
        ConcentrationRow row;
        row.eta = eta;
        const double thr = eta * sched.delta;
        std::size_t hit_cn = 0, hit_val = 0;
        for (double d : density) {
            if (rep.c_n > 0.0 && std::abs(d / (n * rep.c_n) - 1.0) >= thr) ++hit_cn;
            if (rep.val > 0.0 && std::abs(d / (n * rep.val) - 1.0) >= thr) ++hit_val;
        }
        row.empirical = static_cast<double>(hit_cn) / static_cast<double>(samples);
        row.empirical_val = static_cast<double>(hit_val) / static_cast<double>(samples);
        const double margin = rep.val > 0.0 ? eta - 1.0 / (rep.val * std::exp2(t_last - 1.0)) : -1.0;
        if (margin <= 0.0) {
            row.analytic = 1.0;  // vacuous
        } else {
            const double dev = n * rep.c_n * sched.delta * margin;
            row.analytic = std::min(1.0, 2.0 * std::exp(-2.0 * dev * dev / std::pow(n, 1.5)));
        }
        row.slack = 3.0 * std::sqrt(row.analytic * (1.0 - row.analytic) / static_cast<double>(samples));
        row.within = row.empirical <= row.analytic + row.slack;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace pfacap
