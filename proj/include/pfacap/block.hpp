#pragma once

// The block protocol on V_A: the control input repeats the period
//   w_1 ... w_m  id ... id  rt          (m + n slots, n >= 1)
// and turns the channel into a memoryless channel over blocks of m + n
// uses. Because V_A's output only depends on y XOR d and on the automaton
// state, the block channel is an additive noise channel over {0,1}^{m+n}:
// p(y|x) = P(E = x XOR y). Its noise law is carried in factored form:
// the exact joint law of the first m noise bits with the class of the state
// reached after w (transparent: output = data, noisy: fair coin). During
// the n remaining slots the state is frozen, so those bits are all zero or
// uniform according to that class. This keeps m + n unbounded while only
// 2^m table entries are stored.

#include "fsmc.hpp"
#include "info.hpp"

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace pfacap {

struct ControlSchedule {
    Word word;
    std::size_t free = 1;  // n: slots after the word, the last one resets
    std::string freeze{kFreezeSymbol};
    std::string reset{kResetSymbol};

    std::size_t period() const noexcept { return word.size() + free; }

    /// Control symbols for one period.
    Word controls() const {
        if (free == 0) throw Error("control schedule needs at least one free slot");
        Word c = word;
        for (std::size_t i = 1; i < free; ++i) c.push_back(freeze);
        c.push_back(reset);
        return c;
    }
};

inline std::vector<std::size_t> schedule_inputs(const Fsmc& ch, const Word& controls, unsigned data = 0) {
    std::vector<std::size_t> in;
    in.reserve(controls.size());
    for (const auto& c : controls) in.push_back(ch.v_input(data, c));
    return in;
}

class BlockChannel {
public:
    BlockChannel(std::size_t m, std::size_t n, std::vector<Rational> clean, std::vector<Rational> noisy)
        : m_{m}, n_{n}, clean_{std::move(clean)}, noisy_{std::move(noisy)} {
        clean_d_.reserve(clean_.size());
        noisy_d_.reserve(noisy_.size());
        for (const auto& v : clean_) clean_d_.push_back(to_double(v));
        for (const auto& v : noisy_) noisy_d_.push_back(to_double(v));
    }

    std::size_t word_length() const noexcept { return m_; }
    std::size_t free_slots() const noexcept { return n_; }
    std::size_t length() const noexcept { return m_ + n_; }

    /// P(e_A, state after w transparent), indexed by the m prefix noise bits.
    const std::vector<Rational>& prefix_clean() const noexcept { return clean_; }
    const std::vector<Rational>& prefix_noisy() const noexcept { return noisy_; }

    /// Probability that the free slots are transparent: val(A, w).
    Rational success() const { return sum(clean_); }

    /// Exact P(E = e); bit (length-1-i) of e is the noise of slot i+1.
    Rational noise(std::uint64_t e) const {
        if (length() > 62) throw Error("block too long for indexed noise lookup");
        const std::uint64_t free_bits = e & ((std::uint64_t{1} << n_) - 1);
        const std::uint64_t prefix = e >> n_;
        Rational p = noisy_.at(prefix) / pow(Rational{2}, static_cast<unsigned>(n_));
        if (free_bits == 0) p += clean_[prefix];
        return p;
    }

    Rational transition(std::uint64_t x, std::uint64_t y) const { return noise(x ^ y); }

    /// H(E^k) for the first k noise bits, 0 <= k <= m + n.
    double prefix_entropy(std::size_t k) const {
        if (k <= m_) {
            std::vector<double> marg(std::size_t{1} << k, 0.0);
            for (std::size_t e = 0; e < clean_d_.size(); ++e) marg[e >> (m_ - k)] += clean_d_[e] + noisy_d_[e];
            double h = 0.0;
            for (double p : marg) h += plogp(p);
            return h;
        }
        const std::size_t j = k - m_;
        double h = 0.0;
        for (std::size_t e = 0; e < clean_d_.size(); ++e) h += mixed_entropy(clean_d_[e], noisy_d_[e], j);
        return h;
    }

    /// H(E) = H(Y | X, C) for any data input.
    double noise_entropy() const { return prefix_entropy(length()); }

    /// H(E_{m+1..m+n})
    double free_entropy() const {
        double a = 0.0, r = 0.0;
        for (std::size_t e = 0; e < clean_d_.size(); ++e) {
            a += clean_d_[e];
            r += noisy_d_[e];
        }
        return mixed_entropy(a, r, n_);
    }

    /// Dense 2^N x 2^N transition matrix (exact values converted to double).
    DiscreteChannel dense(std::size_t max_bits = 10) const {
        if (length() > max_bits)
            throw Error("block of " + std::to_string(length()) + " uses exceeds dense limit of " +
                        std::to_string(max_bits));
        const std::size_t size = std::size_t{1} << length();
        std::vector<double> law(size);
        for (std::size_t e = 0; e < size; ++e) law[e] = to_double(noise(e));
        DiscreteChannel ch{size, size, std::vector<double>(size * size)};
        for (std::size_t x = 0; x < size; ++x)
            for (std::size_t y = 0; y < size; ++y) ch.w[x * size + y] = law[x ^ y];
        return ch;
    }

private:
    // Entropy of the mixture "j zero bits with weight a" + "j uniform bits
    // with weight r" (unnormalized pieces of a larger law).
    static double mixed_entropy(double a, double r, std::size_t j) {
        const double tiny = std::ldexp(1.0, -static_cast<int>(std::min<std::size_t>(j, 1000)));
        double h = plogp(a + r * tiny);
        if (r > 0.0) h += r * (1.0 - tiny) * (static_cast<double>(j) - std::log2(r));
        return h;
    }

    std::size_t m_, n_;
    std::vector<Rational> clean_, noisy_;
    std::vector<double> clean_d_, noisy_d_;
};

namespace block_detail {

enum class SlotClass { Clean, Noisy };

inline SlotClass classify(const std::vector<Rational>& law) {
    if (law.size() == 2 && law[0] == 1 && law[1] == 0) return SlotClass::Clean;
    if (law.size() == 2 && law[0] == Rational{1, 2} && law[1] == Rational{1, 2}) return SlotClass::Noisy;
    throw Error("channel output law is neither transparent nor a fair coin");
}

inline void check_v_structure(const Fsmc& ch, const ControlSchedule& sched) {
    if (ch.controls.empty() || ch.num_outputs() != 2) throw Error("block protocol needs a channel built by build_V");
    for (const auto& c : ch.controls) {
        const auto& zero = ch.output_law[ch.v_input(0, c)];
        const auto& one = ch.output_law[ch.v_input(1, c)];
        for (std::size_t s = 0; s < ch.num_states(); ++s)
            if (zero[s][0] != one[s][1] || zero[s][1] != one[s][0])
                throw Error("channel is not additive in the data bit");
    }
    if (!ch.state_law[ch.v_input(0, sched.freeze)].is_identity())
        throw Error("control '" + sched.freeze + "' does not freeze the state");
    const auto reset_target = point_mass(ch.num_states(), ch.initial);
    if (!ch.state_law[ch.v_input(0, sched.reset)].all_columns_equal(reset_target))
        throw Error("control '" + sched.reset + "' does not reset to the initial state");
}

}  // namespace block_detail

/// Memoryless channel seen by one period of the schedule.
inline BlockChannel induced_block_channel(const Fsmc& ch, const ControlSchedule& sched,
                                          std::uint64_t budget = std::uint64_t{1} << 14) {
    block_detail::check_v_structure(ch, sched);
    if (sched.free == 0) throw Error("control schedule needs at least one free slot");
    const std::size_t m = sched.word.size();
    if (m >= 63 || (std::uint64_t{1} << m) > budget)
        throw Error("word of length " + std::to_string(m) + " exceeds block table budget");

    const auto dist = joint_seq_dist(ch, schedule_inputs(ch, sched.word), budget * ch.num_states());
    const auto& free_law = ch.output_law[ch.v_input(0, sched.freeze)];
    const auto& reset_law = ch.output_law[ch.v_input(0, sched.reset)];
    std::vector<Rational> clean(dist.num_sequences()), noisy(dist.num_sequences());
    for (std::size_t e = 0; e < dist.num_sequences(); ++e) {
        for (StateIndex s = 0; s < ch.num_states(); ++s) {
            const Rational& p = dist.at(e, s);
            if (is_zero(p)) continue;
            auto cls = block_detail::classify(free_law[s]);
            if (block_detail::classify(reset_law[s]) != cls) throw Error("reset slot output law differs from free slots");
            (cls == block_detail::SlotClass::Clean ? clean : noisy)[e] += p;
        }
    }
    return BlockChannel{m, sched.free, std::move(clean), std::move(noisy)};
}

/// Exact check that two consecutive periods are independent and identically
/// distributed: the joint output law over 2(m+n) slots (zero data) factors
/// into the product of single-period laws.
inline bool blocks_identically_distributed(const Fsmc& ch, const ControlSchedule& sched,
                                           std::uint64_t budget = kDefaultTableBudget) {
    Word one = sched.controls();
    Word two = one;
    two.insert(two.end(), one.begin(), one.end());
    const auto law1 = joint_seq_dist(ch, schedule_inputs(ch, one), budget).output_marginal();
    const auto law2 = joint_seq_dist(ch, schedule_inputs(ch, two), budget).output_marginal();
    const std::size_t n1 = law1.size();
    for (std::size_t a = 0; a < n1; ++a)
        for (std::size_t b = 0; b < n1; ++b)
            if (law2[a * n1 + b] != law1[a] * law1[b]) return false;
    return true;
}

enum class InputChoice { Uniform, BlahutArimoto };

struct RateResult {
    double rate = 0.0;                 // bits per channel use
    double mutual_information = 0.0;   // bits per block
    double conditional_entropy = 0.0;  // H(Y | X, C) per block
    std::size_t block = 0;
    bool ba_dense = false;  // BA ran on the dense block matrix
};

/// Rate of the block protocol. Uniform data makes the output uniform, so
/// I = N - H(E). For BA the dense matrix is optimized when it fits;
/// otherwise the uniform input is already optimal for an additive channel.
inline RateResult achievable_rate(const BlockChannel& block, InputChoice choice = InputChoice::Uniform,
                                  double tol = 1e-9, std::size_t dense_bits = 10) {
    RateResult res;
    res.block = block.length();
    res.conditional_entropy = block.noise_entropy();
    res.mutual_information = std::max(0.0, static_cast<double>(block.length()) - res.conditional_entropy);
    if (choice == InputChoice::BlahutArimoto && block.length() <= dense_bits) {
        auto ba = blahut_arimoto(block.dense(dense_bits), tol);
        res.ba_dense = true;
        res.mutual_information = std::max(res.mutual_information, ba.capacity);
    }
    res.rate = res.mutual_information / static_cast<double>(block.length());
    return res;
}

inline RateResult achievable_rate(const Fsmc& ch, const Word& w, std::size_t free,
                                  InputChoice choice = InputChoice::Uniform) {
    ControlSchedule sched;
    sched.word = w;
    sched.free = free;
    return achievable_rate(induced_block_channel(ch, sched), choice);
}

/// Terms of the conditional-entropy chain for uniform data:
///   H(Y|XC) = sum_i H(Y_i | Y^{i-1} X C)
///           <= m + H(Y_{m+1..} | Y_{1..m} X C)
///           <= m + H(Y_{m+1..} | X C)
///           <= m + 1 + (1 - val(w)) n
struct AchievabilityChain {
    double total = 0.0;
    double chain_rule = 0.0;
    double bound_by_m = 0.0;
    double remove_conditioning = 0.0;
    double final_bound = 0.0;
    double free_entropy = 0.0;
    double free_entropy_closed_form = 0.0;  // h(v + (1-v)2^-n) + (1-v)(1-2^-n) log2(2^n - 1)
};

inline AchievabilityChain achievability_chain(const BlockChannel& block) {
    AchievabilityChain c;
    const double m = static_cast<double>(block.word_length());
    const double n = static_cast<double>(block.free_slots());
    c.total = block.noise_entropy();
    double prev = 0.0;
    for (std::size_t i = 1; i <= block.length(); ++i) {
        const double h = block.prefix_entropy(i);
        c.chain_rule += h - prev;
        prev = h;
    }
    c.bound_by_m = m + (c.total - block.prefix_entropy(block.word_length()));
    c.free_entropy = block.free_entropy();
    c.remove_conditioning = m + c.free_entropy;
    const double v = to_double(block.success());
    c.final_bound = m + 1.0 + (1.0 - v) * n;
    const double tiny = std::ldexp(1.0, -static_cast<int>(std::min(block.free_slots(), std::size_t{1000})));
    const double log_card = n >= 60 ? n : std::log2(std::ldexp(1.0, static_cast<int>(n)) - 1.0);
    c.free_entropy_closed_form = binary_entropy(std::min(1.0, v + (1.0 - v) * tiny)) + (1.0 - v) * (1.0 - tiny) * log_card;
    return c;
}

}  // namespace pfacap
