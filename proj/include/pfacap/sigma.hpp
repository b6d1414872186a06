#pragma once

// Injective encoding of a tuple of positive rationals r_j/s_j as
//   prod_{j<=N} p_j^{r_j} * prod_{j<=N} p_{N+j}^{s_j}
// over the first 2N primes.

#include "rational.hpp"

#include <cstddef>
#include <vector>

namespace pfacap {

struct SigmaCode {
    BigInt value;
    std::size_t arity = 0;
};

/// Exponents above this are rejected; the code would have millions of digits.
inline constexpr unsigned long kSigmaMaxExponent = 100000;

inline std::vector<unsigned long> first_primes(std::size_t count) {
    std::vector<unsigned long> primes;
    for (unsigned long c = 2; primes.size() < count; ++c) {
        bool prime = true;
        for (auto p : primes) {
            if (p * p > c) break;
            if (c % p == 0) {
                prime = false;
                break;
            }
        }
        if (prime) primes.push_back(c);
    }
    return primes;
}

inline SigmaCode sigma_encode(const std::vector<Rational>& values) {
    if (values.empty()) throw Error("sigma: empty tuple");
    const std::size_t n = values.size();
    const auto primes = first_primes(2 * n);
    BigInt code{1};
    for (std::size_t j = 0; j < n; ++j) {
        const Rational& r = values[j];
        if (r.sign() <= 0) throw Error("sigma: entries must be positive, got " + to_string(r));
        const BigInt& num = numerator(r);
        const BigInt& den = denominator(r);
        if (num > kSigmaMaxExponent || den > kSigmaMaxExponent)
            throw Error("sigma: entry " + to_string(r) + " too large to encode");
        code *= boost::multiprecision::pow(BigInt{primes[j]}, num.convert_to<unsigned>());
        code *= boost::multiprecision::pow(BigInt{primes[n + j]}, den.convert_to<unsigned>());
    }
    return {code, n};
}

inline std::vector<Rational> sigma_decode(const SigmaCode& code) {
    if (code.arity == 0) throw Error("sigma: arity must be positive");
    if (code.value < 1) throw Error("sigma: code must be at least 1");
    const auto primes = first_primes(2 * code.arity);
    BigInt rest = code.value;
    std::vector<unsigned long> exponents(primes.size(), 0);
    for (std::size_t i = 0; i < primes.size(); ++i) {
        const BigInt p{primes[i]};
        while (rest % p == 0) {
            rest /= p;
            ++exponents[i];
        }
    }
    if (rest != 1) throw Error("sigma: " + code.value.str() + " has a prime factor outside the first 2N primes");
    std::vector<Rational> out;
    for (std::size_t j = 0; j < code.arity; ++j) {
        unsigned long r = exponents[j], s = exponents[code.arity + j];
        if (r == 0 || s == 0) throw Error("sigma: " + code.value.str() + " is not a code of arity " +
                                          std::to_string(code.arity) + " (missing exponent)");
        Rational q{BigInt{r}, BigInt{s}};
        if (numerator(q) != r) throw Error("sigma: " + code.value.str() + " encodes a fraction not in lowest terms");
        out.push_back(q);
    }
    return out;
}

}  // namespace pfacap
