#pragma once

// Exact arithmetic substrate. Every probability handled by the automaton and
// channel code is a Rational; conversion to double happens only where a
// logarithm is taken.

#include <boost/multiprecision/gmp.hpp>

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pfacap {

using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

/// Domain error raised by library operations (bad parameters, unknown
/// symbols, budget overruns). The CLI maps it to exit status 1.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline const Rational& zero() {
    static const Rational z{0};
    return z;
}

inline const Rational& one() {
    static const Rational o{1};
    return o;
}

inline bool is_zero(const Rational& r) { return r.sign() == 0; }

/// Base-10 digits to an integer. GMP would read a leading zero as an octal
/// prefix, so zeros are stripped first.
inline BigInt decimal_integer(const std::string& digits) {
    bool neg = !digits.empty() && digits[0] == '-';
    std::size_t i = neg ? 1 : 0;
    while (i + 1 < digits.size() && digits[i] == '0') ++i;
    BigInt v{digits.substr(i)};
    return neg ? BigInt{-v} : v;
}

/// Parses "p/q", an integer, or a finite decimal ("0.25", "-3.5e-2") into an
/// exact Rational.
inline Rational parse_rational(std::string_view text) {
    std::string s{text};
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.pop_back();
    std::size_t b = 0;
    while (b < s.size() && (s[b] == ' ' || s[b] == '\t')) ++b;
    s = s.substr(b);
    if (s.empty()) throw Error("empty rational literal");

    auto slash = s.find('/');
    if (slash != std::string::npos) {
        std::string num = s.substr(0, slash);
        std::string den = s.substr(slash + 1);
        auto digits_ok = [](const std::string& t, bool allow_sign) {
            if (t.empty()) return false;
            std::size_t i = (allow_sign && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
            if (i == t.size()) return false;
            for (; i < t.size(); ++i)
                if (t[i] < '0' || t[i] > '9') return false;
            return true;
        };
        if (!digits_ok(num, true) || !digits_ok(den, false))
            throw Error("malformed rational literal '" + s + "'");
        if (num[0] == '+') num = num.substr(1);
        BigInt d = decimal_integer(den);
        if (d == 0) throw Error("zero denominator in '" + s + "'");
        return Rational{decimal_integer(num), d};
    }

    // Decimal with optional exponent.
    std::size_t i = 0;
    bool neg = false;
    if (s[i] == '+' || s[i] == '-') {
        neg = s[i] == '-';
        ++i;
    }
    std::string mantissa;
    long frac_digits = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
        char c = s[i];
        if (c >= '0' && c <= '9') {
            mantissa.push_back(c);
            seen_digit = true;
            if (seen_dot) ++frac_digits;
        } else if (c == '.' && !seen_dot) {
            seen_dot = true;
        } else {
            break;
        }
    }
    if (!seen_digit) throw Error("malformed rational literal '" + s + "'");
    long exponent = 0;
    if (i < s.size()) {
        if (s[i] != 'e' && s[i] != 'E') throw Error("malformed rational literal '" + s + "'");
        std::string exp_part = s.substr(i + 1);
        if (exp_part.empty()) throw Error("malformed rational literal '" + s + "'");
        try {
            std::size_t used = 0;
            exponent = std::stol(exp_part, &used);
            if (used != exp_part.size()) throw Error("malformed rational literal '" + s + "'");
        } catch (const std::logic_error&) {
            throw Error("malformed rational literal '" + s + "'");
        }
    }
    exponent -= frac_digits;
    BigInt m = decimal_integer(mantissa);
    if (neg) m = -m;
    BigInt scale = boost::multiprecision::pow(BigInt{10}, static_cast<unsigned>(exponent < 0 ? -exponent : exponent));
    return exponent < 0 ? Rational{m, scale} : Rational{m * scale};
}

/// "p/q", or just "p" when the denominator is one.
inline std::string to_string(const Rational& r) {
    if (denominator(r) == 1) return numerator(r).str();
    return numerator(r).str() + "/" + denominator(r).str();
}

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline Rational pow(const Rational& base, unsigned exponent) {
    Rational result{1};
    Rational b = base;
    while (exponent != 0) {
        if (exponent & 1U) result *= b;
        exponent >>= 1U;
        if (exponent != 0) b *= b;
    }
    return result;
}

inline Rational sum(const std::vector<Rational>& xs) {
    Rational s{0};
    for (const auto& x : xs) s += x;
    return s;
}

}  // namespace pfacap
