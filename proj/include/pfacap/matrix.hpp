#pragma once

// Dense exact matrices in the column-stochastic convention: entry (r, c) is
// the probability of moving from source state c to target state r, so a
// distribution x is pushed forward as M * x.

#include "rational.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace pfacap {

using ProbVector = std::vector<Rational>;

class StochMatrix {
public:
    StochMatrix() = default;
    explicit StochMatrix(std::size_t n) : n_{n}, entries_(n * n) {}

    static StochMatrix identity(std::size_t n) {
        StochMatrix m{n};
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    /// Every column equals `column`.
    static StochMatrix constant_columns(const ProbVector& column) {
        StochMatrix m{column.size()};
        for (std::size_t c = 0; c < m.n_; ++c)
            for (std::size_t r = 0; r < m.n_; ++r) m(r, c) = column[r];
        return m;
    }

    std::size_t size() const noexcept { return n_; }

    Rational& operator()(std::size_t target, std::size_t source) { return entries_[target * n_ + source]; }
    const Rational& operator()(std::size_t target, std::size_t source) const {
        return entries_[target * n_ + source];
    }

    ProbVector column(std::size_t source) const {
        ProbVector col(n_);
        for (std::size_t r = 0; r < n_; ++r) col[r] = (*this)(r, source);
        return col;
    }

    /// M * x, skipping structural zeros.
    ProbVector apply(const ProbVector& x) const {
        ProbVector out(n_);
        for (std::size_t c = 0; c < n_; ++c) {
            if (is_zero(x[c])) continue;
            for (std::size_t r = 0; r < n_; ++r) {
                const Rational& m = (*this)(r, c);
                if (!is_zero(m)) out[r] += m * x[c];
            }
        }
        return out;
    }

    bool is_identity() const {
        for (std::size_t r = 0; r < n_; ++r)
            for (std::size_t c = 0; c < n_; ++c)
                if ((*this)(r, c) != (r == c ? one() : zero())) return false;
        return true;
    }

    bool all_columns_equal(const ProbVector& v) const {
        for (std::size_t c = 0; c < n_; ++c)
            for (std::size_t r = 0; r < n_; ++r)
                if ((*this)(r, c) != v[r]) return false;
        return true;
    }

    friend bool operator==(const StochMatrix&, const StochMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<Rational> entries_;
};

inline ProbVector point_mass(std::size_t n, std::size_t at) {
    ProbVector v(n);
    v.at(at) = 1;
    return v;
}

}  // namespace pfacap
