#pragma once

// Information measures in bits over floating-point distributions, and the
// Blahut-Arimoto capacity iteration for memoryless channels.

#include "rational.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace pfacap {

inline constexpr double kDistTolerance = 1e-9;
inline constexpr double kRowTolerance = 1e-12;

inline double plogp(double p) { return p > 0.0 ? -p * std::log2(p) : 0.0; }

inline void check_probabilities(const std::vector<double>& p, double tol, const std::string& what) {
    double total = 0.0;
    for (double v : p) {
        if (!(v >= 0.0)) throw Error(what + ": negative or NaN probability");
        total += v;
    }
    if (std::abs(total - 1.0) > tol) throw Error(what + ": probabilities sum to " + std::to_string(total));
}

inline double entropy(const std::vector<double>& p) {
    check_probabilities(p, kDistTolerance, "entropy");
    double h = 0.0;
    for (double v : p) h += plogp(v);
    return h;
}

inline double binary_entropy(double eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw Error("binary_entropy needs eps in [0, 1]");
    return plogp(eps) + plogp(1.0 - eps);
}

/// p(x, y) stored row-major by x.
struct JointDist {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> p;

    double operator()(std::size_t x, std::size_t y) const { return p[x * ny + y]; }

    std::vector<double> marginal_x() const {
        std::vector<double> m(nx, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) m[x] += (*this)(x, y);
        return m;
    }

    std::vector<double> marginal_y() const {
        std::vector<double> m(ny, 0.0);
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) m[y] += (*this)(x, y);
        return m;
    }
};

inline void check_joint(const JointDist& j) {
    if (j.p.size() != j.nx * j.ny) throw Error("joint distribution has wrong size");
    check_probabilities(j.p, kDistTolerance, "joint distribution");
}

struct SpectrumSample {
    double value;        // log2 p(y|x) - log2 p(y)
    double probability;  // p(x, y)
};

/// Distribution of i(x,y) = log p(y|x)/p(y) over the support of the joint.
inline std::vector<SpectrumSample> information_spectrum(const JointDist& j) {
    check_joint(j);
    const auto px = j.marginal_x();
    const auto py = j.marginal_y();
    std::vector<SpectrumSample> out;
    for (std::size_t x = 0; x < j.nx; ++x)
        for (std::size_t y = 0; y < j.ny; ++y) {
            const double pxy = j(x, y);
            if (pxy <= 0.0) continue;
            out.push_back({std::log2(pxy / (px[x] * py[y])), pxy});
        }
    return out;
}

inline double mutual_information(const JointDist& j) {
    double total = 0.0;
    for (const auto& s : information_spectrum(j)) total += s.probability * s.value;
    return std::max(total, 0.0);
}

/// Memoryless channel, rows p(.|x).
struct DiscreteChannel {
    std::size_t nx = 0;
    std::size_t ny = 0;
    std::vector<double> w;

    double operator()(std::size_t x, std::size_t y) const { return w[x * ny + y]; }

    static DiscreteChannel bsc(double flip) {
        if (!(flip >= 0.0 && flip <= 1.0)) throw Error("BSC crossover must lie in [0, 1]");
        return {2, 2, {1.0 - flip, flip, flip, 1.0 - flip}};
    }

    JointDist joint(const std::vector<double>& input) const {
        JointDist j{nx, ny, std::vector<double>(nx * ny)};
        for (std::size_t x = 0; x < nx; ++x)
            for (std::size_t y = 0; y < ny; ++y) j.p[x * ny + y] = input[x] * (*this)(x, y);
        return j;
    }
};

inline void validate_channel(const DiscreteChannel& ch) {
    if (ch.nx == 0 || ch.ny == 0 || ch.w.size() != ch.nx * ch.ny) throw Error("channel matrix has wrong shape");
    for (std::size_t x = 0; x < ch.nx; ++x) {
        std::vector<double> row(ch.w.begin() + static_cast<std::ptrdiff_t>(x * ch.ny),
                                ch.w.begin() + static_cast<std::ptrdiff_t>((x + 1) * ch.ny));
        check_probabilities(row, kRowTolerance, "channel row " + std::to_string(x));
    }
}

struct BlahutArimotoResult {
    double capacity = 0.0;  // certified lower bound at termination
    double upper = 0.0;     // certified upper bound at termination
    double gap = 0.0;
    std::vector<double> input;
    std::size_t iterations = 0;
    bool converged = false;
    std::vector<double> lower_history;
    std::vector<double> upper_history;
};

/// Alternating maximization. At every iterate r the exponentiated
/// divergences D(x) = D(W(.|x) || rW) give
///   log2 sum_x r(x) 2^{D(x)} <= C <= max_x D(x);
/// iteration stops once the two differ by at most `tol`.
inline BlahutArimotoResult blahut_arimoto(const DiscreteChannel& ch, double tol = 1e-9, std::size_t max_iters = 100000) {
    validate_channel(ch);
    if (!(tol > 0.0)) throw Error("tolerance must be positive");
    BlahutArimotoResult res;
    std::vector<double> r(ch.nx, 1.0 / static_cast<double>(ch.nx));
    std::vector<double> q(ch.ny), d(ch.nx);
    double best_lower = 0.0;
    for (std::size_t it = 1; it <= max_iters; ++it) {
        std::fill(q.begin(), q.end(), 0.0);
        for (std::size_t x = 0; x < ch.nx; ++x)
            for (std::size_t y = 0; y < ch.ny; ++y) q[y] += r[x] * ch(x, y);
        double upper = -1.0;
        for (std::size_t x = 0; x < ch.nx; ++x) {
            double div = 0.0;
            for (std::size_t y = 0; y < ch.ny; ++y) {
                const double wxy = ch(x, y);
                if (wxy > 0.0) div += wxy * std::log2(wxy / q[y]);
            }
            d[x] = div;
            upper = std::max(upper, div);
        }
        double z = 0.0;
        for (std::size_t x = 0; x < ch.nx; ++x) z += r[x] * std::exp2(d[x] - upper);
        const double lower = upper + std::log2(z);
        best_lower = std::max(best_lower, lower);
        res.lower_history.push_back(lower);
        res.upper_history.push_back(upper);
        res.iterations = it;
        res.capacity = std::max(0.0, best_lower);
        res.upper = std::max(0.0, upper);
        res.gap = res.upper - res.capacity;
        res.input = r;
        if (upper - lower <= tol) {
            res.converged = true;
            break;
        }
        for (std::size_t x = 0; x < ch.nx; ++x) r[x] = r[x] * std::exp2(d[x] - upper) / z;
    }
    return res;
}

}  // namespace pfacap
