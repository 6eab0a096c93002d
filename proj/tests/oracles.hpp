// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <set>
#include <vector>

namespace oracle {

inline constexpr double kPi = 3.14159265358979323846;

/// Composite Simpson rule with n (even) panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 20000) {
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi); }

/// P(|g| >= u) by quadrature of the density.
inline double gaussian_two_sided_tail(double u) { return 2.0 * simpson(normal_pdf, u, u + 40.0); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// E max of m iid standard normals.
inline double expected_max_normals(int m) {
    return simpson([m](double x) { return x * m * normal_pdf(x) * std::pow(normal_cdf(x), m - 1); }, -12.0, 12.0, 40000);
}

/// E|g|^r by quadrature.
inline double gaussian_abs_moment(double r) {
    return 2.0 * simpson([r](double x) { return std::pow(x, r) * normal_pdf(x); }, 0.0, 40.0, 40000);
}

/// E|sum t_i eps_i|^p by brute force over all 2^k sign patterns.
inline double rademacher_moment(const std::vector<double>& t, double p) {
    const std::size_t k = t.size();
    double s = 0.0;
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
        double v = 0.0;
        for (std::size_t i = 0; i < k; ++i) v += (mask >> i & 1ULL) ? t[i] : -t[i];
        s += std::pow(std::abs(v), p);
    }
    return s / static_cast<double>(1ULL << k);
}

/// Smallest r on a grid of step h in [lo, hi] with f(r) >= 0, or hi if none.
inline double grid_first_crossing(const std::function<double(double)>& f, double lo, double hi, double h = 1e-3) {
    for (double r = lo; r <= hi; r += h)
        if (f(r) >= 0.0) return r;
    return hi;
}

/// Exhaustive VC dimension of a family of bitmasks over n <= 16 points.
inline std::size_t vc_dimension_bruteforce(const std::vector<std::uint32_t>& family, std::size_t n) {
    std::size_t best = 0;
    for (std::uint32_t S = 1; S < (1u << n); ++S) {
        const auto size = static_cast<std::size_t>(__builtin_popcount(S));
        if (size <= best) continue;
        std::set<std::uint32_t> traces;
        for (auto f : family) traces.insert(f & S);
        if (traces.size() == (1ull << size)) best = size;
    }
    return best;
}

inline double binomial_sum(std::size_t n, std::size_t v) {
    double total = 0.0, c = 1.0;
    for (std::size_t j = 0; j <= std::min(n, v); ++j) {
        total += c;
        c = c * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return total;
}

}  // namespace oracle
