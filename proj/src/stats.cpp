#include "sudakov/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "sudakov/common.hpp"
#include "sudakov/rng.hpp"

namespace sudakov {

void to_json(nlohmann::json& j, const Interval& ci) { j = nlohmann::json::array({ci.lo, ci.hi}); }

IndexSet support_of(std::span<const double> t) {
    IndexSet s;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != 0.0) s.push_back(static_cast<int>(i));
    return s;
}

Interval wilson_interval(std::size_t successes, std::size_t trials, double z) {
    if (trials == 0) return {0.0, 1.0};
    const double n = static_cast<double>(trials);
    const double phat = static_cast<double>(successes) / n;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / n;
    const double centre = (phat + z2 / (2.0 * n)) / denom;
    const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
    // Clamp the degenerate ends so that 0 and 1 stay inside the interval exactly.
    const double lo = successes == 0 ? 0.0 : std::max(0.0, centre - half);
    const double hi = successes == trials ? 1.0 : std::min(1.0, centre + half);
    return {lo, hi};
}

double mean(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

Interval bootstrap_mean_ci(std::span<const double> values, std::uint64_t seed,
                           std::size_t resamples,
                           const std::function<double(double)>& transform) {
    auto apply = [&](double x) { return transform ? transform(x) : x; };
    if (values.empty()) return {apply(0.0), apply(0.0)};
    std::vector<double> stats(resamples);
    const std::size_t m = values.size();
    parallel_for(resamples, [&](std::size_t b) {
        RandomSource rng(derive_seed(seed, 0xB0075ULL + b));
        double s = 0.0;
        for (std::size_t k = 0; k < m; ++k) s += values[rng.index(m)];
        stats[b] = apply(s / static_cast<double>(m));
    });
    std::sort(stats.begin(), stats.end());
    auto quantile = [&](double q) {
        const double pos = q * static_cast<double>(resamples - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, resamples - 1);
        const double w = pos - static_cast<double>(lo);
        return stats[lo] * (1.0 - w) + stats[hi] * w;
    };
    return {quantile(0.025), quantile(0.975)};
}

}  // namespace sudakov
