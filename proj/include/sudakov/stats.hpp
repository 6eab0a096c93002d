#pragma once

#include <cstdint>
#include <functional>
#include <span>

#include <nlohmann/json.hpp>

namespace sudakov {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const { return hi - lo; }
    bool contains(double x) const { return lo <= x && x <= hi; }
};

void to_json(nlohmann::json& j, const Interval& ci);

inline constexpr double kZ95 = 1.959963984540054;
inline constexpr std::size_t kBootstrapResamples = 200;

/// Wilson score interval for a binomial proportion.
Interval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95);

double mean(std::span<const double> values);

/// Percentile bootstrap of the sample mean; `transform` maps each resampled
/// mean to the reported scale (identity by default).
Interval bootstrap_mean_ci(std::span<const double> values, std::uint64_t seed,
                           std::size_t resamples = kBootstrapResamples,
                           const std::function<double(double)>& transform = {});

}  // namespace sudakov
