#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace sudakov {

using Vector = std::vector<double>;
using IndexSet = std::vector<int>;

/// Argument outside the domain of an operation (negative level, r < 1, ...).
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A model specification that cannot be built (non-PD covariance, bad grid).
class ModelError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A checked precondition of an operation does not hold.
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Monte-Carlo budget shared by every sampling-based estimator.
struct McOptions {
    std::size_t budget = 100000;
    std::uint64_t seed = 0;
};

/// Sorted indices i with t_i != 0.
IndexSet support_of(std::span<const double> t);

inline constexpr double kE = 2.718281828459045235360287;

}  // namespace sudakov
