#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sudakov/distributions.hpp"
#include "sudakov/moments.hpp"
#include "sudakov/point_set.hpp"

namespace sudakov {

struct WitnessOptions {
    /// Minimum level on the support; 0 disables it.
    double floor = 0.0;
    McOptions mc{20000, 0};
};

/// Nonnegative levels a on I(t) with sum G_i(a_i) <= p.
struct Witness {
    IndexSet support;
    Vector t;       // the linear form (full dimension)
    Vector a;       // levels (full dimension, zero off the support)
    double budget_used = 0.0;
    double value = 0.0;
    double p = 0.0;
    double floor = 0.0;
    bool feasible = true;
    std::string method;
    std::vector<std::string> flags;
    /// Common witnesses: the class the value is the minimum over.
    std::vector<IndexSet> classes;
    /// Smooth common witnesses: relative duality gap at exit.
    std::optional<double> gap;
};

void to_json(nlohmann::json& j, const Witness& w);

/// sup { sum |t_i| a_i : P(|X_i| >= a_i, i in I(t)) >= e^{-p} }.
Witness solve_witness(const VectorModel& model, std::span<const double> t, double p, const WitnessOptions& opt = {});

/// sup over a of min_{C in class} sum_{i in C} |t_i| a_i under the same budget.
Witness solve_common_witness(const VectorModel& model, std::span<const double> t, const std::vector<IndexSet>& classes,
                             double p, const WitnessOptions& opt = {});

/// min_C sum_{i in C} |t_i| a_i (sum over I(t) when classes is empty).
double witness_objective(std::span<const double> t, std::span<const double> a, const std::vector<IndexSet>& classes,
                         const IndexSet& support);

struct WitnessCertificate {
    bool feasible = false;       // joint tail (conservative end) >= e^{-p}
    Probability joint;           // P(|X_i| >= a_i on the support)
    double threshold = 0.0;      // e^{-p}
    bool value_consistent = false;
    double recomputed_value = 0.0;
    MomentEstimate norm;         // ||X_t||_p
    double ratio = 0.0;          // value / ||X_t||_p
    double D = 1.0;              // max(ratio, 1/ratio)
};

void to_json(nlohmann::json& j, const WitnessCertificate& c);

WitnessCertificate witness_certify(const VectorModel& model, const Witness& w, const McOptions& mc = {});

/// Default gamma = 1/(8 alpha e) with alpha = 1.
inline constexpr double kDefaultGamma = 1.0 / (8.0 * kE);

struct RProfile {
    Vector r;
    double gamma = kDefaultGamma;
    Vector k;
    double p = 2.0;
};

void to_json(nlohmann::json& j, const RProfile& r);

/// r_i = 2 if k_i ||X_i||_2 <= 2 gamma; p if k_i ||X_i||_r > r gamma on [2, p];
/// otherwise the first r with k_i ||X_i||_r = r gamma.
RProfile r_profile(const VectorModel& model, const Vector& k, double p, double gamma = kDefaultGamma);

struct NeighborReport {
    std::vector<std::vector<std::size_t>> S;  // S[t] = significant neighbours of t
    double threshold = 0.0;
    /// Separated pairs (||X_t - X_s||_p >= p/2) with s not in S(t) and t not in S(s).
    std::vector<std::pair<std::size_t, std::size_t>> violations;
    std::size_t separated_pairs = 0;
};

void to_json(nlohmann::json& j, const NeighborReport& r);

/// Weights of the restricted forms: k_i 1_{k_i > 4 rho} from the lattice, or
/// |t_i| when T carries no lattice.
Vector neighbor_weights(const PointSet& T, std::size_t j);

/// S(t) = { s : ||sum_{I(t) \ I(s)} k_i 1_{k_i > 4 rho} X_i||_p >= threshold }.
NeighborReport significant_neighbors(const VectorModel& model, const PointSet& T, double p,
                                     std::optional<double> threshold = {}, const McOptions& mc = {});

}  // namespace sudakov
