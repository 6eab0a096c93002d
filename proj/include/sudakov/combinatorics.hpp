#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sudakov/distributions.hpp"
#include "sudakov/moments.hpp"
#include "sudakov/point_set.hpp"
#include "sudakov/witness.hpp"

namespace sudakov {

/// Family of subsets of {0, ..., n-1}.
struct SupportFamily {
    std::size_t n = 0;
    std::vector<IndexSet> sets;

    static SupportFamily from_points(const PointSet& T, bool deduplicate = true);
    /// Sorts members and removes repeats.
    void deduplicate();
    nlohmann::json to_json() const;
    static SupportFamily from_json(const nlohmann::json& j, std::size_t n = 0);
};

inline constexpr std::size_t kMaxExactVcGround = 30;
inline constexpr std::size_t kDefaultVcCap = 8;

struct VcResult {
    std::size_t v = 0;
    bool exact = true;          // false: randomized lower bound (n > 30)
    IndexSet shattered;         // a witness set of size v
};

void to_json(nlohmann::json& j, const VcResult& r);

VcResult vc_dimension(const SupportFamily& F, std::size_t cap = kDefaultVcCap, std::uint64_t seed = 0);

/// (e m / v)^v, the bound used for the number of traces; 1 for v = 0.
double sauer_bound(double m, double v);
/// sum_{j <= v} C(m, j).
double sauer_exact_count(std::size_t m, std::size_t v);

struct ExtractionResult {
    std::vector<std::size_t> selected;  // indices into T, in selection order
    std::vector<Vector> pieces;         // s^l = t restricted to I(t) \ J_{l-1}
    std::vector<MomentEstimate> norms;  // re-certified ||X_{s^l}||_p
    IndexSet covered;                   // J
    double threshold = 0.0;
    bool disjoint = true;
    bool certified = true;              // every norm lower end >= threshold
};

void to_json(nlohmann::json& j, const ExtractionResult& r);

/// Repeatedly takes the lowest-index t with ||X_t 1_{J^c}||_p >= threshold
/// (lower CI end) and adds I(t) to J.
ExtractionResult greedy_disjoint_extract(const VectorModel& model, const PointSet& T, double p,
                                         std::optional<double> threshold = {}, const McOptions& mc = {});

struct ResidualReport {
    std::size_t separated_pairs = 0;
    double min_residual = kInf;  // min ||sum_{J} (t_i - s_i) X_i||_p over separated pairs
    std::vector<std::pair<std::size_t, std::size_t>> violations;  // below p/4
};

void to_json(nlohmann::json& j, const ResidualReport& r);

/// For pairs with ||X_t - X_s||_p >= p/2, checks ||(X_t - X_s) 1_J||_p >= p/4.
ResidualReport residual_separation_check(const VectorModel& model, const PointSet& T, const IndexSet& J, double p,
                                         const McOptions& mc = {});

/// sum over I(t) xor I(s) of r_i 1_{r_i > 2}.
double dbar_distance(const RProfile& prof, const IndexSet& I_t, const IndexSet& I_s);

struct DistortionResult {
    std::vector<std::size_t> subset;
    double q = 0.0;
    std::size_t level = 0;
    std::string terminated;  // found | exhausted | too_small
    double distortion = 0.0; // max / min pairwise dbar on the subset
    bool metric_ok = true;   // triangle inequality on the checked triples
    std::vector<std::string> flags;
};

void to_json(nlohmann::json& j, const DistortionResult& r);

/// Looks for >= f_target supports whose pairwise dbar lie in [q/C, q]; recurses
/// into the largest cover cell for at most ceil(log(1 + p)) levels.
DistortionResult bounded_distortion_subset(const std::vector<IndexSet>& supports, const RProfile& prof,
                                           std::size_t f_target, double C, double p);

}  // namespace sudakov
