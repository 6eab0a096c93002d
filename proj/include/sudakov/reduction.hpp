#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sudakov/distributions.hpp"
#include "sudakov/moments.hpp"
#include "sudakov/point_set.hpp"

namespace sudakov {

enum class DistanceKind { hitczenko, exact_bernoulli };

/// Pairwise d_p on a family. exact_bernoulli falls back to the formula for
/// differences with more than 20 nonzero entries (`all_exact` turns false).
struct DistanceMatrix {
    std::vector<std::vector<double>> d;
    bool all_exact = true;
};

DistanceMatrix pairwise_distances(const PointSet& T, DistanceKind metric, double p);

struct CoveringResult {
    std::size_t cover = 0;    // greedy covering (upper bound on N)
    std::size_t packing = 0;  // 2u-separated packing (lower bound on N)
    std::vector<std::size_t> centers;
    bool exact_metric = true;
};

void to_json(nlohmann::json& j, const CoveringResult& c);

/// Bounds on N(T, d_p, u): greedy cover by T-centred balls and a farthest-point
/// packing seeded from the diameter pair.
CoveringResult covering_number(const PointSet& T, DistanceKind metric, double u, double p);
CoveringResult covering_number(const DistanceMatrix& dm, double u);

enum class TranslationOutcome { translated, bernoulli_sudakov };

struct TranslationResult {
    TranslationOutcome outcome = TranslationOutcome::translated;
    PointSet cell;  // {t - t0 : d_p(t, t0) <= delta p}, origin first
    std::size_t center = 0;
    CoveringResult covering;
    bool cardinality_ok = true;  // |cell| >= |T| exp(-p/4)
    std::vector<std::string> warnings;
};

TranslationResult translate_to_dense_cell(const PointSet& T, double p, double delta,
                                          DistanceKind metric = DistanceKind::exact_bernoulli);

/// Solves rho / log(1/rho) = 4 C0 delta on (0, 1/e]; returns 1/e when the
/// right side exceeds 1/e.
double rho_from_delta(double delta, double C0 = 4.0);

struct RoundingResult {
    PointSet family;  // sign-normalized sub-family, lattice attached
    LatticeSpec lattice;
    std::vector<std::size_t> kept;  // indices into the input
    bool cardinality_ok = true;     // |T_x| >= |T| exp(-p/2)
    std::size_t candidates = 0;
    std::vector<std::string> warnings;
};

/// Searches centres x (the points of T, a per-coordinate consensus centre, then
/// draws from the product Laplace measure) for the largest T_x = {t : t_i in (x_i - rho, x_i + rho) or |t_i| < rho}.
RoundingResult lattice_round(const PointSet& T, double p, double delta, std::size_t trials, std::uint64_t seed,
                             double C0 = 4.0);

enum class Variant { A, B };

/// A: t_i -> 0 if |t_i| < rho, k_i otherwise.  B: t_i -> sign(t_i)(|t_i| - rho)_+.
PointSet threshold_phi(const PointSet& T, const LatticeSpec& lattice, Variant variant);

/// Exact membership of every point in the given simplified form.
bool in_simplified_form(const PointSet& T, const LatticeSpec& lattice, Variant variant);

struct SimplifiedFormReport {
    bool form_ok = false;
    bool support_size_ok = false;
    double support_limit = 0.0;  // c p
    std::size_t max_support = 0;
    bool distinct_supports_ok = false;
    std::vector<std::pair<std::size_t, std::size_t>> duplicate_supports;
    bool budget_ok = false;
    double max_budget = 0.0;
    double budget_limit = 0.0;  // 2 C0 delta p
    bool separation_ok = false;
    double min_separation = kInf;  // conservative end
    std::optional<std::pair<std::size_t, std::size_t>> closest_pair;
    bool sandwich_ok = false;
    double sandwich_min = kInf;  // min ||X_t - X_s|| / ||sum_{I(t) xor I(s)} k_i 1_{k_i>4rho} X_i||
    double sandwich_max = 0.0;
    std::size_t pairs = 0;

    bool all_ok() const { return form_ok && support_size_ok && distinct_supports_ok && budget_ok && separation_ok && sandwich_ok; }
};

void to_json(nlohmann::json& j, const SimplifiedFormReport& r);

SimplifiedFormReport verify_simplified_form(const VectorModel& model, const PointSet& T, double p, Variant variant,
                                            double C0 = 4.0, const McOptions& mc = {});

struct ReductionOptions {
    double delta = 0.01;
    double C0 = 4.0;
    std::size_t trials = 10000;
    Variant variant = Variant::A;
    DistanceKind metric = DistanceKind::exact_bernoulli;
    std::uint64_t seed = 0;
    McOptions mc{20000, 0};
};

enum class ReductionOutcome { simplified, bernoulli_sudakov, degenerate };

struct ReductionReport {
    ReductionOutcome outcome = ReductionOutcome::simplified;
    std::vector<std::size_t> cardinality;  // input, translated, rounded, thresholded
    double separation_before = kInf;       // min pairwise ||X_t - X_s||_p of the input
    double separation_after = kInf;        // conservative end on the output
    double rho = 0.0;
    double delta = 0.0;
    double C0 = 0.0;
    CoveringResult covering;
    bool cardinality_ok = true;            // |output| >= |input| exp(-3p/4)
    std::size_t merged_duplicates = 0;
    std::vector<std::string> warnings;
    PointSet output;
    std::optional<SimplifiedFormReport> verification;
};

void to_json(nlohmann::json& j, const ReductionReport& r);

/// Minimum pairwise ||X_t - X_s||_p with the pair attaining it; `conservative`
/// uses the lower CI end on Monte-Carlo paths.
struct SeparationResult {
    double value = kInf;  // conservative end when requested
    double point = kInf;  // point estimate of the same minimum
    std::optional<std::pair<std::size_t, std::size_t>> pair;
    std::size_t pairs = 0;
};

SeparationResult min_separation(const VectorModel& model, const PointSet& T, double p, bool conservative,
                                const McOptions& mc = {});

/// translate -> round -> threshold, with verification of the output.
ReductionReport reduce(const VectorModel& model, const PointSet& T, double p, const ReductionOptions& opt = {});

}  // namespace sudakov
