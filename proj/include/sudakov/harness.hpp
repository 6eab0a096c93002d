#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sudakov/combinatorics.hpp"
#include "sudakov/distributions.hpp"
#include "sudakov/moments.hpp"
#include "sudakov/point_set.hpp"
#include "sudakov/reduction.hpp"
#include "sudakov/witness.hpp"

namespace sudakov {

/// Cardinality regime f(p): the family is "large" when log|T| >= f(p).
enum class Regime { p, Cp, Cp_log, Cp2 };

struct CardinalityTarget {
    Regime regime = Regime::p;
    double C = 1.0;

    double f(double p) const;
    static CardinalityTarget parse(const std::string& tag, double C = 1.0);
    std::string tag() const;
};

/// E max_t X_t and E max_t |X_t| with bootstrap intervals.
SupEstimate esup_estimate(const VectorModel& model, const PointSet& T, const McOptions& mc = {});

struct MinorationReport {
    double p = 0.0;
    bool degenerate = false;
    double A = kInf;        // min pairwise ||X_t - X_s||_p, conservative end
    double A_point = kInf;  // same, point estimate
    std::optional<std::pair<std::size_t, std::size_t>> A_pair;
    SupEstimate esup;
    double K = kInf;      // A / E sup X_t
    double K_abs = kInf;  // A / E sup |X_t|
    std::size_t cardinality = 0;
    CardinalityTarget target;
    double f_value = 0.0;
    bool cardinality_met = false;
    // E max X_t <= e A_max when |T| <= e^p.
    bool trivial_bound_applicable = false;
    bool trivial_bound_holds = true;
    double A_max = 0.0;
    // E sup |X_t| >= E sup X_t >= E sup |X_t| / 2 for families containing 0.
    bool symmetry_applicable = false;
    bool symmetry_holds = true;
    std::vector<std::string> flags;
    nlohmann::json diagnostics;
};

void to_json(nlohmann::json& j, const MinorationReport& r);

MinorationReport minoration_report(const VectorModel& model, const PointSet& T, double p, const McOptions& mc = {},
                                   CardinalityTarget target = {});

struct LatalaReport {
    bool precondition_ok = false;
    std::string note;
    bool vacuous = false;
    double q = 0.0;
    double min_pair_sum = kInf;  // min over ordered pairs of sum_{I(t)\I(s)} r_i v_i
    std::size_t cardinality = 0;
    double esup = 0.0;  // E sup_t |sum_{I(t)} v_i Y_i|
    Interval ci;
    double bound = 0.0;  // q / 8
    bool holds = false;  // lower CI end >= q / 8
    std::size_t samples = 0;
};

void to_json(nlohmann::json& j, const LatalaReport& r);

/// Y_i symmetric with P(|Y_i| > u) = e^{-u} on [0, r_i] (|Y_i| = min(E, r_i)).
LatalaReport latala_minoration_check(const Vector& r, const Vector& v, const std::vector<IndexSet>& supports, double q,
                                     const McOptions& mc = {});

struct BernoulliComparisonReport {
    double C_grid = 0.0;  // max_i sup_u P(|eta_i| >= u) / P(|xi_i| >= u) on the grid
    double C = 0.0;       // constant used
    bool hypothesis_ok = false;
    double esup_dominating = 0.0;  // E sup |sum t_i xi_i|
    Interval ci_dominating;
    double esup_dominated = 0.0;   // E sup |sum t_i eta_i|
    Interval ci_dominated;
    bool holds = false;  // C * upper(xi) >= lower(eta)
};

void to_json(nlohmann::json& j, const BernoulliComparisonReport& r);

BernoulliComparisonReport bernoulli_comparison_check(const VectorModel& dominating, const VectorModel& dominated,
                                                     const PointSet& T, std::optional<double> C = {},
                                                     const McOptions& mc = {});

struct IndependentEntriesReport {
    ReductionReport reduction;
    std::optional<RProfile> profile;
    double lemma_bound = 0.0;  // gamma p
    double lemma_min = kInf;   // min over separated pairs of sum_{xor} r_i 1_{r_i > 2}
    bool lemma_ok = false;
    std::optional<LatalaReport> latala;
    std::optional<MinorationReport> minoration;
    std::vector<std::string> flags;
};

void to_json(nlohmann::json& j, const IndependentEntriesReport& r);

IndependentEntriesReport independent_entries_experiment(const VectorModel& model, const PointSet& T_raw, double p,
                                                        const McOptions& mc = {}, const ReductionOptions& red = {});

struct DisjointSupportReport {
    bool disjoint = false;
    bool contains_origin = false;
    bool norms_ok = false;      // ||X_t||_p >= p (lower end) for t != 0
    double min_norm = kInf;
    bool cardinality_ok = false;  // |T| >= exp(C p)
    MinorationReport minoration;
    // Level-crossing diagnostics.
    double level = 0.0;  // common level L with P(|X_t| >= L) >= 2 e^{-p} for every t
    std::size_t N = 0;
    double n0 = 0.0;  // e^{-p} N
    double mean_M_over_N = 0.0;
    Interval mean_M_over_N_ci;
    double prob_M_gt_n0 = 0.0;
    Interval prob_M_gt_n0_ci;
    bool crossing_ok = false;  // E M / N >= 2 e^{-p} within CI
    bool tail_ok = false;      // P(M > n0) >= e^{-p} within CI
    std::vector<std::size_t> histogram;  // counts of M = 0, 1, ...
    std::vector<std::string> flags;
};

void to_json(nlohmann::json& j, const DisjointSupportReport& r);

DisjointSupportReport disjoint_support_experiment(const VectorModel& model, const PointSet& T, double p, double C_mult,
                                                  const McOptions& mc = {});

struct CommonWitnessEntry {
    std::size_t point = 0;
    std::size_t neighbors = 0;
    std::optional<Witness> witness;
    bool feasible = false;
    double value_ratio = 0.0;  // witness value / p
    // Domination of supports.
    double epsilon = 0.0;          // 1 - max_s ||overlap|| / ||full||
    double min_norm = 0.0;         // || min_s |sum_{I(t)\I(s)} w_i X_i| ||_p
    double domination_bound = 0.0; // (1 - (1 - eps) |S(t)|^{1/p}) ||full||
    bool domination_ok = true;
    std::string note;
};

struct CommonWitnessReport {
    NeighborReport neighbors;
    std::vector<CommonWitnessEntry> entries;
    double statistic = 0.0;  // E sup_t sup_{s in S(t)} |X_t 1_{I(t)\I(s)}|
    Interval ci;
    double K = kInf;  // p / statistic
    double C4 = 0.0;  // max_t p / value
    bool all_feasible = true;
    bool domination_ok = true;
    std::vector<std::string> flags;
};

void to_json(nlohmann::json& j, const CommonWitnessReport& r);

CommonWitnessReport common_witness_experiment(const VectorModel& model, const PointSet& T, double p,
                                              const McOptions& mc = {});

/// Set B for the concentration probe.
struct ProbeSet {
    enum class Kind { halfspace, box, whole } kind = Kind::whole;
    Vector normal;   // halfspace {x : <normal, x> <= offset}
    double offset = 0.0;
    Vector lower;    // box, +-inf allowed
    Vector upper;

    static ProbeSet from_json(const nlohmann::json& j, std::size_t n);
    nlohmann::json to_json() const;
    double distance(std::span<const double> x) const;
};

struct ConcentrationRow {
    double beta = 0.0;
    bool passes = false;
    double worst_margin = kInf;  // min_u (P lower end - (1 - e^{-u}))
};

struct ConcentrationReport {
    Probability base;  // P(X in B)
    bool precondition_ok = false;
    bool analytic = false;
    std::vector<double> u_grid;        // levels actually checked
    std::vector<double> u_unresolved;  // Monte-Carlo levels with e^{-u} below ~10 / budget, skipped
    std::vector<ConcentrationRow> rows;
    std::optional<double> beta;  // smallest passing beta on the grid
    double envelope = 0.0;       // log n
};

void to_json(nlohmann::json& j, const ConcentrationReport& r);

ConcentrationReport exp_concentration_probe(const VectorModel& model, const ProbeSet& B, const Vector& u_grid,
                                            const Vector& beta_grid, const McOptions& mc = {});

}  // namespace sudakov
