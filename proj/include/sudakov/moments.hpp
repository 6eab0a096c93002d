#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "sudakov/distributions.hpp"
#include "sudakov/point_set.hpp"

namespace sudakov {

enum class MomentMethod { analytic, quadrature, monte_carlo };

const char* to_string(MomentMethod m);

struct MomentEstimate {
    double value = 0.0;
    MomentMethod method = MomentMethod::analytic;
    std::optional<Interval> ci;
    double p = 1.0;
    std::optional<std::size_t> samples;
    /// t = 0: the value is 0 by convention.
    bool degenerate = false;

    double lower() const { return ci ? ci->lo : value; }
    double upper() const { return ci ? ci->hi : value; }
};

void to_json(nlohmann::json& j, const MomentEstimate& m);

/// Largest p accepted on Monte-Carlo paths.
inline constexpr double kMaxMonteCarloP = 16.0;
/// Largest support for exhaustive sign enumeration.
inline constexpr std::size_t kMaxEnumerationSupport = 20;

/// ||g||_p for a standard gaussian g.
double gaussian_pnorm(double p);

/// Evaluates ||<t, X>||_p for many t against one model, sharing a single
/// Monte-Carlo batch (drawn lazily) and a cache of coordinate moments.
class PnormEvaluator {
public:
    PnormEvaluator(const VectorModel& model, double p, McOptions mc = {});

    /// `with_ci = false` skips the bootstrap on Monte-Carlo paths.
    MomentEstimate operator()(std::span<const double> t, bool with_ci = true);
    /// Sparse form: only coordinates idx[j] carry weight w[j].
    MomentEstimate sparse(const IndexSet& idx, std::span<const double> w, bool with_ci = true);

    const VectorModel& model() const { return *model_; }
    double p() const { return p_; }

private:
    const VectorModel* model_;
    double p_;
    McOptions mc_;
    std::unique_ptr<SampleBatch> batch_;
    std::map<std::size_t, std::vector<double>> even_moments_;  // coordinate -> E X_i^{2k}, k = 0..p/2

    const std::vector<double>& even_moments(std::size_t i);
    MomentEstimate monte_carlo(const IndexSet& idx, std::span<const double> w, bool with_ci);
};

/// ||<t, X>||_p by the fastest valid method.
MomentEstimate pnorm_linear_form(const VectorModel& model, std::span<const double> t, double p,
                                 const McOptions& mc = {});

/// Exact ||sum t_i eps_i||_p over all sign patterns (support <= 20).
double bernoulli_pnorm_exact(std::span<const double> t, double p);

/// Two-term rearrangement formula sum_{i<=p} |t*_i| + sqrt(p) (sum_{i>p} |t*_i|^2)^{1/2}.
double hitczenko_norm(std::span<const double> t, double p);

/// hitczenko_norm(t - s, p).
double dp_metric(std::span<const double> t, std::span<const double> s, double p);

struct BernoulliDistance {
    double value = 0.0;
    bool exact = true;  // false: support of t - s exceeded the enumeration limit, formula used
};

/// ||sum (t_i - s_i) eps_i||_p by sign enumeration, or the formula when the
/// difference has more than 20 nonzero entries.
BernoulliDistance bernoulli_distance(std::span<const double> t, std::span<const double> s, double p);

/// p ||t||_inf + sqrt(p) ||t||_2.
double gluskin_kwapien_bound(std::span<const double> t, double p);

/// Monte-Carlo E max_t X_t and E max_t |X_t| over a family.
struct SupEstimate {
    double max_mean = 0.0;
    Interval max_ci;
    double absmax_mean = 0.0;
    Interval absmax_ci;
    std::size_t samples = 0;
};

void to_json(nlohmann::json& j, const SupEstimate& s);

SupEstimate estimate_sup(const VectorModel& model, const PointSet& T, const McOptions& mc = {});
/// Same statistic over arbitrary sparse linear forms.
SupEstimate estimate_sup_forms(const VectorModel& model, const std::vector<SparsePoint>& forms,
                               const McOptions& mc = {});

struct TrivialBoundReport {
    bool precondition_ok = true;
    std::string note;
    double A = 0.0;
    double emax = 0.0;
    Interval emax_ci;
    double bound = 0.0;   // e A
    double margin = 0.0;  // bound - upper CI end of E max
    bool holds = true;
};

void to_json(nlohmann::json& j, const TrivialBoundReport& r);

/// Checks E max_T X_t <= e A with A = max_t ||X_t||_p (computed unless given).
TrivialBoundReport trivial_upper_bound(const VectorModel& model, const PointSet& T, double p,
                                       std::optional<double> A = {}, const McOptions& mc = {});

struct OverlapReport {
    double statistic = 0.0;  // E sup_{s,t} |sum_{I(t) cap I(s)} (t_i - s_i) X_i|
    Interval ci;
    double p = 1.0;
    double D = 1.0;
    double implied_D = kInf;  // p / statistic
    bool holds = true;        // statistic (upper end) <= p / D
    std::size_t pairs_with_overlap = 0;
};

void to_json(nlohmann::json& j, const OverlapReport& r);

OverlapReport overlap_bound_check(const VectorModel& model, const PointSet& T, double p, double D = 1.0,
                                  const McOptions& mc = {});

}  // namespace sudakov
