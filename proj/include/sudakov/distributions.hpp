#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "sudakov/common.hpp"
#include "sudakov/rng.hpp"
#include "sudakov/stats.hpp"

namespace sudakov {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class CoordinateKind { gaussian, symmetric_exponential, canonical_convex_tail, rademacher };

/// One knot (u, G(u)) of a tabulated log-tail G(u) = -log P(|X_i| >= u).
struct TailKnot {
    double u = 0.0;
    double g = 0.0;
};

/// Piece of a piecewise-linear log-tail: G has slope `slope` on [start, end).
struct TailSegment {
    double start = 0.0;
    double end = kInf;
    double slope = 0.0;
};

/// Law of a single symmetric coordinate, stored as a magnitude law plus an
/// independent sign so that symmetry holds structurally.
class CoordinateLaw {
public:
    static CoordinateLaw gaussian();
    static CoordinateLaw symmetric_exponential(double rate);
    /// Symmetric exponential with unit variance (rate sqrt 2).
    static CoordinateLaw isotropic_exponential();
    static CoordinateLaw rademacher();
    /// Tabulated convex log-tail. G is linear between knots and continues with
    /// the last slope beyond the grid. With `normalize` the grid is rescaled so
    /// that E X_i^2 = 1.
    static CoordinateLaw canonical_convex_tail(std::vector<TailKnot> knots, bool normalize = false);
    /// Tabulates g on the given grid (first point must be 0).
    static CoordinateLaw canonical_from_function(const std::function<double(double)>& g,
                                                 std::span<const double> grid, bool normalize);

    CoordinateKind kind() const { return kind_; }
    double rate() const { return rate_; }
    const std::vector<TailKnot>& knots() const { return knots_; }

    /// P(|X| >= u).
    double tail(double u) const;
    /// G(u) = -log P(|X| >= u); +inf beyond the support.
    double log_tail(double u) const;
    /// E|X|^r for r > 0.
    double abs_moment(double r) const;
    /// ||X||_r = (E|X|^r)^{1/r}.
    double norm(double r) const { return std::pow(abs_moment(r), 1.0 / r); }
    /// Right end of the support of |X|.
    double upper_endpoint() const { return kind_ == CoordinateKind::rademacher ? 1.0 : kInf; }

    bool is_piecewise_linear() const { return kind_ != CoordinateKind::gaussian; }
    /// Linear pieces of G on [0, upper_endpoint()); empty for the gaussian law.
    std::vector<TailSegment> segments() const;

    double sample(RandomSource& rng) const;

    nlohmann::json to_json() const;
    static CoordinateLaw from_json(const nlohmann::json& j);

private:
    CoordinateKind kind_ = CoordinateKind::gaussian;
    double rate_ = 1.0;
    std::vector<TailKnot> knots_;
};

/// Derivative of G(u) = -log P(|g| >= u) for a standard gaussian g.
double gaussian_log_tail_slope(double u);
double gaussian_log_tail(double u);

enum class Structure { independent, lq_ball_uniform, gaussian_correlated };

/// Law of X in R^n.
class VectorModel {
public:
    static VectorModel independent(std::vector<CoordinateLaw> coordinates);
    static VectorModel iid(std::size_t n, const CoordinateLaw& law);
    /// Uniform on a dilate of the l_q unit ball, radius chosen so that
    /// E X_1^2 = 1.
    static VectorModel lq_ball(std::size_t n, double q);
    /// Centered gaussian with the given covariance (unit diagonal required).
    static VectorModel gaussian_correlated(const Eigen::MatrixXd& covariance);

    std::size_t dim() const { return n_; }
    Structure structure() const { return structure_; }
    bool is_independent() const { return structure_ == Structure::independent; }
    /// Every linear form is gaussian (iid gaussian coordinates or correlated).
    bool is_gaussian() const;
    const CoordinateLaw& coordinate(std::size_t i) const { return coordinates_.at(i); }
    const std::vector<CoordinateLaw>& coordinates() const { return coordinates_; }
    double lq_exponent() const { return q_; }
    double lq_scale() const { return scale_; }
    const Eigen::MatrixXd& covariance() const { return covariance_; }

    /// E|X_i|^r by closed form or quadrature (available for every structure).
    double coordinate_abs_moment(std::size_t i, double r) const;

    void draw(RandomSource& rng, std::span<double> out) const;

    nlohmann::json to_json() const;
    static VectorModel from_json(const nlohmann::json& j);
    /// Stable hash (hex) of the canonical JSON serialization.
    std::string fingerprint() const;

private:
    std::size_t n_ = 0;
    Structure structure_ = Structure::independent;
    std::vector<CoordinateLaw> coordinates_;
    double q_ = 2.0;
    double scale_ = 1.0;
    Eigen::MatrixXd covariance_;
    Eigen::MatrixXd cholesky_;
};

/// m x n matrix of draws, row-major.
struct SampleBatch {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;
    std::uint64_t seed = 0;
    std::string fingerprint;

    std::span<const double> row(std::size_t i) const { return {data.data() + i * cols, cols}; }
    std::span<double> row(std::size_t i) { return {data.data() + i * cols, cols}; }
};

/// Draws m rows. Rows [c*kChunkRows, (c+1)*kChunkRows) come from stream
/// derive_seed(seed, c), so the batch is a function of (model, m, seed) only.
SampleBatch sample(const VectorModel& model, std::size_t m, std::uint64_t seed);

/// Streams the same rows as sample() chunk by chunk (possibly in parallel).
/// fn(chunk, first_row, rows) receives a rows x n row-major block.
void for_each_sample_chunk(const VectorModel& model, std::size_t m, std::uint64_t seed,
                           const std::function<void(std::size_t, std::size_t, std::span<const double>)>& fn);

inline std::size_t chunk_count(std::size_t m) { return (m + kChunkRows - 1) / kChunkRows; }

struct Probability {
    double value = 0.0;
    std::optional<Interval> ci;
    bool analytic = true;
    std::size_t samples = 0;

    /// Lower end of the interval (the value itself when exact).
    double lower() const { return ci ? ci->lo : value; }
    double upper() const { return ci ? ci->hi : value; }
};

void to_json(nlohmann::json& j, const Probability& pr);

/// P(|X_i| >= u); closed form for independent and gaussian structures,
/// Monte-Carlo with a Wilson interval otherwise.
Probability coord_tail(const VectorModel& model, std::size_t i, double u, const McOptions& mc = {});

/// ||X_i||_r.
double coord_moment(const VectorModel& model, std::size_t i, double r);

/// P(|X_i| >= a_i for all i with a_i > 0).
Probability joint_tail(const VectorModel& model, std::span<const double> a, const McOptions& mc = {});

struct BobkovNazarovRow {
    Vector u;
    Probability lhs;  // P(|X_i| >= sqrt6 u_i for all i)
    double rhs = 1.0; // exp(-sum u_i)
    double margin = 0.0;  // rhs - conservative upper end of lhs
};

struct BobkovNazarovReport {
    std::vector<BobkovNazarovRow> rows;
    double worst_margin = 0.0;
    bool holds = true;
};

void to_json(nlohmann::json& j, const BobkovNazarovReport& r);

BobkovNazarovReport bobkov_nazarov_check(const VectorModel& model, const std::vector<Vector>& levels,
                                         const McOptions& mc = {});

struct IsotropyReport {
    double max_mean_deviation = 0.0;
    double max_covariance_deviation = 0.0;
    std::size_t samples = 0;
};

IsotropyReport isotropy_check(const VectorModel& model, std::size_t m, std::uint64_t seed);

/// The named built-in isotropic, one-unconditional models of dimension n.
std::vector<std::pair<std::string, VectorModel>> builtin_models(std::size_t n);

}  // namespace sudakov
