#include "sudakov/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace sudakov {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kSqrt6 = 2.449489742783178098197284;

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// E|X_1|^r for X uniform on the unit l_q ball of R^n.
double lq_unit_abs_moment(std::size_t n, double q, double r) {
    const double nn = static_cast<double>(n);
    const double log_m = std::log(nn / (nn + r)) + std::lgamma((r + 1.0) / q) + std::lgamma(nn / q) -
                         std::lgamma(1.0 / q) - std::lgamma((nn + r) / q);
    return std::exp(log_m);
}

}  // namespace

double gaussian_log_tail(double u) {
    const double x = u / kSqrt2;
    if (x < 25.0) return -std::log(std::erfc(x));
    // erfc(x) ~ exp(-x^2) / (x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4))
    const double x2 = x * x;
    return x2 + std::log(x * std::sqrt(std::numbers::pi)) -
           std::log1p(-1.0 / (2.0 * x2) + 3.0 / (4.0 * x2 * x2));
}

double gaussian_log_tail_slope(double u) {
    if (u < 0.0) u = 0.0;
    // G'(u) = 2 phi(u) / P(|g| >= u)
    return std::sqrt(2.0 / std::numbers::pi) * std::exp(-0.5 * u * u + gaussian_log_tail(u));
}

// ---------------------------------------------------------------- CoordinateLaw

CoordinateLaw CoordinateLaw::gaussian() { return CoordinateLaw{}; }

CoordinateLaw CoordinateLaw::symmetric_exponential(double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw ModelError("exponential rate must be positive");
    CoordinateLaw law;
    law.kind_ = CoordinateKind::symmetric_exponential;
    law.rate_ = rate;
    return law;
}

CoordinateLaw CoordinateLaw::isotropic_exponential() { return symmetric_exponential(kSqrt2); }

CoordinateLaw CoordinateLaw::rademacher() {
    CoordinateLaw law;
    law.kind_ = CoordinateKind::rademacher;
    return law;
}

CoordinateLaw CoordinateLaw::canonical_convex_tail(std::vector<TailKnot> knots, bool normalize) {
    if (knots.size() < 2) throw ModelError("tabulated tail needs at least two knots");
    if (knots.front().u != 0.0) throw ModelError("tabulated tail must start at u = 0");
    if (std::abs(knots.front().g) > 1e-12) throw ModelError("tabulated tail must have G(0) = 0");
    knots.front().g = 0.0;
    double prev_slope = 0.0;
    for (std::size_t j = 1; j < knots.size(); ++j) {
        const double du = knots[j].u - knots[j - 1].u;
        if (!(du > 0.0)) throw ModelError("tabulated tail grid must be strictly increasing");
        if (!std::isfinite(knots[j].g)) throw ModelError("tabulated tail values must be finite");
        const double slope = (knots[j].g - knots[j - 1].g) / du;
        if (slope < -1e-12) throw ModelError("tabulated tail G must be nondecreasing");
        if (slope < prev_slope - 1e-9 * std::max(1.0, std::abs(prev_slope)))
            throw ModelError("tabulated tail G must be convex (slopes nondecreasing)");
        prev_slope = std::max(prev_slope, slope);
    }
    if (!(prev_slope > 0.0)) throw ModelError("tabulated tail must end with a positive slope");
    CoordinateLaw law;
    law.kind_ = CoordinateKind::canonical_convex_tail;
    law.knots_ = std::move(knots);
    if (normalize) {
        const double sigma = law.norm(2.0);
        for (auto& k : law.knots_) k.u /= sigma;
    }
    return law;
}

CoordinateLaw CoordinateLaw::canonical_from_function(const std::function<double(double)>& g,
                                                     std::span<const double> grid, bool normalize) {
    std::vector<TailKnot> knots;
    knots.reserve(grid.size());
    for (double u : grid) knots.push_back({u, g(u)});
    return canonical_convex_tail(std::move(knots), normalize);
}

std::vector<TailSegment> CoordinateLaw::segments() const {
    switch (kind_) {
        case CoordinateKind::gaussian:
            return {};
        case CoordinateKind::symmetric_exponential:
            return {{0.0, kInf, rate_}};
        case CoordinateKind::rademacher:
            return {{0.0, 1.0, 0.0}};
        case CoordinateKind::canonical_convex_tail: {
            std::vector<TailSegment> out;
            for (std::size_t j = 1; j < knots_.size(); ++j) {
                const double slope = (knots_[j].g - knots_[j - 1].g) / (knots_[j].u - knots_[j - 1].u);
                const double s = std::max(0.0, slope);
                if (!out.empty() && std::abs(out.back().slope - s) <= 1e-12 * std::max(1.0, s))
                    out.back().end = knots_[j].u;
                else
                    out.push_back({knots_[j - 1].u, knots_[j].u, s});
            }
            out.back().end = kInf;
            return out;
        }
    }
    return {};
}

double CoordinateLaw::log_tail(double u) const {
    if (u <= 0.0) return 0.0;
    switch (kind_) {
        case CoordinateKind::gaussian:
            return gaussian_log_tail(u);
        case CoordinateKind::symmetric_exponential:
            return rate_ * u;
        case CoordinateKind::rademacher:
            return u <= 1.0 ? 0.0 : kInf;
        case CoordinateKind::canonical_convex_tail: {
            const auto it = std::upper_bound(knots_.begin(), knots_.end(), u,
                                             [](double v, const TailKnot& k) { return v < k.u; });
            std::size_t j = static_cast<std::size_t>(it - knots_.begin());
            if (j >= knots_.size()) j = knots_.size() - 1;
            const TailKnot& a = knots_[j - 1];
            const TailKnot& b = knots_[j];
            return a.g + (b.g - a.g) / (b.u - a.u) * (u - a.u);
        }
    }
    return 0.0;
}

double CoordinateLaw::tail(double u) const {
    if (u < 0.0) throw DomainError("tail level must be nonnegative");
    if (kind_ == CoordinateKind::gaussian) return std::erfc(u / kSqrt2);
    return std::exp(-log_tail(u));
}

double CoordinateLaw::abs_moment(double r) const {
    if (!(r > 0.0)) throw DomainError("moment order must be positive");
    switch (kind_) {
        case CoordinateKind::gaussian:
            return std::exp(0.5 * r * std::log(2.0) + std::lgamma(0.5 * (r + 1.0)) -
                            0.5 * std::log(std::numbers::pi));
        case CoordinateKind::symmetric_exponential:
            return std::exp(std::lgamma(r + 1.0) - r * std::log(rate_));
        case CoordinateKind::rademacher:
            return 1.0;
        case CoordinateKind::canonical_convex_tail: {
            // E|X|^r = int_0^inf r u^{r-1} exp(-G(u)) du, piecewise.
            double total = 0.0;
            for (std::size_t j = 1; j < knots_.size(); ++j) {
                const double a = knots_[j - 1].u;
                const double b = knots_[j].u;
                auto f = [&](double u) { return r * std::pow(u, r - 1.0) * std::exp(-log_tail(u)); };
                total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 8, 1e-13);
            }
            // Beyond the grid G(u) = G_L + s (u - u_L):
            // r e^{-G_L + s u_L} s^{-r} Gamma(r, s u_L)
            const TailKnot& last = knots_.back();
            const TailKnot& prev = knots_[knots_.size() - 2];
            const double s = (last.g - prev.g) / (last.u - prev.u);
            const double x = s * last.u;
            const double log_upper = std::log(boost::math::tgamma(r, x));
            total += r * std::exp(-last.g + x - r * std::log(s) + log_upper);
            return total;
        }
    }
    return 0.0;
}

double CoordinateLaw::sample(RandomSource& rng) const {
    switch (kind_) {
        case CoordinateKind::gaussian:
            return rng.gaussian();
        case CoordinateKind::symmetric_exponential:
            return rng.sign() * rng.exponential() / rate_;
        case CoordinateKind::rademacher:
            return rng.sign();
        case CoordinateKind::canonical_convex_tail: {
            const double s = rng.sign();
            const double level = rng.exponential();  // G(|X|) ~ Exp(1)
            for (std::size_t j = 1; j < knots_.size(); ++j) {
                if (level < knots_[j].g) {
                    const TailKnot& a = knots_[j - 1];
                    const TailKnot& b = knots_[j];
                    const double slope = (b.g - a.g) / (b.u - a.u);
                    return s * (a.u + (level - a.g) / slope);
                }
            }
            const TailKnot& last = knots_.back();
            const TailKnot& prev = knots_[knots_.size() - 2];
            const double slope = (last.g - prev.g) / (last.u - prev.u);
            return s * (last.u + (level - last.g) / slope);
        }
    }
    return 0.0;
}

nlohmann::json CoordinateLaw::to_json() const {
    switch (kind_) {
        case CoordinateKind::gaussian:
            return {{"kind", "gaussian"}};
        case CoordinateKind::symmetric_exponential:
            return {{"kind", "symmetric_exponential"}, {"rate", rate_}};
        case CoordinateKind::rademacher:
            return {{"kind", "rademacher"}};
        case CoordinateKind::canonical_convex_tail: {
            nlohmann::json grid = nlohmann::json::array();
            for (const auto& k : knots_) grid.push_back({k.u, k.g});
            return {{"kind", "canonical_convex_tail"}, {"grid", grid}};
        }
    }
    return {};
}

CoordinateLaw CoordinateLaw::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "gaussian") return gaussian();
    if (kind == "rademacher") return rademacher();
    if (kind == "symmetric_exponential") {
        if (j.contains("rate") && j.at("rate").is_string() && j.at("rate").get<std::string>() == "isotropic")
            return isotropic_exponential();
        return symmetric_exponential(j.value("rate", 1.0));
    }
    if (kind == "canonical_convex_tail") {
        std::vector<TailKnot> knots;
        for (const auto& k : j.at("grid")) knots.push_back({k.at(0).get<double>(), k.at(1).get<double>()});
        return canonical_convex_tail(std::move(knots), j.value("normalize", false));
    }
    throw ModelError("unknown coordinate law kind: " + kind);
}

// ---------------------------------------------------------------- VectorModel

VectorModel VectorModel::independent(std::vector<CoordinateLaw> coordinates) {
    if (coordinates.empty()) throw ModelError("model dimension must be positive");
    VectorModel m;
    m.n_ = coordinates.size();
    m.structure_ = Structure::independent;
    m.coordinates_ = std::move(coordinates);
    return m;
}

VectorModel VectorModel::iid(std::size_t n, const CoordinateLaw& law) {
    return independent(std::vector<CoordinateLaw>(n, law));
}

VectorModel VectorModel::lq_ball(std::size_t n, double q) {
    if (n == 0) throw ModelError("model dimension must be positive");
    if (!(q >= 1.0) || !std::isfinite(q)) throw ModelError("l_q ball needs 1 <= q < inf");
    VectorModel m;
    m.n_ = n;
    m.structure_ = Structure::lq_ball_uniform;
    m.q_ = q;
    m.scale_ = 1.0 / std::sqrt(lq_unit_abs_moment(n, q, 2.0));
    return m;
}

VectorModel VectorModel::gaussian_correlated(const Eigen::MatrixXd& covariance) {
    const auto n = static_cast<std::size_t>(covariance.rows());
    if (n == 0 || covariance.cols() != covariance.rows()) throw ModelError("covariance must be square");
    for (Eigen::Index i = 0; i < covariance.rows(); ++i) {
        if (std::abs(covariance(i, i) - 1.0) > 1e-12) throw ModelError("covariance must have unit diagonal");
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(covariance(i, j) - covariance(j, i)) > 1e-12)
                throw ModelError("covariance must be symmetric");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) throw ModelError("covariance is not positive definite");
    VectorModel m;
    m.n_ = n;
    m.structure_ = Structure::gaussian_correlated;
    m.covariance_ = covariance;
    m.cholesky_ = llt.matrixL();
    return m;
}

bool VectorModel::is_gaussian() const {
    if (structure_ == Structure::gaussian_correlated) return true;
    if (structure_ != Structure::independent) return false;
    return std::all_of(coordinates_.begin(), coordinates_.end(),
                       [](const CoordinateLaw& c) { return c.kind() == CoordinateKind::gaussian; });
}

double VectorModel::coordinate_abs_moment(std::size_t i, double r) const {
    if (i >= n_) throw DomainError("coordinate index out of range");
    switch (structure_) {
        case Structure::independent:
            return coordinates_[i].abs_moment(r);
        case Structure::gaussian_correlated:
            return CoordinateLaw::gaussian().abs_moment(r);
        case Structure::lq_ball_uniform:
            return std::pow(scale_, r) * lq_unit_abs_moment(n_, q_, r);
    }
    return 0.0;
}

void VectorModel::draw(RandomSource& rng, std::span<double> out) const {
    switch (structure_) {
        case Structure::independent:
            for (std::size_t i = 0; i < n_; ++i) out[i] = coordinates_[i].sample(rng);
            return;
        case Structure::lq_ball_uniform: {
            // (Y_1..Y_n) with density ~ exp(-|y|^q), W ~ Exp(1):
            // Y / (sum |Y_i|^q + W)^{1/q} is uniform on the unit l_q ball.
            double s = 0.0;
            for (std::size_t i = 0; i < n_; ++i) {
                const double g = rng.gamma(1.0 / q_);
                s += g;
                out[i] = rng.sign() * std::pow(g, 1.0 / q_);
            }
            s += rng.exponential();
            const double f = scale_ / std::pow(s, 1.0 / q_);
            for (std::size_t i = 0; i < n_; ++i) out[i] *= f;
            return;
        }
        case Structure::gaussian_correlated: {
            Eigen::VectorXd g(static_cast<Eigen::Index>(n_));
            for (std::size_t i = 0; i < n_; ++i) g[static_cast<Eigen::Index>(i)] = rng.gaussian();
            const Eigen::VectorXd x = cholesky_ * g;
            for (std::size_t i = 0; i < n_; ++i) out[i] = x[static_cast<Eigen::Index>(i)];
            return;
        }
    }
}

nlohmann::json VectorModel::to_json() const {
    nlohmann::json j;
    j["n"] = n_;
    j["seed-policy"] = "chunked-splitmix64";
    switch (structure_) {
        case Structure::independent: {
            j["structure"] = "independent";
            nlohmann::json coords = nlohmann::json::array();
            for (const auto& c : coordinates_) coords.push_back(c.to_json());
            j["params"] = {{"coordinates", coords}};
            break;
        }
        case Structure::lq_ball_uniform:
            j["structure"] = "lq_ball_uniform";
            j["params"] = {{"q", q_}, {"scale", scale_}};
            break;
        case Structure::gaussian_correlated: {
            j["structure"] = "gaussian_correlated";
            nlohmann::json rows = nlohmann::json::array();
            for (Eigen::Index r = 0; r < covariance_.rows(); ++r) {
                nlohmann::json row = nlohmann::json::array();
                for (Eigen::Index c = 0; c < covariance_.cols(); ++c) row.push_back(covariance_(r, c));
                rows.push_back(row);
            }
            j["params"] = {{"covariance", rows}};
            break;
        }
    }
    return j;
}

VectorModel VectorModel::from_json(const nlohmann::json& j) {
    const std::string structure = j.at("structure").get<std::string>();
    const nlohmann::json params = j.value("params", nlohmann::json::object());
    if (j.contains("seed-policy") && j.at("seed-policy") != "chunked-splitmix64" &&
        j.at("seed-policy") != "chunked")
        throw ModelError("unsupported seed-policy");
    if (structure == "independent") {
        const auto n = j.at("n").get<std::size_t>();
        if (params.contains("coordinates")) {
            std::vector<CoordinateLaw> coords;
            for (const auto& c : params.at("coordinates")) coords.push_back(CoordinateLaw::from_json(c));
            if (coords.size() != n) throw ModelError("coordinate list length differs from n");
            return independent(std::move(coords));
        }
        return iid(n, CoordinateLaw::from_json(params.at("coordinate")));
    }
    if (structure == "lq_ball_uniform") return lq_ball(j.at("n").get<std::size_t>(), params.at("q").get<double>());
    if (structure == "gaussian_correlated") {
        const auto& rows = params.at("covariance");
        const auto n = static_cast<Eigen::Index>(rows.size());
        if (j.contains("n") && j.at("n").get<Eigen::Index>() != n) throw ModelError("covariance size differs from n");
        Eigen::MatrixXd cov(n, n);
        for (Eigen::Index r = 0; r < n; ++r) {
            if (static_cast<Eigen::Index>(rows.at(r).size()) != n) throw ModelError("covariance must be square");
            for (Eigen::Index c = 0; c < n; ++c) cov(r, c) = rows.at(r).at(c).get<double>();
        }
        return gaussian_correlated(cov);
    }
    throw ModelError("unknown structure: " + structure);
}

std::string VectorModel::fingerprint() const {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(to_json().dump())));
    return buf;
}

// ---------------------------------------------------------------- sampling

void for_each_sample_chunk(const VectorModel& model, std::size_t m, std::uint64_t seed,
                           const std::function<void(std::size_t, std::size_t, std::span<const double>)>& fn) {
    const std::size_t n = model.dim();
    parallel_for(chunk_count(m), [&](std::size_t c) {
        const std::size_t first = c * kChunkRows;
        const std::size_t rows = std::min(kChunkRows, m - first);
        std::vector<double> block(rows * n);
        RandomSource rng(derive_seed(seed, c));
        for (std::size_t r = 0; r < rows; ++r) model.draw(rng, {block.data() + r * n, n});
        fn(c, first, block);
    });
}

SampleBatch sample(const VectorModel& model, std::size_t m, std::uint64_t seed) {
    if (m == 0) throw DomainError("sample count must be positive");
    SampleBatch batch;
    batch.rows = m;
    batch.cols = model.dim();
    batch.seed = seed;
    batch.fingerprint = model.fingerprint();
    batch.data.resize(m * model.dim());
    for_each_sample_chunk(model, m, seed, [&](std::size_t, std::size_t first, std::span<const double> block) {
        std::copy(block.begin(), block.end(), batch.data.begin() + static_cast<std::ptrdiff_t>(first * batch.cols));
    });
    return batch;
}

// ---------------------------------------------------------------- tails

void to_json(nlohmann::json& j, const Probability& pr) {
    j = {{"value", pr.value}, {"method", pr.analytic ? "analytic" : "monte_carlo"}};
    if (pr.ci) j["ci"] = *pr.ci;
    if (!pr.analytic) j["samples"] = pr.samples;
}

namespace {

Probability mc_fraction(const VectorModel& model, const McOptions& mc,
                        const std::function<bool(std::span<const double>)>& hit) {
    if (mc.budget == 0) throw DomainError("Monte-Carlo budget must be positive");
    const std::size_t n = model.dim();
    std::vector<std::size_t> counts(chunk_count(mc.budget), 0);
    for_each_sample_chunk(model, mc.budget, mc.seed, [&](std::size_t c, std::size_t, std::span<const double> block) {
        std::size_t k = 0;
        for (std::size_t r = 0; r * n < block.size(); ++r)
            if (hit(block.subspan(r * n, n))) ++k;
        counts[c] = k;
    });
    std::size_t total = 0;
    for (auto k : counts) total += k;
    Probability pr;
    pr.value = static_cast<double>(total) / static_cast<double>(mc.budget);
    pr.ci = wilson_interval(total, mc.budget);
    pr.analytic = false;
    pr.samples = mc.budget;
    return pr;
}

}  // namespace

Probability coord_tail(const VectorModel& model, std::size_t i, double u, const McOptions& mc) {
    if (u < 0.0) throw DomainError("tail level must be nonnegative");
    if (i >= model.dim()) throw DomainError("coordinate index out of range");
    if (u == 0.0) return {1.0, std::nullopt, true, 0};
    if (model.is_independent()) return {model.coordinate(i).tail(u), std::nullopt, true, 0};
    if (model.structure() == Structure::gaussian_correlated)
        return {CoordinateLaw::gaussian().tail(u), std::nullopt, true, 0};
    return mc_fraction(model, mc, [&](std::span<const double> x) { return std::abs(x[i]) >= u; });
}

double coord_moment(const VectorModel& model, std::size_t i, double r) {
    if (!(r >= 1.0)) throw DomainError("moment order must be at least 1");
    return std::pow(model.coordinate_abs_moment(i, r), 1.0 / r);
}

Probability joint_tail(const VectorModel& model, std::span<const double> a, const McOptions& mc) {
    if (a.size() != model.dim()) throw DomainError("level vector has wrong dimension");
    IndexSet active;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0.0 || std::isnan(a[i])) throw DomainError("levels must be nonnegative");
        if (a[i] > 0.0) active.push_back(static_cast<int>(i));
    }
    if (active.empty()) return {1.0, std::nullopt, true, 0};
    if (model.is_independent()) {
        double log_p = 0.0;
        for (int i : active) log_p -= model.coordinate(static_cast<std::size_t>(i)).log_tail(a[static_cast<std::size_t>(i)]);
        return {std::exp(log_p), std::nullopt, true, 0};
    }
    if (active.size() == 1) return coord_tail(model, static_cast<std::size_t>(active[0]), a[static_cast<std::size_t>(active[0])], mc);
    return mc_fraction(model, mc, [&](std::span<const double> x) {
        for (int i : active)
            if (std::abs(x[static_cast<std::size_t>(i)]) < a[static_cast<std::size_t>(i)]) return false;
        return true;
    });
}

void to_json(nlohmann::json& j, const BobkovNazarovReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"u", row.u}, {"lhs", row.lhs}, {"rhs", row.rhs}, {"margin", row.margin}});
    j = {{"rows", rows}, {"worst_margin", r.worst_margin}, {"holds", r.holds}};
}

BobkovNazarovReport bobkov_nazarov_check(const VectorModel& model, const std::vector<Vector>& levels,
                                         const McOptions& mc) {
    BobkovNazarovReport report;
    report.worst_margin = kInf;
    for (std::size_t k = 0; k < levels.size(); ++k) {
        const Vector& u = levels[k];
        if (u.size() != model.dim()) throw DomainError("level vector has wrong dimension");
        Vector a(u.size());
        double sum = 0.0;
        for (std::size_t i = 0; i < u.size(); ++i) {
            if (u[i] < 0.0) throw DomainError("levels must be nonnegative");
            a[i] = kSqrt6 * u[i];
            sum += u[i];
        }
        BobkovNazarovRow row;
        row.u = u;
        row.lhs = joint_tail(model, a, {mc.budget, derive_seed(mc.seed, k)});
        row.rhs = std::exp(-sum);
        row.margin = row.rhs - row.lhs.upper();
        report.worst_margin = std::min(report.worst_margin, row.margin);
        report.rows.push_back(std::move(row));
    }
    if (levels.empty()) report.worst_margin = 0.0;
    report.holds = report.worst_margin >= 0.0;
    return report;
}

IsotropyReport isotropy_check(const VectorModel& model, std::size_t m, std::uint64_t seed) {
    const std::size_t n = model.dim();
    const std::size_t chunks = chunk_count(m);
    std::vector<std::vector<double>> sums(chunks, std::vector<double>(n + n * n, 0.0));
    for_each_sample_chunk(model, m, seed, [&](std::size_t c, std::size_t, std::span<const double> block) {
        auto& s = sums[c];
        for (std::size_t r = 0; r * n < block.size(); ++r) {
            const double* x = block.data() + r * n;
            for (std::size_t i = 0; i < n; ++i) {
                s[i] += x[i];
                for (std::size_t j = 0; j < n; ++j) s[n + i * n + j] += x[i] * x[j];
            }
        }
    });
    std::vector<double> total(n + n * n, 0.0);
    for (const auto& s : sums)
        for (std::size_t k = 0; k < total.size(); ++k) total[k] += s[k];
    IsotropyReport rep;
    rep.samples = m;
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t i = 0; i < n; ++i) {
        rep.max_mean_deviation = std::max(rep.max_mean_deviation, std::abs(total[i] * inv));
        for (std::size_t j = 0; j < n; ++j) {
            const double target = i == j ? 1.0 : 0.0;
            rep.max_covariance_deviation =
                std::max(rep.max_covariance_deviation, std::abs(total[n + i * n + j] * inv - target));
        }
    }
    return rep;
}

std::vector<std::pair<std::string, VectorModel>> builtin_models(std::size_t n) {
    std::vector<double> grid;
    for (int k = 0; k <= 48; ++k) grid.push_back(0.25 * k);
    const auto canonical =
        CoordinateLaw::canonical_from_function([](double u) { return std::pow(u, 1.5); }, grid, true);
    std::vector<CoordinateLaw> mixed;
    const CoordinateLaw cycle[] = {CoordinateLaw::gaussian(), CoordinateLaw::isotropic_exponential(), canonical,
                                   CoordinateLaw::rademacher()};
    for (std::size_t i = 0; i < n; ++i) mixed.push_back(cycle[i % 4]);
    return {
        {"gaussian_iid", VectorModel::iid(n, CoordinateLaw::gaussian())},
        {"exponential_iid", VectorModel::iid(n, CoordinateLaw::isotropic_exponential())},
        {"rademacher_iid", VectorModel::iid(n, CoordinateLaw::rademacher())},
        {"canonical_iid", VectorModel::iid(n, canonical)},
        {"mixed_independent", VectorModel::independent(std::move(mixed))},
        {"lq_ball_q1", VectorModel::lq_ball(n, 1.0)},
        {"lq_ball_q2", VectorModel::lq_ball(n, 2.0)},
        {"lq_ball_q4", VectorModel::lq_ball(n, 4.0)},
    };
}

}  // namespace sudakov
