#include "sudakov/moments.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>

namespace sudakov {

const char* to_string(MomentMethod m) {
    switch (m) {
        case MomentMethod::analytic: return "analytic";
        case MomentMethod::quadrature: return "quadrature";
        case MomentMethod::monte_carlo: return "monte_carlo";
    }
    return "";
}

void to_json(nlohmann::json& j, const MomentEstimate& m) {
    j = {{"value", m.value}, {"method", to_string(m.method)}, {"p", m.p}};
    j["ci"] = m.ci ? nlohmann::json(*m.ci) : nlohmann::json(nullptr);
    j["samples"] = m.samples ? nlohmann::json(*m.samples) : nlohmann::json(nullptr);
    if (m.degenerate) j["degenerate"] = true;
}

double gaussian_pnorm(double p) {
    return std::numbers::sqrt2 *
           std::exp((std::lgamma(0.5 * (p + 1.0)) - 0.5 * std::log(std::numbers::pi)) / p);
}

namespace {

void check_order(double p) {
    if (!(p >= 1.0) || !std::isfinite(p)) throw DomainError("moment order p must be >= 1");
}

bool is_even_integer(double p) { return p == std::round(p) && static_cast<long>(p) % 2 == 0; }

}  // namespace

PnormEvaluator::PnormEvaluator(const VectorModel& model, double p, McOptions mc)
    : model_(&model), p_(p), mc_(mc) {
    check_order(p);
}

const std::vector<double>& PnormEvaluator::even_moments(std::size_t i) {
    auto it = even_moments_.find(i);
    if (it != even_moments_.end()) return it->second;
    const auto half = static_cast<std::size_t>(p_ / 2);
    std::vector<double> mom(half + 1, 1.0);
    for (std::size_t k = 1; k <= half; ++k) mom[k] = model_->coordinate_abs_moment(i, 2.0 * static_cast<double>(k));
    return even_moments_.emplace(i, std::move(mom)).first->second;
}

MomentEstimate PnormEvaluator::operator()(std::span<const double> t, bool with_ci) {
    if (t.size() != model_->dim()) throw DomainError("vector has wrong dimension");
    IndexSet idx;
    Vector w;
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i] != 0.0) {
            idx.push_back(static_cast<int>(i));
            w.push_back(t[i]);
        }
    return sparse(idx, w, with_ci);
}

MomentEstimate PnormEvaluator::sparse(const IndexSet& idx_in, std::span<const double> w_in, bool with_ci) {
    IndexSet idx;
    Vector w;
    for (std::size_t j = 0; j < idx_in.size(); ++j) {
        if (!std::isfinite(w_in[j])) throw DomainError("vector entries must be finite");
        if (w_in[j] != 0.0) {
            idx.push_back(idx_in[j]);
            w.push_back(w_in[j]);
        }
    }
    MomentEstimate est;
    est.p = p_;
    if (idx.empty()) {
        est.degenerate = true;
        return est;
    }
    const VectorModel& model = *model_;
    if (model.is_gaussian()) {
        double var = 0.0;
        if (model.structure() == Structure::gaussian_correlated) {
            const auto& cov = model.covariance();
            for (std::size_t a = 0; a < idx.size(); ++a)
                for (std::size_t b = 0; b < idx.size(); ++b) var += w[a] * w[b] * cov(idx[a], idx[b]);
        } else {
            for (double x : w) var += x * x;
        }
        est.value = std::sqrt(var) * gaussian_pnorm(p_);
        return est;
    }
    if (model.is_independent()) {
        bool all_rademacher = true;
        bool tabulated = false;
        for (int i : idx) {
            const auto kind = model.coordinate(static_cast<std::size_t>(i)).kind();
            all_rademacher = all_rademacher && kind == CoordinateKind::rademacher;
            tabulated = tabulated || kind == CoordinateKind::canonical_convex_tail;
        }
        if (is_even_integer(p_)) {
            // E S^k for S = sum w_j X_j built one coordinate at a time; odd moments vanish.
            const auto P = static_cast<std::size_t>(p_);
            std::vector<double> m(P + 1, 0.0), next(P + 1);
            m[0] = 1.0;
            std::vector<std::vector<double>> binom(P + 1, std::vector<double>(P + 1, 0.0));
            for (std::size_t a = 0; a <= P; ++a) {
                binom[a][0] = 1.0;
                for (std::size_t b = 1; b <= a; ++b) binom[a][b] = binom[a - 1][b - 1] + (b < a ? binom[a - 1][b] : 0.0);
            }
            for (std::size_t j = 0; j < idx.size(); ++j) {
                const auto& mu = even_moments(static_cast<std::size_t>(idx[j]));
                const double w2 = w[j] * w[j];
                std::fill(next.begin(), next.end(), 0.0);
                for (std::size_t k = 0; k <= P; k += 2) {
                    double acc = 0.0;
                    double wpow = 1.0;
                    for (std::size_t h = 0; 2 * h <= k; ++h) {
                        acc += binom[k][2 * h] * wpow * mu[h] * m[k - 2 * h];
                        wpow *= w2;
                    }
                    next[k] = acc;
                }
                m.swap(next);
            }
            if (!std::isfinite(m[P])) throw DomainError("moment overflow; p too large for the exact expansion");
            est.value = std::pow(m[P], 1.0 / p_);
            est.method = tabulated ? MomentMethod::quadrature : MomentMethod::analytic;
            return est;
        }
        if (all_rademacher && idx.size() <= kMaxEnumerationSupport) {
            est.value = bernoulli_pnorm_exact(w, p_);
            return est;
        }
    }
    return monte_carlo(idx, w, with_ci);
}

MomentEstimate PnormEvaluator::monte_carlo(const IndexSet& idx, std::span<const double> w, bool with_ci) {
    if (p_ > kMaxMonteCarloP) throw DomainError("Monte-Carlo p-norms are limited to p <= 16");
    if (!batch_) batch_ = std::make_unique<SampleBatch>(sample(*model_, mc_.budget, mc_.seed));
    const SampleBatch& b = *batch_;
    std::vector<double> values(b.rows);
    for (std::size_t r = 0; r < b.rows; ++r) {
        const double* x = b.data.data() + r * b.cols;
        double s = 0.0;
        for (std::size_t j = 0; j < idx.size(); ++j) s += w[j] * x[idx[j]];
        values[r] = std::pow(std::abs(s), p_);
    }
    MomentEstimate est;
    est.p = p_;
    est.method = MomentMethod::monte_carlo;
    est.samples = b.rows;
    est.value = std::pow(mean(values), 1.0 / p_);
    if (with_ci) {
        const double inv = 1.0 / p_;
        Interval ci = bootstrap_mean_ci(values, derive_seed(mc_.seed, 0x9E0A), kBootstrapResamples,
                                        [inv](double m) { return std::pow(m, inv); });
        ci.lo = std::min(ci.lo, est.value);
        ci.hi = std::max(ci.hi, est.value);
        est.ci = ci;
    }
    return est;
}

MomentEstimate pnorm_linear_form(const VectorModel& model, std::span<const double> t, double p, const McOptions& mc) {
    PnormEvaluator eval(model, p, mc);
    return eval(t);
}

double bernoulli_pnorm_exact(std::span<const double> t, double p) {
    check_order(p);
    Vector w;
    for (double x : t)
        if (x != 0.0) w.push_back(x);
    if (w.empty()) return 0.0;
    if (w.size() > kMaxEnumerationSupport) throw DomainError("sign enumeration limited to 20 nonzero entries");
    // Fix the sign of w[0] by symmetry and walk the rest in Gray-code order.
    const std::size_t k = w.size() - 1;
    const std::size_t patterns = std::size_t{1} << k;
    double s = std::accumulate(w.begin(), w.end(), 0.0);
    std::vector<int> sign(k, 1);
    double acc = std::pow(std::abs(s), p);
    for (std::size_t g = 1; g < patterns; ++g) {
        const auto bit = static_cast<std::size_t>(std::countr_zero(g));
        s -= 2.0 * sign[bit] * w[bit + 1];
        sign[bit] = -sign[bit];
        acc += std::pow(std::abs(s), p);
    }
    return std::pow(acc / static_cast<double>(patterns), 1.0 / p);
}

double hitczenko_norm(std::span<const double> t, double p) {
    check_order(p);
    Vector a;
    for (double x : t)
        if (x != 0.0) a.push_back(std::abs(x));
    std::sort(a.begin(), a.end(), std::greater<>());
    const auto head = std::min(a.size(), static_cast<std::size_t>(std::floor(p)));
    double first = 0.0;
    double rest = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (i < head)
            first += a[i];
        else
            rest += a[i] * a[i];
    }
    return first + std::sqrt(p) * std::sqrt(rest);
}

double dp_metric(std::span<const double> t, std::span<const double> s, double p) {
    if (t.size() != s.size()) throw DomainError("vectors have different dimensions");
    Vector d(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) d[i] = t[i] - s[i];
    return hitczenko_norm(d, p);
}

BernoulliDistance bernoulli_distance(std::span<const double> t, std::span<const double> s, double p) {
    if (t.size() != s.size()) throw DomainError("vectors have different dimensions");
    Vector d(t.size());
    std::size_t nnz = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        d[i] = t[i] - s[i];
        nnz += d[i] != 0.0;
    }
    if (nnz <= kMaxEnumerationSupport) return {bernoulli_pnorm_exact(d, p), true};
    return {hitczenko_norm(d, p), false};
}

double gluskin_kwapien_bound(std::span<const double> t, double p) {
    check_order(p);
    double linf = 0.0;
    double l2 = 0.0;
    for (double x : t) {
        linf = std::max(linf, std::abs(x));
        l2 += x * x;
    }
    return p * linf + std::sqrt(p) * std::sqrt(l2);
}

void to_json(nlohmann::json& j, const SupEstimate& s) {
    j = {{"esup", s.max_mean},
         {"esup_ci", s.max_ci},
         {"esup_abs", s.absmax_mean},
         {"esup_abs_ci", s.absmax_ci},
         {"samples", s.samples}};
}

SupEstimate estimate_sup_forms(const VectorModel& model, const std::vector<SparsePoint>& forms, const McOptions& mc) {
    if (forms.empty()) throw DomainError("supremum over an empty family");
    if (mc.budget == 0) throw DomainError("Monte-Carlo budget must be positive");
    const std::size_t n = model.dim();
    for (const auto& f : forms)
        for (int i : f.index)
            if (i < 0 || static_cast<std::size_t>(i) >= n) throw DomainError("form index out of range");
    std::vector<double> mx(mc.budget), amx(mc.budget);
    for_each_sample_chunk(model, mc.budget, mc.seed, [&](std::size_t, std::size_t first, std::span<const double> block) {
        const std::size_t rows = block.size() / n;
        for (std::size_t r = 0; r < rows; ++r) {
            const double* x = block.data() + r * n;
            double best = -kInf;
            double abest = 0.0;
            for (const auto& f : forms) {
                double s = 0.0;
                for (std::size_t j = 0; j < f.index.size(); ++j) s += f.value[j] * x[f.index[j]];
                best = std::max(best, s);
                abest = std::max(abest, std::abs(s));
            }
            mx[first + r] = best;
            amx[first + r] = abest;
        }
    });
    SupEstimate out;
    out.samples = mc.budget;
    out.max_mean = mean(mx);
    out.absmax_mean = mean(amx);
    out.max_ci = bootstrap_mean_ci(mx, derive_seed(mc.seed, 0x5E01));
    out.absmax_ci = bootstrap_mean_ci(amx, derive_seed(mc.seed, 0x5E02));
    return out;
}

SupEstimate estimate_sup(const VectorModel& model, const PointSet& T, const McOptions& mc) {
    if (T.dim() != model.dim()) throw DomainError("family and model dimensions differ");
    std::vector<SparsePoint> forms;
    for (std::size_t j = 0; j < T.size(); ++j) forms.push_back(T.sparse(j));
    return estimate_sup_forms(model, forms, mc);
}

void to_json(nlohmann::json& j, const TrivialBoundReport& r) {
    j = {{"precondition_ok", r.precondition_ok}, {"A", r.A},           {"emax", r.emax},
         {"emax_ci", r.emax_ci},                 {"bound", r.bound},   {"margin", r.margin},
         {"holds", r.holds}};
    if (!r.note.empty()) j["note"] = r.note;
}

TrivialBoundReport trivial_upper_bound(const VectorModel& model, const PointSet& T, double p, std::optional<double> A,
                                       const McOptions& mc) {
    check_order(p);
    TrivialBoundReport rep;
    if (T.empty()) throw DomainError("empty family");
    if (std::log(static_cast<double>(T.size())) > p) {
        rep.precondition_ok = false;
        rep.holds = false;
        rep.note = "|T| > exp(p): bound not applicable";
        return rep;
    }
    if (A) {
        rep.A = *A;
    } else {
        PnormEvaluator eval(model, p, mc);
        for (std::size_t j = 0; j < T.size(); ++j) rep.A = std::max(rep.A, eval(T.point(j), false).value);
    }
    const SupEstimate sup = estimate_sup(model, T, mc);
    rep.emax = sup.max_mean;
    rep.emax_ci = sup.max_ci;
    rep.bound = kE * rep.A;
    rep.margin = rep.bound - rep.emax;
    rep.holds = rep.emax_ci.lo <= rep.bound;
    return rep;
}

void to_json(nlohmann::json& j, const OverlapReport& r) {
    j = {{"statistic", r.statistic}, {"ci", r.ci}, {"p", r.p}, {"D", r.D},
         {"implied_D", std::isfinite(r.implied_D) ? nlohmann::json(r.implied_D) : nlohmann::json(nullptr)},
         {"holds", r.holds}, {"pairs_with_overlap", r.pairs_with_overlap}};
}

OverlapReport overlap_bound_check(const VectorModel& model, const PointSet& T, double p, double D, const McOptions& mc) {
    check_order(p);
    if (!(D > 0.0)) throw DomainError("D must be positive");
    OverlapReport rep;
    rep.p = p;
    rep.D = D;
    std::vector<SparsePoint> forms;
    for (std::size_t a = 0; a < T.size(); ++a)
        for (std::size_t b = a + 1; b < T.size(); ++b) {
            SparsePoint f;
            f.index = set_intersection(T.support(a), T.support(b));
            if (f.index.empty()) continue;
            for (int i : f.index) f.value.push_back(T.point(a)[static_cast<std::size_t>(i)] - T.point(b)[static_cast<std::size_t>(i)]);
            forms.push_back(std::move(f));
        }
    rep.pairs_with_overlap = forms.size();
    if (!forms.empty()) {
        // sup over ordered pairs of |.| equals the absolute maximum over unordered pairs.
        const SupEstimate sup = estimate_sup_forms(model, forms, mc);
        rep.statistic = sup.absmax_mean;
        rep.ci = sup.absmax_ci;
    }
    if (rep.statistic > 0.0) rep.implied_D = p / rep.statistic;
    rep.holds = rep.ci.hi <= p / D;
    return rep;
}

}  // namespace sudakov
