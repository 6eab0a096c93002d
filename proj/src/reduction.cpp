#include "sudakov/reduction.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

namespace sudakov {

namespace {

const char* outcome_name(ReductionOutcome o) {
    switch (o) {
        case ReductionOutcome::simplified: return "simplified";
        case ReductionOutcome::bernoulli_sudakov: return "bernoulli_sudakov";
        case ReductionOutcome::degenerate: return "degenerate";
    }
    return "";
}

Vector difference(const Vector& a, const Vector& b) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

}  // namespace

DistanceMatrix pairwise_distances(const PointSet& T, DistanceKind metric, double p) {
    const std::size_t N = T.size();
    DistanceMatrix dm;
    dm.d.assign(N, std::vector<double>(N, 0.0));
    std::vector<std::vector<char>> exact(N, std::vector<char>(N, 1));
    parallel_for(N, [&](std::size_t a) {
        for (std::size_t b = a + 1; b < N; ++b) {
            if (metric == DistanceKind::hitczenko) {
                dm.d[a][b] = dp_metric(T.point(a), T.point(b), p);
            } else {
                const BernoulliDistance bd = bernoulli_distance(T.point(a), T.point(b), p);
                dm.d[a][b] = bd.value;
                exact[a][b] = bd.exact;
            }
        }
    });
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b) {
            dm.d[b][a] = dm.d[a][b];
            dm.all_exact = dm.all_exact && exact[a][b];
        }
    return dm;
}

void to_json(nlohmann::json& j, const CoveringResult& c) {
    j = {{"cover", c.cover}, {"packing", c.packing}, {"centers", c.centers}, {"exact_metric", c.exact_metric}};
}

CoveringResult covering_number(const DistanceMatrix& dm, double u) {
    if (!(u > 0.0)) throw DomainError("radius must be positive");
    const std::size_t N = dm.d.size();
    CoveringResult res;
    res.exact_metric = dm.all_exact;
    if (N == 0) return res;
    // Greedy set cover with T-centred balls.
    std::vector<char> covered(N, 0);
    std::size_t left = N;
    while (left > 0) {
        std::size_t best = 0;
        std::size_t gain = 0;
        for (std::size_t c = 0; c < N; ++c) {
            std::size_t g = 0;
            for (std::size_t x = 0; x < N; ++x) g += !covered[x] && dm.d[c][x] <= u;
            if (g > gain) {
                gain = g;
                best = c;
            }
        }
        res.centers.push_back(best);
        for (std::size_t x = 0; x < N; ++x)
            if (!covered[x] && dm.d[best][x] <= u) {
                covered[x] = 1;
                --left;
            }
    }
    res.cover = res.centers.size();
    // Packing with pairwise distance > 2u: a ball of radius u holds at most one.
    std::size_t a0 = 0, b0 = 0;
    double diam = -1.0;
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b)
            if (dm.d[a][b] > diam) {
                diam = dm.d[a][b];
                a0 = a;
                b0 = b;
            }
    std::vector<std::size_t> pack{a0};
    if (N > 1 && diam > 2.0 * u) pack.push_back(b0);
    if (pack.size() == 2) {
        std::vector<double> mind(N);
        for (std::size_t x = 0; x < N; ++x) mind[x] = std::min(dm.d[a0][x], dm.d[b0][x]);
        for (;;) {
            std::size_t arg = N;
            double far = 2.0 * u;
            for (std::size_t x = 0; x < N; ++x)
                if (mind[x] > far) {
                    far = mind[x];
                    arg = x;
                }
            if (arg == N) break;
            pack.push_back(arg);
            for (std::size_t x = 0; x < N; ++x) mind[x] = std::min(mind[x], dm.d[arg][x]);
        }
    }
    res.packing = pack.size();
    return res;
}

CoveringResult covering_number(const PointSet& T, DistanceKind metric, double u, double p) {
    return covering_number(pairwise_distances(T, metric, p), u);
}

TranslationResult translate_to_dense_cell(const PointSet& T, double p, double delta, DistanceKind metric) {
    if (T.empty()) throw DomainError("empty family");
    if (!(delta > 0.0)) throw DomainError("delta must be positive");
    const DistanceMatrix dm = pairwise_distances(T, metric, p);
    TranslationResult res;
    res.covering = covering_number(dm, 0.5 * delta * p);
    if (!dm.all_exact) res.warnings.push_back("formula surrogate used for some distances");
    if (static_cast<double>(res.covering.packing) >= std::exp(p / 4.0)) {
        res.outcome = TranslationOutcome::bernoulli_sudakov;
        res.warnings.push_back("N(T, d_p, delta p / 2) >= exp(p/4): minoration follows from the Bernoulli bound");
        return res;
    }
    const std::size_t N = T.size();
    std::size_t best = 0;
    std::size_t count = 0;
    for (std::size_t c = 0; c < N; ++c) {
        std::size_t k = 0;
        for (std::size_t x = 0; x < N; ++x) k += dm.d[c][x] <= delta * p;
        if (k > count) {
            count = k;
            best = c;
        }
    }
    res.center = best;
    res.cell = PointSet(T.dim(), T.p());
    res.cell.add(Vector(T.dim(), 0.0));
    for (std::size_t x = 0; x < N; ++x)
        if (x != best && dm.d[best][x] <= delta * p) res.cell.add(difference(T.point(x), T.point(best)));
    res.cardinality_ok = static_cast<double>(res.cell.size()) >= static_cast<double>(N) * std::exp(-p / 4.0);
    if (!res.cardinality_ok) res.warnings.push_back("dense cell smaller than |T| exp(-p/4)");
    return res;
}

double rho_from_delta(double delta, double C0) {
    if (!(delta > 0.0) || !(C0 > 0.0)) throw DomainError("delta and C0 must be positive");
    const double target = 4.0 * C0 * delta;
    const double top = std::exp(-1.0);
    auto f = [](double r) { return r / std::log(1.0 / r); };
    if (target >= f(top)) return top;
    double lo = 0.0;
    double hi = top;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (f(mid) < target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

RoundingResult lattice_round(const PointSet& T, double p, double delta, std::size_t trials, std::uint64_t seed,
                             double C0) {
    if (trials == 0) throw DomainError("lattice search needs at least one trial");
    if (T.empty()) throw DomainError("empty family");
    const double rho = rho_from_delta(delta, C0);
    const std::size_t n = T.dim();
    const std::size_t N = T.size();
    RoundingResult res;
    for (std::size_t j = 0; j < N; ++j)
        if (hitczenko_norm(T.point(j), p) > delta * p * (1.0 + 1e-12)) {
            res.warnings.push_back("some point has d_p(t, 0) > delta p");
            break;
        }
    auto captured = [&](const Vector& x, std::size_t j) {
        const Vector& t = T.point(j);
        for (std::size_t i = 0; i < n; ++i)
            if (!(std::abs(t[i]) < rho || std::abs(t[i] - x[i]) < rho)) return false;
        return true;
    };
    auto score = [&](const Vector& x) {
        std::size_t k = 0;
        for (std::size_t j = 0; j < N; ++j) k += captured(x, j);
        return k;
    };
    // Consensus centre: per coordinate, the large value with the most
    // neighbours within rho (0 when no point is large there).
    Vector consensus(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t best_count = 0;
        for (std::size_t j = 0; j < N; ++j) {
            const double v = T.point(j)[i];
            if (std::abs(v) < rho) continue;
            std::size_t count = 0;
            for (std::size_t l = 0; l < N; ++l) count += std::abs(T.point(l)[i] - v) < rho;
            if (count > best_count) {
                best_count = count;
                consensus[i] = v;
            }
        }
    }
    // Candidates: every point of T, the consensus centre, then `trials` draws
    // from the product Laplace measure.
    const std::size_t total = N + 1 + trials;
    std::vector<std::size_t> scores(total);
    auto candidate = [&](std::size_t c) {
        if (c < N) return T.point(c);
        if (c == N) return consensus;
        RandomSource rng(derive_seed(seed, c - N - 1));
        Vector x(n);
        for (auto& v : x) v = rng.sign() * rng.exponential();
        return x;
    };
    parallel_for(total, [&](std::size_t c) { scores[c] = score(candidate(c)); });
    const std::size_t best = static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin());
    const Vector x = candidate(best);
    res.candidates = total;
    res.lattice.rho = rho;
    res.lattice.delta = delta;
    res.lattice.k.resize(n);
    Vector sign(n);
    for (std::size_t i = 0; i < n; ++i) {
        sign[i] = x[i] < 0.0 ? -1.0 : 1.0;
        res.lattice.k[i] = std::max(std::abs(x[i]), rho);
    }
    res.family = PointSet(n, T.p(), {}, res.lattice);
    for (std::size_t j = 0; j < N; ++j)
        if (captured(x, j)) {
            Vector t = T.point(j);
            for (std::size_t i = 0; i < n; ++i) t[i] *= sign[i];
            res.family.add(std::move(t));
            res.kept.push_back(j);
        }
    res.cardinality_ok = static_cast<double>(res.kept.size()) >= static_cast<double>(N) * std::exp(-p / 2.0);
    if (!res.cardinality_ok) res.warnings.push_back("|T_x| < |T| exp(-p/2): the averaging guarantee was not met");
    return res;
}

PointSet threshold_phi(const PointSet& T, const LatticeSpec& lattice, Variant variant) {
    const std::size_t n = T.dim();
    if (lattice.k.size() != n) throw DomainError("lattice has wrong dimension");
    const double rho = lattice.rho;
    LatticeSpec out = lattice;
    out.form = variant == Variant::A ? LatticeForm::A : LatticeForm::B;
    PointSet res(n, T.p(), {}, out);
    for (const auto& t : T.points()) {
        Vector y(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double a = std::abs(t[i]);
            if (variant == Variant::A)
                y[i] = a >= rho ? lattice.k[i] : 0.0;
            else
                y[i] = a > rho ? std::copysign(a - rho, t[i]) : 0.0;
        }
        res.add(std::move(y));
    }
    return res;
}

bool in_simplified_form(const PointSet& T, const LatticeSpec& lattice, Variant variant) {
    for (const auto& t : T.points())
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (t[i] == 0.0) continue;
            const double k = lattice.k[i];
            if (variant == Variant::A) {
                if (t[i] != k) return false;
            } else if (!(t[i] > std::max(0.0, k - 2.0 * lattice.rho) && t[i] <= k)) {
                return false;
            }
        }
    return true;
}

SeparationResult min_separation(const VectorModel& model, const PointSet& T, double p, bool conservative,
                                const McOptions& mc) {
    SeparationResult res;
    const std::size_t N = T.size();
    if (N < 2) return res;
    PnormEvaluator eval(model, p, mc);
    struct Pair {
        double v;
        std::size_t a, b;
    };
    std::vector<Pair> all;
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b)
            all.push_back({eval(difference(T.point(a), T.point(b)), false).value, a, b});
    res.pairs = all.size();
    std::sort(all.begin(), all.end(), [](const Pair& x, const Pair& y) {
        return x.v != y.v ? x.v < y.v : std::tie(x.a, x.b) < std::tie(y.a, y.b);
    });
    res.value = all.front().v;
    res.point = all.front().v;
    res.pair = std::make_pair(all.front().a, all.front().b);
    if (conservative) {
        // Only pairs near the minimum can own the smallest lower CI end.
        const double cutoff = 1.25 * all.front().v;
        for (std::size_t q = 0; q < all.size() && q < 32 && all[q].v <= cutoff; ++q) {
            const MomentEstimate m = eval(difference(T.point(all[q].a), T.point(all[q].b)), true);
            if (m.lower() < res.value) {
                res.value = m.lower();
                res.pair = std::make_pair(all[q].a, all[q].b);
            }
        }
    }
    return res;
}

void to_json(nlohmann::json& j, const SimplifiedFormReport& r) {
    nlohmann::json dup = nlohmann::json::array();
    for (const auto& [a, b] : r.duplicate_supports) dup.push_back({a, b});
    j = {{"form_ok", r.form_ok},
         {"support_size_ok", r.support_size_ok},
         {"support_limit", r.support_limit},
         {"max_support", r.max_support},
         {"distinct_supports_ok", r.distinct_supports_ok},
         {"duplicate_supports", dup},
         {"budget_ok", r.budget_ok},
         {"max_budget", r.max_budget},
         {"budget_limit", r.budget_limit},
         {"separation_ok", r.separation_ok},
         {"min_separation", std::isfinite(r.min_separation) ? nlohmann::json(r.min_separation) : nlohmann::json(nullptr)},
         {"sandwich_ok", r.sandwich_ok},
         {"sandwich_min", std::isfinite(r.sandwich_min) ? nlohmann::json(r.sandwich_min) : nlohmann::json(nullptr)},
         {"sandwich_max", r.sandwich_max},
         {"pairs", r.pairs},
         {"all_ok", r.all_ok()}};
    if (r.closest_pair) j["closest_pair"] = {r.closest_pair->first, r.closest_pair->second};
}

SimplifiedFormReport verify_simplified_form(const VectorModel& model, const PointSet& T, double p, Variant variant,
                                            double C0, const McOptions& mc) {
    if (!T.lattice()) throw PreconditionError("family carries no lattice");
    const LatticeSpec& lat = *T.lattice();
    SimplifiedFormReport rep;
    const std::size_t N = T.size();
    rep.form_ok = in_simplified_form(T, lat, variant);
    const double log_inv_rho = std::log(1.0 / lat.rho);
    rep.support_limit = (variant == Variant::A ? 0.25 : 0.5) * p / log_inv_rho;
    rep.budget_limit = 2.0 * C0 * lat.delta * p;
    for (std::size_t j = 0; j < N; ++j) {
        rep.max_support = std::max(rep.max_support, T.support(j).size());
        double b = 0.0;
        for (int i : T.support(j)) b += lat.k[static_cast<std::size_t>(i)];
        rep.max_budget = std::max(rep.max_budget, b);
    }
    rep.support_size_ok = static_cast<double>(rep.max_support) <= rep.support_limit;
    rep.budget_ok = rep.max_budget <= rep.budget_limit;
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b)
            if (T.support(a) == T.support(b)) rep.duplicate_supports.emplace_back(a, b);
    rep.distinct_supports_ok = rep.duplicate_supports.empty();

    const SeparationResult sep = min_separation(model, T, p, true, mc);
    rep.pairs = sep.pairs;
    rep.min_separation = sep.value;
    rep.closest_pair = sep.pair;
    rep.separation_ok = N < 2 || sep.value >= p / 2.0;

    PnormEvaluator eval(model, p, mc);
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b) {
            const double inc = eval(difference(T.point(a), T.point(b)), false).value;
            const IndexSet sym = set_symmetric_difference(T.support(a), T.support(b));
            Vector w;
            IndexSet idx;
            for (int i : sym)
                if (lat.k[static_cast<std::size_t>(i)] > 4.0 * lat.rho) {
                    idx.push_back(i);
                    w.push_back(lat.k[static_cast<std::size_t>(i)]);
                }
            const double ref = idx.empty() ? 0.0 : eval.sparse(idx, w, false).value;
            if (ref == 0.0) {
                if (inc > 0.0) rep.sandwich_max = kInf;
                continue;
            }
            rep.sandwich_min = std::min(rep.sandwich_min, inc / ref);
            rep.sandwich_max = std::max(rep.sandwich_max, inc / ref);
        }
    rep.sandwich_ok = (!std::isfinite(rep.sandwich_min) && rep.sandwich_max == 0.0) ||
                      (rep.sandwich_min >= 1.0 / (2.0 * C0) && rep.sandwich_max <= 2.0);
    return rep;
}

void to_json(nlohmann::json& j, const ReductionReport& r) {
    j = {{"outcome", outcome_name(r.outcome)},
         {"cardinality", r.cardinality},
         {"separation_before", std::isfinite(r.separation_before) ? nlohmann::json(r.separation_before) : nlohmann::json(nullptr)},
         {"separation_after", std::isfinite(r.separation_after) ? nlohmann::json(r.separation_after) : nlohmann::json(nullptr)},
         {"constants", {{"rho", r.rho}, {"delta", r.delta}, {"C0", r.C0}}},
         {"covering", r.covering},
         {"cardinality_ok", r.cardinality_ok},
         {"merged_duplicates", r.merged_duplicates},
         {"warnings", r.warnings},
         {"output", r.output.to_json()}};
    j["verification"] = r.verification ? nlohmann::json(*r.verification) : nlohmann::json(nullptr);
}

ReductionReport reduce(const VectorModel& model, const PointSet& T, double p, const ReductionOptions& opt) {
    if (T.dim() != model.dim()) throw DomainError("family and model dimensions differ");
    ReductionReport rep;
    rep.delta = opt.delta;
    rep.C0 = opt.C0;
    rep.rho = rho_from_delta(opt.delta, opt.C0);
    rep.cardinality.push_back(T.size());
    rep.separation_before = min_separation(model, T, p, false, opt.mc).value;

    const TranslationResult tr = translate_to_dense_cell(T, p, opt.delta, opt.metric);
    rep.covering = tr.covering;
    rep.warnings.insert(rep.warnings.end(), tr.warnings.begin(), tr.warnings.end());
    if (tr.outcome == TranslationOutcome::bernoulli_sudakov) {
        rep.outcome = ReductionOutcome::bernoulli_sudakov;
        return rep;
    }
    rep.cardinality.push_back(tr.cell.size());

    const RoundingResult rr = lattice_round(tr.cell, p, opt.delta, opt.trials, opt.seed, opt.C0);
    rep.warnings.insert(rep.warnings.end(), rr.warnings.begin(), rr.warnings.end());
    rep.cardinality.push_back(rr.family.size());

    const PointSet phi = threshold_phi(rr.family, rr.lattice, opt.variant);
    // phi may merge points; keep the first copy of each.
    LatticeSpec lat = *phi.lattice();
    rep.output = PointSet(phi.dim(), phi.p(), {}, lat);
    for (std::size_t j = 0; j < phi.size(); ++j) {
        bool seen = false;
        for (const auto& q : rep.output.points()) seen = seen || q == phi.point(j);
        if (seen)
            ++rep.merged_duplicates;
        else
            rep.output.add(phi.point(j));
    }
    if (rep.merged_duplicates > 0) rep.warnings.push_back("thresholding merged points");
    rep.cardinality.push_back(rep.output.size());
    rep.cardinality_ok = static_cast<double>(rep.output.size()) >= static_cast<double>(T.size()) * std::exp(-0.75 * p);
    if (!rep.cardinality_ok) rep.warnings.push_back("|output| < |input| exp(-3p/4)");
    if (rep.output.size() < 2) {
        rep.outcome = ReductionOutcome::degenerate;
        rep.warnings.push_back("output has fewer than two points");
    }
    rep.verification = verify_simplified_form(model, rep.output, p, opt.variant, opt.C0, opt.mc);
    rep.separation_after = rep.verification->min_separation;
    return rep;
}

}  // namespace sudakov
