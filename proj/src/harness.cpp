#include "sudakov/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sudakov {

namespace {

nlohmann::json finite_or_null(double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); }

Vector difference(const Vector& a, const Vector& b) {
    Vector d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

SparsePoint restricted(const Vector& t, const IndexSet& idx) {
    SparsePoint sp;
    for (int i : idx) {
        const double v = t[static_cast<std::size_t>(i)];
        if (v != 0.0) {
            sp.index.push_back(i);
            sp.value.push_back(v);
        }
    }
    return sp;
}

}  // namespace

// ------------------------------------------------------------------ cardinality regimes

double CardinalityTarget::f(double p) const {
    switch (regime) {
        case Regime::p: return p;
        case Regime::Cp: return C * p;
        case Regime::Cp_log: return C * p * std::log(1.0 + p);
        case Regime::Cp2: return C * p * p;
    }
    return p;
}

CardinalityTarget CardinalityTarget::parse(const std::string& tag, double C) {
    if (tag == "p") return {Regime::p, C};
    if (tag == "Cp") return {Regime::Cp, C};
    if (tag == "Cp_log" || tag == "Cplog(1+p)" || tag == "Cp*log(1+p)") return {Regime::Cp_log, C};
    if (tag == "Cp2" || tag == "Cp^2") return {Regime::Cp2, C};
    throw ModelError("unknown cardinality regime: " + tag);
}

std::string CardinalityTarget::tag() const {
    switch (regime) {
        case Regime::p: return "p";
        case Regime::Cp: return "Cp";
        case Regime::Cp_log: return "Cp_log";
        case Regime::Cp2: return "Cp2";
    }
    return "p";
}

// ------------------------------------------------------------------ E sup and minoration

SupEstimate esup_estimate(const VectorModel& model, const PointSet& T, const McOptions& mc) {
    return estimate_sup(model, T, mc);
}

void to_json(nlohmann::json& j, const MinorationReport& r) {
    j = {{"p", r.p},
         {"degenerate", r.degenerate},
         {"A", finite_or_null(r.A)},
         {"A_point", finite_or_null(r.A_point)},
         {"esup", r.esup},
         {"K", finite_or_null(r.K)},
         {"K_abs", finite_or_null(r.K_abs)},
         {"cardinality", r.cardinality},
         {"target", {{"regime", r.target.tag()}, {"C", r.target.C}, {"f", r.f_value}, {"met", r.cardinality_met}}},
         {"trivial_bound", {{"applicable", r.trivial_bound_applicable}, {"holds", r.trivial_bound_holds}, {"A_max", r.A_max}}},
         {"symmetry", {{"applicable", r.symmetry_applicable}, {"holds", r.symmetry_holds}}},
         {"flags", r.flags}};
    if (r.A_pair) j["A_pair"] = {r.A_pair->first, r.A_pair->second};
    if (!r.diagnostics.is_null()) j["diagnostics"] = r.diagnostics;
}

MinorationReport minoration_report(const VectorModel& model, const PointSet& T, double p, const McOptions& mc,
                                   CardinalityTarget target) {
    if (T.empty()) throw DomainError("empty family");
    if (T.dim() != model.dim()) throw DomainError("family and model dimensions differ");
    MinorationReport rep;
    rep.p = p;
    rep.cardinality = T.size();
    rep.target = target;
    rep.f_value = target.f(p);
    rep.cardinality_met = std::log(static_cast<double>(T.size())) >= rep.f_value;
    rep.esup = estimate_sup(model, T, mc);
    if (T.size() < 2) {
        rep.degenerate = true;
        rep.flags.push_back("degenerate_family");
    } else {
        const SeparationResult sep = min_separation(model, T, p, true, mc);
        rep.A = sep.value;
        rep.A_point = sep.point;
        rep.A_pair = sep.pair;
        if (rep.esup.max_mean > 0.0) rep.K = rep.A / rep.esup.max_mean;
        if (rep.esup.absmax_mean > 0.0) rep.K_abs = rep.A / rep.esup.absmax_mean;
    }
    PnormEvaluator eval(model, p, mc);
    for (const auto& t : T.points()) rep.A_max = std::max(rep.A_max, eval(t, false).value);
    rep.trivial_bound_applicable = std::log(static_cast<double>(T.size())) <= p;
    if (rep.trivial_bound_applicable) rep.trivial_bound_holds = rep.esup.max_ci.lo <= kE * rep.A_max;
    rep.symmetry_applicable = T.origin().has_value();
    if (rep.symmetry_applicable) {
        const auto& s = rep.esup;
        rep.symmetry_holds = s.max_mean <= s.absmax_mean * (1.0 + 1e-12) &&
                             s.max_ci.hi + s.absmax_ci.width() >= 0.5 * s.absmax_ci.lo;
    }
    return rep;
}

// ------------------------------------------------------------------ exponential minoration

void to_json(nlohmann::json& j, const LatalaReport& r) {
    j = {{"precondition_ok", r.precondition_ok}, {"vacuous", r.vacuous}, {"q", r.q},
         {"min_pair_sum", finite_or_null(r.min_pair_sum)}, {"cardinality", r.cardinality},
         {"esup", r.esup}, {"ci", r.ci}, {"bound", r.bound}, {"holds", r.holds}, {"samples", r.samples}};
    if (!r.note.empty()) j["note"] = r.note;
}

LatalaReport latala_minoration_check(const Vector& r, const Vector& v, const std::vector<IndexSet>& supports, double q,
                                     const McOptions& mc) {
    if (r.size() != v.size()) throw DomainError("r and v have different lengths");
    if (q < 0.0) throw DomainError("q must be nonnegative");
    const std::size_t n = r.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!(r[i] >= 1.0)) throw DomainError("r_i must be at least 1");
        if (!(v[i] == 0.0 || v[i] >= 1.0)) throw DomainError("v_i must be 0 or at least 1");
    }
    for (const auto& s : supports)
        for (int i : s)
            if (i < 0 || static_cast<std::size_t>(i) >= n) throw DomainError("support index out of range");
    LatalaReport rep;
    rep.q = q;
    rep.bound = q / 8.0;
    rep.cardinality = supports.size();
    if (q == 0.0) {
        rep.vacuous = true;
        rep.precondition_ok = true;
        rep.holds = true;
        rep.note = "q = 0: the bound is vacuous";
        return rep;
    }
    if (std::log(static_cast<double>(supports.size())) < q) {
        rep.note = "|T| < e^q";
        return rep;
    }
    std::vector<IndexSet> sorted = supports;
    for (auto& s : sorted) std::sort(s.begin(), s.end());
    for (std::size_t a = 0; a < sorted.size(); ++a)
        for (std::size_t b = 0; b < sorted.size(); ++b) {
            if (a == b) continue;
            double sum = 0.0;
            for (int i : set_difference(sorted[a], sorted[b])) sum += r[static_cast<std::size_t>(i)] * v[static_cast<std::size_t>(i)];
            if (sum < rep.min_pair_sum) rep.min_pair_sum = sum;
        }
    if (rep.min_pair_sum < q) {
        rep.note = "hypothesis sum_{I(t)\\I(s)} r_i v_i >= q fails";
        return rep;
    }
    rep.precondition_ok = true;
    if (mc.budget == 0) throw DomainError("Monte-Carlo budget must be positive");
    std::vector<double> stat(mc.budget);
    parallel_for(chunk_count(mc.budget), [&](std::size_t c) {
        RandomSource rng(derive_seed(mc.seed, c));
        const std::size_t first = c * kChunkRows;
        const std::size_t rows = std::min(kChunkRows, mc.budget - first);
        Vector y(n);
        for (std::size_t row = 0; row < rows; ++row) {
            for (std::size_t i = 0; i < n; ++i) y[i] = rng.sign() * std::min(rng.exponential(), r[i]);
            double best = 0.0;
            for (const auto& s : sorted) {
                double sum = 0.0;
                for (int i : s) sum += v[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
                best = std::max(best, std::abs(sum));
            }
            stat[first + row] = best;
        }
    });
    rep.samples = mc.budget;
    rep.esup = mean(stat);
    rep.ci = bootstrap_mean_ci(stat, derive_seed(mc.seed, 0x1A7A));
    rep.holds = rep.ci.lo >= rep.bound;
    return rep;
}

// ------------------------------------------------------------------ Bernoulli comparison

void to_json(nlohmann::json& j, const BernoulliComparisonReport& r) {
    j = {{"C_grid", finite_or_null(r.C_grid)}, {"C", finite_or_null(r.C)}, {"hypothesis_ok", r.hypothesis_ok},
         {"esup_dominating", r.esup_dominating}, {"ci_dominating", r.ci_dominating},
         {"esup_dominated", r.esup_dominated}, {"ci_dominated", r.ci_dominated}, {"holds", r.holds}};
}

BernoulliComparisonReport bernoulli_comparison_check(const VectorModel& dominating, const VectorModel& dominated,
                                                     const PointSet& T, std::optional<double> C, const McOptions& mc) {
    if (!dominating.is_independent() || !dominated.is_independent())
        throw PreconditionError("comparison needs independent coordinates");
    if (dominating.dim() != dominated.dim() || T.dim() != dominating.dim())
        throw DomainError("dimensions differ");
    BernoulliComparisonReport rep;
    for (std::size_t i = 0; i < dominating.dim(); ++i) {
        const CoordinateLaw& xi = dominating.coordinate(i);
        const CoordinateLaw& eta = dominated.coordinate(i);
        double top = 1.0;
        while (top < 1e4 && std::max(xi.tail(top), eta.tail(top)) > 1e-12) top *= 2.0;
        Vector grid;
        for (int k = 0; k <= 400; ++k) grid.push_back(top * k / 400.0);
        for (const auto* law : {&xi, &eta}) {
            if (std::isfinite(law->upper_endpoint())) grid.push_back(law->upper_endpoint());
            for (const auto& knot : law->knots()) grid.push_back(knot.u);
        }
        for (double u : grid) {
            const double te = eta.tail(u);
            if (te == 0.0) continue;
            const double tx = xi.tail(u);
            rep.C_grid = std::max(rep.C_grid, tx > 0.0 ? te / tx : kInf);
        }
    }
    rep.C = C.value_or(rep.C_grid);
    rep.hypothesis_ok = std::isfinite(rep.C) && rep.C >= rep.C_grid * (1.0 - 1e-12);
    const SupEstimate a = estimate_sup(dominating, T, mc);
    const SupEstimate b = estimate_sup(dominated, T, mc);
    rep.esup_dominating = a.absmax_mean;
    rep.ci_dominating = a.absmax_ci;
    rep.esup_dominated = b.absmax_mean;
    rep.ci_dominated = b.absmax_ci;
    rep.holds = std::isfinite(rep.C) && rep.C * a.absmax_ci.hi >= b.absmax_ci.lo;
    return rep;
}

// ------------------------------------------------------------------ independent entries

void to_json(nlohmann::json& j, const IndependentEntriesReport& r) {
    j = {{"reduction", r.reduction},
         {"lemma", {{"bound", r.lemma_bound}, {"min", finite_or_null(r.lemma_min)}, {"ok", r.lemma_ok}}},
         {"flags", r.flags}};
    j["r_profile"] = r.profile ? nlohmann::json(*r.profile) : nlohmann::json(nullptr);
    j["latala"] = r.latala ? nlohmann::json(*r.latala) : nlohmann::json(nullptr);
    j["minoration"] = r.minoration ? nlohmann::json(*r.minoration) : nlohmann::json(nullptr);
}

IndependentEntriesReport independent_entries_experiment(const VectorModel& model, const PointSet& T_raw, double p,
                                                        const McOptions& mc, const ReductionOptions& red_in) {
    if (!model.is_independent()) throw PreconditionError("independent_entries_experiment needs independent coordinates");
    IndependentEntriesReport rep;
    ReductionOptions red = red_in;
    red.variant = Variant::A;
    rep.reduction = reduce(model, T_raw, p, red);
    if (rep.reduction.outcome != ReductionOutcome::simplified) {
        rep.flags.push_back(rep.reduction.outcome == ReductionOutcome::bernoulli_sudakov ? "bernoulli_sudakov_branch"
                                                                                         : "degenerate_reduction");
        return rep;
    }
    const PointSet& T = rep.reduction.output;
    const double gamma = kDefaultGamma;
    rep.profile = r_profile(model, T.lattice()->k, p, gamma);
    rep.lemma_bound = gamma * p;
    PnormEvaluator eval(model, p, mc);
    for (std::size_t a = 0; a < T.size(); ++a)
        for (std::size_t b = a + 1; b < T.size(); ++b) {
            if (eval(difference(T.point(a), T.point(b)), false).value < p / 2.0) continue;
            rep.lemma_min = std::min(rep.lemma_min, dbar_distance(*rep.profile, T.support(a), T.support(b)));
        }
    rep.lemma_ok = !std::isfinite(rep.lemma_min) || rep.lemma_min >= rep.lemma_bound;
    Vector v(model.dim());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = rep.profile->r[i] > 2.0 ? 1.0 : 0.0;
    rep.latala = latala_minoration_check(rep.profile->r, v, T.supports(), std::min(0.25, gamma) * p, mc);
    rep.minoration = minoration_report(model, T, p, mc);
    return rep;
}

// ------------------------------------------------------------------ disjoint supports

void to_json(nlohmann::json& j, const DisjointSupportReport& r) {
    j = {{"disjoint", r.disjoint},
         {"contains_origin", r.contains_origin},
         {"norms_ok", r.norms_ok},
         {"min_norm", finite_or_null(r.min_norm)},
         {"cardinality_ok", r.cardinality_ok},
         {"minoration", r.minoration},
         {"crossing",
          {{"level", r.level},
           {"N", r.N},
           {"n0", r.n0},
           {"mean_M_over_N", r.mean_M_over_N},
           {"mean_M_over_N_ci", r.mean_M_over_N_ci},
           {"prob_M_gt_n0", r.prob_M_gt_n0},
           {"prob_M_gt_n0_ci", r.prob_M_gt_n0_ci},
           {"crossing_ok", r.crossing_ok},
           {"tail_ok", r.tail_ok},
           {"histogram", r.histogram}}},
         {"flags", r.flags}};
}

DisjointSupportReport disjoint_support_experiment(const VectorModel& model, const PointSet& T, double p, double C_mult,
                                                  const McOptions& mc) {
    if (T.dim() != model.dim()) throw DomainError("family and model dimensions differ");
    DisjointSupportReport rep;
    rep.disjoint = true;
    for (std::size_t a = 0; a < T.size(); ++a)
        for (std::size_t b = a + 1; b < T.size(); ++b)
            if (!set_intersection(T.support(a), T.support(b)).empty()) rep.disjoint = false;
    rep.contains_origin = T.origin().has_value();
    std::vector<SparsePoint> forms;
    PnormEvaluator eval(model, p, mc);
    for (std::size_t j = 0; j < T.size(); ++j) {
        if (T.support(j).empty()) continue;
        forms.push_back(T.sparse(j));
        rep.min_norm = std::min(rep.min_norm, eval(T.point(j)).lower());
    }
    rep.N = forms.size();
    rep.norms_ok = rep.N > 0 && rep.min_norm >= p * (1.0 - 1e-9);
    rep.cardinality_ok = std::log(static_cast<double>(T.size())) >= C_mult * p;
    rep.minoration = minoration_report(model, T, p, mc, {Regime::Cp, C_mult});
    if (rep.N < 2) {
        rep.flags.push_back("degenerate_family");
        return rep;
    }
    const std::size_t N = rep.N;
    const std::size_t m = mc.budget;
    const double level_prob = 2.0 * std::exp(-p);
    // Common level: smallest per-point upper quantile at probability 2 e^{-p}.
    {
        const SampleBatch batch = sample(model, m, derive_seed(mc.seed, 0xD1));
        const auto rank = static_cast<std::size_t>(std::ceil(level_prob * static_cast<double>(m)));
        std::vector<double> vals(m);
        rep.level = kInf;
        for (const auto& f : forms) {
            for (std::size_t r = 0; r < m; ++r) {
                const double* x = batch.data.data() + r * batch.cols;
                double s = 0.0;
                for (std::size_t q = 0; q < f.index.size(); ++q) s += f.value[q] * x[f.index[q]];
                vals[r] = std::abs(s);
            }
            const std::size_t k = std::clamp<std::size_t>(rank, 1, m) - 1;
            std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(k), vals.end(), std::greater<>());
            rep.level = std::min(rep.level, vals[k]);
        }
    }
    rep.n0 = std::exp(-p) * static_cast<double>(N);
    std::vector<double> frac(m);
    std::vector<std::size_t> counts(m);
    for_each_sample_chunk(model, m, derive_seed(mc.seed, 0xD2), [&](std::size_t, std::size_t first, std::span<const double> block) {
        const std::size_t n = model.dim();
        for (std::size_t r = 0; r * n < block.size(); ++r) {
            const double* x = block.data() + r * n;
            std::size_t M = 0;
            for (const auto& f : forms) {
                double s = 0.0;
                for (std::size_t q = 0; q < f.index.size(); ++q) s += f.value[q] * x[f.index[q]];
                M += std::abs(s) >= rep.level;
            }
            counts[first + r] = M;
            frac[first + r] = static_cast<double>(M) / static_cast<double>(N);
        }
    });
    rep.histogram.assign(N + 1, 0);
    std::size_t above = 0;
    for (auto M : counts) {
        ++rep.histogram[M];
        above += static_cast<double>(M) > rep.n0;
    }
    while (rep.histogram.size() > 1 && rep.histogram.back() == 0) rep.histogram.pop_back();
    rep.mean_M_over_N = mean(frac);
    rep.mean_M_over_N_ci = bootstrap_mean_ci(frac, derive_seed(mc.seed, 0xD3));
    rep.prob_M_gt_n0 = static_cast<double>(above) / static_cast<double>(m);
    rep.prob_M_gt_n0_ci = wilson_interval(above, m);
    rep.crossing_ok = rep.mean_M_over_N_ci.hi >= level_prob;
    rep.tail_ok = rep.prob_M_gt_n0_ci.hi >= std::exp(-p);
    return rep;
}

// ------------------------------------------------------------------ common witness

void to_json(nlohmann::json& j, const CommonWitnessReport& r) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& e : r.entries) {
        nlohmann::json x = {{"point", e.point},
                            {"neighbors", e.neighbors},
                            {"feasible", e.feasible},
                            {"value_ratio", e.value_ratio},
                            {"epsilon", e.epsilon},
                            {"min_norm", e.min_norm},
                            {"domination_bound", e.domination_bound},
                            {"domination_ok", e.domination_ok}};
        x["witness"] = e.witness ? nlohmann::json(*e.witness) : nlohmann::json(nullptr);
        if (!e.note.empty()) x["note"] = e.note;
        entries.push_back(x);
    }
    j = {{"neighbors", r.neighbors}, {"entries", entries},       {"statistic", r.statistic},
         {"ci", r.ci},               {"K", finite_or_null(r.K)}, {"C4", finite_or_null(r.C4)},
         {"all_feasible", r.all_feasible}, {"domination_ok", r.domination_ok}, {"flags", r.flags}};
}

CommonWitnessReport common_witness_experiment(const VectorModel& model, const PointSet& T, double p,
                                              const McOptions& mc) {
    if (T.dim() != model.dim()) throw DomainError("family and model dimensions differ");
    CommonWitnessReport rep;
    rep.neighbors = significant_neighbors(model, T, p, {}, mc);
    PnormEvaluator eval(model, p, mc);
    const SampleBatch batch = sample(model, mc.budget, derive_seed(mc.seed, 0xC3));
    std::vector<SparsePoint> sup_forms;
    for (std::size_t j = 0; j < T.size(); ++j) {
        const auto& S = rep.neighbors.S[j];
        if (S.empty()) continue;
        CommonWitnessEntry e;
        e.point = j;
        e.neighbors = S.size();
        const Vector w = neighbor_weights(T, j);
        const IndexSet form_support = support_of(w);
        std::vector<SparsePoint> rest;
        std::vector<IndexSet> classes;
        double worst_overlap = 0.0;
        for (std::size_t s : S) {
            const IndexSet diff = set_difference(T.support(j), T.support(s));
            sup_forms.push_back(restricted(T.point(j), diff));
            rest.push_back(restricted(w, diff));
            classes.push_back(set_intersection(diff, form_support));
            const SparsePoint ov = restricted(w, set_intersection(T.support(j), T.support(s)));
            if (!ov.index.empty()) worst_overlap = std::max(worst_overlap, eval.sparse(ov.index, ov.value, false).value);
        }
        const SparsePoint full = restricted(w, form_support);
        const double full_norm = full.index.empty() ? 0.0 : eval.sparse(full.index, full.value, false).value;
        // || min_s |sum_{I(t)\I(s)} w_i X_i| ||_p on a shared batch.
        std::vector<double> vals(batch.rows);
        for (std::size_t r = 0; r < batch.rows; ++r) {
            const auto x = batch.row(r);
            double mn = kInf;
            for (const auto& f : rest) {
                double s = 0.0;
                for (std::size_t q = 0; q < f.index.size(); ++q) s += f.value[q] * x[static_cast<std::size_t>(f.index[q])];
                mn = std::min(mn, std::abs(s));
            }
            vals[r] = std::pow(mn, p);
        }
        e.min_norm = std::pow(mean(vals), 1.0 / p);
        const Interval min_ci = bootstrap_mean_ci(vals, derive_seed(mc.seed, 0xC4 + j), kBootstrapResamples,
                                                  [p](double m) { return std::pow(m, 1.0 / p); });
        if (full_norm > 0.0) {
            e.epsilon = 1.0 - worst_overlap / full_norm;
            const double factor = (1.0 - e.epsilon) * std::pow(static_cast<double>(S.size()), 1.0 / p);
            e.domination_bound = (1.0 - factor) * full_norm;
            if (factor < 1.0)
                e.domination_ok = std::max(min_ci.hi, e.min_norm) >= e.domination_bound;
            else
                e.note = "domination premise (1 - eps)|S(t)|^{1/p} < 1 not met";
        }
        rep.domination_ok = rep.domination_ok && e.domination_ok;
        if (static_cast<double>(form_support.size()) > p) {
            e.note = "support larger than p: witness skipped";
            rep.flags.push_back("witness_skipped");
            rep.all_feasible = false;
            rep.entries.push_back(std::move(e));
            continue;
        }
        WitnessOptions wopt;
        wopt.mc = {mc.budget, derive_seed(mc.seed, 0xC5 + j)};
        Witness wit = solve_common_witness(model, w, classes, p, wopt);
        const WitnessCertificate cert = witness_certify(model, wit, {mc.budget, derive_seed(mc.seed, 0xC6 + j)});
        e.feasible = wit.feasible && cert.feasible;
        e.value_ratio = wit.value / p;
        if (wit.value > 0.0) rep.C4 = std::max(rep.C4, p / wit.value);
        else rep.C4 = kInf;
        rep.all_feasible = rep.all_feasible && e.feasible;
        e.witness = std::move(wit);
        rep.entries.push_back(std::move(e));
    }
    if (sup_forms.empty()) {
        rep.flags.push_back("no_significant_neighbors");
        return rep;
    }
    const SupEstimate sup = estimate_sup_forms(model, sup_forms, mc);
    rep.statistic = sup.absmax_mean;
    rep.ci = sup.absmax_ci;
    if (rep.statistic > 0.0) rep.K = p / rep.statistic;
    return rep;
}

// ------------------------------------------------------------------ concentration probe

ProbeSet ProbeSet::from_json(const nlohmann::json& j, std::size_t n) {
    ProbeSet B;
    const std::string kind = j.at("kind").get<std::string>();
    auto read_bounds = [&](const char* key, double fill) {
        Vector v(n, fill);
        if (!j.contains(key)) return v;
        const auto& arr = j.at(key);
        if (arr.size() != n) throw ModelError(std::string(key) + " has wrong length");
        for (std::size_t i = 0; i < n; ++i)
            if (!arr[i].is_null()) v[i] = arr[i].get<double>();
        return v;
    };
    if (kind == "whole") {
        B.kind = Kind::whole;
    } else if (kind == "halfspace") {
        B.kind = Kind::halfspace;
        B.normal = j.at("normal").get<Vector>();
        if (B.normal.size() != n) throw ModelError("normal has wrong length");
        B.offset = j.value("offset", 0.0);
        double norm = 0.0;
        for (double x : B.normal) norm += x * x;
        if (norm == 0.0) throw ModelError("normal must be nonzero");
    } else if (kind == "box") {
        B.kind = Kind::box;
        B.lower = read_bounds("lower", -kInf);
        B.upper = read_bounds("upper", kInf);
        for (std::size_t i = 0; i < n; ++i)
            if (B.lower[i] > B.upper[i]) throw ModelError("box has an empty side");
    } else {
        throw ModelError("unknown set kind: " + kind);
    }
    return B;
}

nlohmann::json ProbeSet::to_json() const {
    switch (kind) {
        case Kind::whole: return {{"kind", "whole"}};
        case Kind::halfspace: return {{"kind", "halfspace"}, {"normal", normal}, {"offset", offset}};
        case Kind::box: {
            nlohmann::json lo = nlohmann::json::array(), hi = nlohmann::json::array();
            for (double x : lower) lo.push_back(finite_or_null(x));
            for (double x : upper) hi.push_back(finite_or_null(x));
            return {{"kind", "box"}, {"lower", lo}, {"upper", hi}};
        }
    }
    return {};
}

double ProbeSet::distance(std::span<const double> x) const {
    switch (kind) {
        case Kind::whole: return 0.0;
        case Kind::halfspace: {
            double dot = 0.0, nn = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                dot += normal[i] * x[i];
                nn += normal[i] * normal[i];
            }
            return std::max(0.0, dot - offset) / std::sqrt(nn);
        }
        case Kind::box: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double d = x[i] < lower[i] ? lower[i] - x[i] : (x[i] > upper[i] ? x[i] - upper[i] : 0.0);
                s += d * d;
            }
            return std::sqrt(s);
        }
    }
    return 0.0;
}

void to_json(nlohmann::json& j, const ConcentrationReport& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : r.rows)
        rows.push_back({{"beta", row.beta}, {"passes", row.passes}, {"worst_margin", finite_or_null(row.worst_margin)}});
    j = {{"base", r.base}, {"precondition_ok", r.precondition_ok}, {"analytic", r.analytic},
         {"u_grid", r.u_grid}, {"u_unresolved", r.u_unresolved}, {"rows", rows}, {"envelope_log_n", r.envelope}};
    j["beta"] = r.beta ? nlohmann::json(*r.beta) : nlohmann::json(nullptr);
}

ConcentrationReport exp_concentration_probe(const VectorModel& model, const ProbeSet& B, const Vector& u_grid,
                                            const Vector& beta_grid, const McOptions& mc) {
    const std::size_t n = model.dim();
    ConcentrationReport rep;
    rep.u_grid = u_grid;
    rep.envelope = std::log(static_cast<double>(n));
    for (double u : u_grid)
        if (u < 0.0) throw DomainError("u grid must be nonnegative");
    for (double b : beta_grid)
        if (!(b >= 0.0)) throw DomainError("beta grid must be nonnegative");
    // P(dist(X, B) <= r) as a function of r.
    std::function<Probability(double)> prob;
    std::vector<double> dist;
    int axis = -1;
    if (B.kind == ProbeSet::Kind::halfspace) {
        int nz = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (B.normal[i] != 0.0) {
                ++nz;
                axis = static_cast<int>(i);
            }
        if (nz != 1) axis = -1;
    }
    if (B.kind == ProbeSet::Kind::whole) {
        rep.analytic = true;
        prob = [](double) { return Probability{1.0, std::nullopt, true, 0}; };
    } else if (axis >= 0 && model.is_independent() &&
               model.coordinate(static_cast<std::size_t>(axis)).kind() != CoordinateKind::rademacher) {
        rep.analytic = true;
        const CoordinateLaw& law = model.coordinate(static_cast<std::size_t>(axis));
        const double scale = std::abs(B.normal[static_cast<std::size_t>(axis)]);
        prob = [&law, scale, &B](double r) {
            const double c = B.offset / scale + r;
            const double v = c >= 0.0 ? 1.0 - 0.5 * law.tail(c) : 0.5 * law.tail(-c);
            return Probability{v, std::nullopt, true, 0};
        };
    } else {
        if (mc.budget == 0) throw DomainError("Monte-Carlo budget must be positive");
        dist.resize(mc.budget);
        for_each_sample_chunk(model, mc.budget, mc.seed, [&](std::size_t, std::size_t first, std::span<const double> block) {
            for (std::size_t r = 0; r * n < block.size(); ++r) dist[first + r] = B.distance(block.subspan(r * n, n));
        });
        std::sort(dist.begin(), dist.end());
        prob = [&dist](double r) {
            const auto k = static_cast<std::size_t>(std::upper_bound(dist.begin(), dist.end(), r) - dist.begin());
            Probability pr;
            pr.value = static_cast<double>(k) / static_cast<double>(dist.size());
            pr.ci = wilson_interval(k, dist.size());
            pr.analytic = false;
            pr.samples = dist.size();
            return pr;
        };
    }
    if (!rep.analytic) {
        // A Monte-Carlo lower end cannot certify 1 - e^{-u} once e^{-u} is below
        // the resolution of the sample; those levels are reported and skipped.
        Vector kept;
        for (double u : u_grid) {
            if (std::exp(-u) * static_cast<double>(dist.size()) >= 10.0) kept.push_back(u);
            else rep.u_unresolved.push_back(u);
        }
        rep.u_grid = kept;
    }
    rep.base = prob(0.0);
    // P(X in B) >= 1/2, accepted when consistent with the interval.
    rep.precondition_ok = rep.base.upper() >= 0.5 - 1e-12;
    for (double beta : beta_grid) {
        ConcentrationRow row;
        row.beta = beta;
        for (double u : rep.u_grid) row.worst_margin = std::min(row.worst_margin, prob(beta * u).lower() - (1.0 - std::exp(-u)));
        row.passes = row.worst_margin >= -1e-15;
        if (row.passes && (!rep.beta || beta < *rep.beta)) rep.beta = beta;
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace sudakov
