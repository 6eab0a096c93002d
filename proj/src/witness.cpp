#include "sudakov/witness.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "sudakov/lp.hpp"

namespace sudakov {

namespace {

// ------------------------------------------------------------------ independent core

/// Demand of one coordinate at marginal price theta: the level where the
/// (sub)gradient of G crosses theta. `upper` takes tied linear pieces fully.
double demand(const CoordinateLaw& law, double theta, bool upper) {
    if (law.kind() == CoordinateKind::gaussian) {
        if (theta <= gaussian_log_tail_slope(0.0)) return 0.0;
        // G'(u) >= u, so the root lies in [0, theta].
        double lo = 0.0;
        double hi = theta;
        for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
            const double mid = 0.5 * (lo + hi);
            (gaussian_log_tail_slope(mid) < theta ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    double a = 0.0;
    for (const auto& seg : law.segments()) {
        if (seg.slope < theta || (upper && seg.slope == theta))
            a = seg.end;
        else
            break;
    }
    return a;
}

struct Problem {
    std::vector<const CoordinateLaw*> laws;  // one per support position
    Vector c;                                 // objective weights (>= 0)
    double budget = 0.0;                      // nats left after the floor
    double floor = 0.0;
};

double spend(const Problem& pr, const Vector& a) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) s += pr.laws[j]->log_tail(a[j]);
    return s;
}

/// Piecewise-linear laws: fill segments by decreasing c_j / slope; ties go to
/// the higher position first, which gives the lexicographically smallest a.
Vector solve_greedy(const Problem& pr) {
    const std::size_t k = pr.laws.size();
    Vector a(k, pr.floor);
    struct Piece {
        double ratio;
        std::size_t j;
        double start;
        double end;
        double slope;
    };
    std::vector<Piece> pieces;
    for (std::size_t j = 0; j < k; ++j) {
        for (const auto& seg : pr.laws[j]->segments()) {
            const double s0 = std::max(seg.start, pr.floor);
            if (seg.end <= s0) continue;
            if (seg.slope == 0.0) {
                a[j] = std::max(a[j], seg.end);
                continue;
            }
            if (pr.c[j] > 0.0) pieces.push_back({pr.c[j] / seg.slope, j, s0, seg.end, seg.slope});
        }
    }
    std::stable_sort(pieces.begin(), pieces.end(), [](const Piece& x, const Piece& y) {
        if (x.ratio != y.ratio) return x.ratio > y.ratio;
        if (x.j != y.j) return x.j > y.j;
        return x.start < y.start;
    });
    double left = pr.budget;
    for (const auto& pc : pieces) {
        if (left <= 0.0) break;
        const double cost = pc.slope * (pc.end - pc.start);
        if (cost <= left) {
            a[pc.j] = pc.end;
            left -= cost;
        } else {
            a[pc.j] = pc.start + left / pc.slope;
            left = 0.0;
        }
    }
    return a;
}

/// General convex laws: bisection on the dual price, then the leftover budget
/// goes to the coordinates that jump at the critical price.
Vector solve_kkt(const Problem& pr) {
    const std::size_t k = pr.laws.size();
    const double total = pr.budget + spend(pr, Vector(k, pr.floor));
    auto levels = [&](double mu, bool upper) {
        Vector a(k);
        for (std::size_t j = 0; j < k; ++j) a[j] = std::max(pr.floor, demand(*pr.laws[j], pr.c[j] * mu, upper));
        return a;
    };
    double lo = 0.0;
    double hi = 1.0;
    while (spend(pr, levels(hi, true)) <= total) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e300) return levels(lo, true);  // every coordinate saturated
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (spend(pr, levels(mid, true)) <= total ? lo : hi) = mid;
    }
    Vector a = levels(lo, true);
    const Vector b = levels(hi, true);
    double left = total - spend(pr, a);
    for (std::size_t jj = k; jj-- > 0 && left > 0.0;) {
        if (!(b[jj] > a[jj])) continue;
        const CoordinateLaw& law = *pr.laws[jj];
        const double g0 = law.log_tail(a[jj]);
        double top = b[jj];
        if (!std::isfinite(top)) {
            top = a[jj] + 1.0;
            while (law.log_tail(top) - g0 <= left) top = a[jj] + 2.0 * (top - a[jj]);
        }
        if (law.log_tail(top) - g0 <= left) {
            left -= law.log_tail(top) - g0;
            a[jj] = top;
            continue;
        }
        double ulo = a[jj];
        double uhi = top;
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (ulo + uhi);
            if (mid <= ulo || mid >= uhi) break;
            (law.log_tail(mid) - g0 <= left ? ulo : uhi) = mid;
        }
        a[jj] = ulo;
        left = 0.0;
    }
    return a;
}

Vector solve_independent(const Problem& pr) {
    const bool linear = std::all_of(pr.laws.begin(), pr.laws.end(),
                                    [](const CoordinateLaw* l) { return l->is_piecewise_linear(); });
    return linear ? solve_greedy(pr) : solve_kkt(pr);
}

// ------------------------------------------------------------------ dependent models

std::size_t min_count(std::size_t m, double threshold) {
    std::size_t lo = 0;
    std::size_t hi = m + 1;  // hi: smallest count known to pass (m + 1 = none)
    if (wilson_interval(m, m).lo < threshold) return m + 1;
    hi = m;
    while (lo + 1 < hi) {
        const std::size_t mid = (lo + hi) / 2;
        (wilson_interval(mid, m).lo >= threshold ? hi : lo) = mid;
    }
    return wilson_interval(lo, m).lo >= threshold ? lo : hi;
}

struct DependentResult {
    Vector a;
    std::size_t count = 0;
    std::size_t rows = 0;
    bool feasible = true;
    int sweeps = 0;
};

DependentResult solve_dependent(const VectorModel& model, const IndexSet& support, const Vector& c, double p,
                                double floor, const McOptions& mc) {
    const SampleBatch batch = sample(model, mc.budget, mc.seed);
    const std::size_t m = batch.rows;
    const std::size_t k = support.size();
    const std::size_t need = min_count(m, std::exp(-p));
    DependentResult res;
    res.rows = m;
    auto count = [&](const Vector& a) {
        std::size_t hits = 0;
        for (std::size_t r = 0; r < m; ++r) {
            const double* x = batch.data.data() + r * batch.cols;
            bool ok = true;
            for (std::size_t j = 0; j < k && ok; ++j) ok = std::abs(x[support[j]]) >= a[j];
            hits += ok;
        }
        return hits;
    };
    if (need > m) {
        res.feasible = false;
        res.a.assign(k, floor);
        return res;
    }
    // Warm start: the same program with independent coordinates of matching shape.
    const CoordinateLaw approx = model.structure() == Structure::lq_ball_uniform && model.lq_exponent() < 2.0
                                     ? CoordinateLaw::isotropic_exponential()
                                     : CoordinateLaw::gaussian();
    Problem pr;
    pr.laws.assign(k, &approx);
    pr.c = c;
    pr.floor = floor;
    pr.budget = p - static_cast<double>(k) * approx.log_tail(floor);
    Vector a0 = pr.budget >= 0.0 ? solve_independent(pr) : Vector(k, floor);
    auto scaled = [&](double s) {
        Vector a(k);
        for (std::size_t j = 0; j < k; ++j) a[j] = std::max(floor, s * a0[j]);
        return a;
    };
    Vector a = scaled(1.0);
    if (count(a) < need) {
        if (count(scaled(0.0)) < need) {
            res.feasible = false;
            res.a = scaled(0.0);
            return res;
        }
        double lo = 0.0;
        double hi = 1.0;
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (count(scaled(mid)) >= need ? lo : hi) = mid;
        }
        a = scaled(lo);
    }
    // Coordinate ascent: each a_j moves to the largest level the others allow.
    std::vector<double> vals;
    for (int sweep = 0; sweep < 50; ++sweep) {
        bool improved = false;
        for (std::size_t j = 0; j < k; ++j) {
            if (c[j] <= 0.0) continue;
            vals.clear();
            for (std::size_t r = 0; r < m; ++r) {
                const double* x = batch.data.data() + r * batch.cols;
                bool ok = true;
                for (std::size_t h = 0; h < k && ok; ++h)
                    if (h != j) ok = std::abs(x[support[h]]) >= a[h];
                if (ok) vals.push_back(std::abs(x[support[j]]));
            }
            if (vals.size() < need || need == 0) continue;
            std::nth_element(vals.begin(), vals.begin() + static_cast<std::ptrdiff_t>(need - 1), vals.end(),
                             std::greater<>());
            const double best = vals[need - 1];
            if (best > a[j] * (1.0 + 1e-12) + 1e-15) {
                a[j] = best;
                improved = true;
            }
        }
        res.sweeps = sweep + 1;
        if (!improved) break;
    }
    res.a = a;
    res.count = count(a);
    return res;
}

// ------------------------------------------------------------------ shared pieces

struct Prepared {
    IndexSet support;
    Vector c;  // |t_i| on the support
};

Prepared prepare(const VectorModel& model, std::span<const double> t, double p) {
    if (t.size() != model.dim()) throw DomainError("vector has wrong dimension");
    if (!(p > 0.0) || !std::isfinite(p)) throw DomainError("budget p must be positive");
    Prepared pr;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!std::isfinite(t[i])) throw DomainError("vector entries must be finite");
        if (t[i] != 0.0) {
            pr.support.push_back(static_cast<int>(i));
            pr.c.push_back(std::abs(t[i]));
        }
    }
    if (static_cast<double>(pr.support.size()) > p)
        throw PreconditionError("support of t is larger than p");
    return pr;
}

/// Maximizes sum_j c_j a_j on the support with budget p.
Witness solve_weighted(const VectorModel& model, std::span<const double> t, const IndexSet& support, const Vector& c,
                       double p, const WitnessOptions& opt) {
    Witness w;
    w.support = support;
    w.t.assign(t.begin(), t.end());
    w.a.assign(model.dim(), 0.0);
    w.p = p;
    w.floor = opt.floor;
    if (opt.floor < 0.0) throw DomainError("floor must be nonnegative");
    if (support.empty()) {
        w.method = "trivial";
        return w;
    }
    if (model.is_independent()) {
        Problem pr;
        for (int i : support) pr.laws.push_back(&model.coordinate(static_cast<std::size_t>(i)));
        pr.c = c;
        pr.floor = opt.floor;
        const double floor_cost = spend(pr, Vector(support.size(), opt.floor));
        pr.budget = p - floor_cost;
        if (!(pr.budget >= 0.0)) {
            w.feasible = false;
            w.flags.push_back("floor_exceeds_budget");
            w.method = "infeasible";
            for (int i : support) w.a[static_cast<std::size_t>(i)] = opt.floor;
            w.budget_used = floor_cost;
            return w;
        }
        const bool linear = std::all_of(pr.laws.begin(), pr.laws.end(),
                                        [](const CoordinateLaw* l) { return l->is_piecewise_linear(); });
        const Vector a = linear ? solve_greedy(pr) : solve_kkt(pr);
        w.method = linear ? "lp_greedy" : "kkt";
        for (std::size_t j = 0; j < support.size(); ++j) w.a[static_cast<std::size_t>(support[j])] = a[j];
        w.budget_used = spend(pr, a);
    } else {
        const DependentResult r = solve_dependent(model, support, c, p, opt.floor, opt.mc);
        w.method = "monte_carlo_ascent";
        for (std::size_t j = 0; j < support.size(); ++j) w.a[static_cast<std::size_t>(support[j])] = r.a[j];
        if (!r.feasible) {
            w.feasible = false;
            w.flags.push_back(r.count == 0 && r.rows > 0 ? "floor_exceeds_budget" : "infeasible_at_budget");
        }
        const double lo = wilson_interval(r.count, r.rows).lo;
        w.budget_used = lo > 0.0 ? -std::log(lo) : kInf;
        if (r.sweeps >= 50) w.flags.push_back("sweep_limit");
    }
    return w;
}

}  // namespace

double witness_objective(std::span<const double> t, std::span<const double> a, const std::vector<IndexSet>& classes,
                         const IndexSet& support) {
    auto sum = [&](const IndexSet& s) {
        double v = 0.0;
        for (int i : s) v += std::abs(t[static_cast<std::size_t>(i)]) * a[static_cast<std::size_t>(i)];
        return v;
    };
    if (classes.empty()) return sum(support);
    double best = kInf;
    for (const auto& cl : classes) best = std::min(best, sum(cl));
    return best;
}

void to_json(nlohmann::json& j, const Witness& w) {
    nlohmann::json a = nlohmann::json::array();
    for (int i : w.support) a.push_back(w.a[static_cast<std::size_t>(i)]);
    j = {{"support", w.support}, {"a", a},           {"budget_used", w.budget_used},
         {"value", w.value},     {"p", w.p},         {"floor", w.floor},
         {"feasible", w.feasible}, {"method", w.method}};
    if (!w.flags.empty()) j["flags"] = w.flags;
    if (!w.classes.empty()) j["classes"] = w.classes;
    if (w.gap) j["gap"] = *w.gap;
}

Witness solve_witness(const VectorModel& model, std::span<const double> t, double p, const WitnessOptions& opt) {
    const Prepared pr = prepare(model, t, p);
    Witness w = solve_weighted(model, t, pr.support, pr.c, p, opt);
    w.value = witness_objective(t, w.a, {}, w.support);
    return w;
}

namespace {

Witness common_lp(const VectorModel& model, std::span<const double> t, const Prepared& pr,
                  const std::vector<IndexSet>& classes, double p, const WitnessOptions& opt) {
    const std::size_t k = pr.support.size();
    Witness w;
    w.support = pr.support;
    w.t.assign(t.begin(), t.end());
    w.a.assign(model.dim(), 0.0);
    w.p = p;
    w.floor = opt.floor;
    w.classes = classes;
    w.method = "max_min_lp";
    std::vector<const CoordinateLaw*> laws;
    for (int i : pr.support) laws.push_back(&model.coordinate(static_cast<std::size_t>(i)));
    double floor_cost = 0.0;
    for (auto* l : laws) floor_cost += l->log_tail(opt.floor);
    const double budget = p - floor_cost;
    if (!(budget >= 0.0)) {
        w.feasible = false;
        w.method = "infeasible";
        w.flags.push_back("floor_exceeds_budget");
        for (int i : pr.support) w.a[static_cast<std::size_t>(i)] = opt.floor;
        w.budget_used = floor_cost;
        return w;
    }
    // Variables: one per (coordinate, linear piece above the floor), then z.
    struct Var {
        std::size_t j;
        double len;
        double slope;
    };
    std::vector<Var> vars;
    for (std::size_t j = 0; j < k; ++j)
        for (const auto& seg : laws[j]->segments()) {
            const double s0 = std::max(seg.start, opt.floor);
            if (seg.end > s0) vars.push_back({j, seg.end - s0, seg.slope});
        }
    const std::size_t nv = vars.size() + 1;
    const std::size_t z = vars.size();
    std::vector<int> pos(model.dim(), -1);
    for (std::size_t j = 0; j < k; ++j) pos[static_cast<std::size_t>(pr.support[j])] = static_cast<int>(j);

    LinearProgram lp;
    lp.vars = nv;
    lp.c.assign(nv, 0.0);
    lp.c[z] = 1.0;
    for (const auto& cl : classes) {
        Vector row(nv, 0.0);
        row[z] = 1.0;
        double rhs = 0.0;
        for (int i : cl) {
            const auto j = static_cast<std::size_t>(pos[static_cast<std::size_t>(i)]);
            rhs += pr.c[j] * opt.floor;
            for (std::size_t v = 0; v < vars.size(); ++v)
                if (vars[v].j == j) row[v] -= pr.c[j];
        }
        lp.add_le(std::move(row), rhs);
    }
    {
        Vector row(nv, 0.0);
        for (std::size_t v = 0; v < vars.size(); ++v) row[v] = vars[v].slope;
        lp.add_le(std::move(row), budget);
    }
    for (std::size_t v = 0; v < vars.size(); ++v)
        if (std::isfinite(vars[v].len)) {
            Vector row(nv, 0.0);
            row[v] = 1.0;
            lp.add_le(std::move(row), vars[v].len);
        }
    LpResult res = solve_lp(lp);
    if (res.status != LpStatus::optimal) throw std::runtime_error("max-min program did not reach an optimum");
    // Lexicographic tie-break: keep the optimum, then minimize a_1, a_2, ...
    const double zstar = res.objective;
    {
        Vector row(nv, 0.0);
        row[z] = -1.0;
        lp.add_le(std::move(row), -(zstar - 1e-12 * std::max(1.0, zstar)));
    }
    for (std::size_t j = 0; j < k; ++j) {
        LinearProgram sec = lp;
        sec.c.assign(nv, 0.0);
        Vector row(nv, 0.0);
        for (std::size_t v = 0; v < vars.size(); ++v)
            if (vars[v].j == j) {
                sec.c[v] = -1.0;
                row[v] = 1.0;
            }
        LpResult r2 = solve_lp(sec);
        if (r2.status != LpStatus::optimal) break;
        res = r2;
        const double level = -r2.objective;
        lp.add_le(std::move(row), level + 1e-12 * std::max(1.0, level));
    }
    Vector a(k, opt.floor);
    for (std::size_t v = 0; v < vars.size(); ++v) a[vars[v].j] += res.x[v];
    double used = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        w.a[static_cast<std::size_t>(pr.support[j])] = a[j];
        used += laws[j]->log_tail(a[j]);
    }
    w.budget_used = used;
    return w;
}

Witness common_dual(const VectorModel& model, std::span<const double> t, const Prepared& pr,
                    const std::vector<IndexSet>& classes, double p, const WitnessOptions& opt) {
    const std::size_t k = pr.support.size();
    const std::size_t K = classes.size();
    std::vector<int> pos(model.dim(), -1);
    for (std::size_t j = 0; j < k; ++j) pos[static_cast<std::size_t>(pr.support[j])] = static_cast<int>(j);
    auto class_sums = [&](const Witness& w) {
        Vector g(K, 0.0);
        for (std::size_t c = 0; c < K; ++c)
            for (int i : classes[c]) g[c] += std::abs(t[static_cast<std::size_t>(i)]) * w.a[static_cast<std::size_t>(i)];
        return g;
    };
    Vector weight(K, 1.0 / static_cast<double>(K));
    Witness best;
    double best_primal = -kInf;
    double best_dual = kInf;
    Vector avg(model.dim(), 0.0);
    const int max_iter = model.is_independent() ? 4000 : 40;
    int iter = 0;
    for (iter = 1; iter <= max_iter; ++iter) {
        Vector ct(k, 0.0);
        for (std::size_t c = 0; c < K; ++c)
            for (int i : classes[c]) ct[static_cast<std::size_t>(pos[static_cast<std::size_t>(i)])] += weight[c] * std::abs(t[static_cast<std::size_t>(i)]);
        Witness w = solve_weighted(model, t, pr.support, ct, p, opt);
        if (!w.feasible) return w;
        const Vector g = class_sums(w);
        double dual = 0.0;
        for (std::size_t c = 0; c < K; ++c) dual += weight[c] * g[c];
        best_dual = std::min(best_dual, dual);
        const double primal = *std::min_element(g.begin(), g.end());
        if (primal > best_primal) {
            best_primal = primal;
            best = w;
        }
        // Running average of the iterates is feasible too (the budget set is convex).
        for (std::size_t i = 0; i < avg.size(); ++i) avg[i] += (w.a[i] - avg[i]) / iter;
        Witness wa = w;
        wa.a = avg;
        const double pa = witness_objective(t, avg, classes, pr.support);
        if (pa > best_primal) {
            best_primal = pa;
            best = wa;
        }
        if (best_dual - best_primal <= 1e-6 * std::max(best_dual, 1e-300)) break;
        // Exponentiated-gradient step on the simplex of class weights.
        const double gmax = std::max(*std::max_element(g.begin(), g.end()), 1e-300);
        const double eta = 2.0 / std::sqrt(static_cast<double>(iter));
        double z = 0.0;
        for (std::size_t c = 0; c < K; ++c) {
            weight[c] *= std::exp(-eta * g[c] / gmax);
            z += weight[c];
        }
        for (auto& x : weight) x /= z;
    }
    best.classes = classes;
    best.method = model.is_independent() ? "max_min_dual" : "max_min_dual_monte_carlo";
    best.gap = best_dual > 0.0 ? (best_dual - best_primal) / best_dual : 0.0;
    if (*best.gap > 1e-6) best.flags.push_back("gap_not_reached");
    if (model.is_independent()) {
        double used = 0.0;
        for (int i : pr.support) used += model.coordinate(static_cast<std::size_t>(i)).log_tail(best.a[static_cast<std::size_t>(i)]);
        best.budget_used = used;
    }
    return best;
}

}  // namespace

Witness solve_common_witness(const VectorModel& model, std::span<const double> t, const std::vector<IndexSet>& classes,
                             double p, const WitnessOptions& opt) {
    const Prepared pr = prepare(model, t, p);
    for (const auto& cl : classes)
        for (int i : cl)
            if (!std::binary_search(pr.support.begin(), pr.support.end(), i))
                throw PreconditionError("class member is not contained in the support of t");
    std::vector<IndexSet> cls;
    for (auto cl : classes) {
        std::sort(cl.begin(), cl.end());
        cl.erase(std::unique(cl.begin(), cl.end()), cl.end());
        cls.push_back(std::move(cl));
    }
    if (cls.empty()) {
        Witness w = solve_witness(model, t, p, opt);
        w.flags.push_back("empty_class_fallback");
        return w;
    }
    if (std::any_of(cls.begin(), cls.end(), [](const IndexSet& c) { return c.empty(); })) {
        Witness w = solve_witness(model, t, p, opt);
        w.classes = cls;
        w.value = 0.0;
        w.flags.push_back("empty_member");
        return w;
    }
    if (cls.size() == 1 && cls[0] == pr.support) {
        Witness w = solve_witness(model, t, p, opt);
        w.classes = cls;
        return w;
    }
    const bool linear = model.is_independent() &&
                        std::all_of(pr.support.begin(), pr.support.end(), [&](int i) {
                            return model.coordinate(static_cast<std::size_t>(i)).is_piecewise_linear();
                        });
    Witness w = linear ? common_lp(model, t, pr, cls, p, opt) : common_dual(model, t, pr, cls, p, opt);
    w.t.assign(t.begin(), t.end());
    w.p = p;
    w.floor = opt.floor;
    w.value = witness_objective(t, w.a, cls, pr.support);
    return w;
}

// ------------------------------------------------------------------ certification

void to_json(nlohmann::json& j, const WitnessCertificate& c) {
    j = {{"feasible", c.feasible}, {"joint_tail", c.joint},         {"threshold", c.threshold},
         {"value_consistent", c.value_consistent}, {"recomputed_value", c.recomputed_value},
         {"norm", c.norm},         {"ratio", c.ratio},              {"D", c.D}};
}

WitnessCertificate witness_certify(const VectorModel& model, const Witness& w, const McOptions& mc) {
    WitnessCertificate c;
    c.threshold = std::exp(-w.p);
    Vector a(model.dim(), 0.0);
    for (int i : w.support) a[static_cast<std::size_t>(i)] = w.a.at(static_cast<std::size_t>(i));
    c.joint = joint_tail(model, a, mc);
    c.feasible = c.joint.lower() >= c.threshold * (1.0 - 1e-9);
    c.recomputed_value = witness_objective(w.t, w.a, w.classes, w.support);
    c.value_consistent = std::abs(c.recomputed_value - w.value) <= 1e-9 * std::max(1.0, std::abs(w.value));
    if (w.support.empty()) {
        c.norm.degenerate = true;
        c.norm.p = w.p;
        c.ratio = 1.0;
        c.D = 1.0;
        return c;
    }
    c.norm = pnorm_linear_form(model, w.t, std::max(1.0, w.p), mc);
    c.ratio = c.norm.value > 0.0 ? w.value / c.norm.value : kInf;
    c.D = c.ratio > 0.0 ? std::max(c.ratio, 1.0 / c.ratio) : kInf;
    return c;
}

// ------------------------------------------------------------------ r profile

void to_json(nlohmann::json& j, const RProfile& r) {
    j = {{"r", r.r}, {"gamma", r.gamma}, {"k", r.k}, {"p", r.p}};
}

RProfile r_profile(const VectorModel& model, const Vector& k, double p, double gamma) {
    if (k.size() != model.dim()) throw DomainError("magnitudes have wrong dimension");
    if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
    if (!(p >= 2.0)) throw DomainError("p must be at least 2");
    RProfile prof;
    prof.gamma = gamma;
    prof.k = k;
    prof.p = p;
    prof.r.assign(k.size(), 2.0);
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (k[i] < 0.0) throw DomainError("magnitudes must be nonnegative");
        auto h = [&](double r) { return k[i] * coord_moment(model, i, r) - r * gamma; };
        if (k[i] * coord_moment(model, i, 2.0) <= 2.0 * gamma) continue;
        if (h(p) > 0.0) {
            prof.r[i] = p;
            continue;
        }
        // ||X_i||_r / r is nonincreasing, so h changes sign once on [2, p].
        double lo = 2.0;
        double hi = p;
        for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) > 0.0 ? lo : hi) = mid;
        }
        prof.r[i] = hi;
    }
    return prof;
}

// ------------------------------------------------------------------ significant neighbours

void to_json(nlohmann::json& j, const NeighborReport& r) {
    nlohmann::json viol = nlohmann::json::array();
    for (const auto& [a, b] : r.violations) viol.push_back({a, b});
    j = {{"S", r.S}, {"threshold", r.threshold}, {"violations", viol}, {"separated_pairs", r.separated_pairs}};
}

Vector neighbor_weights(const PointSet& T, std::size_t j) {
    Vector w(T.dim(), 0.0);
    const auto& lat = T.lattice();
    for (int i : T.support(j)) {
        const auto ii = static_cast<std::size_t>(i);
        if (lat)
            w[ii] = lat->k[ii] > 4.0 * lat->rho ? lat->k[ii] : 0.0;
        else
            w[ii] = std::abs(T.point(j)[ii]);
    }
    return w;
}

NeighborReport significant_neighbors(const VectorModel& model, const PointSet& T, double p,
                                     std::optional<double> threshold, const McOptions& mc) {
    NeighborReport rep;
    rep.threshold = threshold.value_or(p / 8.0);
    const std::size_t N = T.size();
    PnormEvaluator eval(model, p, mc);
    std::vector<Vector> weights(N);
    for (std::size_t j = 0; j < N; ++j) weights[j] = neighbor_weights(T, j);
    std::vector<std::vector<char>> member(N, std::vector<char>(N, 0));
    rep.S.assign(N, {});
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = 0; b < N; ++b) {
            if (a == b) continue;
            const IndexSet diff = set_difference(T.support(a), T.support(b));
            Vector w;
            for (int i : diff) w.push_back(weights[a][static_cast<std::size_t>(i)]);
            const double v = diff.empty() ? 0.0 : eval.sparse(diff, w, false).value;
            if (v >= rep.threshold) {
                member[a][b] = 1;
                rep.S[a].push_back(b);
            }
        }
    for (std::size_t a = 0; a < N; ++a)
        for (std::size_t b = a + 1; b < N; ++b) {
            Vector d(T.dim());
            for (std::size_t i = 0; i < d.size(); ++i) d[i] = T.point(a)[i] - T.point(b)[i];
            if (eval(d, false).value < p / 2.0) continue;
            ++rep.separated_pairs;
            if (!member[a][b] && !member[b][a]) rep.violations.emplace_back(a, b);
        }
    return rep;
}

}  // namespace sudakov
