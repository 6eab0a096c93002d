// Acceptance runner: one PASS/FAIL line per criterion, nonzero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <sys/wait.h>
#include <unistd.h>

#include "oracles.hpp"
#include "sudakov/commands.hpp"
#include "sudakov/harness.hpp"

using namespace sudakov;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Vector basis(std::size_t n, std::size_t i, double s) {
    Vector t(n, 0.0);
    t[i] = s;
    return t;
}

/// Random sparse vector with `k` nonzero entries drawn from +-U[lo, hi].
Vector sparse_vector(std::mt19937_64& g, std::size_t n, std::size_t k, double lo, double hi) {
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), g);
    std::uniform_real_distribution<double> mag(lo, hi);
    std::bernoulli_distribution sign(0.5);
    Vector t(n, 0.0);
    for (std::size_t j = 0; j < k; ++j) t[idx[j]] = (sign(g) ? 1.0 : -1.0) * mag(g);
    return t;
}

Outcome isotropy() {
    double worst = 0.0;
    std::string name;
    for (const auto& [label, model] : builtin_models(8)) {
        const IsotropyReport r = isotropy_check(model, 1000000, 11);
        if (r.max_covariance_deviation > worst) {
            worst = r.max_covariance_deviation;
            name = label;
        }
    }
    return {worst <= 0.02, fmt("max |E X_iX_j - delta_ij| = %.4f (%s), tolerance 0.02", worst, name.c_str())};
}

Outcome trivial_bound() {
    const auto models = builtin_models(10);
    std::size_t failures = 0;
    double worst = -kInf;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 g(1000 + seed);
        const double p = 2.0 + static_cast<double>(seed % 3);
        const auto cap = static_cast<std::size_t>(std::floor(std::exp(p)));
        const std::size_t size = std::uniform_int_distribution<std::size_t>(2, cap)(g);
        PointSet T(10, p);
        for (std::size_t j = 0; j < size; ++j)
            T.add(sparse_vector(g, 10, std::uniform_int_distribution<std::size_t>(1, 4)(g), 0.2, 2.0));
        const auto& model = models[seed % models.size()].second;
        const TrivialBoundReport r = trivial_upper_bound(model, T, p, {}, {40000, seed});
        const double slack = r.bound + 3.0 * r.emax_ci.width() - r.emax;
        worst = std::max(worst, r.emax / r.bound);
        if (slack < 0.0) ++failures;
    }
    return {failures == 0, fmt("%zu/20 corpora violate E max <= eA + 3 widths; max E max / eA = %.3f", failures, worst)};
}

struct FormCase {
    Vector t;
    double p;
};

/// 200 random (t, p) in dimension 16 with support <= 16 and p in [1, 8].
std::vector<FormCase> form_corpus() {
    std::mt19937_64 g(303);
    std::vector<FormCase> out;
    for (int k = 0; k < 200; ++k) {
        const std::size_t s = std::uniform_int_distribution<std::size_t>(1, 16)(g);
        const double p = std::uniform_real_distribution<double>(1.0, 8.0)(g);
        out.push_back({sparse_vector(g, 16, s, 0.01, 3.0), p});
    }
    return out;
}

Outcome hitczenko_band() {
    double lo = kInf, hi = 0.0;
    for (const auto& [t, p] : form_corpus()) {
        const double ratio = bernoulli_pnorm_exact(t, p) / hitczenko_norm(t, p);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo >= 0.25 && hi <= 4.0, fmt("exact / formula ratio in [%.3f, %.3f], band [0.25, 4]", lo, hi)};
}

Outcome gluskin_kwapien_band() {
    const auto model = VectorModel::iid(16, CoordinateLaw::symmetric_exponential(1.0));
    double lo = kInf, hi = 0.0;
    std::uint64_t seed = 0;
    for (const auto& [t, p] : form_corpus()) {
        const MomentEstimate m = pnorm_linear_form(model, t, p, {20000, seed++});
        const double ratio = m.value / gluskin_kwapien_bound(t, p);
        lo = std::min(lo, ratio);
        hi = std::max(hi, ratio);
    }
    return {lo >= 0.125 && hi <= 3.0, fmt("norm / (p|t|_inf + sqrt(p)|t|_2) in [%.3f, %.3f], band [1/8, 3]", lo, hi)};
}

Outcome witness_characterization() {
    const std::size_t n = 16;
    const std::vector<std::pair<std::string, VectorModel>> models = {
        {"exponential", VectorModel::iid(n, CoordinateLaw::isotropic_exponential())},
        {"gaussian", VectorModel::iid(n, CoordinateLaw::gaussian())}};
    const auto unit_exp = VectorModel::iid(n, CoordinateLaw::symmetric_exponential(1.0));
    double lo = kInf, hi = 0.0, lp_err = 0.0;
    std::mt19937_64 g(505);
    for (double p : {2.0, 4.0, 8.0})
        for (int k = 0; k < 100; ++k) {
            const auto s = std::uniform_int_distribution<std::size_t>(1, static_cast<std::size_t>(p))(g);
            const Vector t = sparse_vector(g, n, s, 0.05, 3.0);
            for (const auto& [name, model] : models) {
                const double value = solve_witness(model, t, p).value;
                const double norm = pnorm_linear_form(model, t, p).value;
                lo = std::min(lo, value / norm);
                hi = std::max(hi, value / norm);
            }
            double tmax = 0.0;
            for (double x : t) tmax = std::max(tmax, std::abs(x));
            const double v = solve_witness(unit_exp, t, p).value;
            lp_err = std::max(lp_err, std::abs(v - p * tmax) / (p * tmax));
        }
    return {lo >= 0.125 && hi <= 8.0 && lp_err <= 1e-12,
            fmt("witness / norm in [%.3f, %.3f] (band [1/8, 8]); rate-1 exponential vs p|t|_inf rel. error %.1e", lo,
                hi, lp_err)};
}

Outcome common_witness_maxmin() {
    const std::size_t n = 12;
    const std::vector<std::pair<std::string, VectorModel>> models = {
        {"lp", VectorModel::iid(n, CoordinateLaw::symmetric_exponential(1.0))},
        {"isotropic", VectorModel::iid(n, CoordinateLaw::isotropic_exponential())},
        {"gaussian", VectorModel::iid(n, CoordinateLaw::gaussian())}};
    std::mt19937_64 g(606);
    std::size_t instances = 0, lp_violations = 0, smooth_violations = 0;
    double worst_smooth = 0.0;
    for (int k = 0; k < 40; ++k) {
        const double p = std::uniform_real_distribution<double>(2.0, 8.0)(g);
        const auto s = std::uniform_int_distribution<std::size_t>(2, static_cast<std::size_t>(p))(g);
        const Vector t = sparse_vector(g, n, s, 0.1, 3.0);
        const IndexSet supp = support_of(t);
        std::vector<IndexSet> classes;
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 4)(g);
        for (std::size_t c = 0; c < m; ++c) {
            IndexSet C;
            for (int i : supp)
                if (std::bernoulli_distribution(0.5)(g)) C.push_back(i);
            if (C.empty()) C.push_back(supp[c % supp.size()]);
            classes.push_back(C);
        }
        for (const auto& [name, model] : models) {
            const double common = solve_common_witness(model, t, classes, p).value;
            double best = kInf;
            for (const IndexSet& C : classes) {
                Vector tc(n, 0.0);
                for (int i : C) tc[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)];
                best = std::min(best, solve_witness(model, tc, p).value);
            }
            ++instances;
            if (name == "lp") {
                if (common > best) ++lp_violations;
            } else {
                const double excess = (common - best) / best;
                worst_smooth = std::max(worst_smooth, excess);
                if (excess > 1e-6) ++smooth_violations;
            }
        }
    }
    return {lp_violations == 0 && smooth_violations == 0,
            fmt("%zu instances; LP-path violations %zu (zero tolerance); smooth-path violations %zu (max rel. excess "
                "%.1e, tolerance 1e-6)",
                instances, lp_violations, smooth_violations, worst_smooth)};
}

Outcome reduction_postconditions() {
    // Separated families near a common lattice: t = a_i e_i plus a small
    // off-lattice entry that thresholding removes. delta is coarse so that the
    // separated family fits into one d_p cell.
    const std::size_t n = 16;
    const double p = 8.0;
    const auto model = VectorModel::iid(n, CoordinateLaw::isotropic_exponential());
    std::size_t good = 0, exact_failures = 0, simplified = 0;
    double min_sep = kInf;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        std::mt19937_64 g(700 + seed);
        std::uniform_real_distribution<double> a(3.1, 3.4), eta(0.0, 0.2);
        PointSet T(n, p, {Vector(n, 0.0)});
        for (std::size_t i = 0; i < 10; ++i) {
            Vector t = basis(n, i, a(g));
            t[(i + 1) % n] = eta(g);
            T.add(t);
        }
        if (min_separation(model, T, p, false).value < p) return {false, "constructed input is not p-separated"};
        ReductionOptions opt;
        opt.delta = 0.9;
        opt.trials = 200;
        opt.seed = seed;
        const ReductionReport r = reduce(model, T, p, opt);
        if (r.outcome != ReductionOutcome::simplified || !r.verification) continue;
        ++simplified;
        const auto& v = *r.verification;
        if (!(v.form_ok && v.support_size_ok && v.distinct_supports_ok)) ++exact_failures;
        min_sep = std::min(min_sep, v.min_separation);
        if (v.form_ok && v.support_size_ok && v.distinct_supports_ok && v.separation_ok) ++good;
    }
    return {exact_failures == 0 && good >= 9,
            fmt("%zu/10 simplified, %zu with exact-check failures, %zu/10 all postconditions (need 9); min output "
                "separation %.3f vs p/2 = %.1f",
                simplified, exact_failures, good, min_sep, p / 2)};
}

Outcome greedy_extraction() {
    const std::size_t n = 16;
    const double p = 4.0;
    const auto model = VectorModel::iid(n, CoordinateLaw::isotropic_exponential());
    std::size_t bad = 0, residual_violations = 0, separated = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        std::mt19937_64 g(800 + seed);
        PointSet T(n, p, {Vector(n, 0.0)});
        for (int j = 0; j < 20; ++j)
            T.add(sparse_vector(g, n, std::uniform_int_distribution<std::size_t>(1, 4)(g), 0.1, 3.0));
        const McOptions mc{20000, seed};
        const ExtractionResult ex = greedy_disjoint_extract(model, T, p, {}, mc);
        bool disjoint = true;
        for (std::size_t a = 0; a < ex.selected.size(); ++a)
            for (std::size_t b = a + 1; b < ex.selected.size(); ++b)
                if (!set_intersection(support_of(ex.pieces[a]), support_of(ex.pieces[b])).empty()) disjoint = false;
        bool certified = true;
        for (const auto& m : ex.norms) certified = certified && m.lower() >= p / 8.0;
        if (!(disjoint && certified && ex.disjoint && ex.certified)) ++bad;
        const ResidualReport res = residual_separation_check(model, T, ex.covered, p, mc);
        residual_violations += res.violations.size();
        separated += res.separated_pairs;
    }
    return {bad == 0 && residual_violations == 0,
            fmt("5 instances: %zu with overlap or uncertified pieces; %zu residual violations over %zu separated pairs",
                bad, residual_violations, separated)};
}

Outcome latala() {
    struct Instance {
        Vector r, v;
        std::vector<IndexSet> supports;
        double q;
    };
    std::vector<Instance> inst;
    // Singletons with r_i = q.
    for (double q : {1.0, 2.0, 3.0}) {
        const auto N = static_cast<std::size_t>(std::ceil(std::exp(q)));
        Instance x{Vector(N, q), Vector(N, 1.0), {}, q};
        for (std::size_t i = 0; i < N; ++i) x.supports.push_back({static_cast<int>(i)});
        inst.push_back(x);
    }
    // Disjoint pairs with r_i = q / 2.
    {
        const double q = 2.0;
        const std::size_t N = 8;
        Instance x{Vector(2 * N, q / 2), Vector(2 * N, 1.0), {}, q};
        for (std::size_t i = 0; i < N; ++i) x.supports.push_back({static_cast<int>(2 * i), static_cast<int>(2 * i + 1)});
        inst.push_back(x);
    }
    // Mixed weights v = 1{r > 2}: each support is one large and one small coordinate.
    {
        const double q = 2.5;
        Vector r(13, 3.0);
        r.insert(r.end(), {1.5, 1.5});
        Vector v(r.size());
        for (std::size_t i = 0; i < r.size(); ++i) v[i] = r[i] > 2.0 ? 1.0 : 0.0;
        Instance x{r, v, {}, q};
        for (int i = 0; i < 13; ++i) x.supports.push_back({i, 13 + (i % 2)});
        inst.push_back(x);
    }
    std::size_t failures = 0;
    std::ostringstream os;
    for (std::size_t k = 0; k < inst.size(); ++k) {
        const auto& x = inst[k];
        const LatalaReport r = latala_minoration_check(x.r, x.v, x.supports, x.q, {100000, k});
        const bool ok = r.precondition_ok && r.esup >= x.q / 8.0 - 3.0 * r.ci.width();
        if (!ok) ++failures;
        os << (k ? ", " : "") << fmt("%.2f/%.3f", r.esup, x.q / 8.0);
    }
    return {failures == 0, fmt("%zu/5 fail; E sup vs q/8: ", failures) + os.str()};
}

Outcome gaussian_sudakov() {
    const double p = 3.0;
    const auto N = static_cast<std::size_t>(std::ceil(std::exp(p)));
    const std::size_t n = N;
    const auto model = VectorModel::iid(n, CoordinateLaw::gaussian());
    PointSet T(n, p);
    for (std::size_t i = 0; i < N; ++i) T.add(basis(n, i, std::sqrt(p)));
    const MinorationReport r = minoration_report(model, T, p, {100000, 3});
    // Oracle: E max of N independent normals by quadrature, scaled.
    const double oracle = std::sqrt(p) * oracle::expected_max_normals(static_cast<int>(N));
    const bool oracle_ok = std::abs(r.esup.max_mean - oracle) <= 3.0 * r.esup.max_ci.width();
    return {r.K <= 6.0 && oracle_ok,
            fmt("|T| = %zu, A = %.3f, E max = %.3f (oracle %.3f), K = %.3f (need <= 6)", N, r.A, r.esup.max_mean,
                oracle, r.K)};
}

Outcome disjoint_support() {
    const double p = 2.0, C = 2.0;
    const auto N = static_cast<std::size_t>(std::ceil(std::exp(C * p)));
    const std::size_t n = N - 1;
    const auto model = VectorModel::iid(n, CoordinateLaw::isotropic_exponential());
    PointSet T(n, p, {Vector(n, 0.0)});
    for (std::size_t i = 0; i < n; ++i) T.add(basis(n, i, 2.0));
    const DisjointSupportReport r = disjoint_support_experiment(model, T, p, C, {100000, 5});
    const bool ok = r.disjoint && r.norms_ok && r.cardinality_ok && r.minoration.K <= 10.0 && r.crossing_ok && r.tail_ok;
    return {ok, fmt("N = %zu, K = %.3f (need <= 10), E M/N = %.4f [%.4f, %.4f] vs 2e^-p = %.4f, P(M > n0) hi = %.4f "
                    "vs e^-p = %.4f",
                    N, r.minoration.K, r.mean_M_over_N, r.mean_M_over_N_ci.lo, r.mean_M_over_N_ci.hi,
                    2 * std::exp(-p), r.prob_M_gt_n0_ci.hi, std::exp(-p))};
}

Outcome concentration() {
    // 1-D rate-1 exponential, B = (-inf, 0]: P(X <= beta u) = 1 - e^{-beta u}/2.
    const auto one = VectorModel::iid(1, CoordinateLaw::symmetric_exponential(1.0));
    ProbeSet B;
    B.kind = ProbeSet::Kind::halfspace;
    B.normal = {1.0};
    B.offset = 0.0;
    Vector u_grid;
    for (double u = 0.0; u <= 30.0; u += 0.25) u_grid.push_back(u);
    // beta < 1 fails once u > log 2 / (1 - beta), i.e. u > 13.9 for 0.95.
    const Vector betas = {0.5, 0.9, 0.95, 1.0, 1.5};
    const ConcentrationReport r1 = exp_concentration_probe(one, B, u_grid, betas);
    bool oracle_ok = true;
    for (const auto& row : r1.rows) {
        bool expect = true;
        for (double u : u_grid) expect = expect && (1.0 - std::exp(-row.beta * u) / 2.0) >= 1.0 - std::exp(-u) - 1e-15;
        oracle_ok = oracle_ok && expect == row.passes;
    }
    const bool one_ok = r1.analytic && r1.beta && *r1.beta == 1.0 && oracle_ok;

    const std::size_t n = 16;
    const auto model = VectorModel::iid(n, CoordinateLaw::isotropic_exponential());
    ProbeSet H;
    H.kind = ProbeSet::Kind::halfspace;
    H.normal = Vector(n, 1.0);
    H.offset = 0.0;
    Vector u16, b16;
    for (double u = 0.0; u <= 10.0; u += 0.25) u16.push_back(u);
    for (double b = 0.25; b <= 16.0; b += 0.25) b16.push_back(b);
    const ConcentrationReport r16 = exp_concentration_probe(model, H, u16, b16, {100000, 12});
    const double env = 3.0 * std::log(static_cast<double>(n));
    const bool many_ok = r16.precondition_ok && r16.beta && *r16.beta < env;
    return {one_ok && many_ok,
            fmt("1-D: smallest passing beta %.2f (analytic %d, oracle agrees %d); n = 16: beta = %s vs 3 log n = %.3f "
                "(u checked up to %.2f)",
                r1.beta ? *r1.beta : -1.0, r1.analytic, oracle_ok,
                r16.beta ? fmt("%.2f", *r16.beta).c_str() : "none", env, r16.u_grid.empty() ? 0.0 : r16.u_grid.back())};
}

Outcome vc_sauer() {
    std::mt19937_64 g(1313);
    std::size_t mismatches = 0, sauer_failures = 0;
    for (int k = 0; k < 50; ++k) {
        const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 12)(g);
        const std::size_t m = std::uniform_int_distribution<std::size_t>(1, 40)(g);
        std::vector<std::uint32_t> masks;
        SupportFamily F;
        F.n = n;
        for (std::size_t j = 0; j < m; ++j) {
            const auto mask = static_cast<std::uint32_t>(g() & ((1u << n) - 1u));
            masks.push_back(mask);
            IndexSet s;
            for (std::size_t i = 0; i < n; ++i)
                if (mask >> i & 1u) s.push_back(static_cast<int>(i));
            F.sets.push_back(s);
        }
        F.deduplicate();
        std::sort(masks.begin(), masks.end());
        masks.erase(std::unique(masks.begin(), masks.end()), masks.end());
        const VcResult r = vc_dimension(F, 12);
        if (!r.exact || r.v != oracle::vc_dimension_bruteforce(masks, n)) ++mismatches;
        if (static_cast<double>(F.sets.size()) > oracle::binomial_sum(n, r.v)) ++sauer_failures;
    }
    return {mismatches == 0 && sauer_failures == 0,
            fmt("50 families: %zu VC mismatches vs exhaustive search, %zu Sauer violations", mismatches, sauer_failures)};
}

std::string slurp(const std::filesystem::path& f) {
    std::ifstream in(f, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

Outcome cli_determinism() {
    const std::filesystem::path cli = SUDAKOV_CLI_PATH;
    const std::filesystem::path configs = SUDAKOV_CONFIG_DIR;
    const auto tmp = std::filesystem::temp_directory_path() / ("sudakov_acceptance_" + std::to_string(::getpid()));
    std::filesystem::create_directories(tmp);
    std::size_t differing = 0, errors = 0;
    std::string names;
    for (const auto& cmd : command_names()) {
        std::string out[2];
        for (int rep = 0; rep < 2; ++rep) {
            const auto json = tmp / (cmd + std::to_string(rep) + ".json");
            const auto csv = tmp / (cmd + std::to_string(rep) + ".csv");
            const std::string line = "\"" + cli.string() + "\" " + cmd + " --config \"" +
                                     (configs / (cmd + ".json")).string() + "\" --seed 7 --budget 5000 --out \"" +
                                     json.string() + "\" --csv \"" + csv.string() + "\" > /dev/null 2>&1";
            const int status = std::system(line.c_str());
            const int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
            if (code != 0 && code != 2) ++errors;
            out[rep] = slurp(json) + "\n--csv--\n" + slurp(csv);
        }
        if (out[0] != out[1] || out[0].size() < 16) ++differing;
        names += (names.empty() ? "" : " ") + cmd;
    }
    std::filesystem::remove_all(tmp);
    return {differing == 0 && errors == 0,
            fmt("%zu commands (%s): %zu differ between reruns, %zu usage/config errors", command_names().size(),
                names.c_str(), differing, errors)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"isotropy of built-in models", isotropy},
        {"E max <= eA on small families", trivial_bound},
        {"two-term formula band for Bernoulli norms", hitczenko_band},
        {"exponential p-norm envelope band", gluskin_kwapien_band},
        {"witness two-sided characterization", witness_characterization},
        {"common witness max-min inequality", common_witness_maxmin},
        {"reduction postconditions", reduction_postconditions},
        {"greedy disjoint extraction", greedy_extraction},
        {"minoration for truncated exponentials", latala},
        {"gaussian minoration end to end", gaussian_sudakov},
        {"disjoint-support minoration", disjoint_support},
        {"exponential concentration probe", concentration},
        {"VC dimension and Sauer bound", vc_sauer},
        {"CLI determinism", cli_determinism},
    };
    // Optional argument: run a single criterion by number.
    const int only = argc > 1 ? std::atoi(argv[1]) : 0;
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (only && static_cast<int>(k + 1) != only) continue;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << (k + 1) << "] " << criteria[k].first << ": " << o.detail
                  << fmt(" (%.1fs)", secs) << std::endl;
        if (!o.pass) ++failed;
    }
    return failed == 0 ? 0 : 1;
}
