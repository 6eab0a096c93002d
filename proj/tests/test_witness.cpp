#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sudakov/witness.hpp"

using namespace sudakov;

namespace {

VectorModel exponential_rate1(std::size_t n) { return VectorModel::iid(n, CoordinateLaw::symmetric_exponential(1.0)); }
VectorModel gaussian(std::size_t n) { return VectorModel::iid(n, CoordinateLaw::gaussian()); }

Vector random_form(RandomSource& rng, std::size_t n, std::size_t support) {
    Vector t(n, 0.0);
    for (std::size_t j = 0; j < support; ++j) t[rng.index(n)] = rng.gaussian();
    return t;
}

double linf(const Vector& t) {
    double m = 0.0;
    for (double x : t) m = std::max(m, std::abs(x));
    return m;
}

// Level a with -log P(|g| >= a) = p, by bisection on the quadrature tail.
double gaussian_level(double p) {
    double lo = 0.0, hi = 20.0;
    for (int it = 0; it < 80; ++it) {
        const double mid = 0.5 * (lo + hi);
        (-std::log(oracle::gaussian_two_sided_tail(mid)) < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("exponential witnesses are linear programs") {
    for (double p : {2.0, 4.0, 8.0}) {
        CAPTURE(p);
        const auto m = exponential_rate1(8);
        Vector ones(8, 0.0);
        for (int i = 0; i < int(p); ++i) ones[static_cast<std::size_t>(i)] = 1.0;
        const auto w = solve_witness(m, ones, p);
        CHECK(w.value == doctest::Approx(p).epsilon(1e-12));
        CHECK(w.budget_used <= p + 1e-9);

        Vector e1(8, 0.0);
        e1[0] = 1.0;
        const auto w1 = solve_witness(m, e1, p);
        CHECK(w1.a[0] == doctest::Approx(p).epsilon(1e-12));
        CHECK(w1.value == doctest::Approx(p).epsilon(1e-12));
        CHECK(w1.method == "lp_greedy");
    }
}

TEST_CASE("gaussian witness level") {
    Vector e1{1.0, 0.0, 0.0};
    const auto w = solve_witness(gaussian(3), e1, 4.0);
    const double level = gaussian_level(4.0);
    CHECK(w.a[0] == doctest::Approx(level).epsilon(1e-7));
    CHECK(level == doctest::Approx(2.35918).epsilon(1e-5));
    const auto cert = witness_certify(gaussian(3), w);
    CHECK(cert.feasible);
    CHECK(cert.ratio == doctest::Approx(level / std::pow(3.0, 0.25)).epsilon(1e-6));
}

TEST_CASE("witness preconditions and floors") {
    const auto m = exponential_rate1(4);
    CHECK_THROWS_AS(solve_witness(m, Vector{1, 1, 1, 0}, 2.0), PreconditionError);
    WitnessOptions opt;
    opt.floor = 3.0;  // two coordinates at level 3 cost 6 > 4
    const auto w = solve_witness(m, Vector{1, 1, 0, 0}, 4.0, opt);
    CHECK_FALSE(w.feasible);
    CHECK(std::find(w.flags.begin(), w.flags.end(), "floor_exceeds_budget") != w.flags.end());
    opt.floor = 1.0;
    const auto wf = solve_witness(m, Vector{2, 1, 0, 0}, 4.0, opt);
    CHECK(wf.feasible);
    CHECK(wf.a[1] == doctest::Approx(1.0));
    CHECK(wf.a[0] == doctest::Approx(3.0));
}

TEST_CASE("certificates") {
    const auto m = exponential_rate1(3);
    Witness trivial;
    trivial.t = Vector(3, 0.0);
    trivial.a = Vector(3, 0.0);
    trivial.p = 2.0;
    const auto c0 = witness_certify(m, trivial);
    CHECK(c0.feasible);
    CHECK(c0.recomputed_value == 0.0);
    for (double p : {2.0, 4.0, 8.0}) {
        const auto w = solve_witness(m, Vector{1, 0, 0}, p);
        const auto c = witness_certify(m, w);
        const double expect = p / std::pow(std::tgamma(p + 1.0), 1.0 / p);
        CHECK(c.ratio == doctest::Approx(expect).epsilon(1e-9));
        CHECK(c.ratio >= 1.0);
        CHECK(c.ratio <= kE);
        CHECK(c.value_consistent);
    }
}

TEST_CASE("common witnesses") {
    const auto m = exponential_rate1(2);
    const Vector t{1.0, 1.0};
    for (double p : {2.0, 4.0}) {
        const auto w = solve_common_witness(m, t, {{0}, {1}}, p);
        CHECK(w.a[0] == doctest::Approx(p / 2));
        CHECK(w.a[1] == doctest::Approx(p / 2));
        CHECK(w.value == doctest::Approx(p / 2));
        // Grid enumeration of the two-variable program.
        double best = 0.0;
        for (int i = 0; i <= 400; ++i) {
            const double a0 = p * i / 400.0;
            best = std::max(best, std::min(a0, p - a0));
        }
        CHECK(w.value == doctest::Approx(best).epsilon(1e-9));
    }
    const auto single = solve_common_witness(m, t, {{0, 1}}, 2.0);
    const auto plain = solve_witness(m, t, 2.0);
    CHECK(single.value == plain.value);
    CHECK(single.a == plain.a);
    const auto empty = solve_common_witness(m, t, {{0}, {}}, 2.0);
    CHECK(empty.value == 0.0);
    CHECK_THROWS_AS(solve_common_witness(m, Vector{1.0, 0.0}, {{1}}, 2.0), PreconditionError);
}

TEST_CASE("witness value is monotone, homogeneous, and dominates the common witness") {
    RandomSource rng(8);
    const std::vector<std::pair<std::string, VectorModel>> models = {
        {"exponential", exponential_rate1(10)}, {"gaussian", gaussian(10)}, {"canonical", builtin_models(10)[3].second}};
    for (const auto& [name, m] : models) {
        CAPTURE(name);
        for (int rep = 0; rep < 15; ++rep) {
            const double p = 2.0 + rng.index(6);
            const Vector t = random_form(rng, 10, static_cast<std::size_t>(p));
            const auto w = solve_witness(m, t, p);
            const auto wp = solve_witness(m, t, p + 1.0);
            CHECK(wp.value >= w.value * (1.0 - 1e-9));
            Vector bigger = t;
            for (auto& x : bigger) x *= (x != 0.0 ? 1.5 : 0.0);
            const auto wb = solve_witness(m, bigger, p);
            CHECK(wb.value == doctest::Approx(1.5 * w.value).epsilon(1e-8));
            Vector one_up = t;
            const auto supp = support_of(t);
            one_up[static_cast<std::size_t>(supp.front())] *= 2.0;
            CHECK(solve_witness(m, one_up, p).value >= w.value * (1.0 - 1e-9));
            CHECK(witness_certify(m, w).feasible);

            std::vector<IndexSet> classes;
            for (int c = 0; c < 3; ++c) {
                IndexSet cls;
                for (int i : supp)
                    if (rng.uniform() < 0.6) cls.push_back(i);
                if (cls.empty()) cls.push_back(supp.back());
                classes.push_back(cls);
            }
            const auto common = solve_common_witness(m, t, classes, p);
            double bound = kInf;
            for (const auto& cls : classes) {
                Vector restricted(10, 0.0);
                for (int i : cls) restricted[static_cast<std::size_t>(i)] = t[static_cast<std::size_t>(i)];
                bound = std::min(bound, solve_witness(m, restricted, p).value);
            }
            CHECK(common.value <= bound * (1.0 + 1e-9));
            CHECK(common.budget_used <= p + 1e-9);
        }
    }
}

TEST_CASE("dependent witnesses are certified at the conservative end") {
    const auto ball = VectorModel::lq_ball(4, 1.0);
    WitnessOptions opt;
    opt.mc = {20000, 5};
    const auto w = solve_witness(ball, Vector{1.0, 0.5, 0.0, 0.0}, 2.0, opt);
    CHECK(w.method == "monte_carlo_ascent");
    CHECK(w.feasible);
    CHECK(w.value > 0.0);
    const auto c = witness_certify(ball, w, {20000, 5});
    CHECK(c.feasible);
}

TEST_CASE("moment-crossing profile") {
    const auto m = exponential_rate1(3);
    const double p = 8.0;
    const double g = kDefaultGamma;
    auto enorm = [](double r) { return std::pow(std::tgamma(r + 1.0), 1.0 / r); };
    const double k_cross = 5.0 * g / enorm(5.0);
    const Vector k{0.0, 1e3, k_cross};
    const auto prof = r_profile(m, k, p);
    CHECK(prof.r[0] == 2.0);
    CHECK(prof.r[1] == p);
    const double scan = oracle::grid_first_crossing([&](double r) { return r * g - k_cross * enorm(r); }, 2.0, p);
    CHECK(prof.r[2] == doctest::Approx(scan).epsilon(2e-3));
    CHECK(prof.r[2] == doctest::Approx(5.0).epsilon(1e-6));
    // k = gamma e: k ||e||_r stays above gamma r on [2, p], so the profile saturates.
    const auto sat = r_profile(m, Vector{g * kE, 0, 0}, p);
    const double scan2 = oracle::grid_first_crossing([&](double r) { return r * g - g * kE * enorm(r); }, 2.0, p);
    CHECK(scan2 == p);
    CHECK(sat.r[0] == p);
    for (double r : prof.r) {
        CHECK(r >= 2.0);
        CHECK(r <= p);
    }
}

TEST_CASE("significant neighbours") {
    const auto m = exponential_rate1(6);
    PointSet disjoint(6, 2.0, {Vector{3, 0, 0, 0, 0, 0}, Vector{0, 3, 3, 0, 0, 0}, Vector{0, 0, 0, 0, 4, 0}});
    const auto rep = significant_neighbors(m, disjoint, 2.0);
    for (std::size_t t = 0; t < 3; ++t) CHECK(rep.S[t].size() == 2);
    CHECK(rep.violations.empty());

    // Same support, different values: both restricted norms vanish.
    PointSet same(6, 2.0, {Vector{3, 0, 0, 0, 0, 0}, Vector{-3, 0, 0, 0, 0, 0}});
    const auto r2 = significant_neighbors(m, same, 2.0);
    CHECK(r2.S[0].empty());
    CHECK(r2.violations.size() == 1);
}
