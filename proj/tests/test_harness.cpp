#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "sudakov/harness.hpp"

using namespace sudakov;

namespace {

Vector basis(std::size_t n, std::size_t i, double scale = 1.0) {
    Vector e(n, 0.0);
    e[i] = scale;
    return e;
}

VectorModel gaussian(std::size_t n) { return VectorModel::iid(n, CoordinateLaw::gaussian()); }
VectorModel exponential_rate(std::size_t n, double rate) {
    return VectorModel::iid(n, CoordinateLaw::symmetric_exponential(rate));
}

bool has_flag(const std::vector<std::string>& flags, const std::string& f) {
    return std::find(flags.begin(), flags.end(), f) != flags.end();
}

}  // namespace

TEST_CASE("cardinality regimes") {
    CHECK(CardinalityTarget::parse("p").f(3.0) == 3.0);
    CHECK(CardinalityTarget::parse("Cp", 2.0).f(3.0) == 6.0);
    CHECK(CardinalityTarget::parse("Cp_log", 2.0).f(3.0) == doctest::Approx(6.0 * std::log(4.0)));
    CHECK(CardinalityTarget::parse("Cp2", 0.5).f(4.0) == 8.0);
    CHECK(CardinalityTarget::parse("Cp2").tag() == "Cp2");
    CHECK_THROWS_AS(CardinalityTarget::parse("p^3"), ModelError);
}

TEST_CASE("expected suprema") {
    const auto g = gaussian(16);
    const auto zero = esup_estimate(g, PointSet(16, 2.0, {Vector(16, 0.0)}));
    CHECK(zero.max_mean == 0.0);
    CHECK(zero.absmax_mean == 0.0);

    const auto pm = esup_estimate(g, PointSet(16, 2.0, {basis(16, 0), basis(16, 0, -1.0)}), {200000, 1});
    CHECK(pm.max_ci.lo - 0.005 <= std::sqrt(2.0 / oracle::kPi));
    CHECK(std::sqrt(2.0 / oracle::kPi) <= pm.max_ci.hi + 0.005);

    PointSet T(16, 2.0);
    for (std::size_t i = 0; i < 16; ++i) T.add(basis(16, i));
    const auto e16 = esup_estimate(g, T, {200000, 2});
    const double ref = oracle::expected_max_normals(16);
    CHECK(ref == doctest::Approx(1.766).epsilon(1e-3));
    CHECK(e16.max_ci.lo - 0.005 <= ref);
    CHECK(ref <= e16.max_ci.hi + 0.005);
}

TEST_CASE("minoration report") {
    const auto g = gaussian(4);
    const auto single = minoration_report(g, PointSet(4, 2.0, {basis(4, 1)}), 2.0);
    CHECK(single.degenerate);
    CHECK(has_flag(single.flags, "degenerate_family"));

    // Gaussian basis family: A = sqrt p * sqrt 2 * ||g||_p exactly.
    const double p = 3.0;
    const std::size_t m = 21;  // ceil(e^3)
    PointSet T(m, p);
    for (std::size_t i = 0; i < m; ++i) T.add(basis(m, i, std::sqrt(p)));
    const auto r = minoration_report(gaussian(m), T, p, {100000, 3});
    CHECK(r.A == doctest::Approx(std::sqrt(p) * std::sqrt(2.0) * gaussian_pnorm(p)).epsilon(1e-12));
    CHECK(r.K > 0.0);
    CHECK(r.K == doctest::Approx(r.A / r.esup.max_mean));
    CHECK(r.cardinality_met);
    CHECK_FALSE(r.trivial_bound_applicable);
    const auto again = minoration_report(gaussian(m), T, p, {100000, 3});
    CHECK(nlohmann::json(again).dump() == nlohmann::json(r).dump());
}

TEST_CASE("report sanity checks") {
    const auto m = VectorModel::iid(5, CoordinateLaw::isotropic_exponential());
    PointSet T(5, 3.0, {Vector(5, 0.0)});
    for (std::size_t i = 0; i < 5; ++i) T.add(basis(5, i, 2.0));
    const auto r = minoration_report(m, T, 3.0, {50000, 1});
    CHECK(r.trivial_bound_applicable);
    CHECK(r.trivial_bound_holds);
    CHECK(r.symmetry_applicable);
    CHECK(r.symmetry_holds);
    CHECK(r.esup.absmax_mean >= r.esup.max_mean);
}

TEST_CASE("translation invariance of the expected supremum") {
    const auto m = VectorModel::lq_ball(4, 1.5);
    PointSet T(4, 2.0, {Vector{1, 0, 0.5, 0}, Vector{0, 2, 0, 0}, Vector{-1, 0, 0, 1}, Vector{0.3, 0.3, 0.3, 0.3}});
    const auto base = esup_estimate(m, T, {100000, 4});
    const auto shifted = esup_estimate(m, T.translated(T.point(2)), {100000, 4});
    const double slack = base.max_ci.width() + shifted.max_ci.width();
    CHECK(std::abs(base.max_mean - shifted.max_mean) <= slack);
}

TEST_CASE("truncated exponential minoration") {
    // Disjoint singletons with r_i v_i = q: the hypothesis holds with equality.
    const double q = 2.0;
    const std::size_t N = 8;  // ceil(e^2)
    std::vector<IndexSet> supports;
    for (std::size_t i = 0; i < N; ++i) supports.push_back({int(i)});
    const auto ok = latala_minoration_check(Vector(N, 2.0), Vector(N, 1.0), supports, q, {50000, 1});
    CHECK(ok.precondition_ok);
    CHECK(ok.min_pair_sum == doctest::Approx(q));
    CHECK(ok.holds);
    CHECK(ok.esup >= q / 8.0);

    const auto bad = latala_minoration_check(Vector(N, 1.0), Vector(N, 1.0), supports, q);
    CHECK_FALSE(bad.precondition_ok);
    CHECK_FALSE(bad.note.empty());

    const auto vac = latala_minoration_check(Vector(N, 1.0), Vector(N, 1.0), supports, 0.0);
    CHECK(vac.vacuous);
    CHECK(vac.holds);

    CHECK_THROWS_AS(latala_minoration_check(Vector(N, 0.5), Vector(N, 1.0), supports, q), DomainError);
    CHECK_THROWS_AS(latala_minoration_check(Vector(N, 2.0), Vector(N, 0.5), supports, q), DomainError);
}

TEST_CASE("tail comparison of expected suprema") {
    PointSet T(6, 2.0, {Vector{1, 1, 0, 0, 0, 0}, Vector{0, 0, 1, -1, 0, 0}, Vector{0, 0.5, 0, 0, 2, 1}});
    const auto expo = exponential_rate(6, 1.0);
    const auto same = bernoulli_comparison_check(expo, expo, T);
    CHECK(same.C_grid == doctest::Approx(1.0));
    CHECK(same.hypothesis_ok);
    CHECK(same.esup_dominating == same.esup_dominated);
    CHECK(same.holds);

    const auto rad = VectorModel::iid(6, CoordinateLaw::rademacher());
    const auto er = bernoulli_comparison_check(expo, rad, T, {}, {50000, 2});
    CHECK(er.C_grid == doctest::Approx(kE).epsilon(1e-12));
    CHECK(er.holds);

    const auto wide = exponential_rate(6, 0.5);  // twice the rate-1 law
    const auto sc = bernoulli_comparison_check(wide, expo, T, {}, {50000, 3});
    CHECK(sc.C_grid == doctest::Approx(1.0));
    CHECK(sc.esup_dominating == doctest::Approx(2.0 * sc.esup_dominated).epsilon(1e-12));
    CHECK(sc.holds);

    const auto tight = bernoulli_comparison_check(expo, rad, T, 1.0, {5000, 3});
    CHECK_FALSE(tight.hypothesis_ok);
    CHECK_THROWS_AS(bernoulli_comparison_check(VectorModel::lq_ball(6, 1.0), rad, T), PreconditionError);
}

TEST_CASE("disjoint support experiment") {
    const auto m = VectorModel::iid(4, CoordinateLaw::isotropic_exponential());
    const auto r = disjoint_support_experiment(m, PointSet(4, 2.0, {Vector(4, 0.0), basis(4, 0, 2.0)}), 2.0, 2.0, {20000, 1});
    CHECK(has_flag(r.flags, "degenerate_family"));
    CHECK(r.disjoint);
    CHECK(r.norms_ok);
    CHECK_FALSE(r.cardinality_ok);

    const std::size_t N = 12;
    const auto mm = VectorModel::iid(N, CoordinateLaw::isotropic_exponential());
    PointSet T(N, 2.0, {Vector(N, 0.0)});
    for (std::size_t i = 0; i < N; ++i) T.add(basis(N, i, 2.0));
    const auto d = disjoint_support_experiment(mm, T, 2.0, 1.0, {50000, 2});
    CHECK(d.N == N);
    CHECK(d.n0 == doctest::Approx(std::exp(-2.0) * N));
    std::size_t total = 0;
    for (auto c : d.histogram) total += c;
    CHECK(total == 50000);
    // P(|X_i| >= L) = 2 e^{-2} per coordinate, so E M / N is close to 2 e^{-2}.
    CHECK(d.level == doctest::Approx(2.0 * std::log(1.0 / (2.0 * std::exp(-2.0))) / std::sqrt(2.0)).epsilon(0.03));
    CHECK(d.crossing_ok);
    CHECK(d.tail_ok);
}

TEST_CASE("common witness experiment on disjoint supports") {
    const double p = 4.0;
    const std::size_t n = 6;
    const auto m = VectorModel::iid(n, CoordinateLaw::isotropic_exponential());
    PointSet T(n, p, {basis(n, 0, 3.0), basis(n, 1, 3.0), Vector{0, 0, 2, 2, 0, 0}});
    const auto r = common_witness_experiment(m, T, p, {50000, 1});
    for (const auto& S : r.neighbors.S) CHECK(S.size() == 2);
    CHECK(r.all_feasible);
    const auto direct = esup_estimate(m, T, {50000, 1});
    CHECK(std::abs(r.statistic - direct.absmax_mean) <= r.ci.width() + direct.absmax_ci.width());
    CHECK(r.K == doctest::Approx(p / r.statistic));
}

TEST_CASE("domination of overlapping supports") {
    // One point meets four others in a single coordinate each.
    const double p = 4.0;
    const std::size_t n = 8;
    const auto m = VectorModel::iid(n, CoordinateLaw::isotropic_exponential());
    PointSet T(n, p, {Vector{3, 3, 3, 3, 0, 0, 0, 0}});
    for (std::size_t j = 0; j < 4; ++j) {
        Vector s(n, 0.0);
        s[j] = 3.0;
        s[4 + j] = 3.0;
        T.add(s);
    }
    const auto r = common_witness_experiment(m, T, p, {50000, 2});
    REQUIRE_FALSE(r.entries.empty());
    const auto& e = r.entries.front();
    CHECK(e.point == 0);
    CHECK(e.neighbors == 4);
    // ||3 X_1||_4 / ||3 (X_1 + ... + X_4)||_4 = (6 / 60)^{1/4}.
    CHECK(e.epsilon == doctest::Approx(1.0 - std::pow(6.0 / 60.0, 0.25)).epsilon(1e-9));
    CHECK(e.note.empty());
    CHECK(e.domination_ok);
    CHECK(e.min_norm >= e.domination_bound);
    CHECK(e.feasible);
}

TEST_CASE("concentration probe") {
    const auto one = exponential_rate(1, 1.0);
    ProbeSet B = ProbeSet::from_json(nlohmann::json::parse(R"({"kind": "halfspace", "normal": [1], "offset": 0})"), 1);
    Vector u_grid;
    for (int k = 0; k <= 40; ++k) u_grid.push_back(0.25 * k);
    const auto r = exp_concentration_probe(one, B, u_grid, {0.5, 1.0, 2.0});
    CHECK(r.analytic);
    CHECK(r.precondition_ok);
    CHECK(r.base.value == 0.5);
    REQUIRE(r.beta);
    CHECK(*r.beta == 1.0);
    // Margin at beta = 1 is e^{-u}/2, smallest at the largest u.
    CHECK(r.rows[1].worst_margin == doctest::Approx(0.5 * std::exp(-10.0)).epsilon(1e-9));
    CHECK_FALSE(r.rows[0].passes);

    const auto whole = exp_concentration_probe(VectorModel::lq_ball(3, 1.0), ProbeSet{}, u_grid, {0.0, 0.1});
    CHECK(*whole.beta == 0.0);

    ProbeSet far = ProbeSet::from_json(nlohmann::json::parse(R"({"kind": "halfspace", "normal": [1], "offset": -2})"), 1);
    CHECK_FALSE(exp_concentration_probe(one, far, u_grid, {1.0}).precondition_ok);

    const auto box = ProbeSet::from_json(nlohmann::json::parse(R"({"kind": "box", "lower": [null, -1], "upper": [0, 1]})"), 2);
    CHECK(box.distance(Vector{1.0, 3.0}) == doctest::Approx(std::sqrt(5.0)));
    CHECK(box.distance(Vector{-5.0, 0.0}) == 0.0);
    const auto mc = exp_concentration_probe(exponential_rate(2, 1.0), box, u_grid, {1.0, 2.0, 4.0}, {50000, 1});
    CHECK_FALSE(mc.analytic);
    CHECK(mc.base.ci.has_value());
    CHECK_THROWS_AS(ProbeSet::from_json(nlohmann::json::parse(R"({"kind": "ball"})"), 2), ModelError);
}
