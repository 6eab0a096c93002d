#include "sudakov/commands.hpp"

#include <cmath>
#include <sstream>

#include "sudakov/combinatorics.hpp"
#include "sudakov/harness.hpp"
#include "sudakov/moments.hpp"
#include "sudakov/reduction.hpp"
#include "sudakov/witness.hpp"

namespace sudakov {

using nlohmann::json;

VectorModel load_model(const json& j) {
    if (j.contains("builtin")) {
        const auto name = j.at("builtin").get<std::string>();
        for (auto& [key, model] : builtin_models(j.at("n").get<std::size_t>()))
            if (key == name) return model;
        throw ModelError("unknown builtin model: " + name);
    }
    return VectorModel::from_json(j);
}

PointSet load_family(const json& j, double p) {
    if (j.contains("dense")) {
        const auto rows = j.at("dense").get<std::vector<Vector>>();
        if (rows.empty()) throw ModelError("empty family");
        PointSet T(rows.front().size(), p);
        for (const auto& r : rows) T.add(r);
        return T;
    }
    if (j.contains("generator")) {
        const auto gen = j.at("generator").get<std::string>();
        if (gen != "scaled_basis") throw ModelError("unknown family generator: " + gen);
        const auto n = j.at("n").get<std::size_t>();
        const auto count = j.value("count", n);
        if (count > n) throw ModelError("count exceeds dimension");
        const double scale = j.value("scale", 1.0);
        PointSet T(n, p);
        if (j.value("origin", false)) T.add(Vector(n, 0.0));
        for (std::size_t i = 0; i < count; ++i) {
            Vector t(n, 0.0);
            t[i] = scale;
            T.add(std::move(t));
        }
        return T;
    }
    PointSet T = PointSet::from_json(j);
    T.set_p(p);
    return T;
}

namespace {

struct Checks {
    json list = json::array();
    bool ok = true;
    void add(const std::string& name, bool pass) {
        list.push_back({{"name", name}, {"pass", pass}});
        ok = ok && pass;
    }
};

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

void finish(CommandResult& out, Checks& checks) {
    out.report["assertions"] = checks.list;
    out.passed = checks.ok;
}

CommandResult cmd_moment(const json& cfg, const McOptions& mc) {
    const VectorModel model = load_model(cfg.at("model"));
    const double p = cfg.at("p").get<double>();
    PointSet T = cfg.contains("t") ? PointSet(model.dim(), p, {cfg.at("t").get<Vector>()}) : load_family(cfg.at("family"), p);
    if (T.dim() != model.dim()) throw ModelError("family and model dimensions differ");
    CommandResult out;
    Checks checks;
    PnormEvaluator eval(model, p, mc);
    json rows = json::array();
    std::ostringstream csv;
    csv << "point,value,lo,hi,method\n";
    bool finite = true;
    for (std::size_t j = 0; j < T.size(); ++j) {
        const MomentEstimate m = eval(T.point(j));
        finite = finite && std::isfinite(m.value) && m.value >= 0.0;
        json row = {{"point", j}, {"estimate", m}, {"hitczenko", hitczenko_norm(T.point(j), p)},
                    {"gluskin_kwapien", gluskin_kwapien_bound(T.point(j), p)}};
        if (T.support(j).size() <= kMaxEnumerationSupport)
            row["bernoulli_exact"] = bernoulli_pnorm_exact(T.point(j), p);
        rows.push_back(row);
        csv << j << ',' << fmt(m.value) << ',' << fmt(m.lower()) << ',' << fmt(m.upper()) << ',' << to_string(m.method) << '\n';
    }
    checks.add("finite_estimates", finite);
    out.report["moments"] = rows;
    if (cfg.value("trivial_bound", false)) {
        const TrivialBoundReport tb = trivial_upper_bound(model, T, p, {}, mc);
        out.report["trivial_bound"] = tb;
        checks.add("trivial_bound", !tb.precondition_ok || tb.holds);
    }
    if (cfg.value("overlap", false)) {
        const OverlapReport ov = overlap_bound_check(model, T, p, cfg.value("D", 1.0), mc);
        out.report["overlap"] = ov;
    }
    out.csv = csv.str();
    finish(out, checks);
    return out;
}

CommandResult cmd_witness(const json& cfg, const McOptions& mc) {
    const VectorModel model = load_model(cfg.at("model"));
    const double p = cfg.at("p").get<double>();
    const Vector t = cfg.at("t").get<Vector>();
    WitnessOptions opt;
    opt.floor = cfg.value("floor", 0.0);
    opt.mc = mc;
    CommandResult out;
    Checks checks;
    Witness w;
    if (cfg.contains("classes")) {
        w = solve_common_witness(model, t, cfg.at("classes").get<std::vector<IndexSet>>(), p, opt);
    } else {
        w = solve_witness(model, t, p, opt);
    }
    const WitnessCertificate cert = witness_certify(model, w, {mc.budget, derive_seed(mc.seed, 0xCE)});
    out.report["witness"] = w;
    out.report["certificate"] = cert;
    checks.add("feasible", w.feasible && cert.feasible);
    checks.add("value_consistent", cert.value_consistent);
    std::ostringstream csv;
    csv << "index,t,a\n";
    for (std::size_t i = 0; i < t.size(); ++i) csv << i << ',' << fmt(t[i]) << ',' << fmt(w.a[i]) << '\n';
    out.csv = csv.str();
    finish(out, checks);
    return out;
}

CommandResult cmd_reduce(const json& cfg, const McOptions& mc) {
    const VectorModel model = load_model(cfg.at("model"));
    const double p = cfg.at("p").get<double>();
    const PointSet T = load_family(cfg.at("family"), p);
    ReductionOptions opt;
    opt.delta = cfg.value("delta", opt.delta);
    opt.C0 = cfg.value("C0", opt.C0);
    opt.trials = cfg.value("trials", opt.trials);
    const auto variant = cfg.value("variant", std::string("A"));
    if (variant != "A" && variant != "B") throw ModelError("variant must be A or B");
    opt.variant = variant == "A" ? Variant::A : Variant::B;
    const auto metric = cfg.value("metric", std::string("exact_bernoulli"));
    if (metric != "exact_bernoulli" && metric != "hitczenko") throw ModelError("unknown metric: " + metric);
    opt.metric = metric == "hitczenko" ? DistanceKind::hitczenko : DistanceKind::exact_bernoulli;
    opt.seed = mc.seed;
    opt.mc = mc;
    const ReductionReport r = reduce(model, T, p, opt);
    CommandResult out;
    Checks checks;
    out.report["reduction"] = r;
    checks.add("not_degenerate", r.outcome != ReductionOutcome::degenerate);
    if (r.outcome == ReductionOutcome::simplified) checks.add("simplified_form", r.verification && r.verification->all_ok());
    out.csv = r.output.to_csv();
    finish(out, checks);
    return out;
}

CommandResult cmd_extract(const json& cfg, const McOptions& mc) {
    const VectorModel model = load_model(cfg.at("model"));
    const double p = cfg.at("p").get<double>();
    const PointSet T = load_family(cfg.at("family"), p);
    std::optional<double> threshold;
    if (cfg.contains("threshold")) threshold = cfg.at("threshold").get<double>();
    const ExtractionResult ex = greedy_disjoint_extract(model, T, p, threshold, mc);
    const ResidualReport res = residual_separation_check(model, T, ex.covered, p, mc);
    CommandResult out;
    Checks checks;
    out.report["extraction"] = ex;
    out.report["residual"] = res;
    checks.add("disjoint", ex.disjoint);
    checks.add("certified", ex.certified);
    checks.add("residual_separation", res.violations.empty());
    std::ostringstream csv;
    csv << "order,point,norm,lo,hi\n";
    for (std::size_t l = 0; l < ex.selected.size(); ++l)
        csv << l << ',' << ex.selected[l] << ',' << fmt(ex.norms[l].value) << ',' << fmt(ex.norms[l].lower()) << ','
            << fmt(ex.norms[l].upper()) << '\n';
    out.csv = csv.str();
    finish(out, checks);
    return out;
}

CommandResult cmd_vcdim(const json& cfg, const McOptions& mc) {
    SupportFamily F;
    if (cfg.contains("sets")) {
        F = SupportFamily::from_json(cfg.at("sets"), cfg.value("n", std::size_t{0}));
    } else {
        F = SupportFamily::from_points(load_family(cfg.at("family"), cfg.value("p", 1.0)));
    }
    F.deduplicate();
    const VcResult r = vc_dimension(F, cfg.value("cap", kDefaultVcCap), mc.seed);
    CommandResult out;
    Checks checks;
    out.report["vc"] = r;
    out.report["family_size"] = F.sets.size();
    out.report["ground_size"] = F.n;
    const double count = sauer_exact_count(F.n, r.v);
    out.report["sauer_exact_count"] = count;
    out.report["sauer_bound"] = sauer_bound(static_cast<double>(F.n), static_cast<double>(r.v));
    if (r.exact && r.v < cfg.value("cap", kDefaultVcCap)) checks.add("sauer_shelah", static_cast<double>(F.sets.size()) <= count);
    std::ostringstream csv;
    csv << "set,element\n";
    for (std::size_t s = 0; s < F.sets.size(); ++s)
        for (int e : F.sets[s]) csv << s << ',' << e << '\n';
    out.csv = csv.str();
    finish(out, checks);
    return out;
}

CommandResult cmd_minorate(const json& cfg, const McOptions& mc) {
    const auto experiment = cfg.value("experiment", std::string("minoration"));
    CommandResult out;
    Checks checks;
    std::ostringstream csv;
    const double kmax = cfg.value("K_max", kInf);
    out.report["experiment"] = experiment;
    if (experiment == "latala") {
        const LatalaReport r = latala_minoration_check(cfg.at("r").get<Vector>(), cfg.at("v").get<Vector>(),
                                                       cfg.at("supports").get<std::vector<IndexSet>>(),
                                                       cfg.at("q").get<double>(), mc);
        out.report["latala"] = r;
        checks.add("precondition", r.precondition_ok);
        checks.add("bound", r.holds);
        csv << "statistic,value,lo,hi\nesup," << fmt(r.esup) << ',' << fmt(r.ci.lo) << ',' << fmt(r.ci.hi) << '\n';
        out.csv = csv.str();
        finish(out, checks);
        return out;
    }
    const double p = cfg.at("p").get<double>();
    if (experiment == "bernoulli_comparison") {
        const VectorModel dom = load_model(cfg.at("dominating"));
        const VectorModel sub = load_model(cfg.at("dominated"));
        const PointSet T = load_family(cfg.at("family"), p);
        std::optional<double> C;
        if (cfg.contains("C")) C = cfg.at("C").get<double>();
        const BernoulliComparisonReport r = bernoulli_comparison_check(dom, sub, T, C, mc);
        out.report["comparison"] = r;
        checks.add("tail_domination", r.hypothesis_ok);
        checks.add("comparison", r.holds);
        csv << "model,esup,lo,hi\ndominating," << fmt(r.esup_dominating) << ',' << fmt(r.ci_dominating.lo) << ','
            << fmt(r.ci_dominating.hi) << "\ndominated," << fmt(r.esup_dominated) << ',' << fmt(r.ci_dominated.lo)
            << ',' << fmt(r.ci_dominated.hi) << '\n';
        out.csv = csv.str();
        finish(out, checks);
        return out;
    }
    const VectorModel model = load_model(cfg.at("model"));
    const PointSet T = load_family(cfg.at("family"), p);
    CardinalityTarget target;
    if (cfg.contains("target"))
        target = CardinalityTarget::parse(cfg.at("target").value("regime", std::string("p")), cfg.at("target").value("C", 1.0));
    auto minoration_checks = [&](const MinorationReport& m) {
        checks.add("not_degenerate", !m.degenerate);
        checks.add("trivial_bound", m.trivial_bound_holds);
        checks.add("symmetry", m.symmetry_holds);
        if (std::isfinite(kmax)) checks.add("K_max", m.K <= kmax);
        csv << "statistic,value,lo,hi\nesup," << fmt(m.esup.max_mean) << ',' << fmt(m.esup.max_ci.lo) << ','
            << fmt(m.esup.max_ci.hi) << "\nesup_abs," << fmt(m.esup.absmax_mean) << ',' << fmt(m.esup.absmax_ci.lo)
            << ',' << fmt(m.esup.absmax_ci.hi) << '\n';
    };
    if (experiment == "minoration") {
        const MinorationReport m = minoration_report(model, T, p, mc, target);
        out.report["minoration"] = m;
        minoration_checks(m);
    } else if (experiment == "disjoint_support") {
        const DisjointSupportReport r = disjoint_support_experiment(model, T, p, cfg.value("C", target.C), mc);
        out.report["disjoint_support"] = r;
        checks.add("disjoint", r.disjoint);
        checks.add("contains_origin", r.contains_origin);
        checks.add("norms", r.norms_ok);
        checks.add("crossing", r.crossing_ok);
        checks.add("crossing_tail", r.tail_ok);
        if (std::isfinite(kmax)) checks.add("K_max", r.minoration.K <= kmax);
        csv << "M,count\n";
        for (std::size_t M = 0; M < r.histogram.size(); ++M) csv << M << ',' << r.histogram[M] << '\n';
    } else if (experiment == "independent_entries") {
        ReductionOptions red;
        red.delta = cfg.value("delta", red.delta);
        red.C0 = cfg.value("C0", red.C0);
        red.trials = cfg.value("trials", red.trials);
        red.seed = mc.seed;
        red.mc = mc;
        const IndependentEntriesReport r = independent_entries_experiment(model, T, p, mc, red);
        out.report["independent_entries"] = r;
        checks.add("lemma", r.lemma_ok);
        if (r.latala) checks.add("latala", !r.latala->precondition_ok || r.latala->holds);
        if (r.minoration) minoration_checks(*r.minoration);
    } else if (experiment == "common_witness") {
        const CommonWitnessReport r = common_witness_experiment(model, T, p, mc);
        out.report["common_witness"] = r;
        checks.add("feasible", r.all_feasible);
        checks.add("domination", r.domination_ok);
        if (std::isfinite(kmax)) checks.add("K_max", r.K <= kmax);
        csv << "statistic,value,lo,hi\nrestricted_esup," << fmt(r.statistic) << ',' << fmt(r.ci.lo) << ','
            << fmt(r.ci.hi) << '\n';
    } else {
        throw ModelError("unknown experiment: " + experiment);
    }
    out.csv = csv.str();
    finish(out, checks);
    return out;
}

CommandResult cmd_concentration(const json& cfg, const McOptions& mc) {
    const VectorModel model = load_model(cfg.at("model"));
    const ProbeSet B = ProbeSet::from_json(cfg.at("set"), model.dim());
    Vector u_grid = cfg.contains("u_grid") ? cfg.at("u_grid").get<Vector>() : Vector{};
    if (u_grid.empty())
        for (int k = 0; k <= 40; ++k) u_grid.push_back(0.25 * k);
    Vector beta_grid = cfg.contains("beta_grid") ? cfg.at("beta_grid").get<Vector>() : Vector{};
    if (beta_grid.empty())
        for (int k = 1; k <= 64; ++k) beta_grid.push_back(0.25 * k);
    const ConcentrationReport r = exp_concentration_probe(model, B, u_grid, beta_grid, mc);
    CommandResult out;
    Checks checks;
    out.report["set"] = B.to_json();
    out.report["concentration"] = r;
    checks.add("precondition", r.precondition_ok);
    checks.add("beta_found", r.beta.has_value());
    if (cfg.contains("beta_max")) checks.add("beta_max", r.beta && *r.beta <= cfg.at("beta_max").get<double>());
    std::ostringstream csv;
    csv << "beta,passes,worst_margin\n";
    for (const auto& row : r.rows) csv << fmt(row.beta) << ',' << (row.passes ? 1 : 0) << ',' << fmt(row.worst_margin) << '\n';
    out.csv = csv.str();
    finish(out, checks);
    return out;
}

}  // namespace

const std::vector<std::string>& command_names() {
    static const std::vector<std::string> names = {"moment", "witness", "reduce", "extract", "vcdim", "minorate", "concentration"};
    return names;
}

CommandResult run_command(const std::string& command, const json& config, const McOptions& mc) {
    CommandResult out;
    if (command == "moment") out = cmd_moment(config, mc);
    else if (command == "witness") out = cmd_witness(config, mc);
    else if (command == "reduce") out = cmd_reduce(config, mc);
    else if (command == "extract") out = cmd_extract(config, mc);
    else if (command == "vcdim") out = cmd_vcdim(config, mc);
    else if (command == "minorate") out = cmd_minorate(config, mc);
    else if (command == "concentration") out = cmd_concentration(config, mc);
    else throw ModelError("unknown command: " + command);
    out.report["command"] = command;
    out.report["seed"] = mc.seed;
    out.report["budget"] = mc.budget;
    out.report["config"] = config;
    out.report["passed"] = out.passed;
    return out;
}

}  // namespace sudakov
