// Python bindings. Models, families and reports cross the boundary as JSON
// text; the Python package turns them into dicts.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "sudakov/commands.hpp"
#include "sudakov/harness.hpp"

namespace py = pybind11;
using namespace sudakov;
using nlohmann::json;

namespace {

std::string run(const std::string& command, const std::string& config, std::uint64_t seed, std::size_t budget) {
    const CommandResult r = run_command(command, json::parse(config), {budget, seed});
    return json{{"report", r.report}, {"csv", r.csv}, {"passed", r.passed}}.dump();
}

std::string pnorm(const std::string& model, const Vector& t, double p, std::uint64_t seed, std::size_t budget) {
    return json(pnorm_linear_form(load_model(json::parse(model)), t, p, {budget, seed})).dump();
}

std::string witness(const std::string& model, const Vector& t, double p, double floor) {
    WitnessOptions opt;
    opt.floor = floor;
    return json(solve_witness(load_model(json::parse(model)), t, p, opt)).dump();
}

std::string common_witness(const std::string& model, const Vector& t, const std::vector<IndexSet>& classes, double p) {
    return json(solve_common_witness(load_model(json::parse(model)), t, classes, p)).dump();
}

std::string vc(const std::vector<IndexSet>& sets, std::size_t n, std::size_t cap) {
    SupportFamily F;
    F.n = n;
    F.sets = sets;
    F.deduplicate();
    return json(vc_dimension(F, cap)).dump();
}

std::string minorate(const std::string& model, const std::string& family, double p, std::uint64_t seed,
                     std::size_t budget) {
    const VectorModel m = load_model(json::parse(model));
    return json(minoration_report(m, load_family(json::parse(family), p), p, {budget, seed})).dump();
}

std::string isotropy(const std::string& model, std::size_t samples, std::uint64_t seed) {
    const IsotropyReport r = isotropy_check(load_model(json::parse(model)), samples, seed);
    return json{{"max_mean_deviation", r.max_mean_deviation},
                {"max_covariance_deviation", r.max_covariance_deviation},
                {"samples", r.samples}}
        .dump();
}

std::vector<std::string> builtin_names(std::size_t n) {
    std::vector<std::string> out;
    for (const auto& [name, model] : builtin_models(n)) out.push_back(name);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Moment, witness and minoration tools for canonical processes";

    py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
    py::register_exception<ModelError>(m, "ModelError", PyExc_ValueError);
    py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_RuntimeError);

    m.def("run_command", &run, py::arg("command"), py::arg("config"), py::arg("seed") = 0,
          py::arg("budget") = 100000);
    m.def("command_names", &command_names);
    m.def("builtin_names", &builtin_names, py::arg("n"));
    m.def("pnorm", &pnorm, py::arg("model"), py::arg("t"), py::arg("p"), py::arg("seed") = 0,
          py::arg("budget") = 100000);
    m.def("solve_witness", &witness, py::arg("model"), py::arg("t"), py::arg("p"), py::arg("floor") = 0.0);
    m.def("solve_common_witness", &common_witness, py::arg("model"), py::arg("t"), py::arg("classes"), py::arg("p"));
    m.def("vc_dimension", &vc, py::arg("sets"), py::arg("n"), py::arg("cap") = kDefaultVcCap);
    m.def("minoration", &minorate, py::arg("model"), py::arg("family"), py::arg("p"), py::arg("seed") = 0,
          py::arg("budget") = 100000);
    m.def("isotropy", &isotropy, py::arg("model"), py::arg("samples"), py::arg("seed") = 0);
    m.def("bernoulli_pnorm_exact", [](const Vector& t, double p) { return bernoulli_pnorm_exact(t, p); });
    m.def("hitczenko_norm", [](const Vector& t, double p) { return hitczenko_norm(t, p); });
    m.def("gluskin_kwapien_bound", [](const Vector& t, double p) { return gluskin_kwapien_bound(t, p); });
    m.def("sauer_exact_count", &sauer_exact_count);
}
