// Command-line front end: one subcommand per experiment, JSON config in,
// JSON report (and optional CSV plot data) out.
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sudakov/commands.hpp"

namespace {

struct Args {
    std::string config;
    std::uint64_t seed = 0;
    std::size_t budget = 100000;
    std::string out;
    std::string csv;
};

bool write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return true;
    }
    std::ofstream f(path, std::ios::binary);
    f << text;
    return static_cast<bool>(f);
}

int run(const std::string& command, const Args& a) {
    nlohmann::json cfg;
    try {
        std::ifstream f(a.config);
        if (!f) {
            std::cerr << "cannot read config: " << a.config << '\n';
            return 1;
        }
        cfg = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config is not valid JSON: " << e.what() << '\n';
        return 1;
    }
    sudakov::CommandResult res;
    try {
        res = sudakov::run_command(command, cfg, {a.budget, a.seed});
    } catch (const sudakov::PreconditionError& e) {
        nlohmann::json report = {{"command", command}, {"passed", false}, {"precondition_error", e.what()}};
        write_text(a.out, report.dump(2) + "\n");
        std::cerr << "precondition failed: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    if (!write_text(a.out, res.report.dump(2) + "\n")) {
        std::cerr << "cannot write " << a.out << '\n';
        return 1;
    }
    if (!a.csv.empty() && !write_text(a.csv, res.csv)) {
        std::cerr << "cannot write " << a.csv << '\n';
        return 1;
    }
    return res.passed ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte-Carlo checks of Sudakov-type minoration for canonical processes"};
    app.require_subcommand(1);
    Args args;
    const std::map<std::string, std::string> about = {
        {"moment", "p-norms of linear forms, with the Bernoulli and exponential comparison bounds"},
        {"witness", "witness levels for a linear form (common witness when classes are given)"},
        {"reduce", "translate, round and threshold a family into simplified form"},
        {"extract", "greedy disjoint-support extraction and residual separation"},
        {"vcdim", "VC dimension of a support family and the Sauer count"},
        {"minorate", "end-to-end minoration experiments"},
        {"concentration", "exponential concentration probe for a halfspace or box"}};
    for (const auto& name : sudakov::command_names()) {
        const auto it = about.find(name);
        auto* sub = app.add_subcommand(name, it == about.end() ? "" : it->second);
        sub->add_option("--config", args.config, "JSON config")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", args.seed, "root seed");
        sub->add_option("--budget", args.budget, "Monte-Carlo sample budget")->check(CLI::PositiveNumber);
        sub->add_option("--out", args.out, "report path (stdout when omitted)");
        sub->add_option("--csv", args.csv, "CSV plot data path");
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }
    return run(app.get_subcommands().front()->get_name(), args);
}
