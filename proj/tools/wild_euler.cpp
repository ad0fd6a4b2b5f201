#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "wild_euler/runner.hpp"
#include "wild_euler/scenario.hpp"

namespace {

std::vector<int> parse_grid(const std::string& spec) {
    std::vector<int> out;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used != tok.size()) throw std::invalid_argument(tok);
        out.push_back(v);
    }
    if (out.size() != 3) throw std::invalid_argument(spec);
    return out;
}

int config_error(const we::ConfigError& e) {
    std::cerr << e.to_json().dump(2) << "\n";
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wild-euler: checks and demos for axisymmetric wild Euler subsolutions"};
    app.require_subcommand(0, 1);

    std::string config, out_dir = "out", grid;
    std::optional<std::uint64_t> seed;
    std::optional<int> steps, frequency;
    bool json = false, print_default = false;
    app.add_flag("--print-default-config", print_default, "dump the built-in scenario as JSON and exit");

    const std::map<std::string, std::string> about = {
        {"verify-subsolution", "explicit subsolution: residuals, energy margin, weak-form equivalence"},
        {"chi-window", "integrate the chi ODE and find the feasibility window"},
        {"symmetry-breaking", "Burgers-fan subsolution and its energy deficit"},
        {"ci-demo", "laminate iteration on the t = 0 slice"},
        {"check-identity", "cylindrical advection identity on random samples"},
        {"all", "every report above plus summary.json"},
    };
    for (const auto& name : we::subcommands()) {
        auto* sub = app.add_subcommand(name, about.at(name));
        sub->add_option("--config", config, "scenario JSON");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--grid", grid, "nr,nz,nt");
        sub->add_option("--seed", seed, "RNG seed");
        sub->add_option("--steps", steps, "laminate steps (ci-demo)");
        sub->add_option("--frequency", frequency, "laminate frequency N (ci-demo)");
        sub->add_flag("--json", json, "print the final report as JSON");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    if (print_default) {
        std::cout << we::to_json(we::Scenario{}).dump(2) << "\n";
        return 0;
    }
    if (app.get_subcommands().empty()) {
        std::cerr << app.help();
        return 2;
    }
    const std::string cmd = app.get_subcommands().front()->get_name();

    we::Scenario s;
    try {
        if (!config.empty()) s = we::load_scenario(config);
        if (!grid.empty()) {
            std::vector<int> g;
            try {
                g = parse_grid(grid);
            } catch (const std::exception&) {
                throw we::ConfigError(std::vector<we::ConfigDiagnostic>{{"--grid", "expected nr,nz,nt"}});
            }
            s.grid = we::Grid{s.domain, g[0], g[1], g[2]};
        }
        if (seed) s.seed = *seed;
        if (steps) s.laminate_steps = *steps;
        if (frequency) s.laminate.N = *frequency;
        const auto diags = we::validate_scenario(s);
        if (!diags.empty()) throw we::ConfigError(diags);
    } catch (const we::ConfigError& e) {
        return config_error(e);
    }

    we::RunOptions opt;
    opt.out_dir = out_dir;
    opt.json = json;
    return we::run(cmd, s, opt, std::cout, std::cerr);
}
