#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wild_euler/errors.hpp"
#include "wild_euler/fields.hpp"
#include "wild_euler/laminate.hpp"
#include "wild_euler/subsolution.hpp"
#include "wild_euler/symmetry_breaking.hpp"

namespace we {

struct Scenario {
    std::string name = "default";
    Domain domain{};
    double gamma = 2.0;
    ChiTilde chi_tilde = ChiTilde::constant(1.0);
    double chi0 = 16.0;
    std::optional<double> chi;  // constant chi for verify/ci-demo; default chi_factor * threshold sup
    double chi_factor = 1.1;
    FanParams fan{};            // fan.T follows domain.T
    Grid grid{};

    struct Breaking {
        int nr = 256;
        int n_theta = 16;
        int n_times = 11;
    } breaking;

    double ode_dt = 1e-3;

    struct Validate {
        std::size_t n_tests = 20;
        double residual_tol = 1e-4;
    } validate;

    struct Equivalence {
        std::size_t n_tests = 50;
        double agreement_tol = 1e-10;
        double residual_tol = 1e-4;
    } equivalence;

    std::size_t identity_samples = 10000;
    int laminate_steps = 20;
    LaminateOptions laminate{.residual_tol = 0.5};
    std::uint64_t seed = 1;
};

struct ConfigDiagnostic {
    std::string path;
    std::string message;
};

class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<ConfigDiagnostic> diags);
    const std::vector<ConfigDiagnostic>& diagnostics() const { return diags_; }
    nlohmann::ordered_json to_json() const;

private:
    std::vector<ConfigDiagnostic> diags_;
};

nlohmann::ordered_json to_json(const Scenario& s);

// Keys absent from the document keep their defaults. Unknown keys and wrong types are collected and thrown
// together; module invariants are checked (and collected) only once the shape is valid.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::string& path);

std::vector<ConfigDiagnostic> validate_scenario(const Scenario& s);

}  // namespace we
