#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "wild_euler/report.hpp"
#include "wild_euler/scenario.hpp"

namespace we {

struct Artifact {
    std::string file;
    std::string content;
};

struct Outcome {
    VerificationReport report;
    std::vector<Artifact> files;  // CSV, SVG and sidecars next to the report
    double seconds = 0.0;
};

Outcome run_check_identity(const Scenario& s);
Outcome run_verify_subsolution(const Scenario& s);
Outcome run_chi_window(const Scenario& s);
Outcome run_symmetry_breaking(const Scenario& s);
Outcome run_ci_demo(const Scenario& s);

const std::vector<std::string>& subcommands();

struct RunOptions {
    std::string out_dir = "out";
    bool json = false;
};

// 0: every asserted check passed; 1: a check failed or a module raised; artifacts are written either way.
int run(const std::string& subcommand, const Scenario& s, const RunOptions& opt, std::ostream& out, std::ostream& err);

// Times t = 0 and n - 1 points from the first time a breaking-grid node is strictly inside the fan up to T.
std::vector<double> breaking_times(const Scenario& s);

}  // namespace we
