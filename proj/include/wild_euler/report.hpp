#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace we {

struct Check {
    std::string name;
    bool pass = false;
    bool asserted = true;
    double value = 0.0;
    double tolerance = 0.0;
    std::string anchor;
};

struct VerificationReport {
    std::string name;
    std::vector<Check> checks;
    nlohmann::ordered_json data = nlohmann::ordered_json::object();

    // Overall pass iff every asserted check passes.
    bool passed() const;
    const Check* find(const std::string& check) const;
    Check& add(const std::string& check, bool pass, double value, double tolerance, const std::string& anchor,
               bool asserted = true);
    nlohmann::ordered_json to_json() const;
};

// Temp file in the same directory, then rename.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace we
