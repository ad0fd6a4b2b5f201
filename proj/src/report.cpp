#include "wild_euler/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "wild_euler/errors.hpp"

namespace we {

bool VerificationReport::passed() const {
    for (const auto& c : checks)
        if (c.asserted && !c.pass) return false;
    return true;
}

const Check* VerificationReport::find(const std::string& check) const {
    for (const auto& c : checks)
        if (c.name == check) return &c;
    return nullptr;
}

Check& VerificationReport::add(const std::string& check, bool pass, double value, double tolerance,
                               const std::string& anchor, bool asserted) {
    checks.push_back({check, pass, asserted, value, tolerance, anchor});
    return checks.back();
}

nlohmann::ordered_json VerificationReport::to_json() const {
    nlohmann::ordered_json j;
    j["schema"] = 1;
    j["name"] = name;
    j["pass"] = passed();
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json cj;
        cj["name"] = c.name;
        cj["pass"] = c.pass;
        cj["asserted"] = c.asserted;
        cj["value"] = c.value;
        cj["tolerance"] = c.tolerance;
        cj["anchor"] = c.anchor;
        arr.push_back(cj);
    }
    j["checks"] = arr;
    j["data"] = data;
    return j;
}

void write_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    std::error_code ec;
    if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) throw Error(ErrorCode::IoError, "short write to " + tmp.string());
    }
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(ErrorCode::IoError, "cannot rename into " + target.string());
    }
}

}  // namespace we
