#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <unistd.h>

#include <gtest/gtest.h>
#include <json.hpp>

#include "wild_euler/scenario.hpp"
#include "wild_euler/svg.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
    int status = -1;
    std::string out;
};

// stdout and stderr merged
Result run_cli(const std::string& args) {
    const std::string cmd = std::string(WILD_EULER_BIN) + " " + args + " 2>&1";
    Result r;
    FILE* p = popen(cmd.c_str(), "r");
    if (!p) return r;
    std::array<char, 4096> buf;
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
    const int st = pclose(p);
    r.status = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
    return r;
}

class TempDir {
public:
    TempDir() {
        static int counter = 0;
        path_ = fs::temp_directory_path() / ("we_cli_" + std::to_string(getpid()) + "_" + std::to_string(counter++));
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() { fs::remove_all(path_); }
    const fs::path& path() const { return path_; }
    std::string write(const std::string& name, const std::string& text) const {
        const fs::path f = path_ / name;
        std::ofstream(f) << text;
        return f.string();
    }

private:
    fs::path path_;
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// First '{' to end: the status JSON printed on stderr.
json trailing_json(const std::string& s) { return json::parse(s.substr(s.find('{'))); }

void collect_keys(const json& j, const std::string& prefix, std::vector<std::string>& out) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        out.push_back(prefix + "/" + it.key());
        if (it->is_object()) collect_keys(*it, prefix + "/" + it.key(), out);
    }
}

void collect_schema_keys(const json& s, const std::string& prefix, std::vector<std::string>& out) {
    if (!s.contains("properties")) return;
    for (auto it = s["properties"].begin(); it != s["properties"].end(); ++it) {
        out.push_back(prefix + "/" + it.key());
        collect_schema_keys(*it, prefix + "/" + it.key(), out);
    }
}

}  // namespace

TEST(Cli, DefaultConfigMatchesSchemaAndRoundTrips) {
    const auto r = run_cli("--print-default-config");
    ASSERT_EQ(r.status, 0);
    const json doc = json::parse(r.out);
    EXPECT_EQ(doc["chi0"], 16.0);
    EXPECT_EQ(doc["domain"]["delta"], 0.5);
    EXPECT_TRUE(doc["chi"].is_null());

    std::vector<std::string> a, b;
    collect_keys(doc, "", a);
    collect_schema_keys(json::parse(slurp(WILD_EULER_SCHEMA)), "", b);
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    EXPECT_EQ(a, b);

    // parse and dump again: same document
    EXPECT_EQ(json::parse(we::to_json(we::scenario_from_json(doc)).dump()), doc);
}

TEST(Cli, InvalidConfigExitsTwoWithDiagnostics) {
    TempDir d;
    auto r = run_cli("chi-window --config " + d.write("c.json", R"({"chi0": "x", "bogus": 1})"));
    EXPECT_EQ(r.status, 2);
    json j = trailing_json(r.out);
    EXPECT_EQ(j["status"], "invalid_config");
    EXPECT_EQ(j["code"], "ConfigInvalid");
    std::vector<std::string> paths;
    for (const auto& e : j["errors"]) paths.push_back(e["path"]);
    EXPECT_NE(std::find(paths.begin(), paths.end(), "/bogus"), paths.end());
    EXPECT_NE(std::find(paths.begin(), paths.end(), "/chi0"), paths.end());

    r = run_cli("chi-window --config " + d.write("d.json", R"({"domain": {"delta": 3.0}})"));
    EXPECT_EQ(r.status, 2);
    EXPECT_NE(r.out.find("InvalidDomain"), std::string::npos);

    r = run_cli("chi-window --config " + d.write("e.json", "{not json"));
    EXPECT_EQ(r.status, 2);
    r = run_cli("chi-window --config " + (d.path() / "missing.json").string());
    EXPECT_EQ(r.status, 2);
    r = run_cli("ci-demo --grid 8,8");
    EXPECT_EQ(r.status, 2);
    r = run_cli("no-such-command");
    EXPECT_EQ(r.status, 2);
}

TEST(Cli, ChiWindowBelowThresholdExitsOne) {
    TempDir d;
    const auto r = run_cli("chi-window --config " + d.write("c.json", R"({"chi0": 7.0})") + " --out " +
                           (d.path() / "o").string());
    EXPECT_EQ(r.status, 1);
    EXPECT_NE(r.out.find("[FAIL] chi_window.window_exists"), std::string::npos);
    EXPECT_NE(slurp(d.path() / "o" / "chi_window.json").find("NoWindow"), std::string::npos);
}

TEST(Cli, CheckIdentityPasses) {
    TempDir d;
    const auto r = run_cli("check-identity --json --out " + (d.path() / "o").string());
    ASSERT_EQ(r.status, 0) << r.out;
    const json rep = json::parse(slurp(d.path() / "o" / "identity.json"));
    bool found = false;
    for (const auto& c : rep["checks"])
        if (c["name"] == "advection_identity") {
            found = true;
            EXPECT_TRUE(c["pass"].get<bool>());
            EXPECT_LT(c["value"].get<double>(), 1e-12);
        }
    EXPECT_TRUE(found);
    EXPECT_TRUE(fs::exists(d.path() / "o" / "timings.json"));
    // no temp files left behind
    for (const auto& e : fs::directory_iterator(d.path() / "o"))
        EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos) << e.path();
}

TEST(Cli, UnwritableOutputIsIoError) {
    TempDir d;
    const std::string file = d.write("plain", "x");
    const auto r = run_cli("check-identity --out " + file + "/sub");
    EXPECT_EQ(r.status, 1);
    EXPECT_EQ(trailing_json(r.out)["code"], "IoError");
}

TEST(Cli, SymmetryBreakingOutputsAreDeterministic) {
    TempDir d;
    const fs::path a = d.path() / "a", b = d.path() / "b";
    ASSERT_EQ(run_cli("symmetry-breaking --out " + a.string()).status, 0);
    ASSERT_EQ(run_cli("symmetry-breaking --out " + b.string()).status, 0);
    for (const char* f : {"symmetry_breaking.json", "symmetry_breaking.csv", "breaking_profiles.svg",
                          "breaking_deficit.svg", "breaking_variance.svg"}) {
        ASSERT_TRUE(fs::exists(a / f)) << f;
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    }
    // deficit curve strictly positive for t > 0
    const json rep = json::parse(slurp(a / "symmetry_breaking.json"));
    for (const auto& p : rep["data"]["curve"])
        if (p["t"].get<double>() > 0.0) EXPECT_GT(p["deficit"].get<double>(), 0.0);
}

TEST(Svg, EmptyPlotHasAxesOnly) {
    we::Plot p;
    p.title = "empty";
    const std::string s = we::render_svg(p);
    EXPECT_NE(s.find("<svg"), std::string::npos);
    // frame and tick labels, no data
    EXPECT_NE(s.find("<rect x="), std::string::npos);
    EXPECT_NE(s.find("font-size=\"10\""), std::string::npos);
    EXPECT_EQ(s.find("<polyline"), std::string::npos);
    EXPECT_EQ(s, we::render_svg(p));
}

TEST(Svg, MarkersAndDeterminism) {
    we::Plot p;
    p.series.push_back({"a", {0, 1, 2}, {1, 0.5, 0.25}});
    p.vlines = {1.5};
    const std::string s = we::render_svg(p);
    EXPECT_NE(s.find("<polyline"), std::string::npos);
    EXPECT_NE(s.find("stroke-dasharray"), std::string::npos);
    EXPECT_EQ(s, we::render_svg(p));
}
