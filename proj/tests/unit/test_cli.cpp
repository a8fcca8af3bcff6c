#include "coastal/cli.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

using namespace coastal;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path d = fs::temp_directory_path() / ("coastal_cli_" + name);
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    out << text;
}

std::string read_text(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

std::map<std::string, std::string> tree(const fs::path& root) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(root)) {
        if (e.is_regular_file()) files[fs::relative(e.path(), root).generic_string()] = read_text(e.path());
    }
    return files;
}

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome cli(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

const char* kSmall = R"({
    "grid": {"nx": 16, "ny": 16},
    "eps": [0.1, 0.05, 0.025],
    "end_time": 0.05,
    "limit_outputs": 10,
    "snapshot_every": 2,
    "workers": 2
})";

// Runs the command twice into the same output directory and compares bytes.
void expect_reproducible(const std::string& name, std::vector<std::string> args, const std::string& config = kSmall) {
    const fs::path dir = fresh_dir(name);
    write_text(dir / "config.json", config);
    const fs::path out = dir / "out";
    for (auto& a : args) {
        if (a == "@config") a = (dir / "config.json").string();
        if (a == "@out") a = out.string();
    }
    const auto first = cli(args);
    ASSERT_EQ(first.code, kExitOk) << first.err;
    const auto files = tree(out);
    ASSERT_FALSE(files.empty());
    fs::remove_all(out);
    const auto second = cli(args);
    ASSERT_EQ(second.code, kExitOk) << second.err;
    EXPECT_EQ(first.out, second.out);
    EXPECT_EQ(files, tree(out));
    fs::remove_all(dir);
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
    EXPECT_EQ(cli({"--help"}).code, kExitOk);
    EXPECT_EQ(cli({}).code, kExitConfig);
    EXPECT_EQ(cli({"frobnicate"}).code, kExitConfig);
    EXPECT_EQ(cli({"scales", "--regime", "estuary"}).code, kExitConfig);
    EXPECT_EQ(cli({"scales", "--set", "t_obs=3km"}).code, kExitConfig);
    EXPECT_EQ(cli({"run-limit", "--init-variant", "sideways"}).code, kExitConfig);
}

TEST(Cli, ConfigErrorsExitTwo) {
    const fs::path dir = fresh_dir("config_errors");
    write_text(dir / "unknown.json", R"({"grid": {"nx": 16, "ny": 16}, "speed": 3})");
    write_text(dir / "multi.json", kSmall);
    EXPECT_EQ(cli({"run-full", "--config", (dir / "unknown.json").string()}).code, kExitConfig);
    EXPECT_EQ(cli({"run-full", "--config", (dir / "missing.json").string()}).code, kExitConfig);
    // several eps and no --eps
    const auto r = cli({"run-full", "--config", (dir / "multi.json").string(), "--out", (dir / "o").string()});
    EXPECT_EQ(r.code, kExitConfig);
    EXPECT_NE(r.err.find("eps"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, ScalesPrintsTablesAndCsv) {
    const fs::path dir = fresh_dir("scales");
    const auto r = cli({"scales", "--regime", "zone", "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("pressure"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "scales-zone-calm" / "groups.csv"));
    EXPECT_TRUE(fs::exists(dir / "scales-zone-calm" / "coefficients.csv"));
    fs::remove_all(dir);
}

TEST(Cli, AbortExitsThreeWithPartialSummary) {
    const fs::path dir = fresh_dir("abort");
    write_text(dir / "c.json", R"({"grid": {"nx": 16, "ny": 16}, "eps": 0.1, "end_time": 0.1,
        "initial": {"kind": "constant", "iota": -200}})");
    const auto r = cli({"run-full", "--config", (dir / "c.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitAbort);
    EXPECT_NE(r.err.find("abort"), std::string::npos);
    bool found = false;
    for (const auto& [path, text] : tree(dir)) {
        if (path.ends_with("summary.json")) {
            found = true;
            EXPECT_NE(text.find("\"partial\": true"), std::string::npos);
        }
    }
    EXPECT_TRUE(found);
    fs::remove_all(dir);
}

TEST(Cli, PartialSweepExitsFour) {
    const fs::path dir = fresh_dir("partial");
    write_text(dir / "c.json", R"({"grid": {"nx": 16, "ny": 16}, "eps": [0.1, 0.05, 0.025], "end_time": 0.05,
        "limit_outputs": 10, "init_variant": "curl", "initial": {"kind": "constant", "iota": -200}})");
    const auto r = cli({"compare", "--config", (dir / "c.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitPartial);
    EXPECT_NE(r.err.find("failed"), std::string::npos);
    fs::remove_all(dir);
}

TEST(Cli, ScalesReproducible) { expect_reproducible("rep_scales", {"scales", "--regime", "layer", "--out", "@out"}); }

TEST(Cli, RunFullReproducible) {
    expect_reproducible("rep_full", {"run-full", "--config", "@config", "--eps", "0.05", "--out", "@out"});
}

TEST(Cli, RunLimitReproducible) {
    expect_reproducible("rep_limit", {"run-limit", "--config", "@config", "--init-variant", "printed", "--out", "@out"});
}

TEST(Cli, CompareReproducible) {
    expect_reproducible("rep_compare", {"compare", "--config", "@config", "--out", "@out"});
}

TEST(Cli, ResidualReproducible) {
    expect_reproducible("rep_residual",
                        {"residual", "--regime", "shelf", "--config", "@config", "--eps", "0.005", "--out", "@out"});
}
