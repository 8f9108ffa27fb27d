#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "framegate/error.hpp"

using namespace framegate;
using namespace framegate::cli;
using nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir()
    {
        std::string tmpl = (std::filesystem::temp_directory_path() / "framegate-cli-XXXXXX").string();
        path = ::mkdtemp(tmpl.data());
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string write(const std::string& name, const std::string& text) const
    {
        const auto p = path / name;
        std::ofstream(p) << text;
        return p.string();
    }
};

std::string slurp(const std::string& path)
{
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct CliRun {
    int code = -1;
    std::string out;
    std::string err;
};

/// Runs the CLI in process with `--out` pointed at a temp file.
CliRun run(std::vector<std::string> args, const TempDir& dir)
{
    const std::string out_path = (dir.path / "out.txt").string();
    std::filesystem::remove(out_path);
    args.insert(args.begin(), "framegate");
    args.push_back("--out");
    args.push_back(out_path);
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream err;
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), err);
    r.out = slurp(out_path);
    r.err = err.str();
    return r;
}

std::string config_error_of(std::string_view text)
{
    try {
        (void)Config::parse(text);
    }
    catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ConfigError);
        return e.what();
    }
    ADD_FAILURE() << "parsed: " << text;
    return {};
}

}  // namespace

TEST(Config, SectionsCommentsAndDefaults)
{
    const Config c = Config::parse("# top\nseed = 9\n\n[agree]\n; note\nplanted = rotation\nangle = 0.25\n");
    EXPECT_EQ(c.integer("run", "seed", 1), 9u);
    EXPECT_EQ(c.text("agree", "planted"), "rotation");
    EXPECT_DOUBLE_EQ(c.number("agree", "angle", 0.0), 0.25);
    EXPECT_DOUBLE_EQ(c.number("agree", "scale", 3.5), 3.5);
    EXPECT_FALSE(c.has("agree", "axis"));
}

TEST(Config, ErrorsNameTheLine)
{
    EXPECT_NE(config_error_of("seed = 1\n[agree]\nbogus = 2\n").find("line 3"), std::string::npos);
    EXPECT_NE(config_error_of("seed = 1\nseed = 2\n").find("line 2"), std::string::npos);
    EXPECT_NE(config_error_of("[nowhere]\n").find("line 1"), std::string::npos);
    EXPECT_NE(config_error_of("\n\njust words\n").find("line 3"), std::string::npos);
}

TEST(Config, ObserverKeyMayRepeat)
{
    const Config c = Config::parse("[sg]\nobserver = boost 0 0 1\nobserver = rotation 0 0 1 0.5\n");
    const auto all = c.all("sg", "observer");
    ASSERT_EQ(all.size(), 2u);
    EXPECT_EQ(all[1].line, 3);
}

TEST(Config, BadValuesAreConfigErrors)
{
    const Config c = Config::parse("seed = twelve\n[lorentz]\nboost = 1 2\n");
    EXPECT_THROW((void)c.integer("run", "seed", 1), Error);
    EXPECT_THROW((void)c.numbers("lorentz", "boost", 3), Error);
    EXPECT_THROW((void)parse_mode("sampled:0", 1), Error);
    EXPECT_EQ(parse_mode("sampled:500", 4).copies, 500u);
    EXPECT_FALSE(parse_mode("exact", 4).is_sampled());
}

TEST(Cli, PlantedRotationIsRecovered)
{
    TempDir dir;
    const auto cfg = dir.write("a.cfg", "scenario = abstract-qubit\n[agree]\nplanted = rotation\nangle = 1.1\n");
    const CliRun r = run({"agree", "--config", cfg, "--json"}, dir);
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const json j = json::parse(r.out);
    EXPECT_EQ(j["command"], "agree");
    EXPECT_EQ(j["recovered"]["parity"], 1);
    EXPECT_LT(j["residual"].get<double>(), 1e-10);
}

TEST(Cli, PlantedBoostGivesWorkedLorentzMatrix)
{
    TempDir dir;
    const auto cfg = dir.write("a.cfg", "scenario = typed-qubit\n[agree]\nplanted = boost\n");
    const CliRun r = run({"agree", "--config", cfg, "--json"}, dir);
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const json l = json::parse(r.out)["recovered"]["lorentz"];
    EXPECT_NEAR(l[0][0].get<double>(), 1.25, 1e-9);
    EXPECT_NEAR(l[0][3].get<double>(), 0.75, 1e-9);
    EXPECT_NEAR(l[3][3].get<double>(), 1.25, 1e-9);
    EXPECT_NEAR(json::parse(r.out)["recovered"]["lambda"].get<double>(), 1.0, 1e-9);
}

TEST(Cli, DriftExitsWithProtocolFailure)
{
    TempDir dir;
    const auto cfg = dir.write("a.cfg", "[agree]\ndrift = true\n");
    const CliRun r = run({"agree", "--config", cfg, "--json"}, dir);
    EXPECT_EQ(r.code, exit_protocol);
    EXPECT_EQ(json::parse(r.out)["error"], "NoConsistentRelation");
}

TEST(Cli, EmptyGraphHasNoRoots)
{
    TempDir dir;
    const auto g = dir.write("empty.graph", "");
    const auto cfg = dir.write("g.cfg", "[graph]\nfile = " + g + "\n");
    const CliRun r = run({"graph", "--config", cfg, "--json"}, dir);
    ASSERT_EQ(r.code, exit_ok) << r.err;
    EXPECT_TRUE(json::parse(r.out)["roots"].empty());
}

TEST(Cli, BuiltinGraphRoots)
{
    TempDir dir;
    const CliRun r = run({"graph", "--json"}, dir);
    ASSERT_EQ(r.code, exit_ok) << r.err;
    EXPECT_EQ(json::parse(r.out)["roots"], json::array({"S", "S'"}));
}

TEST(Cli, GravityRowForLongitudinalBoost)
{
    TempDir dir;
    const CliRun r = run({"sg", "--json"}, dir);
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const json report = json::parse(r.out);
    bool seen = false;
    for (const auto& row : report["observers"]) {
        if (row["observer"] == "boost 0 0 ln2") {
            seen = true;
            EXPECT_NEAR(row["eig_plus"].get<double>(), 2.0, 1e-9);
            EXPECT_NEAR(row["eig_minus"].get<double>(), -0.5, 1e-9);
        }
        EXPECT_NEAR(row["product"].get<double>(), -1.0, 1e-9);
    }
    EXPECT_TRUE(seen);
}

TEST(Cli, OutputIsDeterministic)
{
    TempDir dir;
    for (const char* cmd : {"agree", "game", "graph", "lorentz", "sg"}) {
        const CliRun a = run({cmd, "--seed", "17", "--json"}, dir);
        const CliRun b = run({cmd, "--seed", "17", "--json"}, dir);
        ASSERT_EQ(a.code, exit_ok) << cmd << ": " << a.err;
        EXPECT_EQ(a.out, b.out) << cmd;
        EXPECT_TRUE(json::accept(a.out)) << cmd;
        const CliRun text = run({cmd, "--seed", "17"}, dir);
        EXPECT_EQ(text.code, exit_ok) << cmd;
        EXPECT_FALSE(text.out.empty()) << cmd;
    }
}

TEST(Cli, ConfigErrorsExitThree)
{
    TempDir dir;
    const auto cfg = dir.write("bad.cfg", "seed = 1\n[agree]\nunknown = 1\n");
    const CliRun r = run({"agree", "--config", cfg}, dir);
    EXPECT_EQ(r.code, exit_config);
    EXPECT_NE(r.err.find("line 3"), std::string::npos) << r.err;
    EXPECT_EQ(run({"agree", "--mode", "sampled:x"}, dir).code, exit_config);
    EXPECT_EQ(run({"agree", "--config", (dir.path / "missing.cfg").string()}, dir).code, exit_config);
    EXPECT_EQ(run({"sg", "--connect", "127.0.0.1:1"}, dir).code, exit_config);
}

TEST(Cli, FailedSuiteExitsOne)
{
    TempDir dir;
    const auto cfg = dir.write("s.cfg",
                               "[suite]\nsampled_tolerance = 1e-12\nsampled_copies = 100\nsampled_runs = 2\n"
                               "fuzz_frames = 50\ntwo_process = false\n");
    const CliRun r = run({"verify-suite", "--config", cfg, "--json"}, dir);
    EXPECT_EQ(r.code, exit_check_failed) << r.err;
    const json j = json::parse(r.out);
    EXPECT_FALSE(j["all_pass"].get<bool>());
    EXPECT_EQ(j["criteria"].size(), 12u);
}

TEST(Cli, BinaryRunsStandalone)
{
    TempDir dir;
    const std::string out = (dir.path / "lorentz.json").string();
    const std::string cmd = std::string(FRAMEGATE_CLI_PATH) + " lorentz --json --out " + out;
    ASSERT_EQ(std::system(cmd.c_str()), 0);
    const json j = json::parse(slurp(out));
    EXPECT_NEAR(j["lorentz"][0][3].get<double>(), 0.75, 1e-9);
}

TEST(Cli, ObserverShorthandMatchesDefaultLabels)
{
    TempDir dir;
    const auto cfg = dir.write("sg.cfg", "[sg]\nobserver = boost 0 0 ln2\nobserver = rest\n");
    const CliRun r = run({"sg", "--config", cfg, "--json"}, dir);
    ASSERT_EQ(r.code, exit_ok) << r.err;
    const json rows = json::parse(r.out)["observers"];
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_NEAR(rows[0]["eig_plus"].get<double>(), 2.0, 1e-12);
    const auto bad = dir.write("bad.cfg", "[sg]\nobserver = boost 0 0 x\n");
    const CliRun b = run({"sg", "--config", bad}, dir);
    EXPECT_EQ(b.code, exit_config);
    EXPECT_NE(b.err.find("line 2: sg.observer"), std::string::npos) << b.err;
}
