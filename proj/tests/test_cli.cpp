#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <regex>
#include <sstream>

#include "sepkit/cli.hpp"

using namespace sepkit;
namespace fs = std::filesystem;

namespace {

struct CliRun {
    int code = -1;
    std::string out, err;
    Json json() const { return Json::parse(out); }
};

CliRun run(std::vector<std::string> args)
{
    args.insert(args.begin(), "sepkit");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    CliRun r;
    r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("sepkit_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void write(const fs::path& p, const std::string& text)
{
    std::ofstream f(p);
    f << text;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p);
    return {std::istreambuf_iterator<char>(f), {}};
}

void expect_snake_case_keys(const Json& j)
{
    static const std::regex snake("^[a-z0-9]+(_[a-z0-9]+)*$");
    if (j.is_object()) {
        for (const auto& [key, v] : j.items()) {
            EXPECT_TRUE(std::regex_match(key, snake)) << key;
            expect_snake_case_keys(v);
        }
    } else if (j.is_array()) {
        for (const auto& v : j) expect_snake_case_keys(v);
    }
}

} // namespace

TEST(Cli, ExactQuantitiesAreTaggedAsFractions)
{
    CliRun r = run({"q", "--k", "0", "--alpha", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("13/323"), std::string::npos);

    r = run({"--format", "json", "q", "--k", "0", "--alpha", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = r.json();
    EXPECT_EQ(j["q"]["kind"], "exact");
    EXPECT_EQ(j["q"]["value"], "13/323");
    expect_snake_case_keys(j);

    r = run({"--format", "json", "g1", "--k", "0", "--alpha", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("9/3034"), std::string::npos);
}

TEST(Cli, ApproximateQuantitiesCarryCertifiedDigits)
{
    CliRun r = run({"--format", "json", "--n", "100", "estimate", "--k", "0", "--alpha", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = r.json();
    EXPECT_EQ(j["value"]["kind"], "approximate");
    ASSERT_TRUE(j["value"]["certified_digits"].is_number_integer());
    EXPECT_GE(j["value"]["certified_digits"].get<int>(), 1);
    EXPECT_LT(std::abs(std::stod(j["value"]["value"].get<std::string>()) - 4.0 / 33), 5e-3);
    expect_snake_case_keys(j);

    r = run({"q", "--k", "0", "--alpha", "1/3"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("certified_digits="), std::string::npos) << r.out;
}

TEST(Cli, ParamsUseCompactAffineForm)
{
    CliRun r = run({"params", "--k", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("α+11/6"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("α+27/10"), std::string::npos) << r.out;
}

TEST(Cli, MomentsCsvIsRfc4180)
{
    CliRun r = run({"moments", "--k", "0", "--alpha", "1", "--count", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out.rfind("k,", 0), 0u) << r.out;
    EXPECT_NE(r.out.find("\r\n"), std::string::npos);
    EXPECT_NE(r.out.find("-2/969"), std::string::npos);
    std::istringstream in(r.out);
    const auto rows = read_csv(in);
    ASSERT_EQ(rows.size(), 4u);
    for (const auto& row : rows) EXPECT_EQ(row.size(), rows[0].size());
}

TEST(Cli, CsvQuoting)
{
    std::ostringstream out;
    write_csv_row(out, {"plain", "a,b", "say \"hi\"", "two\nlines"});
    EXPECT_EQ(out.str(), "plain,\"a,b\",\"say \"\"hi\"\"\",\"two\nlines\"\r\n");
    std::istringstream in(out.str());
    const auto rows = read_csv(in);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0], (std::vector<std::string>{"plain", "a,b", "say \"hi\"", "two\nlines"}));
}

TEST(Cli, ClosedFormMethodsAgree)
{
    CliRun a = run({"closed-form", "--what", "concise-q", "--k", "1", "--alpha", "3"});
    CliRun b = run({"closed-form", "--what", "concise-q", "--method", "recurrence", "--k", "1", "--alpha", "3"});
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(a.out, b.out);
    CliRun c = run({"closed-form", "--what", "rebit", "--k", "1"});
    EXPECT_NE(c.out.find("515/768"), std::string::npos);
    CliRun d = run({"closed-form", "--what", "correction", "--alpha", "1"});
    EXPECT_NE(d.out.find("1/14"), std::string::npos);
}

TEST(Cli, Rationalize)
{
    CliRun r = run({"rationalize", "--value", "0.12121212121212", "--digits", "14"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(r.out.find("4/33"), std::string::npos);
    r = run({"rationalize", "--value", "3.141592653", "--digits", "10", "--max-den", "10"});
    EXPECT_EQ(r.code, 1);
}

TEST(Cli, UsageErrorsExitTwo)
{
    EXPECT_EQ(run({}).code, 2);
    EXPECT_EQ(run({"frobnicate"}).code, 2);
    EXPECT_EQ(run({"q", "--k", "0"}).code, 2);
    EXPECT_EQ(run({"q", "--k", "0", "--alpha", "abc"}).code, 2);
    EXPECT_EQ(run({"--precision", "10", "q", "--k", "0", "--alpha", "1"}).code, 2);
    EXPECT_EQ(run({"--support", "1,0", "q", "--k", "0", "--alpha", "1"}).code, 2);
    EXPECT_EQ(run({"--format", "xml", "q", "--k", "0", "--alpha", "1"}).code, 2);
    EXPECT_EQ(run({"moments", "--k", "0", "--alpha", "1", "--kind", "zz"}).code, 2);
}

TEST(Cli, ComputationErrorsExitOne)
{
    CliRun r = run({"q", "--k", "7", "--alpha", "2", "--method", "recurrence"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("error"), std::string::npos);
    EXPECT_EQ(run({"closed-form", "--what", "concise-q", "--k", "3", "--alpha", "1"}).code, 1);
}

TEST(Cli, ConfigFileWithFlagOverride)
{
    const fs::path dir = scratch("config");
    const fs::path cfg = dir / "run.conf";
    write(cfg, "format=json\nprecision=40\n");
    CliRun r = run({"--config", cfg.string(), "q", "--k", "0", "--alpha", "1/3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = r.json();
    EXPECT_EQ(j["q"]["kind"], "approximate");

    r = run({"--config", cfg.string(), "--format", "text", "q", "--k", "0", "--alpha", "2"});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(r.out, "13/323\n");

    write(cfg, "no_such_key=1\n");
    EXPECT_EQ(run({"--config", cfg.string(), "q", "--k", "0", "--alpha", "2"}).code, 2);
}

TEST(Cli, CacheFlagWinsOverEnvironment)
{
    const fs::path flag_dir = scratch("cache_flag");
    const fs::path env_dir = scratch("cache_env");
    ::setenv("SEPKIT_CACHE_DIR", env_dir.c_str(), 1);
    const std::vector<std::string> args{"--format", "json", "--cache-dir", flag_dir.string(), "mc", "--k", "0",
                                        "--samples", "2000"};
    CliRun first = run(args);
    ASSERT_EQ(first.code, 0) << first.err;
    EXPECT_EQ(std::distance(fs::directory_iterator(flag_dir), {}), 1);
    EXPECT_EQ(std::distance(fs::directory_iterator(env_dir), {}), 0);

    // a hit is served from the file: tamper with it and read it back
    const fs::path entry = fs::directory_iterator(flag_dir)->path();
    Json stored = Json::parse(slurp(entry));
    EXPECT_EQ(stored["key"]["code_version"], kCodeVersion);
    stored["value"]["seed"] = 424242;
    write(entry, stored.dump());
    CliRun second = run(args);
    ASSERT_EQ(second.code, 0) << second.err;
    EXPECT_EQ(second.json()["seed"], 424242);

    // a different key misses
    std::vector<std::string> other = args;
    other.back() = "3000";
    CliRun third = run(other);
    EXPECT_EQ(third.json()["n_samples"], 3000);

    CliRun env_only = run({"mc", "--k", "0", "--samples", "2000"});
    ASSERT_EQ(env_only.code, 0) << env_only.err;
    EXPECT_EQ(std::distance(fs::directory_iterator(env_dir), {}), 1);
    ::unsetenv("SEPKIT_CACHE_DIR");
    for (const auto& f : fs::directory_iterator(flag_dir)) EXPECT_EQ(f.path().extension(), ".json");
}

TEST(Cli, OutputFileAndStudySummary)
{
    const fs::path dir = scratch("study");
    const fs::path csv = dir / "rebit.csv";
    const fs::path summary = dir / "rebit.json";
    CliRun r = run({"--out", csv.string(), "study", "rebit", "--k-max", "20", "--summary-out", summary.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(r.out.empty());
    std::ifstream in(csv);
    const auto rows = read_csv(in);
    ASSERT_EQ(rows.size(), 21u);
    const Json j = Json::parse(slurp(summary));
    expect_snake_case_keys(j);
    EXPECT_NEAR(std::stod(j["fit"]["slope"]["value"].get<std::string>()), std::log(16.0 / 27), 0.02);
}

TEST(Cli, GuessFromFile)
{
    const fs::path dir = scratch("guess");
    std::string text = "alpha,value\n";
    for (int a = 1; a <= 20; ++a) text += std::to_string(a) + ",1/" + std::to_string(a + 1) + "\n";
    write(dir / "seq.csv", text);
    CliRun r = run({"--format", "json", "guess", "--input", (dir / "seq.csv").string(), "--max-degree", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    const Json j = r.json();
    expect_snake_case_keys(j);
    EXPECT_NE(r.out.find("p2"), std::string::npos);

    write(dir / "bad.csv", "alpha,value\n1,x\n");
    EXPECT_EQ(run({"guess", "--input", (dir / "bad.csv").string()}).code, 2);
}

TEST(Cli, FigureData)
{
    CliRun r = run({"figure", "raw", "--alpha-min", "1", "--alpha-max", "3", "--alpha-step", "1", "--k-min", "0",
                 "--k-max", "1"});
    ASSERT_EQ(r.code, 0) << r.err;
    std::istringstream in(r.out);
    const auto rows = read_csv(in);
    ASSERT_EQ(rows.size(), 4u);
    EXPECT_NE(r.out.find("4/33"), std::string::npos);
    EXPECT_NE(r.out.find("45/286"), std::string::npos);
}

#ifdef SEPKIT_CLI_PATH
TEST(Cli, BinaryExitCodes)
{
    auto status = [](const std::string& args) {
        const std::string cmd = std::string(SEPKIT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
        const int s = std::system(cmd.c_str());
        return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
    };
    EXPECT_EQ(status("q --k 0 --alpha 2"), 0);
    EXPECT_EQ(status("q --k 0"), 2);
    EXPECT_EQ(status("q --k 9 --alpha 2 --method recurrence"), 1);
}
#endif
