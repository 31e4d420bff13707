#include "tnoise/config.hpp"
#include "tnoise/io.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <sys/wait.h>

using namespace tnoise;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    fs::path p = fs::temp_directory_path() / ("tnoise_cli_" + name + "_" + std::to_string(::getpid()));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

int run_cli(const std::string& args, const fs::path& root)
{
    const std::string cmd = "TNOISE_OUTPUT_ROOT='" + root.string() + "' '" TNOISE_CLI_PATH "' " + args + " > '" +
                            (root / "stdout.txt").string() + "' 2>&1";
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

const char* quick_identities = "verify-identities --M 3 --N 1,2 --gamma 0,1 --samples 1";

} // namespace

TEST(Config, DefaultsValidateAndRoundTrip)
{
    const Config c;
    EXPECT_NO_THROW(validate(c));
    const Config back = parse_config(nlohmann::json::parse(canonical(c)));
    EXPECT_EQ(canonical(back), canonical(c));
    EXPECT_EQ(config_hash(back), config_hash(c));
    EXPECT_EQ(config_hash(c).size(), 16u);
}

TEST(Config, OverridesCoerceTypes)
{
    Config c = apply_override(Config{}, "M", "4");
    EXPECT_EQ(c.M, 4);
    c = apply_override(c, "N", "2,4,8");
    EXPECT_EQ(c.N, (std::vector<int>{2, 4, 8}));
    c = apply_override(c, "scheme.threads", "3");
    EXPECT_EQ(c.scheme.threads, 3);
    c = apply_override(c, "nu", "2.5");
    EXPECT_EQ(c.nu, 2.5);
    EXPECT_NE(config_hash(c), config_hash(Config{}));
    EXPECT_THROW(apply_override(c, "no_such_key", "1"), ConfigError);
    EXPECT_THROW(apply_override(c, "M", "abc"), ConfigError);
}

TEST(Config, ValidationNamesTheField)
{
    auto expect_field = [](const std::string& key, const std::string& value) {
        try {
            validate(apply_override(Config{}, key, value));
            ADD_FAILURE() << key << " accepted";
        } catch (const ConfigError& e) {
            EXPECT_NE(std::string(e.what()).find(key), std::string::npos) << e.what();
        }
    };
    expect_field("M", "0");
    expect_field("dt", "-1");
    expect_field("beta", "3");
    expect_field("theta_kind", "cube");
}

TEST(Config, UnknownJsonKeysRejected)
{
    nlohmann::json j = Config{};
    j["bogus"] = 1;
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Csv, FixedFormat)
{
    const fs::path dir = scratch("csv");
    {
        CsvWriter w(dir / "a.csv", {"x", "y"});
        w.row(0.1, 2);
        w.row(1.0 / 3.0, -5);
    }
    EXPECT_EQ(slurp(dir / "a.csv"), "x,y\n0.10000000000000001,2\n0.33333333333333331,-5\n");
    fs::remove_all(dir);
}

TEST(Cli, ExitCodes)
{
    const fs::path root = scratch("exit");
    EXPECT_EQ(run_cli("frobnicate", root), 2);
    EXPECT_NE(slurp(root / "stdout.txt").find("frobnicate"), std::string::npos);
    EXPECT_EQ(run_cli("verify-identities --M 0", root), 2);
    EXPECT_EQ(run_cli("verify-identities --config /nonexistent.json", root), 2);
    std::ofstream(root / "bad.json") << "{\"M\": 3, \"unknown\": 1}";
    EXPECT_EQ(run_cli("verify-identities --config '" + (root / "bad.json").string() + "'", root), 2);
    EXPECT_EQ(run_cli(quick_identities, root), 0);
    fs::remove_all(root);
}

TEST(Cli, PrintConfigShowsOverrides)
{
    const fs::path root = scratch("print");
    EXPECT_EQ(run_cli("decay --print-config --nu1 2.5", root), 0);
    const auto j = nlohmann::json::parse(slurp(root / "stdout.txt"));
    EXPECT_EQ(j.at("nu1").get<double>(), 2.5);
    fs::remove_all(root);
}

TEST(Cli, RunDirectoryContents)
{
    const fs::path root = scratch("dir");
    ASSERT_EQ(run_cli(quick_identities, root), 0);
    int dirs = 0;
    for (const auto& e : fs::directory_iterator(root)) {
        if (!e.is_directory())
            continue;
        ++dirs;
        EXPECT_TRUE(fs::exists(e.path() / "identities.csv"));
        const auto res = nlohmann::json::parse(slurp(e.path() / "report.json"));
        EXPECT_EQ(res.at("metadata").at("subcommand"), "verify-identities");
        EXPECT_TRUE(res.at("metadata").contains("config_hash"));
        EXPECT_TRUE(res.at("metadata").contains("rng_algorithm"));
        EXPECT_EQ(res.at("metadata").at("config").at("M"), 3);
    }
    EXPECT_EQ(dirs, 1);
    fs::remove_all(root);
}

TEST(Cli, CsvOutputIsByteIdenticalAcrossRuns)
{
    const fs::path a = scratch("rep_a"), b = scratch("rep_b");
    const std::string args = "decay --M 3 --T 0.05";
    ASSERT_EQ(run_cli(args, a), 0);
    ASSERT_EQ(run_cli(args, b), 0);
    auto find_csv = [](const fs::path& root) {
        for (const auto& e : fs::recursive_directory_iterator(root))
            if (e.path().filename() == "decay.csv")
                return e.path();
        return fs::path{};
    };
    const fs::path ca = find_csv(a), cb = find_csv(b);
    ASSERT_FALSE(ca.empty());
    ASSERT_FALSE(cb.empty());
    EXPECT_EQ(slurp(ca), slurp(cb));
    fs::remove_all(a);
    fs::remove_all(b);
}

TEST(Config, HashIgnoresOutputLocation)
{
    Config a, b;
    b.output.root = "/elsewhere";
    b.output.name = "x";
    EXPECT_EQ(config_hash(a), config_hash(b));
}
