#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sslab/cli.hpp"
#include "sslab/errors.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

using namespace sslab;
using namespace sslab::cli;
using std::numbers::pi;

namespace {

int run_args(std::vector<std::string> args)
{
    args.insert(args.begin(), "sslab");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::filesystem::path temp(const std::string& name)
{
    return std::filesystem::temp_directory_path() / ("sslab_test_" + name);
}

} // namespace

TEST_CASE("spectrum at alpha = 1/2 is {0, -pi^2, -4pi^2, -9pi^2}")
{
    RunConfig c;
    c.alpha = 0.5;
    c.window_lo = -100.0;
    c.resolution = 12;
    const auto r = cmd_spectrum(c);
    REQUIRE(r.rows.size() == 4);
    const double expected[] = {-9 * pi * pi, -4 * pi * pi, -pi * pi, 0.0};
    for (std::size_t i = 0; i < 4; ++i) {
        const double v = r.rows[i][2].get<double>();
        CHECK(std::abs(v - expected[i]) <= 1e-8 * std::max(1.0, std::abs(expected[i])));
        CHECK(std::abs(r.rows[i][3].get<double>() - expected[i]) <= 1e-2 * std::max(1.0, std::abs(expected[i])));
    }
}

TEST_CASE("spectrum oracle and ladder agree at alpha = 1/3, level 2")
{
    RunConfig c;
    c.alpha = 1.0 / 3.0;
    c.level = 2;
    c.resolution = 12;
    const auto r = cmd_spectrum(c);
    CHECK(r.notes.empty());
    REQUIRE_FALSE(r.rows.empty());
    for (const auto& row : r.rows)
        CHECK(row[4].get<double>() <= 1e-3);
}

TEST_CASE("empty window gives an empty table and exit 0")
{
    RunConfig c;
    c.alpha = 0.5;
    c.window_lo = -5.0;
    c.window_hi = -1.0;
    CHECK(cmd_spectrum(c).rows.empty());
    const auto out = temp("empty.csv");
    CHECK(run_args({"spectrum", "--alpha", "0.5", "--window=-5,-1", "--out", out.string()}) == 0);
    CHECK(slurp(out) == "k,p,value,oracle,defect,config_hash\n");
}

TEST_CASE("ids marks delta = 1 and follows the Weyl law")
{
    RunConfig c;
    c.alpha = 0.5;
    c.level = 12;
    c.points = 3;
    c.window_lo = -1000.0;
    const auto r = cmd_ids(c);
    REQUIRE(r.notes.size() == 1);
    CHECK(r.notes[0].find("no gaps expected") != std::string::npos);
    for (const auto& row : r.rows) {
        const double R = -row[0].get<double>();
        CHECK(std::abs(row[1].get<double>() - std::sqrt(R) / pi) <= 0.02 * std::sqrt(R) / pi);
        CHECK(row[4] == "InSupport");
    }
    c.alpha = 2.0 / 3.0;
    c.level = 0;
    CHECK(cmd_ids(c).notes.empty());
}

TEST_CASE("ids at a gap point: plateau, positive zeta, Gap")
{
    RunConfig c;
    c.alpha = 2.0 / 3.0;
    c.level = 6;
    c.points = 200;
    c.window_lo = -20.0;
    const auto r = cmd_ids(c);
    int gaps = 0;
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
        if (r.rows[i][4] != "Gap" || r.rows[i - 1][4] != "Gap")
            continue;
        ++gaps;
        CHECK(r.rows[i][3].get<double>() > 0.0);
    }
    CHECK(gaps > 10);
}

TEST_CASE("plane is symmetric under x <-> y at delta = 1")
{
    RunConfig c;
    c.alpha = 0.5;
    c.grid = 21;
    const auto r = cmd_plane(c);
    const std::size_t m = 21;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const auto& a = r.rows[i * m + j];
            const auto& b = r.rows[j * m + i];
            CHECK(a[2].get<double>() == doctest::Approx(b[2].get<double>()).epsilon(1e-12));
            CHECK(a[3] == b[3]);
        }
}

TEST_CASE("plane: D collapses to one point and C is the r = 0 contour")
{
    RunConfig c;
    c.alpha = 2.0 / 3.0;
    c.grid = 41;
    const auto r = cmd_plane(c);
    // every point of D has the same image, hence the same Green value
    std::vector<double> on_d;
    for (const auto& row : r.rows)
        if (row[6].get<double>() == 0.0)
            on_d.push_back(row[2].get<double>());
    REQUIRE(on_d.size() >= 2);
    for (double g : on_d)
        CHECK(g == doctest::Approx(on_d.front()).epsilon(1e-12));
    int changes = 0;
    for (std::size_t i = 0; i + 1 < r.rows.size(); ++i)
        changes += r.rows[i][4] != r.rows[i + 1][4];
    CHECK(changes > 0);
}

TEST_CASE("dichotomy table and mirror")
{
    RunConfig c;
    const auto r = cmd_dichotomy(c);
    REQUIRE(r.rows.size() == 12);
    for (const auto& row : r.rows) {
        const bool big = row[1].get<double>() > 1.0;
        const bool neumann = row[2] == "neumann";
        CHECK((row[3] == "SquareSummable") == (big == neumann));
        CHECK(row[9].get<double>() <= 1e-6);
    }
    c.mirror = true;
    const auto m = cmd_dichotomy(c);
    REQUIRE(m.rows.size() == r.rows.size());
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        CHECK(m.rows[i][2] == r.rows[i][2]);
        CHECK(m.rows[i][3] == r.rows[i][3]);
        for (std::size_t k = 4; k < 9; ++k)
            CHECK(m.rows[i][k].get<double>() == doctest::Approx(r.rows[i][k].get<double>()).epsilon(1e-9));
    }
}

TEST_CASE("formats and provenance")
{
    RunConfig c;
    c.alpha = 0.5;
    c.window_lo = -20.0;
    const auto r = cmd_spectrum(c);
    const std::string csv = to_csv(r);
    CHECK(csv.find(config_hash(c)) != std::string::npos);
    const auto j = nlohmann::json::parse(to_json(r));
    CHECK(j["provenance"]["config_hash"] == config_hash(c));
    CHECK(j["provenance"]["version"] == kVersion);
    CHECK(j["rows"].size() == r.rows.size());

    // output-only settings leave the hash alone, inputs change it
    RunConfig d = c;
    d.jobs = 7;
    d.format = "json";
    CHECK(config_hash(d) == config_hash(c));
    d.alpha = 0.25;
    CHECK(config_hash(d) != config_hash(c));

    ResultRecord q{"x", c, {"a", "b"}, {{"with,comma", "say \"hi\""}}, {}, {}, false, {}};
    CHECK(to_csv(q).find("\"with,comma\",\"say \"\"hi\"\"\"") != std::string::npos);
}

TEST_CASE("config files and flag overrides")
{
    const auto cfg = temp("run.cfg");
    {
        std::ofstream f(cfg);
        f << "alpha=0.5\nwindow=\"-20,0\"\nformat=json\n";
    }
    const auto a = temp("a.json"), b = temp("b.json");
    CHECK(run_args({"spectrum", "--config", cfg.string(), "--out", a.string()}) == 0);
    const auto ja = nlohmann::json::parse(slurp(a));
    CHECK(ja["rows"].size() == 2);
    CHECK(run_args({"spectrum", "--config", cfg.string(), "--window=-50,0", "--out", b.string()}) == 0);
    CHECK(nlohmann::json::parse(slurp(b))["rows"].size() == 3);
}

TEST_CASE("exit codes")
{
    const auto out = temp("exit.txt");
    CHECK(run_args({"bogus"}) == 2);
    CHECK(run_args({"spectrum", "--alpha", "1.5", "--out", out.string()}) == 2);
    CHECK(run_args({"spectrum", "--window=3,4", "--out", out.string()}) == 2);
    CHECK(run_args({"ids", "--level", "3", "--blowup", "12", "--out", out.string()}) == 2);
    CHECK(run_args({"spectrum", "--format", "xml", "--out", out.string()}) == 2);
    CHECK(run_args({"--help"}) == 0);
}

TEST_CASE("verify passes and catches the injected fault")
{
    RunConfig c;
    c.jobs = 4;
    const auto ok = cmd_verify(c);
    CHECK_FALSE(ok.check_failed);
    for (const auto& row : ok.rows)
        CHECK_MESSAGE(row[2] == true, row[1].get<std::string>());
    CHECK(ok.rows.size() >= 30);

    c.inject_fault = true;
    const auto bad = cmd_verify(c);
    CHECK(bad.check_failed);
    for (const auto& row : bad.rows)
        CHECK((row[2] == false) == (row[1] == "semiconjugacy"));

    const auto out = temp("fault.json");
    CHECK(run_args({"verify", "--inject-fault", "--out", out.string()}) == 1);

    c.inject_fault = false;
    c.timing = true;
    const auto timed = cmd_verify(c);
    CHECK(timed.columns.back() == "seconds");
}
