#include <catch2/catch_amalgamated.hpp>

#include "sddelab/cli.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace sddelab;
using namespace sddelab::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name)
{
    const fs::path p = fs::temp_directory_path() / ("sddelab_test_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

int run_text(const std::string& text, const RunOptions& options, std::string* out_text = nullptr)
{
    std::ostringstream out, err;
    const int code = run(parse_config(text), options, out, err);
    if (out_text)
        *out_text = out.str();
    return code;
}

RunOptions quiet()
{
    RunOptions o;
    o.timestamp = false;
    o.workers = 2;
    return o;
}

} // namespace

TEST_CASE("unknown keys are named with their line", "[cli]") {
    const std::string text = "[experiment]\ncommand = simulate\n[model]\nname = quadratic-det\n"
                             "[integrator]\ndtmax = 1e-3\n";
    try {
        parse_config(text);
        FAIL("no error");
    } catch (const ConfigError& e) {
        CHECK(e.line() == 6);
        CHECK(e.key() == "dtmax");
        CHECK(std::string(e.what()).find("line 6") != std::string::npos);
        CHECK(std::string(e.what()).find("'dtmax'") != std::string::npos);
    }
}

TEST_CASE("malformed configs", "[cli]") {
    const std::string head = "[experiment]\ncommand = simulate\n[model]\nname = quadratic\n";
    CHECK_THROWS_AS(parse_config(head + "[bogus]\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(head + "[integrator]\ndt_max = fast\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(head + "[integrator]\ndt_max = 1e-3\ndt_max = 1e-4\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(head + "[integrator]\ndt_max = -1\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(head + "[integrator]\nladder = 10, x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[experiment]\ncommand = fly\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("[model]\nname = quadratic\n"), ConfigError);
    CHECK_THROWS_AS(parse_config(head + "colour = 3\n"), ConfigError);
    CHECK_NOTHROW(parse_config(head + "# comment\n; another\nsigma = 0.2\n"));
}

TEST_CASE("unknown models list the valid names", "[cli]") {
    try {
        parse_config("[experiment]\ncommand = simulate\n[model]\nname = lorenz\n");
        FAIL("no error");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("lorenz") != std::string::npos);
        CHECK(msg.find("population-neglog") != std::string::npos);
        CHECK(msg.find("explosive") != std::string::npos);
    }
}

TEST_CASE("defaults are filled in", "[cli]") {
    const auto c = parse_config("[experiment]\ncommand = simulate-delay\n[model]\nname = population\n");
    CHECK(c.model_params.at("a") == 1.0);
    CHECK(c.model_params.at("p") == 0.75);
    CHECK(c.integrator.dt_max == 1e-3);
    CHECK(c.integrator.record == RecordMode::every_step);
    CHECK(c.n == 100);
    const auto h = parse_config("[experiment]\ncommand = histogram\n[model]\nname = explosive\n"
                                "[integrator]\nhorizon = 3\n");
    CHECK(h.integrator.record == RecordMode::final_only);
    CHECK_THROWS_AS(parse_config("[experiment]\ncommand = histogram\n[model]\nname = explosive\n"
                                 "[integrator]\nhorizon = 2.5\n"),
                    ConfigError);
}

TEST_CASE("simulate writes a trajectory and a manifest", "[cli]") {
    const fs::path dir = scratch("simulate");
    const std::string text = "[experiment]\ncommand = simulate\n[model]\nname = quadratic-det\n"
                             "[integrator]\ndt_max = 1e-5\nhorizon = 2\n[output]\ndir = " +
                             dir.string() + "\n";
    std::string summary;
    REQUIRE(run_text(text, quiet(), &summary) == exit_ok);
    CHECK(summary.find("event=BlowUpPlus") != std::string::npos);
    const std::string csv = slurp(dir / "trajectory.csv");
    const auto pos = csv.find("# event=BlowUpPlus,t=");
    REQUIRE(pos != std::string::npos);
    const double t = std::stod(csv.substr(pos + 21));
    CHECK(t >= 0.99);
    CHECK(t <= 1.01);
    const auto manifest = nlohmann::json::parse(slurp(dir / "manifest.json"));
    CHECK(manifest.contains("integrator"));
    CHECK_FALSE(manifest.contains("generated"));
    CHECK(manifest.dump().find("\"dt_max\":1e-05") != std::string::npos);
}

TEST_CASE("reruns without timestamps are byte-identical", "[cli]") {
    const fs::path a = scratch("rerun_a");
    const fs::path b = scratch("rerun_b");
    const std::string body = "[experiment]\ncommand = histogram\n[model]\nname = explosive\n"
                             "[initial]\nkind = ramp\nstart = 0\nend = 1\n"
                             "[integrator]\nhorizon = 3\n[monte_carlo]\nn = 40\n[output]\ndir = ";
    RunOptions one = quiet();
    one.workers = 1;
    RunOptions many = quiet();
    many.workers = 8;
    REQUIRE(run_text(body + a.string() + "\n", one) == exit_ok);
    REQUIRE(run_text(body + b.string() + "\n", many) == exit_ok);
    CHECK(slurp(a / "histogram.csv") == slurp(b / "histogram.csv"));
    CHECK(slurp(a / "report.json") == slurp(b / "report.json"));
    // manifests differ only in the output directory
    auto ma = nlohmann::json::parse(slurp(a / "manifest.json"));
    auto mb = nlohmann::json::parse(slurp(b / "manifest.json"));
    ma.erase("output");
    mb.erase("output");
    CHECK(ma == mb);
}

TEST_CASE("timestamps appear only when requested", "[cli]") {
    const fs::path dir = scratch("stamp");
    const std::string text = "[experiment]\ncommand = timechange\n[output]\ndir = " + dir.string() + "\n";
    RunOptions o = quiet();
    o.timestamp = true;
    REQUIRE(run_text(text, o) == exit_ok);
    CHECK(slurp(dir / "diagnostics.csv").rfind("# generated=", 0) == 0);
    CHECK(nlohmann::json::parse(slurp(dir / "manifest.json")).contains("generated"));
}

TEST_CASE("exit statuses", "[cli]") {
    const fs::path dir = scratch("exits");
    std::ostringstream out, err;
    ExperimentConfig bad = parse_config("[experiment]\ncommand = simulate\n[model]\nname = quadratic\n");
    bad.output_dir = dir.string();
    bad.integrator.dt_max = -1.0;
    CHECK(run(bad, quiet(), out, err) == exit_config);
    CHECK_FALSE(err.str().empty());

    const std::string cfg = (dir / "cfg.ini").string();
    std::ofstream(cfg) << "[experiment]\ncommand = simulate\n[model]\nname = quadratic-det\n"
                          "[output]\ndir = "
                       << (dir / "run").string() << "\n";
    std::string args[] = {"sddelab", "--config", cfg, "--no-timestamp", "--workers", "1", "--seed", "5"};
    char* argv[] = {args[0].data(), args[1].data(), args[2].data(), args[3].data(),
                    args[4].data(), args[5].data(), args[6].data(), args[7].data()};
    CHECK(main_entry(8, argv, out, err) == exit_ok);
    CHECK(fs::exists(dir / "run" / "trajectory.csv"));
    CHECK(nlohmann::json::parse(slurp(dir / "run" / "manifest.json")).dump().find("\"base_seed\":5") !=
          std::string::npos);

    std::string missing[] = {"sddelab", "--config", (dir / "nope.ini").string()};
    char* argv2[] = {missing[0].data(), missing[1].data(), missing[2].data()};
    CHECK(main_entry(3, argv2, out, err) == exit_config);
    char* argv3[] = {args[0].data()};
    CHECK(main_entry(1, argv3, out, err) == exit_config);
}

TEST_CASE("dichotomy with p = 0.75 at defaults", "[cli]") {
    const fs::path dir = scratch("dichotomy");
    const std::string text = "[experiment]\ncommand = dichotomy\n[model]\nname = population\np = 0.75\n"
                             "[output]\ndir = " + dir.string() + "\n";
    REQUIRE(run_text(text, quiet()) == exit_ok);
    const auto report = nlohmann::json::parse(slurp(dir / "report.json"));
    CHECK(report.at("estimate").get<double>() <= 0.005);
    CHECK(report.at("valid").get<bool>());
    CHECK(report.at("seeds").at("count").get<int>() == 100);
}
