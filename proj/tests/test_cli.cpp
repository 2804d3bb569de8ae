#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ggr/grid_io.hpp"
#include "ggr/runner.hpp"
#include "ggr/signals.hpp"
#include "testing.hpp"

using namespace ggr;
namespace fs = std::filesystem;

namespace
{
    const fs::path configs = GGR_CONFIG_DIR;

    int run(const std::string& command, const fs::path& config, const fs::path& out, std::string* log = nullptr,
            std::optional<std::uint64_t> seed = std::nullopt)
    {
        std::ostringstream o, e;
        RunContext ctx;
        ctx.out_dir = out;
        ctx.seed = seed;
        const int rc = run_command(command, config, ctx, o, e);
        if (log)
            *log = o.str() + e.str();
        return rc;
    }

    int shell(const std::string& args)
    {
        const std::string cmd = std::string(GGR_BINARY) + " " + args + " >/dev/null 2>&1";
        const int status = std::system(cmd.c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    }

    fs::path write(const fs::path& dir, const std::string& name, const std::string& text)
    {
        const fs::path p = dir / name;
        std::ofstream(p) << text;
        return p;
    }

    std::string slurp(const fs::path& p) { return read_file(p); }
}

TEST_CASE("gen writes a grid readable by the grid reader")
{
    testing::TempDir dir("cli_gen");
    REQUIRE(run("gen", configs / "gen_gaussian.json", dir.path()) == 0);
    const auto g = read_complex_grid(dir.path() / "signal.ggr");
    const auto want = make_gaussian(1, GridGeometry::symmetric(1, 512, 1.0 / 32));
    CHECK(g.geometry() == want.geometry());
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(g[i] == want[i]);
}

TEST_CASE("gabor and cheeger outputs")
{
    testing::TempDir dir("cli_gabor");
    REQUIRE(run("gabor", configs / "gabor_shifted.json", dir.path()) == 0);
    CHECK(std::holds_alternative<ComplexGrid>(read_grid(dir.path() / "gabor.ggr")));
    CHECK(std::holds_alternative<RealGrid>(read_grid(dir.path() / "spectrogram.ggr")));
    const auto j = Json::parse(slurp(dir.path() / "gabor.json"));
    CHECK(j["modulation_norm"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-8));

    REQUIRE(run("cheeger", configs / "cheeger_gaussian.json", dir.path()) == 0);
    const auto c = Json::parse(slurp(dir.path() / "cheeger.json"));
    for (const char* key : {"h_upper", "fiedler_value", "cut_mass_left", "cut_mass_right", "cut_weight"})
        CHECK(c.contains(key));
    CHECK(c["h_upper"].get<double>() == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));

    // a weight read back from disk gives the same estimate
    const auto S = read_real_grid(dir.path() / "spectrogram.ggr");
    write_grid(dir.path() / "w.ggr", S);
    const auto cfg = write(dir.path(), "w.json", R"({"weight": {"path": "w.ggr"}})");
    REQUIRE(run("cheeger", cfg, dir.path() / "out") == 0);
    CHECK(Json::parse(slurp(dir.path() / "out" / "cheeger.json"))["h_upper"].get<double>() > 0.0);
}

TEST_CASE("entire sweep reports the cubic slope")
{
    testing::TempDir dir("cli_entire");
    REQUIRE(run("entire", configs / "entire_exp.json", dir.path()) == 0);
    const auto j = Json::parse(slurp(dir.path() / "entire.json"));
    CHECK(j["fitted_slope"].get<double>() == doctest::Approx(3.0).epsilon(0.05 / 3));
    CHECK(j["growth_class"]["member"].get<bool>());
    const std::string csv = slurp(dir.path() / "ballnorms.csv");
    CHECK(csv.rfind(std::string(ball_norm_schema) + "\nr,norm,bound,slope_so_far\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 8);

    REQUIRE(run("entire", configs / "entire_poly.json", dir.path()) == 0);
    const auto p = Json::parse(slurp(dir.path() / "entire.json"));
    REQUIRE(p["zero_counts"].size() == 3);
    CHECK(p["zero_counts"][1]["count"].get<int>() == 2);
    CHECK(p["zero_counts"][1]["contour_count"].get<int>() == 2);
    CHECK(p["jensen"][1]["residual"].get<double>() <= 1e-8);
}

TEST_CASE("stability report and sweep schema")
{
    testing::TempDir dir("cli_stability");
    REQUIRE(run("stability", configs / "stability_instability.json", dir.path()) == 0);
    const auto j = Json::parse(slurp(dir.path() / "stability.json"));
    for (const char* key : {"p", "q", "d", "lhs", "h_upper", "sobolev_term", "weighted_term", "logderiv_term", "ratio"})
        CHECK(j.contains(key));
    CHECK(j.contains("noise"));
    const std::string csv = slurp(dir.path() / "tsweep.csv");
    CHECK(csv.rfind(std::string(tsweep_schema) + "\nT,h,lhs,sobolev,weighted,ratio\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2 + 5);
}

TEST_CASE("every failure maps to its exit code")
{
    testing::TempDir dir("cli_errors");
    CHECK(exit_code(ErrorKind::config) == 2);
    CHECK(exit_code(ErrorKind::invalid_argument) == 2);
    CHECK(exit_code(ErrorKind::admissibility) == 3);
    CHECK(exit_code(ErrorKind::non_convergence) == 4);
    CHECK(exit_code(ErrorKind::io) == 5);

    CHECK(run("stability", configs / "stability_inadmissible.json", dir.path()) == 3);
    CHECK(run("gen", write(dir.path(), "broken.json", "{\"grid\": "), dir.path()) == 2);
    CHECK(run("gen", write(dir.path(), "array.json", "[1, 2]"), dir.path()) == 2);
    CHECK(run("gen", write(dir.path(), "nosignal.json", R"({"grid": {"extents": [8], "spacing": 1}})"), dir.path()) == 2);
    CHECK(run("gen", write(dir.path(), "kind.json", R"({"grid": {"extents": [8], "spacing": 1}, "signal": {"kind": "square"}})"),
              dir.path()) == 2);
    CHECK(run("gen", write(dir.path(), "cmd.json", R"({"command": "gabor"})"), dir.path()) == 2);
    CHECK(run("entire", write(dir.path(), "p.json", R"({"function": {"kind": "polynomial", "coeffs": [1, 1]}, "p": 2, "radii": [1]})"),
              dir.path()) == 3);
    CHECK(run("gen", dir.path() / "missing.json", dir.path()) == 5);
    CHECK(run("gen", write(dir.path(), "file.json", R"({"signal": {"kind": "file", "path": "none.ggr"}})"), dir.path()) == 5);
    write(dir.path(), "occupied", "x");
    CHECK(run("gen", configs / "gen_gaussian.json", dir.path() / "occupied") == 5);
    const auto starved = write(dir.path(), "starved.json", R"({"grid": {"extents": [512], "spacing": 0.03125},
        "signal": {"kind": "gaussian"}, "phase_grid": {"rank": 2, "extent": 64, "spacing": 0.125}, "max_matvecs": 3})");
    CHECK(run("cheeger", starved, dir.path()) == 4);
}

TEST_CASE("command line front end")
{
    testing::TempDir dir("cli_binary");
    const std::string out = " --out " + dir.path().string();
    CHECK(shell("gen --config " + (configs / "gen_gaussian.json").string() + out) == 0);
    CHECK(fs::exists(dir.path() / "signal.ggr"));
    CHECK(shell("") == 2);
    CHECK(shell("gen") == 2);
    CHECK(shell("render --config x.json") == 2);
    CHECK(shell("gen --config " + (configs / "gen_gaussian.json").string() + " --threads x") == 2);
    CHECK(shell("stability --config " + (configs / "stability_inadmissible.json").string() + out) == 3);
    CHECK(shell("gen --config " + (dir.path() / "none.json").string() + out) == 5);
    CHECK(shell("--help") == 0);
}

TEST_CASE("identical configs and seeds give identical bytes")
{
    testing::TempDir dir("cli_determinism");
    for (const char* cfg : {"stability_instability.json", "gabor_shifted.json", "entire_poly.json"})
    {
        const std::string command = std::string(cfg).substr(0, std::string(cfg).find('_'));
        for (const char* run_dir : {"a", "b", "c"})
        {
            const std::string threads = std::string(run_dir) == "c" ? " --threads 3" : "";
            REQUIRE(shell(command + " --config " + (configs / cfg).string() + " --seed 11 --out " +
                          (dir.path() / run_dir).string() + threads) == 0);
        }
        for (const auto& entry : fs::directory_iterator(dir.path() / "a"))
        {
            const auto name = entry.path().filename();
            CHECK(slurp(entry.path()) == slurp(dir.path() / "b" / name));
            CHECK(slurp(entry.path()) == slurp(dir.path() / "c" / name));
        }
    }
    // the seed flag reaches the noise generator
    REQUIRE(run("stability", configs / "stability_instability.json", dir.path() / "s1", nullptr, 1) == 0);
    REQUIRE(run("stability", configs / "stability_instability.json", dir.path() / "s2", nullptr, 2) == 0);
    CHECK(slurp(dir.path() / "s1" / "stability.json") != slurp(dir.path() / "s2" / "stability.json"));
}
