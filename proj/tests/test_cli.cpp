// End-to-end tests of the command-line tool: each case invokes the installed
// binary (path injected as CLI_BIN at compile time) in a scratch directory,
// then inspects exit codes and the CSV artifacts.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "quntherm/climate.hpp"
#include "quntherm/csvio.hpp"

namespace fs = std::filesystem;
using namespace quntherm;

namespace {

fs::path fresh_dir(const std::string& name) {
    fs::path dir = fs::path("cli_artifacts") / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int run_cli(const std::string& args, const fs::path& dir) {
    const std::string cmd = std::string("\"") + CLI_BIN + "\" " + args + " > \"" +
                            (dir / "stdout.txt").string() + "\" 2> \"" +
                            (dir / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    REQUIRE(status != -1);
    REQUIRE(WIFEXITED(status));
    return WEXITSTATUS(status);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    REQUIRE(in.good());
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) lines.push_back(line);
    return lines;
}

double cell_num(const std::vector<std::string>& cells, std::size_t i) {
    REQUIRE(i < cells.size());
    return parse_double(cells[i], "csv cell");
}

// A flat climate record pinned at `t_C` with zero solar, long enough for a
// two-day simulation.
void write_constant_climate(const fs::path& path, double t_C, int hours) {
    ClimateSeries s;
    s.start = parse_iso8601("2021-01-01T00:00:00");
    const std::size_t n = static_cast<std::size_t>(hours);
    s.t_out_K.assign(n, t_C + 273.15);
    for (auto& v : s.solar_Wm2) v.assign(n, 0.0);
    s.t_sky_K.assign(n, t_C + 263.15);
    write_climate_csv(s, path.string());
}

}  // namespace

TEST_CASE("help exits zero and documents the subcommands") {
    const fs::path dir = fresh_dir("help");
    CHECK(run_cli("--help", dir) == 0);
    const std::string out = read_file(dir / "stdout.txt");
    for (const char* sub : {"benchmark", "simulate", "sweep", "optimize", "synth-climate"})
        CHECK(out.find(sub) != std::string::npos);

    CHECK(run_cli("simulate --help", dir) == 0);
    const std::string sim = read_file(dir / "stdout.txt");
    for (const char* flag : {"--wall", "--layers", "--city", "--climate", "--scheme", "--nx",
                             "--dt-hours", "--hours", "--indoor-winter-C"})
        CHECK(sim.find(flag) != std::string::npos);
}

TEST_CASE("synth-climate writes a loadable year and reruns byte-identically") {
    const fs::path dir = fresh_dir("synth");
    CHECK(run_cli("--out-dir \"" + dir.string() + "\" synth-climate --city sao_paulo --seed 9",
                  dir) == 0);
    const ClimateSeries series = load_climate_csv((dir / "climate.csv").string());
    CHECK(series.size() == 8760);

    CHECK(run_cli("--out-dir \"" + dir.string() +
                      "\" synth-climate --city sao_paulo --seed 9 --out again.csv",
                  dir) == 0);
    CHECK(read_file(dir / "climate.csv") == read_file(dir / "again.csv"));

    // A different seed must change the bytes.
    CHECK(run_cli("--out-dir \"" + dir.string() +
                      "\" synth-climate --city sao_paulo --seed 10 --out other.csv",
                  dir) == 0);
    CHECK(read_file(dir / "climate.csv") != read_file(dir / "other.csv"));
}

TEST_CASE("synth-climate city profile accepts explicit overrides") {
    const fs::path dir = fresh_dir("synth_override");
    CHECK(run_cli("--out-dir \"" + dir.string() +
                      "\" synth-climate --city curitiba --t-max 35 --noise-std 0",
                  dir) == 0);
    const ClimateSeries series = load_climate_csv((dir / "climate.csv").string());
    double max_K = 0.0;
    for (double v : series.t_out_K) max_K = std::max(max_K, v);
    CHECK(max_K == doctest::Approx(35.0 + 273.15).epsilon(1e-9));
}

TEST_CASE("default benchmark produces the four tables with their schemas") {
    const fs::path dir = fresh_dir("bench");
    // A slimmer reference keeps the test quick; everything else is defaults.
    CHECK(run_cli("--out-dir \"" + dir.string() + "\" benchmark --ref-nx 405", dir) == 0);

    const auto field = read_lines(dir / "errors_field.csv");
    REQUIRE(field.size() == 3);  // header + qunt + imex single-point rows
    CHECK(field[0] == "scheme,Nx,dt,eps_inf");
    const auto q = split_csv_line(field[1]);
    const auto m = split_csv_line(field[2]);
    CHECK(q[0] == "qunt");
    CHECK(m[0] == "imex");
    CHECK(cell_num(q, 1) == 51);
    // The moving grid beats the uniform grid by an order of magnitude here.
    CHECK(cell_num(q, 3) < 5e-3);
    CHECK(cell_num(m, 3) > cell_num(q, 3));

    const auto flux = read_lines(dir / "errors_flux.csv");
    REQUIRE(flux.size() == 5);  // header + 2 sides x 2 schemes
    CHECK(flux[0] == "scheme,Nx,dt,side,xi_inf");
    for (std::size_t i = 1; i < flux.size(); ++i) {
        const auto cells = split_csv_line(flux[i]);
        REQUIRE(cells.size() == 5);
        CHECK((cells[3] == "left" || cells[3] == "right"));
        CHECK(cell_num(cells, 4) > 0.0);
    }

    const auto runtime = read_lines(dir / "runtime.csv");
    REQUIRE(runtime.size() == 4);  // header + cn + qunt + imex
    CHECK(runtime[0] == "scheme,Nx,horizon,seconds,ratio");
    const auto cn = split_csv_line(runtime[1]);
    CHECK(cn[0] == "cn");
    CHECK(cell_num(cn, 4) == 1.0);  // ratio is relative to the cn row
    for (std::size_t i = 1; i < runtime.size(); ++i)
        CHECK(cell_num(split_csv_line(runtime[i]), 3) > 0.0);

    const auto traj = read_lines(dir / "trajectory.csv");
    const auto header = split_csv_line(traj[0]);
    REQUIRE(header.size() == 2 + 51);  // step, t, x_0..x_50
    CHECK(header[0] == "step");
    CHECK(header[1] == "t");
    CHECK(header[2] == "x_0");
    CHECK(header.back() == "x_50");
    REQUIRE(traj.size() == 1 + 9601);  // tau/save_dt + 1 frames
    const auto first = split_csv_line(traj[1]);
    CHECK(cell_num(first, 2) == 0.0);   // left end pinned
    CHECK(cell_num(first, 52) == 1.0);  // right end pinned

    // Re-running is byte-identical for everything except wall-clock timings.
    const fs::path dir2 = fresh_dir("bench_repeat");
    CHECK(run_cli("--out-dir \"" + dir2.string() + "\" benchmark --ref-nx 405", dir2) == 0);
    for (const char* name : {"errors_field.csv", "errors_flux.csv", "trajectory.csv"})
        CHECK(read_file(dir / name) == read_file(dir2 / name));
}

TEST_CASE("benchmark rejects a degenerate node count") {
    const fs::path dir = fresh_dir("bench_bad");
    CHECK(run_cli("--out-dir \"" + dir.string() + "\" benchmark --nx 2", dir) == 1);
    const std::string err = read_file(dir / "stderr.txt");
    CHECK(err.find("at least 5") != std::string::npos);
}

TEST_CASE("simulate at equilibrium reports near-zero loads") {
    const fs::path dir = fresh_dir("sim_eq");
    write_constant_climate(dir / "flat.csv", 22.5, 72);
    CHECK(run_cli("--out-dir \"" + dir.string() + "\" simulate --climate \"" +
                      (dir / "flat.csv").string() +
                      "\" --indoor-winter-C 22.5 --indoor-summer-C 22.5 --hours 48",
                  dir) == 0);

    const auto flux = read_lines(dir / "flux.csv");
    CHECK(flux[0] == "t_hours,flux_Wm2");
    REQUIRE(flux.size() == 1 + 481);  // 48 h at 0.1 h per step, endpoints included
    for (std::size_t i = 1; i < flux.size(); i += 60)
        CHECK(std::abs(cell_num(split_csv_line(flux[i]), 1)) < 1e-6);

    const auto daily = read_lines(dir / "loads_daily.csv");
    REQUIRE(daily.size() == 1 + 2);
    double total = 0.0;
    for (std::size_t i = 1; i < daily.size(); ++i)
        total += cell_num(split_csv_line(daily[i]), 3);
    CHECK(total < 1e-3);

    const auto monthly = read_lines(dir / "loads_monthly.csv");
    REQUIRE(monthly.size() == 1 + 1);
}

TEST_CASE("simulate accepts a custom layer stack") {
    const fs::path dir = fresh_dir("sim_layers");
    write_constant_climate(dir / "flat.csv", 30.0, 72);
    CHECK(run_cli("--out-dir \"" + dir.string() + "\" simulate --layers brick:0.10,xps:0.03" +
                      " --climate \"" + (dir / "flat.csv").string() + "\" --hours 24",
                  dir) == 0);
    const std::string out = read_file(dir / "stdout.txt");
    CHECK(out.find("custom") != std::string::npos);

    // Unknown material names are rejected before any computation.
    CHECK(run_cli("--out-dir \"" + dir.string() + "\" simulate --layers unobtainium:0.1" +
                      " --climate \"" + (dir / "flat.csv").string() + "\" --hours 24",
                  dir) == 1);
}

TEST_CASE("sweep writes one row per thickness with decreasing totals") {
    const fs::path dir = fresh_dir("sweep");
    CHECK(run_cli("--out-dir \"" + dir.string() +
                      "\" sweep --thicknesses 0.02,0.06,0.10 --city curitiba --nx 21 "
                      "--dt-hours 0.5",
                  dir) == 0);
    const auto rows = read_lines(dir / "sweep.csv");
    REQUIRE(rows.size() == 1 + 3);
    CHECK(rows[0] == "l_i_m,heating_MJm2,cooling_MJm2,total_MJm2,failed,error");
    double prev = 1e300;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split_csv_line(rows[i]);
        CHECK(cells[4] == "0");
        const double total = cell_num(cells, 3);
        CHECK(total < prev);  // thicker insulation, lower transmission load
        prev = total;
    }
}

TEST_CASE("sweep flags unbuildable thicknesses and exits nonzero") {
    const fs::path dir = fresh_dir("sweep_fail");
    CHECK(run_cli("--out-dir \"" + dir.string() +
                      "\" sweep --thicknesses 0,0.05 --city curitiba --nx 11 --dt-hours 0.5",
                  dir) == 2);
    const auto rows = read_lines(dir / "sweep.csv");
    REQUIRE(rows.size() == 1 + 2);
    const auto bad = split_csv_line(rows[1]);
    const auto good = split_csv_line(rows[2]);
    CHECK(bad[4] == "1");
    CHECK(!bad[5].empty());
    CHECK(good[4] == "0");
    CHECK(cell_num(good, 3) > 0.0);
}

TEST_CASE("optimize marks exactly one row optimal and adds the cost columns") {
    const fs::path dir = fresh_dir("optimize");
    CHECK(run_cli("--out-dir \"" + dir.string() +
                      "\" optimize --thicknesses 0.02:0.10:0.02 --city curitiba --nx 21 "
                      "--dt-hours 0.5",
                  dir) == 0);
    const auto rows = read_lines(dir / "costs.csv");
    REQUIRE(rows.size() == 1 + 5);
    CHECK(rows[0] == "l_i_m,E_MJm2,C_E,C_I,C_T,is_optimum");

    int optima = 0;
    double best = 1e300;
    std::vector<double> totals;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split_csv_line(rows[i]);
        REQUIRE(cells.size() == 6);
        const double ce = cell_num(cells, 2);
        const double ci = cell_num(cells, 3);
        const double ct = cell_num(cells, 4);
        CHECK(ct == doctest::Approx(ce + ci).epsilon(1e-12));
        totals.push_back(ct);
        best = std::min(best, ct);
        if (cells[5] == "1") ++optima;
    }
    CHECK(optima == 1);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto cells = split_csv_line(rows[i]);
        if (cells[5] == "1") CHECK(cell_num(cells, 4) == doctest::Approx(best));
    }

    // Identical invocation, identical bytes.
    const fs::path dir2 = fresh_dir("optimize_repeat");
    CHECK(run_cli("--out-dir \"" + dir2.string() +
                      "\" optimize --thicknesses 0.02:0.10:0.02 --city curitiba --nx 21 "
                      "--dt-hours 0.5",
                  dir2) == 0);
    CHECK(read_file(dir / "costs.csv") == read_file(dir2 / "costs.csv"));
}

TEST_CASE("optimize aborts when a candidate cannot be simulated") {
    const fs::path dir = fresh_dir("optimize_fail");
    CHECK(run_cli("--out-dir \"" + dir.string() +
                      "\" optimize --thicknesses 0,0.05 --city curitiba --nx 11 --dt-hours 0.5",
                  dir) == 2);
    const std::string err = read_file(dir / "stderr.txt");
    CHECK(err.find("thickness") != std::string::npos);
}

TEST_CASE("config files drive a scenario and unknown keys are fatal") {
    const fs::path dir = fresh_dir("config");
    write_constant_climate(dir / "flat.csv", 22.5, 72);
    {
        std::ofstream ini(dir / "scenario.ini");
        ini << "out-dir=" << (dir / "run1").string() << "\n";
        ini << "[simulate]\n";
        ini << "climate=" << (dir / "flat.csv").string() << "\n";
        ini << "indoor-winter-C=22.5\n";
        ini << "indoor-summer-C=22.5\n";
        ini << "hours=24\n";
    }
    // The config alone selects and parameterizes the subcommand.
    CHECK(run_cli("--config \"" + (dir / "scenario.ini").string() + "\"", dir) == 0);
    CHECK(fs::exists(dir / "run1" / "flux.csv"));

    // Command-line flags override file values.
    CHECK(run_cli("--config \"" + (dir / "scenario.ini").string() + "\" --out-dir \"" +
                      (dir / "run2").string() + "\" simulate",
                  dir) == 0);
    CHECK(read_file(dir / "run1" / "flux.csv") == read_file(dir / "run2" / "flux.csv"));

    {
        std::ofstream ini(dir / "bad.ini");
        ini << "[simulate]\nnot_a_flag=1\n";
    }
    CHECK(run_cli("--config \"" + (dir / "bad.ini").string() + "\" simulate", dir) == 1);

    {
        std::ofstream ini(dir / "bad_top.ini");
        ini << "mystery=1\n";
    }
    CHECK(run_cli("--config \"" + (dir / "bad_top.ini").string() + "\" simulate", dir) == 1);
}

TEST_CASE("climate record shorter than the horizon fails validation") {
    const fs::path dir = fresh_dir("short_climate");
    write_constant_climate(dir / "flat.csv", 22.5, 24);
    CHECK(run_cli("--out-dir \"" + dir.string() + "\" simulate --climate \"" +
                      (dir / "flat.csv").string() + "\" --hours 480",
                  dir) == 1);
    const std::string err = read_file(dir / "stderr.txt");
    CHECK(!err.empty());
}
