// Command-line front end: benchmark study, building simulation, thickness
// sweep, cost optimization and synthetic-climate generation, all emitting
// plain CSV artifacts.  Given the same flags/config file and seed, every
// output except runtime.csv (wall-clock timings) is byte-identical.
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iostream>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quntherm/benchmark.hpp"
#include "quntherm/csvio.hpp"
#include "quntherm/econ.hpp"
#include "quntherm/envelope.hpp"

namespace fs = std::filesystem;
using namespace quntherm;

namespace {

struct GlobalOpts {
    std::string out_dir = ".";
    int workers = 1;
};

fs::path out_path(const GlobalOpts& g, const std::string& name) {
    fs::create_directories(g.out_dir);
    return fs::path(g.out_dir) / name;
}

std::string sanitize_cell(std::string s) {
    for (char& c : s)
        if (c == ',' || c == '\n' || c == '\r') c = ';';
    return s;
}

Scheme parse_scheme(const std::string& s) {
    if (s == "imex") return Scheme::Imex;
    if (s == "qunt") return Scheme::Qunt;
    if (s == "cn") return Scheme::CrankNicolson;
    throw std::invalid_argument("unknown scheme '" + s + "' (expected imex, qunt or cn)");
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t pos = 0;
    while (pos <= s.size()) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string::npos) {
            out.push_back(s.substr(pos));
            break;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
    return out;
}

// Accepts "0.01,0.03,0.05" or an inclusive range "first:last:step".
std::vector<double> parse_thicknesses(const std::string& text) {
    std::vector<double> out;
    if (text.find(':') != std::string::npos) {
        const auto parts = split(text, ':');
        if (parts.size() != 3)
            throw std::invalid_argument("thickness range must be first:last:step, got '" + text +
                                        "'");
        const double first = parse_double(parts[0], "thickness range start");
        const double last = parse_double(parts[1], "thickness range end");
        const double step = parse_double(parts[2], "thickness range step");
        if (step <= 0.0 || last < first)
            throw std::invalid_argument("thickness range needs step > 0 and last >= first");
        long long n = std::llround((last - first) / step);
        if (first + static_cast<double>(n) * step > last + 1e-6 * step) --n;
        for (long long i = 0; i <= n; ++i)
            out.push_back(first + static_cast<double>(i) * step);
    } else {
        for (const auto& tok : split(text, ','))
            out.push_back(parse_double(tok, "thickness"));
    }
    return out;
}

// ---- shared option bundles -------------------------------------------------

struct WallOpts {
    std::string preset = "wall-2";
    std::string layers;  // "brick:0.15,xps:0.05", inside -> outside
    std::string orientation = "W";
    double insulation_m = 0.10;
    double absorptivity = -1.0;  // < 0: keep the preset's value
};

void add_wall_options(CLI::App* cmd, WallOpts& w) {
    cmd->add_option("--wall", w.preset,
                    "assembly preset: wall-1 (bare), wall-2 (insulated inside), "
                    "wall-3 (insulated outside), roof-in, roof-out")
        ->capture_default_str();
    cmd->add_option("--layers", w.layers,
                    "custom assembly as material:thickness_m pairs, inside -> outside, "
                    "e.g. brick:0.15,xps:0.05 (overrides --wall)");
    cmd->add_option("--orientation", w.orientation,
                    "facade orientation: N, S, E, W or H (roof)")
        ->capture_default_str();
    cmd->add_option("--insulation", w.insulation_m,
                    "insulation thickness [m] for the insulated presets")
        ->capture_default_str();
    cmd->add_option("--absorptivity", w.absorptivity,
                    "solar absorptivity override in [0,1] (default: preset value)");
}

WallAssembly build_wall(const WallOpts& w) {
    const Orientation o = orientation_from_string(w.orientation);
    WallAssembly a;
    if (!w.layers.empty()) {
        a.name = "custom";
        a.orientation = o;
        for (const auto& tok : split(w.layers, ',')) {
            const auto parts = split(tok, ':');
            if (parts.size() != 2 || parts[0].empty())
                throw std::invalid_argument("bad layer token '" + tok +
                                            "' (expected material:thickness_m)");
            a.layers.push_back(
                {builtin_material(parts[0]), parse_double(parts[1], "layer thickness")});
        }
    } else if (w.preset == "wall-1") {
        a = wall_uninsulated(o);
    } else if (w.preset == "wall-2") {
        a = wall_insulated_inside(w.insulation_m, o);
    } else if (w.preset == "wall-3") {
        a = wall_insulated_outside(w.insulation_m, o);
    } else if (w.preset == "roof-in") {
        a = roof_insulated_inside(w.insulation_m);
    } else if (w.preset == "roof-out") {
        a = roof_insulated_outside(w.insulation_m);
    } else {
        throw std::invalid_argument("unknown wall preset '" + w.preset +
                                    "' (wall-1, wall-2, wall-3, roof-in, roof-out)");
    }
    if (w.absorptivity >= 0.0) a.solar_absorptivity = w.absorptivity;
    a.validate();
    return a;
}

struct ClimateOpts {
    std::string city = "curitiba";
    std::string file;  // CSV path; overrides --city
    unsigned long long seed = 1;
};

void add_climate_options(CLI::App* cmd, ClimateOpts& c) {
    cmd->add_option("--city", c.city,
                    "synthetic climate profile: curitiba, rio_de_janeiro, sao_paulo, salvador")
        ->capture_default_str();
    cmd->add_option("--climate", c.file, "hourly climate CSV (overrides --city)");
    cmd->add_option("--seed", c.seed, "noise seed for the synthetic climate")
        ->capture_default_str();
}

ClimateSeries build_climate(const ClimateOpts& c) {
    if (!c.file.empty()) return load_climate_csv(c.file);
    ClimateProfile p = city_profile(c.city);
    p.seed = c.seed;
    return synthesize_climate(p);
}

struct SolverOpts {
    std::string scheme = "qunt";
    int nx = 41;
    double dt_hours = 0.1;
};

void add_solver_options(CLI::App* cmd, SolverOpts& s) {
    cmd->add_option("--scheme", s.scheme, "marching scheme: imex, qunt or cn")
        ->capture_default_str();
    cmd->add_option("--nx", s.nx, "node count across the assembly")->capture_default_str();
    cmd->add_option("--dt-hours", s.dt_hours, "time step [h]")->capture_default_str();
}

SolverSettings build_solver(const SolverOpts& s) {
    SolverSettings out;
    out.scheme = parse_scheme(s.scheme);
    out.nx = s.nx;
    out.dt_hours = s.dt_hours;
    out.validate();
    return out;
}

struct IndoorOpts {
    double winter_C = 20.0;
    double summer_C = 25.0;
};

void add_indoor_options(CLI::App* cmd, IndoorOpts& i) {
    cmd->add_option("--indoor-winter-C", i.winter_C, "winter indoor set point [C]")
        ->capture_default_str();
    cmd->add_option("--indoor-summer-C", i.summer_C, "summer indoor set point [C]")
        ->capture_default_str();
}

IndoorSchedule build_indoor(const IndoorOpts& i) {
    IndoorSchedule s;
    s.winter_C = i.winter_C;
    s.summer_C = i.summer_C;
    return s;
}

void write_load_tables(const GlobalOpts& g, const LoadReport& rep) {
    {
        CsvWriter flux(out_path(g, "flux.csv").string(), {"t_hours", "flux_Wm2"});
        for (std::size_t i = 0; i < rep.time_s.size(); ++i)
            flux.row({format_double(rep.time_s[i] / 3600.0), format_double(rep.flux_Wm2[i])});
    }
    {
        CsvWriter daily(out_path(g, "loads_daily.csv").string(),
                        {"day", "heating_MJm2", "cooling_MJm2", "total_MJm2"});
        for (std::size_t i = 0; i < rep.daily.size(); ++i)
            daily.row({std::to_string(i + 1), format_double(rep.daily[i].heating_MJ),
                       format_double(rep.daily[i].cooling_MJ),
                       format_double(rep.daily[i].total())});
    }
    {
        CsvWriter monthly(out_path(g, "loads_monthly.csv").string(),
                          {"month", "heating_MJm2", "cooling_MJm2", "total_MJm2"});
        for (std::size_t i = 0; i < rep.monthly.size(); ++i)
            monthly.row({std::to_string(i + 1), format_double(rep.monthly[i].heating_MJ),
                         format_double(rep.monthly[i].cooling_MJ),
                         format_double(rep.monthly[i].total())});
    }
}

// ---- benchmark --------------------------------------------------------------

struct BenchOpts {
    int nx = 51;
    double dt = 5e-3;
    std::vector<int> nx_list;
    std::vector<double> dt_list;
    int ref_nx = 505;
    double ref_dt = 1e-3;
    double save_dt = 5e-3;
    int repetitions = 1;
    double gate = 5e-2;
};

int cmd_benchmark(const GlobalOpts& g, const BenchOpts& o) {
    auto check_nx = [](int nx) {
        if (nx < 5) throw std::invalid_argument("benchmark: node counts must be at least 5");
    };
    auto check_dt = [](double dt) {
        if (!(dt > 0.0)) throw std::invalid_argument("benchmark: time steps must be positive");
    };
    check_nx(o.nx);
    check_dt(o.dt);
    for (int nx : o.nx_list) check_nx(nx);
    for (double dt : o.dt_list) check_dt(dt);
    if (o.ref_nx < 4 * o.nx)
        throw std::invalid_argument("benchmark: --ref-nx must be at least 4x --nx");
    if (o.repetitions < 1)
        throw std::invalid_argument("benchmark: --repetitions must be at least 1");

    const BenchmarkCase bc;
    std::cout << "reference: nx=" << o.ref_nx << " dt=" << format_double(o.ref_dt) << "..."
              << std::endl;
    const ReferenceSolution ref = reference_solution(bc, o.ref_nx, o.ref_dt, o.save_dt);
    std::cout << "reference done in " << format_double(ref.seconds) << " s" << std::endl;

    CsvWriter field(out_path(g, "errors_field.csv").string(), {"scheme", "Nx", "dt", "eps_inf"});
    CsvWriter flux(out_path(g, "errors_flux.csv").string(),
                   {"scheme", "Nx", "dt", "side", "xi_inf"});
    auto emit = [&](Scheme s, int nx, double dt, double eps, double xl, double xr) {
        field.row({scheme_name(s), std::to_string(nx), format_double(dt), format_double(eps)});
        flux.row({scheme_name(s), std::to_string(nx), format_double(dt), "left",
                  format_double(xl)});
        flux.row({scheme_name(s), std::to_string(nx), format_double(dt), "right",
                  format_double(xr)});
    };

    // Single-point comparison (also the source of the node-trajectory table).
    const SchemeRun qunt = run_scheme(bc, Scheme::Qunt, o.nx, o.dt, o.save_dt);
    const SchemeRun imex = run_scheme(bc, Scheme::Imex, o.nx, o.dt, o.save_dt);
    const ErrorReport eq = compute_errors(qunt, ref);
    const ErrorReport ei = compute_errors(imex, ref);
    emit(Scheme::Qunt, o.nx, o.dt, eq.eps_inf, eq.xi_inf_left, eq.xi_inf_right);
    emit(Scheme::Imex, o.nx, o.dt, ei.eps_inf, ei.xi_inf_left, ei.xi_inf_right);
    std::cout << "qunt nx=" << o.nx << ": eps_inf=" << format_double(eq.eps_inf)
              << "  imex nx=" << o.nx << ": eps_inf=" << format_double(ei.eps_inf) << std::endl;

    int failed_cells = 0;
    if (!o.nx_list.empty() || !o.dt_list.empty()) {
        const std::vector<int> nxs = o.nx_list.empty() ? std::vector<int>{o.nx} : o.nx_list;
        const std::vector<double> dts =
            o.dt_list.empty() ? std::vector<double>{o.dt} : o.dt_list;
        const StudyResult study =
            convergence_study(bc, ref, {Scheme::Qunt, Scheme::Imex}, nxs, dts, g.workers);
        for (const auto& c : study.cells) {
            if (c.failed) {
                std::cerr << "cell " << scheme_name(c.scheme) << " nx=" << c.nx
                          << " dt=" << format_double(c.dt) << " failed: " << c.error << "\n";
                ++failed_cells;
                continue;
            }
            emit(c.scheme, c.nx, c.dt, c.eps_inf, c.xi_inf_left, c.xi_inf_right);
        }
        for (const auto& note : study.trend_notes) std::cerr << "trend: " << note << "\n";
    }

    {
        std::vector<std::string> header = {"step", "t"};
        for (int j = 0; j < o.nx; ++j) header.push_back("x_" + std::to_string(j));
        CsvWriter traj(out_path(g, "trajectory.csv").string(), header);
        for (std::size_t k = 0; k < qunt.meshes.size(); ++k) {
            std::vector<std::string> row = {std::to_string(k), format_double(qunt.times[k])};
            for (double x : qunt.meshes[k]) row.push_back(format_double(x));
            traj.row(row);
        }
    }

    const RuntimeResult rt = runtime_comparison(
        bc,
        {{Scheme::CrankNicolson, 101, 1e-2}, {Scheme::Qunt, 51, 1e-2}, {Scheme::Imex, 101, 1e-2}},
        {{"2days", 48.0}}, ref, o.repetitions, o.gate);
    CsvWriter rcsv(out_path(g, "runtime.csv").string(),
                   {"scheme", "Nx", "horizon", "seconds", "ratio"});
    for (const auto& row : rt.rows) {
        rcsv.row({scheme_name(row.scheme), std::to_string(row.nx), row.horizon,
                  format_double(row.seconds), format_double(row.ratio)});
        std::cout << "runtime " << scheme_name(row.scheme) << "/" << row.nx << " (" << row.horizon
                  << "): " << format_double(row.seconds)
                  << " s, ratio=" << format_double(row.ratio) << std::endl;
    }

    if (failed_cells > 0) {
        std::cerr << failed_cells << " study cell(s) failed; partial tables written\n";
        return 2;
    }
    return 0;
}

// ---- simulate ---------------------------------------------------------------

struct SimOpts {
    WallOpts wall;
    ClimateOpts climate;
    SolverOpts solver;
    IndoorOpts indoor;
    double hours = -1.0;  // < 0: whole climate record
};

void add_sim_options(CLI::App* cmd, SimOpts& o) {
    add_wall_options(cmd, o.wall);
    add_climate_options(cmd, o.climate);
    add_solver_options(cmd, o.solver);
    add_indoor_options(cmd, o.indoor);
    cmd->add_option("--hours", o.hours, "horizon [h] (default: the whole climate record)");
}

int cmd_simulate(const GlobalOpts& g, const SimOpts& o) {
    const WallAssembly wall = build_wall(o.wall);
    const ClimateSeries climate = build_climate(o.climate);
    const LoadReport rep =
        simulate_year(wall, climate, build_indoor(o.indoor), build_solver(o.solver), o.hours);
    write_load_tables(g, rep);
    std::cout << wall.name << " (" << orientation_name(wall.orientation)
              << "): heating=" << format_double(rep.annual.heating_MJ)
              << " cooling=" << format_double(rep.annual.cooling_MJ)
              << " total=" << format_double(rep.annual.total()) << " MJ/m^2" << std::endl;
    return 0;
}

// ---- sweep / optimize -------------------------------------------------------

struct SweepOpts {
    ClimateOpts climate;
    SolverOpts solver;
    IndoorOpts indoor;
    std::string orientation = "W";
    double absorptivity = -1.0;  // < 0: keep the template's value
    std::string thicknesses = "0.01:0.12:0.01";
    std::string tmpl = "inside";
};

void add_sweep_options(CLI::App* cmd, SweepOpts& o) {
    add_climate_options(cmd, o.climate);
    add_solver_options(cmd, o.solver);
    add_indoor_options(cmd, o.indoor);
    cmd->add_option("--orientation", o.orientation,
                    "facade orientation: N, S, E, W or H (roof)")
        ->capture_default_str();
    cmd->add_option("--absorptivity", o.absorptivity,
                    "solar absorptivity override in [0,1] (default: template value)");
    cmd->add_option("--thicknesses", o.thicknesses,
                    "candidate insulation thicknesses [m]: comma list or first:last:step")
        ->capture_default_str();
    cmd->add_option("--template", o.tmpl,
                    "assembly family: inside, outside, roof-in or roof-out")
        ->capture_default_str();
}

std::function<WallAssembly(double)> thickness_builder(const SweepOpts& o) {
    const Orientation orient = orientation_from_string(o.orientation);
    const double absorptivity = o.absorptivity;
    const std::string tmpl = o.tmpl;
    if (tmpl != "inside" && tmpl != "outside" && tmpl != "roof-in" && tmpl != "roof-out")
        throw std::invalid_argument("unknown template '" + tmpl +
                                    "' (inside, outside, roof-in, roof-out)");
    return [tmpl, orient, absorptivity](double l) {
        WallAssembly a;
        if (tmpl == "inside") a = wall_insulated_inside(l, orient);
        else if (tmpl == "outside") a = wall_insulated_outside(l, orient);
        else if (tmpl == "roof-in") a = roof_insulated_inside(l);
        else a = roof_insulated_outside(l);
        if (absorptivity >= 0.0) a.solar_absorptivity = absorptivity;
        return a;
    };
}

std::vector<SweepRow> run_sweep(const GlobalOpts& g, const SweepOpts& o) {
    const std::vector<double> ths = parse_thicknesses(o.thicknesses);
    const ClimateSeries climate = build_climate(o.climate);
    return sweep_thickness(thickness_builder(o), ths, climate, build_indoor(o.indoor),
                           build_solver(o.solver), g.workers);
}

int cmd_sweep(const GlobalOpts& g, const SweepOpts& o) {
    const std::vector<SweepRow> rows = run_sweep(g, o);
    CsvWriter csv(out_path(g, "sweep.csv").string(),
                  {"l_i_m", "heating_MJm2", "cooling_MJm2", "total_MJm2", "failed", "error"});
    int failures = 0;
    for (const auto& r : rows) {
        if (r.failed) ++failures;
        csv.row({format_double(r.thickness_m), format_double(r.annual.heating_MJ),
                 format_double(r.annual.cooling_MJ), format_double(r.annual.total()),
                 r.failed ? "1" : "0", sanitize_cell(r.error)});
        if (r.failed)
            std::cerr << "thickness " << format_double(r.thickness_m) << " failed: " << r.error
                      << "\n";
    }
    std::cout << rows.size() << " thicknesses swept, " << failures << " failed" << std::endl;
    return failures > 0 ? 2 : 0;
}

struct OptOpts {
    SweepOpts sweep;
    EconomicParams econ;
};

int cmd_optimize(const GlobalOpts& g, const OptOpts& o) {
    o.econ.validate();
    const std::vector<SweepRow> rows = run_sweep(g, o.sweep);
    for (const auto& r : rows)
        if (r.failed)
            throw SolverError("optimize: simulation failed at thickness " +
                              format_double(r.thickness_m) + ": " + r.error);

    std::vector<ThicknessEnergy> candidates;
    candidates.reserve(rows.size());
    for (const auto& r : rows) candidates.push_back({r.thickness_m, r.annual.total()});
    const OptimumResult opt = optimum_thickness(candidates, o.econ);

    CsvWriter csv(out_path(g, "costs.csv").string(),
                  {"l_i_m", "E_MJm2", "C_E", "C_I", "C_T", "is_optimum"});
    for (std::size_t i = 0; i < opt.table.size(); ++i) {
        const CostBreakdown& c = opt.table[i];
        csv.row({format_double(c.thickness_m), format_double(c.annual_energy_MJ),
                 format_double(c.energy_cost), format_double(c.insulation_cost),
                 format_double(c.total_cost), i == opt.optimum_index ? "1" : "0"});
    }
    const CostBreakdown& best = opt.table[opt.optimum_index];
    std::cout << "optimum thickness " << format_double(best.thickness_m) << " m, total cost "
              << format_double(best.total_cost) << " $/m^2 a year" << std::endl;
    return 0;
}

// ---- synth-climate ----------------------------------------------------------

struct SynthOpts {
    std::string city;
    ClimateProfile prof;
    std::string out = "climate.csv";
};

int cmd_synth(const GlobalOpts& g, const ClimateProfile& prof, const std::string& out) {
    const ClimateSeries series = synthesize_climate(prof);
    const fs::path path = out_path(g, out);
    write_climate_csv(series, path.string());
    std::cout << prof.name << ": " << series.size() << " hourly samples -> " << path.string()
              << std::endl;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"1D nonlinear heat conduction on a moving grid: scheme benchmark, "
                 "building-envelope simulation and insulation-cost optimization"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "read options from an INI-style config file");
    app.allow_config_extras(false);

    GlobalOpts g;
    app.add_option("--out-dir", g.out_dir, "directory for CSV outputs")->capture_default_str();
    app.add_option("--workers", g.workers, "parallel jobs for studies and sweeps")
        ->capture_default_str();

    int rc = 0;
    // A subcommand can be triggered both by its config-file section and by
    // naming it on the command line; the action must still run exactly once.
    auto ran = std::make_shared<bool>(false);
    auto once = [ran, &rc](const std::function<int()>& fn) {
        return [ran, &rc, fn] {
            if (*ran) return;
            *ran = true;
            rc = fn();
        };
    };

    auto bench = std::make_shared<BenchOpts>();
    CLI::App* cb = app.add_subcommand(
        "benchmark", "error and runtime comparison of the schemes on the reference case");
    cb->configurable();
    cb->add_option("--nx", bench->nx, "node count for the single-point comparison")
        ->capture_default_str();
    cb->add_option("--dt", bench->dt, "time step for the single-point comparison")
        ->capture_default_str();
    cb->add_option("--nx-list", bench->nx_list, "node counts for a convergence study")
        ->delimiter(',');
    cb->add_option("--dt-list", bench->dt_list, "time steps for a convergence study")
        ->delimiter(',');
    cb->add_option("--ref-nx", bench->ref_nx, "reference grid nodes")->capture_default_str();
    cb->add_option("--ref-dt", bench->ref_dt, "reference time step")->capture_default_str();
    cb->add_option("--save-dt", bench->save_dt, "save cadence for frames and errors")
        ->capture_default_str();
    cb->add_option("--repetitions", bench->repetitions, "timing repetitions (best kept)")
        ->capture_default_str();
    cb->add_option("--gate", bench->gate, "accuracy gate for the runtime table")
        ->capture_default_str();
    cb->callback(once([&, bench] { return cmd_benchmark(g, *bench); }));

    auto sim = std::make_shared<SimOpts>();
    CLI::App* cs = app.add_subcommand(
        "simulate", "march one assembly through a climate record and integrate loads");
    cs->configurable();
    add_sim_options(cs, *sim);
    cs->callback(once([&, sim] { return cmd_simulate(g, *sim); }));

    auto swp = std::make_shared<SweepOpts>();
    CLI::App* cw = app.add_subcommand(
        "sweep", "yearly simulation per candidate insulation thickness");
    cw->configurable();
    add_sweep_options(cw, *swp);
    cw->callback(once([&, swp] { return cmd_sweep(g, *swp); }));

    auto opt = std::make_shared<OptOpts>();
    CLI::App* co = app.add_subcommand(
        "optimize", "thickness sweep plus energy/insulation cost minimization");
    co->configurable();
    add_sweep_options(co, opt->sweep);
    co->add_option("--insulation-price", opt->econ.insulation_price_per_m3,
                   "insulation price [$/m^3]")
        ->capture_default_str();
    co->add_option("--electricity-price", opt->econ.electricity_price_per_kwh,
                   "electricity price [$/kWh]")
        ->capture_default_str();
    co->add_option("--efficiency", opt->econ.system_efficiency,
                   "delivered heat per unit electricity")
        ->capture_default_str();
    co->callback(once([&, opt] { return cmd_optimize(g, *opt); }));

    auto syn = std::make_shared<SynthOpts>();
    CLI::App* cy = app.add_subcommand(
        "synth-climate", "write a deterministic synthetic hourly climate year as CSV");
    cy->configurable();
    cy->add_option("--city", syn->city,
                   "start from a built-in profile: curitiba, rio_de_janeiro, sao_paulo, salvador");
    cy->add_option("--name", syn->prof.name, "profile name stamped on stdout")
        ->capture_default_str();
    cy->add_option("--t-min", syn->prof.t_min_C, "annual minimum [C]")->capture_default_str();
    cy->add_option("--t-mean", syn->prof.t_mean_C, "annual mean [C]")->capture_default_str();
    cy->add_option("--t-max", syn->prof.t_max_C, "annual maximum [C]")->capture_default_str();
    cy->add_option("--solar-peak", syn->prof.solar_peak_Wm2, "clear-sky solar peak [W/m^2]")
        ->capture_default_str();
    cy->add_option("--sky-offset", syn->prof.sky_offset_K, "t_out - t_sky offset [K]")
        ->capture_default_str();
    cy->add_option("--noise-std", syn->prof.noise_std_K, "AR(1) noise scale [K]")
        ->capture_default_str();
    cy->add_option("--start-year", syn->prof.start_year, "calendar year (non-leap)")
        ->capture_default_str();
    cy->add_option("--seed", syn->prof.seed, "noise seed")->capture_default_str();
    cy->add_option("--out", syn->out, "output file name inside --out-dir")
        ->capture_default_str();
    cy->callback(once([&, syn, cy]() -> int {
        ClimateProfile p = syn->prof;
        if (!syn->city.empty()) {
            p = city_profile(syn->city);
            // Explicit flags still override the chosen city profile.
            if (cy->count("--name")) p.name = syn->prof.name;
            if (cy->count("--t-min")) p.t_min_C = syn->prof.t_min_C;
            if (cy->count("--t-mean")) p.t_mean_C = syn->prof.t_mean_C;
            if (cy->count("--t-max")) p.t_max_C = syn->prof.t_max_C;
            if (cy->count("--solar-peak")) p.solar_peak_Wm2 = syn->prof.solar_peak_Wm2;
            if (cy->count("--sky-offset")) p.sky_offset_K = syn->prof.sky_offset_K;
            if (cy->count("--noise-std")) p.noise_std_K = syn->prof.noise_std_K;
            if (cy->count("--start-year")) p.start_year = syn->prof.start_year;
            if (cy->count("--seed")) p.seed = syn->prof.seed;
        }
        return cmd_synth(g, p, syn->out);
    }));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);  // prints help or the parse diagnostic
        return code == 0 ? 0 : 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const MeshError& e) {
        std::cerr << "mesh failure: " << e.what() << "\n";
        return 2;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << "\n";
        return 2;
    }
    return rc;
}
