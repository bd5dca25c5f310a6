#include "quntherm/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace quntherm {
namespace {

constexpr double kSecondsPerDay = 86400.0;
constexpr int kMonthDays[12] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double day_of_year(const CalendarDate& d) {
    const CalendarDate jan1{d.year, 1, 1, 0, 0, 0};
    const CalendarDate midnight{d.year, d.month, d.day, 0, 0, 0};
    return static_cast<double>(epoch_seconds(midnight) - epoch_seconds(jan1)) / kSecondsPerDay;
}

double seconds_into_day(const CalendarDate& d) {
    return d.hour * 3600.0 + d.minute * 60.0 + d.second;
}

// Trapezoid of the sign-clipped endpoints: loads integrate the piecewise
// linear interpolant of the clipped samples, so heating + cooling splits are
// exactly additive with the unclipped integral.
void accumulate_clipped(LoadTotals& bucket, double dt_s, double q0, double q1) {
    const double pos = 0.5 * (std::max(q0, 0.0) + std::max(q1, 0.0)) * dt_s;
    const double neg = 0.5 * (std::min(q0, 0.0) + std::min(q1, 0.0)) * dt_s;
    bucket.cooling_MJ += pos / 1e6;
    bucket.heating_MJ += -neg / 1e6;
}

}  // namespace

Material builtin_material(const std::string& name) {
    if (name == "brick") return {"brick", 1800.0, 840.0, 0.69};
    if (name == "concrete") return {"concrete", 2200.0, 840.0, 2.0};
    if (name == "xps") return {"xps", 25.0, 1470.0, 0.0275};
    throw std::invalid_argument("unknown material '" + name +
                                "' (available: brick, concrete, xps)");
}

double WallAssembly::total_thickness() const {
    double sum = 0.0;
    for (const auto& layer : layers) sum += layer.thickness;
    return sum;
}

void WallAssembly::validate() const {
    require(!layers.empty(), "assembly '" + name + "': needs at least one layer");
    for (const auto& layer : layers) {
        const std::string where = "assembly '" + name + "', layer '" + layer.material.name + "': ";
        require(std::isfinite(layer.thickness) && layer.thickness > 0.0,
                where + "thickness must be > 0");
        require(std::isfinite(layer.material.rho) && layer.material.rho > 0.0 &&
                    std::isfinite(layer.material.cp) && layer.material.cp > 0.0 &&
                    std::isfinite(layer.material.k) && layer.material.k > 0.0,
                where + "rho, cp and k must be > 0");
    }
    require(std::isfinite(h_inside) && h_inside > 0.0 && std::isfinite(h_outside) &&
                h_outside > 0.0,
            "assembly '" + name + "': film coefficients must be > 0");
    require(solar_absorptivity >= 0.0 && solar_absorptivity <= 1.0,
            "assembly '" + name + "': solar absorptivity must lie in [0,1]");
    require(emissivity >= 0.0 && emissivity <= 1.0,
            "assembly '" + name + "': emissivity must lie in [0,1]");
}

WallAssembly wall_uninsulated(Orientation o) {
    WallAssembly w;
    w.name = "brick-15cm";
    w.layers = {{builtin_material("brick"), 0.15}};
    w.orientation = o;
    return w;
}

WallAssembly wall_insulated_inside(double insulation_m, Orientation o) {
    WallAssembly w;
    w.name = "xps-inside+brick-15cm";
    w.layers = {{builtin_material("xps"), insulation_m}, {builtin_material("brick"), 0.15}};
    w.orientation = o;
    return w;
}

WallAssembly wall_insulated_outside(double insulation_m, Orientation o) {
    WallAssembly w;
    w.name = "brick-15cm+xps-outside";
    w.layers = {{builtin_material("brick"), 0.15}, {builtin_material("xps"), insulation_m}};
    w.orientation = o;
    return w;
}

WallAssembly roof_insulated_inside(double insulation_m) {
    WallAssembly w;
    w.name = "xps-inside+concrete-15cm";
    w.layers = {{builtin_material("xps"), insulation_m}, {builtin_material("concrete"), 0.15}};
    w.orientation = Orientation::Roof;
    return w;
}

WallAssembly roof_insulated_outside(double insulation_m) {
    WallAssembly w;
    w.name = "concrete-15cm+xps-outside";
    w.layers = {{builtin_material("concrete"), 0.15}, {builtin_material("xps"), insulation_m}};
    w.orientation = Orientation::Roof;
    return w;
}

double IndoorSchedule::at(double t_seconds, const CalendarDate& start) const {
    const double doy =
        day_of_year(start) + (seconds_into_day(start) + t_seconds) / kSecondsPerDay;
    const double phase = 2.0 * std::numbers::pi * (doy - static_cast<double>(peak_day)) / 365.0;
    const double mean_C = 0.5 * (winter_C + summer_C);
    const double amp_C = 0.5 * (summer_C - winter_C);
    return mean_C + amp_C * std::cos(phase) + 273.15;
}

void SolverSettings::validate() const {
    require(nx >= 5, "solver settings: nx must be at least 5 nodes");
    require(std::isfinite(dt_hours) && dt_hours > 0.0, "solver settings: dt must be > 0");
    monitor.validate();
    require(std::isfinite(cn.fp_tol) && cn.fp_tol > 0.0 && cn.fp_max_iter >= 1,
            "solver settings: invalid fixed-point controls");
}

PhysicalProblem make_envelope_problem(const WallAssembly& wall, const ClimateSeries& climate,
                                      const IndoorSchedule& indoor) {
    wall.validate();
    climate.validate();

    PhysicalProblem phys;
    for (const auto& layer : wall.layers)
        phys.layers.push_back(
            {layer.thickness, layer.material.rho, layer.material.cp, layer.material.k});

    // The signals outlive this call; share one climate copy between them.
    auto clim = std::make_shared<const ClimateSeries>(climate);
    const CalendarDate start = climate.start;

    phys.left.kind = BcKind::Robin;
    phys.left.h = wall.h_inside;
    phys.left.ambient_kelvin = [indoor, start](double t) { return indoor.at(t, start); };

    const double alpha = wall.solar_absorptivity;
    const Orientation o = wall.orientation;
    phys.right.kind = BcKind::RobinRadiative;
    phys.right.h = wall.h_outside;
    phys.right.ambient_kelvin = [clim](double t) { return clim->outdoor_at(t); };
    phys.right.absorbed_solar = [clim, alpha, o](double t) { return alpha * clim->solar_at(o, t); };
    if (wall.orientation == Orientation::Roof) {
        phys.right.emissivity = wall.emissivity;
        phys.right.sky_kelvin = [clim](double t) { return clim->sky_at(t); };
    }

    const double T_in0 = phys.left.ambient_kelvin(0.0);
    const double T_out0 = climate.outdoor_at(0.0);
    const double l = wall.total_thickness();
    phys.initial_kelvin = [T_in0, T_out0, l](double x) {
        return T_in0 + (T_out0 - T_in0) * (x / l);
    };
    return phys;
}

LoadReport transmission_loads(const std::vector<double>& time_s,
                              const std::vector<double>& flux_Wm2, const CalendarDate& start) {
    require(time_s.size() == flux_Wm2.size(), "loads: time and flux series differ in length");
    require(time_s.size() >= 2, "loads: need at least two samples");
    require(std::isfinite(time_s.front()) && time_s.front() >= 0.0,
            "loads: series must start at t >= 0");
    for (std::size_t i = 0; i < time_s.size(); ++i) {
        require(std::isfinite(flux_Wm2[i]), "loads: non-finite flux sample");
        if (i > 0)
            require(std::isfinite(time_s[i]) && time_s[i] > time_s[i - 1],
                    "loads: times must be strictly increasing");
    }

    const double offset = seconds_into_day(start);
    const auto day_index = [offset](double t) {
        return static_cast<long long>(std::floor((offset + t) / kSecondsPerDay));
    };
    const long long n_days = day_index(time_s.back() - 1e-9) + 1;
    require(n_days >= 1 && n_days <= 100000, "loads: series covers an implausible day span");

    LoadReport report;
    report.time_s = time_s;
    report.flux_Wm2 = flux_Wm2;
    report.daily.assign(static_cast<std::size_t>(n_days), LoadTotals{});

    for (std::size_t i = 0; i + 1 < time_s.size(); ++i) {
        double a = time_s[i];
        const double b = time_s[i + 1];
        double qa = flux_Wm2[i];
        const double qb = flux_Wm2[i + 1];
        const double slope = (qb - qa) / (b - a);
        // split the segment at every midnight it spans
        long long day = day_index(a);
        while (true) {
            const double boundary = static_cast<double>(day + 1) * kSecondsPerDay - offset;
            if (boundary >= b) break;
            const double q_boundary = qa + slope * (boundary - a);
            accumulate_clipped(report.daily[static_cast<std::size_t>(day)], boundary - a, qa,
                               q_boundary);
            a = boundary;
            qa = q_boundary;
            ++day;
        }
        accumulate_clipped(report.daily[static_cast<std::size_t>(day)], b - a, qa, qb);
    }

    // roll the daily totals into calendar months (non-leap month lengths)
    int month = start.month - 1;           // 0-based
    int day_in_month = start.day - 1;      // 0-based
    report.monthly.push_back(LoadTotals{});
    for (long long d = 0; d < n_days; ++d) {
        if (d > 0) {
            ++day_in_month;
            if (day_in_month >= kMonthDays[month]) {
                day_in_month = 0;
                month = (month + 1) % 12;
                report.monthly.push_back(LoadTotals{});
            }
        }
        report.monthly.back().heating_MJ += report.daily[static_cast<std::size_t>(d)].heating_MJ;
        report.monthly.back().cooling_MJ += report.daily[static_cast<std::size_t>(d)].cooling_MJ;
    }
    for (const auto& m : report.monthly) {
        report.annual.heating_MJ += m.heating_MJ;
        report.annual.cooling_MJ += m.cooling_MJ;
    }
    return report;
}

LoadReport simulate_year(const WallAssembly& wall, const ClimateSeries& climate,
                         const IndoorSchedule& indoor, const SolverSettings& settings,
                         double hours) {
    settings.validate();
    if (hours < 0.0) hours = climate.hours();
    require(hours > 0.0 && hours <= climate.hours() + 1e-9,
            "simulate_year: horizon exceeds the climate record");

    const long long steps = std::llround(hours / settings.dt_hours);
    require(steps >= 1 && std::abs(steps * settings.dt_hours - hours) <= 1e-9 * std::max(1.0, hours),
            "simulate_year: horizon must be an integer number of steps");

    const PhysicalProblem phys = make_envelope_problem(wall, climate, indoor);
    const ReferenceScales scales = default_scales(phys);
    const DimensionlessProblem p = nondimensionalize(phys, scales);
    const double dt = seconds_to_nondim(settings.dt_hours * 3600.0, scales);

    MovingMesh mesh = settings.scheme == Scheme::Qunt
                          ? generate_initial_mesh(p.initial, settings.nx - 1, settings.monitor)
                          : MovingMesh::uniform(settings.nx - 1);
    FieldState state = make_initial_state(p, std::move(mesh));

    std::vector<double> time_s, flux;
    time_s.reserve(static_cast<std::size_t>(steps) + 1);
    flux.reserve(static_cast<std::size_t>(steps) + 1);
    // positive flux = heat entering the room through the inner face
    const auto record = [&](long long n) {
        time_s.push_back(static_cast<double>(n) * settings.dt_hours * 3600.0);
        flux.push_back(-flux_to_si(boundary_flux(state, p, Side::Left), scales));
    };

    record(0);
    for (long long n = 1; n <= steps; ++n) {
        switch (settings.scheme) {
            case Scheme::Imex: state = step_imex_uniform(state, p, dt); break;
            case Scheme::Qunt: state = step_qunt(state, p, settings.monitor, dt); break;
            case Scheme::CrankNicolson: state = step_crank_nicolson(state, p, dt, settings.cn); break;
        }
        state.t = static_cast<double>(n) * dt;
        record(n);
    }
    return transmission_loads(time_s, flux, climate.start);
}

std::vector<SweepRow> sweep_thickness(const std::function<WallAssembly(double)>& build,
                                      const std::vector<double>& thicknesses,
                                      const ClimateSeries& climate, const IndoorSchedule& indoor,
                                      const SolverSettings& settings, int workers) {
    require(static_cast<bool>(build), "sweep: assembly builder is empty");
    require(!thicknesses.empty(), "sweep: no thickness candidates");
    for (double l : thicknesses)
        require(std::isfinite(l) && l >= 0.0, "sweep: thicknesses must be finite and >= 0");
    if (workers < 1) workers = 1;

    std::vector<SweepRow> rows(thicknesses.size());
    const int n = static_cast<int>(thicknesses.size());
#pragma omp parallel for schedule(dynamic) num_threads(workers)
    for (int i = 0; i < n; ++i) {
        SweepRow row;
        row.thickness_m = thicknesses[static_cast<std::size_t>(i)];
        try {
            const LoadReport report =
                simulate_year(build(row.thickness_m), climate, indoor, settings);
            row.annual = report.annual;
        } catch (const std::exception& ex) {
            row.failed = true;
            row.error = ex.what();
        }
        rows[static_cast<std::size_t>(i)] = std::move(row);
    }
    return rows;
}

}  // namespace quntherm
