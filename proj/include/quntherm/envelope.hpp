#pragma once

#include <functional>
#include <string>
#include <vector>

#include "quntherm/benchmark.hpp"  // Scheme
#include "quntherm/climate.hpp"
#include "quntherm/pdesolver.hpp"

namespace quntherm {

struct Material {
    std::string name;
    double rho;  // kg/m^3
    double cp;   // J/(kg K)
    double k;    // W/(m K)
};

// brick, concrete, xps (extruded polystyrene)
Material builtin_material(const std::string& name);

struct AssemblyLayer {
    Material material;
    double thickness;  // m
};

// A wall or roof section, layers listed inside -> outside.  Long-wave sky
// exchange is applied only on the roof plane; every outside face receives
// absorptivity-weighted solar gains for its orientation.
struct WallAssembly {
    std::string name;
    std::vector<AssemblyLayer> layers;
    Orientation orientation = Orientation::South;
    double solar_absorptivity = 0.5;
    double emissivity = 0.9;
    double h_inside = 10.0;   // W/(m^2 K)
    double h_outside = 25.0;  // W/(m^2 K)

    double total_thickness() const;
    void validate() const;
};

// Reference sections: 15 cm brick walls (bare / insulated inside / insulated
// outside) and a 15 cm concrete roof with insulation on either face.
WallAssembly wall_uninsulated(Orientation o = Orientation::South);
WallAssembly wall_insulated_inside(double insulation_m, Orientation o = Orientation::South);
WallAssembly wall_insulated_outside(double insulation_m, Orientation o = Orientation::South);
WallAssembly roof_insulated_inside(double insulation_m);
WallAssembly roof_insulated_outside(double insulation_m);

// Indoor set-point drifting sinusoidally over the year between the winter
// and summer values; peaks mid-January (southern-hemisphere summer).
struct IndoorSchedule {
    double winter_C = 20.0;
    double summer_C = 25.0;
    int peak_day = 14;  // 0-based day of year of the summer peak

    double at(double t_seconds, const CalendarDate& start) const;  // kelvin
};

struct LoadTotals {
    double heating_MJ = 0.0;  // energy leaving the room through this face
    double cooling_MJ = 0.0;  // energy entering the room through this face
    double total() const { return heating_MJ + cooling_MJ; }
    double net() const { return cooling_MJ - heating_MJ; }
};

// Inner-surface heat flux history plus its integrals.  The flux convention is
// positive INTO the room, so heating demand integrates the negative part and
// cooling demand the positive part.
struct LoadReport {
    std::vector<double> time_s;
    std::vector<double> flux_Wm2;
    std::vector<LoadTotals> daily;
    std::vector<LoadTotals> monthly;
    LoadTotals annual;
};

struct SolverSettings {
    Scheme scheme = Scheme::Qunt;
    int nx = 41;
    double dt_hours = 0.1;  // dimensionless step; the time scale is one hour
    MonitorConfig monitor{.alpha1 = 0.8, .beta1 = 2.0, .alpha2 = 0.2, .beta2 = 3.0,
                          .beta_mesh = 50.0, .sigma = 5.0};
    CnOptions cn{};

    void validate() const;
};

// Assembles the SI problem: indoor Robin film at x = 0, outdoor film with
// solar (and long-wave for the roof) at x = l, and a steady-linear initial
// profile between the two ambient temperatures at t = 0.
PhysicalProblem make_envelope_problem(const WallAssembly& wall, const ClimateSeries& climate,
                                      const IndoorSchedule& indoor);

// Splits a piecewise-linear flux history at calendar-day boundaries and
// integrates the sign-clipped samples with the trapezoidal rule into daily,
// monthly and annual heating/cooling totals (MJ/m^2).
LoadReport transmission_loads(const std::vector<double>& time_s,
                              const std::vector<double>& flux_Wm2, const CalendarDate& start);

// Marches the assembly through `hours` of the climate record (default: the
// whole record) recording the inner-surface flux every step.
LoadReport simulate_year(const WallAssembly& wall, const ClimateSeries& climate,
                         const IndoorSchedule& indoor, const SolverSettings& settings = {},
                         double hours = -1.0);

struct SweepRow {
    double thickness_m = 0.0;
    LoadTotals annual;
    bool failed = false;
    std::string error;
};

// Yearly simulation per candidate insulation thickness.  `build` maps a
// thickness to the assembly to simulate.  Rows run concurrently up to
// `workers`; row order and values do not depend on the worker count.
std::vector<SweepRow> sweep_thickness(const std::function<WallAssembly(double)>& build,
                                      const std::vector<double>& thicknesses,
                                      const ClimateSeries& climate, const IndoorSchedule& indoor,
                                      const SolverSettings& settings = {}, int workers = 1);

}  // namespace quntherm
