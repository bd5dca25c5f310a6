#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "quntherm/pdesolver.hpp"

namespace quntherm {

enum class Scheme { Imex, Qunt, CrankNicolson };
const char* scheme_name(Scheme s);

// Nonlinear single-material verification case on x in [0,1]: strongly
// temperature-dependent conductivity and storage with a Gaussian spike at
// u = 1.5, driven by out-of-phase sinusoidal surface temperatures.
struct BenchmarkCase {
    std::function<double(double)> kstar_of_u = [](double u) {
        const double d = u - 1.5;
        return 1.0 + 0.91 * u + 600.0 * std::exp(-10.0 * d * d);
    };
    std::function<double(double)> cstar_of_u = [](double u) {
        const double d = u - 1.5;
        return 900.0 - 656.0 * u + 1.0e4 * std::exp(-5.0 * d * d);
    };
    std::function<double(double)> u_left = [](double t) {
        return 1.0 - 0.5 * std::sin(2.0 * M_PI * t / 12.0);
    };
    std::function<double(double)> u_right = [](double t) {
        return 1.0 + 0.5 * std::sin(2.0 * M_PI * t / 24.0);
    };
    double u_initial = 1.0;
    double tau = 48.0;   // horizon
    int nx = 51;         // node count
    double dt = 5e-3;
    MonitorConfig monitor{};  // defaults match this case

    DimensionlessProblem problem() const;
};

// Output of one marching run: nodal frames and node positions at every save
// time k*save_dt (k = 0 included) plus both boundary flux series.
struct SchemeRun {
    Scheme scheme{};
    int nx = 0;
    double dt = 0.0;
    double save_dt = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> frames;
    std::vector<std::vector<double>> meshes;
    std::vector<double> flux_left, flux_right;
    double seconds = 0.0;
    // Largest per-step node displacement over local interval width (moving
    // grid only).  Above 1 the scheme ran outside its stable operating range.
    double max_mesh_speed_ratio = 0.0;
};

// Marches the case with the chosen scheme.  save_dt must be an integer
// multiple of dt; save_dt == 0 disables all recording (used for timing).
SchemeRun run_scheme(const BenchmarkCase& bench, Scheme scheme, int nx, double dt,
                     double save_dt, double tau_override = -1.0);

// High-resolution Crank-Nicolson solution of the same case.  Frames stay on
// the native uniform grid (stored single-precision for memory) so the
// reference is evaluable at arbitrary positions — in particular at the nodes
// of a moving-mesh run.  Boundary fluxes are full double precision.
struct ReferenceSolution {
    int nx_ref = 0;  // node count of the native grid
    double dt_ref = 0.0;
    double save_dt = 0.0;
    std::vector<std::vector<float>> frames;  // [time][node]
    std::vector<double> flux_left, flux_right;
    double seconds = 0.0;

    std::size_t frame_count() const { return frames.size(); }
    // Piecewise-cubic evaluation of saved frame `frame` at position x.
    double at(std::size_t frame, double x) const;
};

ReferenceSolution reference_solution(const BenchmarkCase& bench, int nx_ref, double dt_ref,
                                     double save_dt);

std::vector<double> uniform_grid(int nx);  // nx nodes spanning [0,1]

// Error metrics against the reference, evaluated at the run's own nodes (for
// a moving mesh: at each saved node position, so no resampling error enters):
//   epsilon[j]: RMS over the saved times t > 0 of the error at node j,
//   eps_inf:    max over nodes,
//   delta[j]:   error profile at one chosen save time,
//   xi:         flux error per side over time, normalized by that side's peak
//               reference flux magnitude; xi_inf the max over the series.
struct ErrorReport {
    std::vector<double> comparison_nodes;  // time-mean node positions
    std::vector<double> epsilon;
    double eps_inf = 0.0;
    std::vector<double> delta;
    double delta_time = 0.0;
    std::vector<double> xi_left, xi_right;
    double xi_inf_left = 0.0, xi_inf_right = 0.0;
    double xi_inf = 0.0;
    double flux_peak_left = 0.0, flux_peak_right = 0.0;  // normalization scales
    double seconds = 0.0;
};

ErrorReport compute_errors(const SchemeRun& num, const ReferenceSolution& ref,
                           double delta_time = -1.0);

// Scheme x resolution x step-size sweep.  Failing cells are recorded with
// their error message instead of aborting the study.  Cells run concurrently
// up to `workers`; results are deterministic regardless of the worker count.
struct StudyCell {
    Scheme scheme{};
    int nx = 0;
    double dt = 0.0;
    double eps_inf = 0.0;
    double xi_inf_left = 0.0, xi_inf_right = 0.0;
    double seconds = 0.0;
    double max_mesh_speed_ratio = 0.0;  // > 1: outside the stable mesh-speed range
    bool failed = false;
    std::string error;
};

struct StudyResult {
    std::vector<StudyCell> cells;
    // Resolution-trend violations (error growing with Nx beyond 1.5x noise).
    std::vector<std::string> trend_notes;
};

StudyResult convergence_study(const BenchmarkCase& bench, const ReferenceSolution& ref,
                              const std::vector<Scheme>& schemes,
                              const std::vector<int>& nx_list, const std::vector<double>& dt_list,
                              int workers = 1);

// Wall-clock comparison.  Every config is first checked for accuracy on the
// case horizon against `accuracy_ref` (gate_ok records eps_inf < gate); the
// timed marches then run serially, one repetition after another, keeping the
// best time.  Ratios are relative to the CrankNicolson entry per horizon.
struct RuntimeConfig {
    Scheme scheme{};
    int nx = 0;
    double dt = 0.0;
};

struct RuntimeRow {
    Scheme scheme{};
    int nx = 0;
    std::string horizon;
    double tau = 0.0;
    double seconds = 0.0;
    double ratio = 1.0;
    double gate_eps_inf = 0.0;
    bool gate_ok = false;
};

struct RuntimeResult {
    std::vector<RuntimeRow> rows;
};

RuntimeResult runtime_comparison(const BenchmarkCase& bench,
                                 const std::vector<RuntimeConfig>& configs,
                                 const std::vector<std::pair<std::string, double>>& horizons,
                                 const ReferenceSolution& accuracy_ref, int repetitions = 1,
                                 double gate = 1e-3);

}  // namespace quntherm
