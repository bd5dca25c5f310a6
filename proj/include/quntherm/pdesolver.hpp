#pragma once

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "quntherm/gridmotion.hpp"
#include "quntherm/tridiag.hpp"

namespace quntherm {

inline constexpr double kStefanBoltzmann = 5.670374419e-8;  // W/(m^2 K^4)

// Characteristic scales tying the dimensionless problem
//     c* du/dt* = Fo d/dx*( k* du/dx* ),   x* in [0,1]
// to SI quantities: u = T/T0, x* = x/l, t* = t/t0, k* = k/k0, c* = rho*cp/c0.
struct ReferenceScales {
    double T0 = 293.15;  // K
    double t0 = 3600.0;  // s
    double l = 1.0;      // m
    double k0 = 1.0;     // W/(m K)
    double c0 = 1.0;     // J/(m^3 K)

    double fourier() const { return t0 * k0 / (l * l * c0); }
    double biot(double h) const { return h * l / k0; }
    double flux_scale() const { return T0 * k0 / l; }  // W/m^2 per unit q*
    double longwave(double emissivity) const {
        return emissivity * kStefanBoltzmann * l * T0 * T0 * T0 / k0;
    }
    void validate() const;  // throws std::invalid_argument
};

double nondim_temperature(double T_kelvin, const ReferenceScales& s);
double temperature_to_kelvin(double u, const ReferenceScales& s);
std::vector<double> temperatures_to_kelvin(std::span<const double> u, const ReferenceScales& s);
double flux_to_si(double q_star, const ReferenceScales& s);
double seconds_to_nondim(double t_seconds, const ReferenceScales& s);
double time_to_seconds(double t_star, const ReferenceScales& s);

enum class BcKind { Dirichlet, Robin, RobinRadiative };
enum class Side { Left, Right };

// One boundary of the dimensionless problem.  All signals are functions of
// dimensionless time.  Conventions (inward heat flux positive):
//   Dirichlet:       u = ambient(t*)
//   Robin, left:     k* du/dx*|_0 = Bi (u - ambient) - absorbed + rlw (u^4 - sky^4)
//   Robin, right:   -k* du/dx*|_1 = Bi (u - ambient) - absorbed + rlw (u^4 - sky^4)
// `absorbed` is the already-absorptivity-weighted short-wave load; rlw is the
// dimensionless long-wave coefficient.  Robin uses only {ambient, biot}.
struct BoundarySpec {
    BcKind kind = BcKind::Dirichlet;
    std::function<double(double)> ambient;
    double biot = 0.0;
    std::function<double(double)> absorbed_flux;  // may be empty (treated as 0)
    double rlw = 0.0;
    std::function<double(double)> sky;  // required when rlw != 0

    static BoundarySpec dirichlet(std::function<double(double)> value);
    static BoundarySpec robin(std::function<double(double)> ambient, double biot);
    static BoundarySpec robin_radiative(std::function<double(double)> ambient, double biot,
                                        std::function<double(double)> absorbed, double rlw,
                                        std::function<double(double)> sky);
    void validate(const char* side) const;
};

// Nonlinear 1D conduction problem on x* in [0,1].  Material breaks listed in
// `interfaces` switch the half-interval conductivity from an arithmetic mean
// of the nodal values to a series (flux-continuous) composition.
struct DimensionlessProblem {
    std::function<double(double u, double x)> cstar;
    std::function<double(double u, double x)> kstar;
    double fo = 1.0;
    BoundarySpec left, right;
    std::function<double(double x)> initial;
    std::vector<double> interfaces;            // strictly inside (0,1), sorted
    std::array<double, 2> u_range{0.5, 1.5};   // sampling range for validation

    // Samples c* and k* over u_range x [0,1] and checks positivity; verifies
    // boundary specs and interface ordering.  Throws std::invalid_argument.
    void validate() const;
};

// Nodal temperatures on a (possibly moving) mesh at dimensionless time t.
struct FieldState {
    std::vector<double> u;
    MovingMesh mesh;
    double t = 0.0;
};

FieldState make_initial_state(const DimensionlessProblem& p, MovingMesh mesh);

// Implicit-in-diffusion step on a uniform grid with all coefficients frozen
// at the old time level.  First order in dt, second order in dx.
FieldState step_imex_uniform(const FieldState& state, const DimensionlessProblem& p, double dt);

struct QuntStepOptions {
    // Evaluate the metric terms of the diffusion flux on the freshly advanced
    // mesh instead of the old one.  Off by default.
    bool jacobian_at_new_time = false;
};

// Moving-grid step: evaluates and smooths the monitor on the current state,
// advances the mesh implicitly, then advances the field on the reference grid
// with the mesh-speed convection term folded into the implicit matrix.
// Coefficients and metric terms are frozen at the old level; boundary rows
// use second-order one-sided derivatives on the new node positions.
// If displacement_ratio_out is given it receives max_j |x_j^new - x_j^old|
// divided by the local interval width; values above 1 mean the mesh outran
// its own spacing and the convection term may destabilise the field step.
FieldState step_qunt(const FieldState& state, const DimensionlessProblem& p,
                     const MonitorConfig& cfg, double dt, const QuntStepOptions& opts = {},
                     double* displacement_ratio_out = nullptr);

struct CnOptions {
    double fp_tol = 1e-9;  // max-norm change between successive solves, relative to max|u|
    int fp_max_iter = 50;
};

// Crank-Nicolson step on a uniform grid.  The nonlinearity is resolved by
// fixed-point iteration: conductivities on the implicit side and the
// radiative boundary term are rebuilt from the latest iterate until two
// successive solves agree.  `fp_iters_out` (optional) receives the number of
// correction passes; a linear problem converges in exactly one.
FieldState step_crank_nicolson(const FieldState& state, const DimensionlessProblem& p, double dt,
                               const CnOptions& opts = {}, int* fp_iters_out = nullptr);

// Dimensionless boundary heat flux q* = -k* du/dx* evaluated with a
// second-order one-sided three-point derivative (exact for quadratics on any
// node spacing).  Same sign convention at both sides.
double boundary_flux(const FieldState& state, const DimensionlessProblem& p, Side side);

// --- physical layer description (SI) -------------------------------------

struct PhysicalLayer {
    double thickness;  // m
    double rho;        // kg/m^3
    double cp;         // J/(kg K)
    double k;          // W/(m K)
};

struct PhysicalBoundary {
    BcKind kind = BcKind::Robin;
    std::function<double(double)> ambient_kelvin;  // of time in seconds
    double h = 0.0;                                // W/(m^2 K)
    std::function<double(double)> absorbed_solar;  // W/m^2, absorptivity-weighted
    double emissivity = 0.0;
    std::function<double(double)> sky_kelvin;      // of time in seconds
};

struct PhysicalProblem {
    std::vector<PhysicalLayer> layers;  // left to right
    PhysicalBoundary left, right;
    std::function<double(double)> initial_kelvin;  // of position in meters
};

// T0 = 293.15 K, t0 = 3600 s, l = total thickness, k0/c0 from the first layer.
ReferenceScales default_scales(const PhysicalProblem& phys);

DimensionlessProblem nondimensionalize(const PhysicalProblem& phys, const ReferenceScales& s);

// Half-interval conductivities used by every scheme; exposed for tests.
std::vector<double> half_conductivity(const DimensionlessProblem& p, const MovingMesh& mesh,
                                      std::span<const double> u);

}  // namespace quntherm
