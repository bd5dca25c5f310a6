#include "quntherm/pdesolver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <numeric>
#include <stdexcept>
#include <string>

namespace quntherm {

namespace {

void require(bool ok, const std::string& msg) {
    if (!ok) throw std::invalid_argument(msg);
}

double pow4(double v) {
    const double v2 = v * v;
    return v2 * v2;
}

// Second-order one-sided derivative stencils on arbitrary node spacing:
// du/dx at the boundary node as a*u_b + b*u_b' + c*u_b'' where u_b', u_b''
// are the first and second neighbours toward the interior.
struct DerivStencil {
    double a, b, c;
};

DerivStencil left_derivative(const std::vector<double>& x) {
    const double d1 = x[1] - x[0];
    const double d2 = x[2] - x[1];
    return {-(2.0 * d1 + d2) / (d1 * (d1 + d2)), (d1 + d2) / (d1 * d2),
            -d1 / (d2 * (d1 + d2))};
}

DerivStencil right_derivative(const std::vector<double>& x) {
    const std::size_t n = x.size() - 1;
    const double e1 = x[n] - x[n - 1];
    const double e2 = x[n - 1] - x[n - 2];
    return {(2.0 * e1 + e2) / (e1 * (e1 + e2)), -(e1 + e2) / (e1 * e2),
            e1 / (e2 * (e1 + e2))};
}

// Boundary row of the implicit system: diag couples the boundary node,
// `inner` its first neighbour, `extra` the second neighbour (eliminated
// against the adjacent interior row before the tridiagonal solve).
struct BoundaryRow {
    double diag = 1.0, inner = 0.0, extra = 0.0, rhs = 0.0;
};

// Assembles the boundary condition at evaluation time t_eval with the
// conductivity and the explicit radiative temperature frozen at the caller's
// chosen state (old level for the one-step schemes, latest iterate for CN).
BoundaryRow boundary_row(const BoundarySpec& bc, Side side, const std::vector<double>& x,
                         double k_boundary, double t_eval, double u_rad) {
    BoundaryRow row;
    if (bc.kind == BcKind::Dirichlet) {
        row.diag = 1.0;
        row.rhs = bc.ambient(t_eval);
        return row;
    }
    const double amb = bc.ambient(t_eval);
    const double absorbed = bc.absorbed_flux ? bc.absorbed_flux(t_eval) : 0.0;
    const double rad = bc.rlw != 0.0 ? bc.rlw * (pow4(u_rad) - pow4(bc.sky(t_eval))) : 0.0;
    // inward_flux = Bi (amb - u) + absorbed - rlw (u^4 - sky^4), with
    // inward_flux = +k du/dx at the left face and -k du/dx at the right.
    if (side == Side::Left) {
        const DerivStencil s = left_derivative(x);
        row.diag = k_boundary * s.a - bc.biot;
        row.inner = k_boundary * s.b;
        row.extra = k_boundary * s.c;
    } else {
        const DerivStencil s = right_derivative(x);
        row.diag = -k_boundary * s.a - bc.biot;
        row.inner = -k_boundary * s.b;
        row.extra = -k_boundary * s.c;
    }
    row.rhs = -bc.biot * amb - absorbed + rad;
    return row;
}

void apply_boundary_rows(TridiagonalSystem& sys, const BoundaryRow& left,
                         const BoundaryRow& right) {
    const std::size_t n = sys.size();
    sys.diag[0] = left.diag;
    sys.upper[0] = left.inner;
    sys.rhs[0] = left.rhs;
    if (left.extra != 0.0) {
        const double f = left.extra / sys.upper[1];
        sys.diag[0] -= f * sys.lower[1];
        sys.upper[0] -= f * sys.diag[1];
        sys.rhs[0] -= f * sys.rhs[1];
    }
    sys.diag[n - 1] = right.diag;
    sys.lower[n - 1] = right.inner;
    sys.rhs[n - 1] = right.rhs;
    if (right.extra != 0.0) {
        const double f = right.extra / sys.lower[n - 2];
        sys.lower[n - 1] -= f * sys.diag[n - 2];
        sys.diag[n - 1] -= f * sys.upper[n - 2];
        sys.rhs[n - 1] -= f * sys.rhs[n - 2];
    }
}

double eval_c(const DimensionlessProblem& p, double u, double x) {
    const double c = p.cstar(u, x);
    if (!(std::isfinite(c) && c > 0.0))
        throw SolverError("storage coefficient c* is not positive at x=" + std::to_string(x));
    return c;
}

double eval_k(const DimensionlessProblem& p, double u, double x) {
    const double k = p.kstar(u, x);
    if (!(std::isfinite(k) && k > 0.0))
        throw SolverError("conductivity k* is not positive at x=" + std::to_string(x));
    return k;
}

std::atomic<int> mesh_speed_warnings{0};

}  // namespace

void ReferenceScales::validate() const {
    require(std::isfinite(T0) && T0 > 0.0, "ReferenceScales: T0 must be > 0");
    require(std::isfinite(t0) && t0 > 0.0, "ReferenceScales: t0 must be > 0");
    require(std::isfinite(l) && l > 0.0, "ReferenceScales: l must be > 0");
    require(std::isfinite(k0) && k0 > 0.0, "ReferenceScales: k0 must be > 0");
    require(std::isfinite(c0) && c0 > 0.0, "ReferenceScales: c0 must be > 0");
}

double nondim_temperature(double T_kelvin, const ReferenceScales& s) { return T_kelvin / s.T0; }
double temperature_to_kelvin(double u, const ReferenceScales& s) { return u * s.T0; }

std::vector<double> temperatures_to_kelvin(std::span<const double> u, const ReferenceScales& s) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) out[i] = u[i] * s.T0;
    return out;
}

double flux_to_si(double q_star, const ReferenceScales& s) { return q_star * s.flux_scale(); }
double seconds_to_nondim(double t_seconds, const ReferenceScales& s) { return t_seconds / s.t0; }
double time_to_seconds(double t_star, const ReferenceScales& s) { return t_star * s.t0; }

BoundarySpec BoundarySpec::dirichlet(std::function<double(double)> value) {
    BoundarySpec bc;
    bc.kind = BcKind::Dirichlet;
    bc.ambient = std::move(value);
    return bc;
}

BoundarySpec BoundarySpec::robin(std::function<double(double)> ambient, double biot) {
    BoundarySpec bc;
    bc.kind = BcKind::Robin;
    bc.ambient = std::move(ambient);
    bc.biot = biot;
    return bc;
}

BoundarySpec BoundarySpec::robin_radiative(std::function<double(double)> ambient, double biot,
                                           std::function<double(double)> absorbed, double rlw,
                                           std::function<double(double)> sky) {
    BoundarySpec bc;
    bc.kind = BcKind::RobinRadiative;
    bc.ambient = std::move(ambient);
    bc.biot = biot;
    bc.absorbed_flux = std::move(absorbed);
    bc.rlw = rlw;
    bc.sky = std::move(sky);
    return bc;
}

void BoundarySpec::validate(const char* side) const {
    const std::string where = std::string("BoundarySpec(") + side + "): ";
    require(static_cast<bool>(ambient), where + "ambient signal is required");
    if (kind == BcKind::Dirichlet) return;
    require(std::isfinite(biot) && biot >= 0.0, where + "biot must be >= 0");
    if (kind == BcKind::Robin) {
        require(rlw == 0.0 && !absorbed_flux, where + "Robin carries no radiative terms; "
                                                      "use RobinRadiative");
        return;
    }
    require(std::isfinite(rlw) && rlw >= 0.0, where + "rlw must be >= 0");
    if (rlw > 0.0) require(static_cast<bool>(sky), where + "sky signal required when rlw > 0");
}

void DimensionlessProblem::validate() const {
    require(static_cast<bool>(cstar), "DimensionlessProblem: cstar is required");
    require(static_cast<bool>(kstar), "DimensionlessProblem: kstar is required");
    require(static_cast<bool>(initial), "DimensionlessProblem: initial profile is required");
    require(std::isfinite(fo) && fo > 0.0, "DimensionlessProblem: fo must be > 0");
    require(u_range[0] < u_range[1] && std::isfinite(u_range[0]) && std::isfinite(u_range[1]),
            "DimensionlessProblem: u_range must be an ordered finite pair");
    left.validate("left");
    right.validate("right");
    double prev = 0.0;
    for (double b : interfaces) {
        require(std::isfinite(b) && b > prev && b < 1.0,
                "DimensionlessProblem: interfaces must be sorted strictly inside (0,1)");
        prev = b;
    }
    for (int i = 0; i <= 8; ++i) {
        const double u = u_range[0] + (u_range[1] - u_range[0]) * i / 8.0;
        for (int j = 0; j <= 16; ++j) {
            const double x = static_cast<double>(j) / 16.0;
            const double c = cstar(u, x);
            const double k = kstar(u, x);
            require(std::isfinite(c) && c > 0.0,
                    "DimensionlessProblem: cstar must stay positive over the operating range");
            require(std::isfinite(k) && k > 0.0,
                    "DimensionlessProblem: kstar must stay positive over the operating range");
        }
    }
}

FieldState make_initial_state(const DimensionlessProblem& p, MovingMesh mesh) {
    require(static_cast<bool>(p.initial), "make_initial_state: initial profile is required");
    std::vector<double> u(static_cast<std::size_t>(mesh.node_count()));
    for (int j = 0; j < mesh.node_count(); ++j) u[static_cast<std::size_t>(j)] = p.initial(mesh.node(j));
    return FieldState{std::move(u), std::move(mesh), 0.0};
}

std::vector<double> half_conductivity(const DimensionlessProblem& p, const MovingMesh& mesh,
                                      std::span<const double> u) {
    const int n = mesh.intervals();
    const auto& x = mesh.nodes();
    std::vector<double> kh(static_cast<std::size_t>(n));

    if (p.interfaces.empty()) {
        // Single material: arithmetic mean of the nodal conductivities.
        double k_prev = eval_k(p, u[0], x[0]);
        for (int j = 0; j < n; ++j) {
            const std::size_t i = static_cast<std::size_t>(j);
            const double k_next = eval_k(p, u[i + 1], x[i + 1]);
            kh[i] = 0.5 * (k_prev + k_next);
            k_prev = k_next;
        }
        return kh;
    }

    for (int j = 0; j < n; ++j) {
        const std::size_t i = static_cast<std::size_t>(j);
        const double xl = x[i], xr = x[i + 1];
        auto first = std::upper_bound(p.interfaces.begin(), p.interfaces.end(), xl);
        auto last = std::lower_bound(first, p.interfaces.end(), xr);
        if (first == last) {
            // Interval inside one material; evaluate both nodal values with
            // the membership decided by the interval midpoint.
            const double xm = 0.5 * (xl + xr);
            kh[i] = 0.5 * (eval_k(p, u[i], xm) + eval_k(p, u[i + 1], xm));
        } else {
            // Interval straddles material breaks: series composition keeps
            // the flux continuous across the discontinuity.
            double resistance = 0.0;
            double a = xl;
            auto segment = [&](double b) {
                const double xm = 0.5 * (a + b);
                const double um = u[i] + (u[i + 1] - u[i]) * (xm - xl) / (xr - xl);
                resistance += (b - a) / eval_k(p, um, xm);
                a = b;
            };
            for (auto it = first; it != last; ++it) segment(*it);
            segment(xr);
            kh[i] = (xr - xl) / resistance;
        }
    }
    return kh;
}

FieldState step_imex_uniform(const FieldState& state, const DimensionlessProblem& p, double dt) {
    require(std::isfinite(dt) && dt > 0.0, "step_imex_uniform: dt must be > 0");
    if (!state.mesh.is_uniform())
        throw std::invalid_argument("step_imex_uniform: mesh must be uniform");
    const int n = state.mesh.intervals();
    const auto& x = state.mesh.nodes();
    const double dx = state.mesh.length() / n;
    const double t_new = state.t + dt;
    const double r = p.fo / (dx * dx);

    const std::vector<double> kh = half_conductivity(p, state.mesh, state.u);
    TridiagonalSystem sys(static_cast<std::size_t>(n) + 1);
    for (int j = 1; j < n; ++j) {
        const std::size_t i = static_cast<std::size_t>(j);
        const double c = eval_c(p, state.u[i], x[i]);
        sys.lower[i] = -r * kh[i - 1];
        sys.upper[i] = -r * kh[i];
        sys.diag[i] = c / dt + r * (kh[i - 1] + kh[i]);
        sys.rhs[i] = c / dt * state.u[i];
    }
    assert_interior_dominance(sys, 1, static_cast<std::size_t>(n), "step_imex_uniform");

    const double kl = eval_k(p, state.u.front(), x.front());
    const double kr = eval_k(p, state.u.back(), x.back());
    apply_boundary_rows(sys, boundary_row(p.left, Side::Left, x, kl, t_new, state.u.front()),
                        boundary_row(p.right, Side::Right, x, kr, t_new, state.u.back()));

    return FieldState{solve_tridiagonal(std::move(sys)), state.mesh, t_new};
}

FieldState step_qunt(const FieldState& state, const DimensionlessProblem& p,
                     const MonitorConfig& cfg, double dt, const QuntStepOptions& opts,
                     double* displacement_ratio_out) {
    require(std::isfinite(dt) && dt > 0.0, "step_qunt: dt must be > 0");
    const int n = state.mesh.intervals();
    const double h = state.mesh.reference_spacing();
    const double t_new = state.t + dt;

    const MonitorSamples w = smooth_monitor(evaluate_monitor(state.u, state.mesh, cfg), cfg.sigma);
    MovingMesh new_mesh = advance_mesh(state.mesh, w, dt, cfg.beta_mesh);

    const auto& x_old = state.mesh.nodes();
    const auto& x_new = new_mesh.nodes();

    // Warn (once per process, with a short grace) when the mesh outruns its
    // own spacing; the advection term can then destabilise the field step.
    double max_ratio = 0.0;
    for (int j = 1; j < n; ++j) {
        const std::size_t i = static_cast<std::size_t>(j);
        const double width =
            0.5 * (x_old[i + 1] - x_old[i - 1]);
        max_ratio = std::max(max_ratio, std::abs(x_new[i] - x_old[i]) / width);
    }
    if (displacement_ratio_out) *displacement_ratio_out = max_ratio;
    if (max_ratio > 1.0 && mesh_speed_warnings.fetch_add(1) < 3) {
        std::cerr << "step_qunt: node displacement exceeded the local interval width ("
                  << max_ratio << "x); consider a larger beta_mesh or smaller dt\n";
    }

    const MovingMesh& metric_mesh = opts.jacobian_at_new_time ? new_mesh : state.mesh;
    const std::vector<double> jac_half = metric_mesh.interval_jacobian();
    const std::vector<double> jac_node = metric_mesh.node_jacobian();
    const std::vector<double> kh = half_conductivity(p, state.mesh, state.u);

    TridiagonalSystem sys(static_cast<std::size_t>(n) + 1);
    const double inv_h2 = 1.0 / (h * h);
    for (int j = 1; j < n; ++j) {
        const std::size_t i = static_cast<std::size_t>(j);
        const double c = eval_c(p, state.u[i], x_old[i]);
        const double difl = p.fo * kh[i - 1] / jac_half[i - 1] * inv_h2;
        const double difr = p.fo * kh[i] / jac_half[i] * inv_h2;
        const double adv = c * ((x_new[i] - x_old[i]) / dt) / (2.0 * h);
        sys.lower[i] = -difl + adv;
        sys.upper[i] = -difr - adv;
        sys.diag[i] = jac_node[i] * c / dt + difl + difr;
        sys.rhs[i] = jac_node[i] * c / dt * state.u[i];
    }
    assert_interior_dominance(sys, 1, static_cast<std::size_t>(n), "step_qunt");

    // Boundary rows live on the new node positions (the unknowns are nodal
    // values at t_new); conductivity stays frozen at the old level.
    const double kl = eval_k(p, state.u.front(), x_old.front());
    const double kr = eval_k(p, state.u.back(), x_old.back());
    apply_boundary_rows(sys, boundary_row(p.left, Side::Left, x_new, kl, t_new, state.u.front()),
                        boundary_row(p.right, Side::Right, x_new, kr, t_new, state.u.back()));

    return FieldState{solve_tridiagonal(std::move(sys)), std::move(new_mesh), t_new};
}

FieldState step_crank_nicolson(const FieldState& state, const DimensionlessProblem& p, double dt,
                               const CnOptions& opts, int* fp_iters_out) {
    require(std::isfinite(dt) && dt > 0.0, "step_crank_nicolson: dt must be > 0");
    require(opts.fp_max_iter >= 1, "step_crank_nicolson: fp_max_iter must be >= 1");
    require(std::isfinite(opts.fp_tol) && opts.fp_tol > 0.0,
            "step_crank_nicolson: fp_tol must be > 0");
    if (!state.mesh.is_uniform())
        throw std::invalid_argument("step_crank_nicolson: mesh must be uniform");

    const int n = state.mesh.intervals();
    const auto& x = state.mesh.nodes();
    const double dx = state.mesh.length() / n;
    const double t_new = state.t + dt;
    const double r = 0.5 * p.fo / (dx * dx);  // half weight on each time level

    const std::vector<double> kh_old = half_conductivity(p, state.mesh, state.u);
    std::vector<double> expl(static_cast<std::size_t>(n) + 1, 0.0);
    for (int j = 1; j < n; ++j) {
        const std::size_t i = static_cast<std::size_t>(j);
        expl[i] = r * (kh_old[i] * (state.u[i + 1] - state.u[i]) -
                       kh_old[i - 1] * (state.u[i] - state.u[i - 1]));
    }

    auto solve_with = [&](const std::vector<double>& guess) {
        const std::vector<double> kh =
            (&guess == &state.u) ? kh_old : half_conductivity(p, state.mesh, guess);
        TridiagonalSystem sys(static_cast<std::size_t>(n) + 1);
        for (int j = 1; j < n; ++j) {
            const std::size_t i = static_cast<std::size_t>(j);
            const double c = eval_c(p, 0.5 * (state.u[i] + guess[i]), x[i]);
            sys.lower[i] = -r * kh[i - 1];
            sys.upper[i] = -r * kh[i];
            sys.diag[i] = c / dt + r * (kh[i - 1] + kh[i]);
            sys.rhs[i] = c / dt * state.u[i] + expl[i];
        }
        assert_interior_dominance(sys, 1, static_cast<std::size_t>(n), "step_crank_nicolson");
        const double kl = eval_k(p, guess.front(), x.front());
        const double kr = eval_k(p, guess.back(), x.back());
        apply_boundary_rows(sys,
                            boundary_row(p.left, Side::Left, x, kl, t_new, guess.front()),
                            boundary_row(p.right, Side::Right, x, kr, t_new, guess.back()));
        return solve_tridiagonal(std::move(sys));
    };

    std::vector<double> iterate = solve_with(state.u);  // predictor
    for (int it = 1; it <= opts.fp_max_iter; ++it) {
        std::vector<double> next = solve_with(iterate);
        double scale = 1.0, change = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i) {
            scale = std::max(scale, std::abs(next[i]));
            change = std::max(change, std::abs(next[i] - iterate[i]));
        }
        if (change <= opts.fp_tol * scale) {
            if (fp_iters_out) *fp_iters_out = it;
            return FieldState{std::move(next), state.mesh, t_new};
        }
        iterate = std::move(next);
    }
    throw SolverError("step_crank_nicolson: fixed-point iteration did not converge in " +
                      std::to_string(opts.fp_max_iter) + " passes");
}

double boundary_flux(const FieldState& state, const DimensionlessProblem& p, Side side) {
    const auto& x = state.mesh.nodes();
    const auto& u = state.u;
    const std::size_t n = x.size() - 1;
    double du;
    double k;
    if (side == Side::Left) {
        const DerivStencil s = left_derivative(x);
        du = s.a * u[0] + s.b * u[1] + s.c * u[2];
        k = eval_k(p, u[0], x[0]);
    } else {
        const DerivStencil s = right_derivative(x);
        du = s.a * u[n] + s.b * u[n - 1] + s.c * u[n - 2];
        k = eval_k(p, u[n], x[n]);
    }
    return -k * du;
}

ReferenceScales default_scales(const PhysicalProblem& phys) {
    require(!phys.layers.empty(), "default_scales: at least one layer required");
    ReferenceScales s;
    s.T0 = 293.15;
    s.t0 = 3600.0;
    s.l = 0.0;
    for (const auto& layer : phys.layers) s.l += layer.thickness;
    s.k0 = phys.layers.front().k;
    s.c0 = phys.layers.front().rho * phys.layers.front().cp;
    s.validate();
    return s;
}

DimensionlessProblem nondimensionalize(const PhysicalProblem& phys, const ReferenceScales& s) {
    s.validate();
    require(!phys.layers.empty(), "nondimensionalize: at least one layer required");
    for (const auto& layer : phys.layers) {
        require(std::isfinite(layer.thickness) && layer.thickness > 0.0,
                "nondimensionalize: layer thickness must be > 0");
        require(layer.rho > 0.0 && layer.cp > 0.0 && layer.k > 0.0,
                "nondimensionalize: layer properties must be > 0");
    }
    require(static_cast<bool>(phys.initial_kelvin),
            "nondimensionalize: initial temperature profile is required");

    // Dimensionless break positions and per-layer property tables.
    std::vector<double> breaks;
    std::vector<double> kvals, cvals;
    double pos = 0.0;
    for (const auto& layer : phys.layers) {
        pos += layer.thickness;
        breaks.push_back(pos / s.l);
        kvals.push_back(layer.k / s.k0);
        cvals.push_back(layer.rho * layer.cp / s.c0);
    }
    require(std::abs(breaks.back() - 1.0) < 1e-9,
            "nondimensionalize: scales.l must equal the total layer thickness");
    breaks.pop_back();  // interior interfaces only

    auto layer_at = [breaks](double x) {
        return static_cast<std::size_t>(
            std::upper_bound(breaks.begin(), breaks.end(), x) - breaks.begin());
    };

    DimensionlessProblem p;
    p.kstar = [kvals, layer_at](double, double x) { return kvals[layer_at(x)]; };
    p.cstar = [cvals, layer_at](double, double x) { return cvals[layer_at(x)]; };
    p.fo = s.fourier();
    p.interfaces = breaks;
    p.initial = [init = phys.initial_kelvin, s](double x) { return init(x * s.l) / s.T0; };

    auto map_boundary = [&s](const PhysicalBoundary& b, const char* side) {
        require(static_cast<bool>(b.ambient_kelvin),
                std::string("nondimensionalize: ambient signal required on ") + side);
        auto ambient = [f = b.ambient_kelvin, s](double t) { return f(t * s.t0) / s.T0; };
        if (b.kind == BcKind::Dirichlet) return BoundarySpec::dirichlet(ambient);
        require(std::isfinite(b.h) && b.h >= 0.0,
                std::string("nondimensionalize: h must be >= 0 on ") + side);
        if (b.kind == BcKind::Robin) return BoundarySpec::robin(ambient, s.biot(b.h));
        require(b.emissivity >= 0.0 && b.emissivity <= 1.0,
                std::string("nondimensionalize: emissivity must lie in [0,1] on ") + side);
        std::function<double(double)> absorbed;
        if (b.absorbed_solar)
            absorbed = [f = b.absorbed_solar, s](double t) {
                return f(t * s.t0) * s.l / (s.T0 * s.k0);
            };
        std::function<double(double)> sky;
        if (b.sky_kelvin) sky = [f = b.sky_kelvin, s](double t) { return f(t * s.t0) / s.T0; };
        return BoundarySpec::robin_radiative(ambient, s.biot(b.h), absorbed,
                                             s.longwave(b.emissivity), sky);
    };
    p.left = map_boundary(phys.left, "left");
    p.right = map_boundary(phys.right, "right");

    // Envelope temperatures stay well inside this band.
    p.u_range = {220.0 / s.T0, 340.0 / s.T0};
    p.validate();
    return p;
}

}  // namespace quntherm
