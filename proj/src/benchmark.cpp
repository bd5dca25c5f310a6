#include "quntherm/benchmark.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iostream>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace quntherm {

namespace {

double now_seconds() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double>(clock::now().time_since_epoch()).count();
}

long long save_stride(double dt, double save_dt) {
    const double ratio = save_dt / dt;
    const long long stride = std::llround(ratio);
    if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9 * ratio)
        throw std::invalid_argument("save_dt must be a positive integer multiple of dt");
    return stride;
}

// Smallest multiple of the reference save grid that is also a multiple of dt,
// so runs with widely different steps can all be compared to one reference.
double study_save_grid(double dt, double ref_save_dt) {
    for (long long m = 1; m <= 1000000; ++m) {
        const double s = ref_save_dt * static_cast<double>(m);
        const double q = s / dt;
        if (std::llround(q) >= 1 && std::abs(q - std::llround(q)) < 1e-9 * q) return s;
    }
    throw std::invalid_argument("convergence_study: dt incompatible with the reference save grid");
}

FieldState march_one(const FieldState& state, const DimensionlessProblem& p, Scheme scheme,
                     const MonitorConfig& monitor, double dt, double* mesh_speed_ratio) {
    switch (scheme) {
        case Scheme::Imex: return step_imex_uniform(state, p, dt);
        case Scheme::Qunt: return step_qunt(state, p, monitor, dt, {}, mesh_speed_ratio);
        case Scheme::CrankNicolson: return step_crank_nicolson(state, p, dt);
    }
    throw std::invalid_argument("unknown scheme");
}

}  // namespace

const char* scheme_name(Scheme s) {
    switch (s) {
        case Scheme::Imex: return "imex";
        case Scheme::Qunt: return "qunt";
        case Scheme::CrankNicolson: return "cn";
    }
    return "?";
}

DimensionlessProblem BenchmarkCase::problem() const {
    DimensionlessProblem p;
    p.kstar = [k = kstar_of_u](double u, double) { return k(u); };
    p.cstar = [c = cstar_of_u](double u, double) { return c(u); };
    p.fo = 1.0;
    p.left = BoundarySpec::dirichlet(u_left);
    p.right = BoundarySpec::dirichlet(u_right);
    p.initial = [v = u_initial](double) { return v; };
    p.u_range = {0.5, 1.5};
    p.validate();
    return p;
}

std::vector<double> uniform_grid(int nx) {
    if (nx < 2) throw std::invalid_argument("uniform_grid: need at least 2 nodes");
    std::vector<double> g(static_cast<std::size_t>(nx));
    for (int j = 0; j < nx; ++j)
        g[static_cast<std::size_t>(j)] = static_cast<double>(j) / (nx - 1);
    g.back() = 1.0;
    return g;
}

SchemeRun run_scheme(const BenchmarkCase& bench, Scheme scheme, int nx, double dt,
                     double save_dt, double tau_override) {
    const double tau = tau_override > 0.0 ? tau_override : bench.tau;
    if (!(dt > 0.0) || !(tau > 0.0))
        throw std::invalid_argument("run_scheme: dt and tau must be > 0");
    const long long steps = std::llround(tau / dt);
    if (std::abs(steps * dt - tau) > 1e-9 * tau)
        throw std::invalid_argument("run_scheme: tau must be an integer multiple of dt");
    const long long stride = save_dt > 0.0 ? save_stride(dt, save_dt) : 0;

    const DimensionlessProblem p = bench.problem();
    SchemeRun run;
    run.scheme = scheme;
    run.nx = nx;
    run.dt = dt;
    run.save_dt = save_dt;

    // nx counts nodes; the mesh factories count intervals.
    MovingMesh mesh = scheme == Scheme::Qunt
                          ? generate_initial_mesh(p.initial, nx - 1, bench.monitor)
                          : MovingMesh::uniform(nx - 1);
    FieldState state = make_initial_state(p, std::move(mesh));
    auto record = [&](long long step) {
        if (stride == 0 || step % stride != 0) return;
        run.times.push_back(static_cast<double>(step / stride) * save_dt);
        run.frames.push_back(state.u);
        run.meshes.push_back(state.mesh.nodes());
        run.flux_left.push_back(boundary_flux(state, p, Side::Left));
        run.flux_right.push_back(boundary_flux(state, p, Side::Right));
    };

    const double t_start = now_seconds();
    record(0);
    for (long long n = 1; n <= steps; ++n) {
        double ratio = 0.0;
        state = march_one(state, p, scheme, bench.monitor, dt, &ratio);
        run.max_mesh_speed_ratio = std::max(run.max_mesh_speed_ratio, ratio);
        state.t = static_cast<double>(n) * dt;  // keep save times exactly aligned
        record(n);
    }
    run.seconds = now_seconds() - t_start;
    return run;
}

double ReferenceSolution::at(std::size_t frame, double x) const {
    const auto& f = frames[frame];
    const std::size_t n = f.size();
    const double dx = 1.0 / static_cast<double>(nx_ref - 1);
    // 4-point Lagrange on the native uniform grid, stencil clamped inward.
    double s = x / dx;
    std::size_t i = static_cast<std::size_t>(std::clamp<double>(
        std::floor(s), 1.0, static_cast<double>(n) - 3.0));
    const double t = s - static_cast<double>(i);
    const double um1 = f[i - 1], u0 = f[i], u1 = f[i + 1], u2 = f[i + 2];
    const double a = t + 1.0, b = t, c = t - 1.0, d = t - 2.0;
    return um1 * (b * c * d) / -6.0 + u0 * (a * c * d) / 2.0 + u1 * (a * b * d) / -2.0 +
           u2 * (a * b * c) / 6.0;
}

ReferenceSolution reference_solution(const BenchmarkCase& bench, int nx_ref, double dt_ref,
                                     double save_dt) {
    if (nx_ref < 21) throw std::invalid_argument("reference_solution: nx_ref too coarse");
    const long long steps = std::llround(bench.tau / dt_ref);
    if (std::abs(steps * dt_ref - bench.tau) > 1e-9 * bench.tau)
        throw std::invalid_argument("reference_solution: tau must be a multiple of dt_ref");
    const long long stride = save_stride(dt_ref, save_dt);

    const DimensionlessProblem p = bench.problem();
    ReferenceSolution ref;
    ref.nx_ref = nx_ref;
    ref.dt_ref = dt_ref;
    ref.save_dt = save_dt;
    ref.frames.reserve(static_cast<std::size_t>(steps / stride) + 1);

    FieldState state = make_initial_state(p, MovingMesh::uniform(nx_ref - 1));
    auto record = [&](long long step) {
        if (step % stride != 0) return;
        ref.frames.emplace_back(state.u.begin(), state.u.end());
        ref.flux_left.push_back(boundary_flux(state, p, Side::Left));
        ref.flux_right.push_back(boundary_flux(state, p, Side::Right));
    };

    const double t_start = now_seconds();
    record(0);
    for (long long n = 1; n <= steps; ++n) {
        state = step_crank_nicolson(state, p, dt_ref);
        state.t = static_cast<double>(n) * dt_ref;
        record(n);
    }
    ref.seconds = now_seconds() - t_start;
    return ref;
}

ErrorReport compute_errors(const SchemeRun& num, const ReferenceSolution& ref,
                           double delta_time) {
    // The run may be saved on a coarser time grid than the reference, as long
    // as every saved time lines up with a reference frame.
    const double ratio = num.save_dt / ref.save_dt;
    const long long r = std::llround(ratio);
    if (r < 1 || std::abs(ratio - static_cast<double>(r)) > 1e-9 * ratio)
        throw std::invalid_argument(
            "compute_errors: run save grid must be an integer multiple of the reference's");
    if ((num.frames.size() - 1) * static_cast<std::size_t>(r) != ref.frame_count() - 1)
        throw std::invalid_argument("compute_errors: saved horizons differ");
    if (num.frames.size() < 2)
        throw std::invalid_argument("compute_errors: need at least one saved step beyond t=0");
    if (ref.nx_ref < 4 * num.nx)
        throw std::invalid_argument(
            "compute_errors: reference must be at least 4x finer than the run under test");

    const std::size_t frames = num.frames.size();
    const std::size_t nt = frames - 1;  // frame 0 is the shared initial state
    const std::size_t nodes = num.frames[0].size();

    ErrorReport rep;
    rep.epsilon.assign(nodes, 0.0);
    rep.comparison_nodes.assign(nodes, 0.0);
    rep.seconds = num.seconds;

    std::size_t delta_frame = frames - 1;
    if (delta_time >= 0.0)
        delta_frame = std::min<std::size_t>(
            frames - 1, static_cast<std::size_t>(std::llround(delta_time / num.save_dt)));
    rep.delta_time = num.times[delta_frame];
    rep.delta.assign(nodes, 0.0);

    // Errors at the run's own (possibly moving) nodes against the cubic-
    // evaluated reference; no resampling of the coarse solution is involved.
    for (std::size_t k = 0; k < frames; ++k) {
        const auto& mesh = num.meshes[k];
        const auto& u = num.frames[k];
        const std::size_t kr = k * static_cast<std::size_t>(r);
        for (std::size_t j = 0; j < nodes; ++j) {
            rep.comparison_nodes[j] += mesh[j];
            const double d = u[j] - ref.at(kr, mesh[j]);
            if (k == delta_frame) rep.delta[j] = std::abs(d);
            if (k > 0) rep.epsilon[j] += d * d;
        }
    }
    for (std::size_t j = 0; j < nodes; ++j) {
        rep.comparison_nodes[j] /= static_cast<double>(frames);
        rep.epsilon[j] = std::sqrt(rep.epsilon[j] / static_cast<double>(nt));
        rep.eps_inf = std::max(rep.eps_inf, rep.epsilon[j]);
    }

    // Flux errors relative to the side's peak reference magnitude, so the
    // metric stays comparable across problems with very different flux scales.
    for (std::size_t k = 0; k < ref.frame_count(); ++k) {
        rep.flux_peak_left = std::max(rep.flux_peak_left, std::abs(ref.flux_left[k]));
        rep.flux_peak_right = std::max(rep.flux_peak_right, std::abs(ref.flux_right[k]));
    }
    const double unit_l = rep.flux_peak_left > 0.0 ? rep.flux_peak_left : 1.0;
    const double unit_r = rep.flux_peak_right > 0.0 ? rep.flux_peak_right : 1.0;
    rep.xi_left.resize(frames);
    rep.xi_right.resize(frames);
    for (std::size_t k = 0; k < frames; ++k) {
        const std::size_t kr = k * static_cast<std::size_t>(r);
        rep.xi_left[k] = std::abs(ref.flux_left[kr] - num.flux_left[k]) / unit_l;
        rep.xi_right[k] = std::abs(ref.flux_right[kr] - num.flux_right[k]) / unit_r;
        rep.xi_inf_left = std::max(rep.xi_inf_left, rep.xi_left[k]);
        rep.xi_inf_right = std::max(rep.xi_inf_right, rep.xi_right[k]);
    }
    rep.xi_inf = std::max(rep.xi_inf_left, rep.xi_inf_right);
    return rep;
}

StudyResult convergence_study(const BenchmarkCase& bench, const ReferenceSolution& ref,
                              const std::vector<Scheme>& schemes, const std::vector<int>& nx_list,
                              const std::vector<double>& dt_list, int workers) {
    if (workers < 1) throw std::invalid_argument("convergence_study: workers must be >= 1");

    StudyResult result;
    for (Scheme s : schemes)
        for (int nx : nx_list)
            for (double dt : dt_list)
            {
                StudyCell cell;
                cell.scheme = s;
                cell.nx = nx;
                cell.dt = dt;
                result.cells.push_back(std::move(cell));
            }

    const int total = static_cast<int>(result.cells.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (int idx = 0; idx < total; ++idx) {
        StudyCell& cell = result.cells[static_cast<std::size_t>(idx)];
        try {
            const double save = study_save_grid(cell.dt, ref.save_dt);
            SchemeRun run = run_scheme(bench, cell.scheme, cell.nx, cell.dt, save);
            ErrorReport rep = compute_errors(run, ref);
            cell.eps_inf = rep.eps_inf;
            cell.xi_inf_left = rep.xi_inf_left;
            cell.xi_inf_right = rep.xi_inf_right;
            cell.seconds = run.seconds;
            cell.max_mesh_speed_ratio = run.max_mesh_speed_ratio;
        } catch (const std::exception& e) {
            cell.failed = true;
            cell.error = e.what();
        }
    }

    // Flag error growth under mesh refinement (beyond 1.5x noise, Nx >= 20).
    for (Scheme s : schemes) {
        for (double dt : dt_list) {
            const StudyCell* prev = nullptr;
            for (int nx : nx_list) {
                auto it = std::find_if(result.cells.begin(), result.cells.end(),
                                       [&](const StudyCell& c) {
                                           return c.scheme == s && c.nx == nx && c.dt == dt &&
                                                  !c.failed;
                                       });
                if (it == result.cells.end()) continue;
                if (prev && prev->nx >= 20 && it->eps_inf > 1.5 * prev->eps_inf) {
                    std::ostringstream os;
                    os << scheme_name(s) << " dt=" << dt << ": eps_inf rose " << prev->eps_inf
                       << " -> " << it->eps_inf << " going Nx " << prev->nx << " -> " << it->nx;
                    result.trend_notes.push_back(os.str());
                }
                prev = &*it;
            }
        }
    }
    return result;
}

RuntimeResult runtime_comparison(const BenchmarkCase& bench,
                                 const std::vector<RuntimeConfig>& configs,
                                 const std::vector<std::pair<std::string, double>>& horizons,
                                 const ReferenceSolution& accuracy_ref, int repetitions,
                                 double gate) {
    if (repetitions < 1) throw std::invalid_argument("runtime_comparison: repetitions >= 1");
    RuntimeResult result;

    // Accuracy gate on the case horizon.
    std::vector<double> gate_eps(configs.size());
    std::vector<bool> gate_ok(configs.size());
    for (std::size_t i = 0; i < configs.size(); ++i) {
        const double save = study_save_grid(configs[i].dt, accuracy_ref.save_dt);
        SchemeRun run = run_scheme(bench, configs[i].scheme, configs[i].nx, configs[i].dt, save);
        gate_eps[i] = compute_errors(run, accuracy_ref).eps_inf;
        gate_ok[i] = gate_eps[i] < gate;
        if (!gate_ok[i])
            std::cerr << "runtime_comparison: " << scheme_name(configs[i].scheme) << "/Nx="
                      << configs[i].nx << " missed the accuracy gate (eps_inf=" << gate_eps[i]
                      << ")\n";
    }

    for (const auto& [label, tau] : horizons) {
        std::vector<RuntimeRow> rows;
        for (std::size_t i = 0; i < configs.size(); ++i) {
            double best = 0.0;
            for (int rep = 0; rep < repetitions; ++rep) {
                SchemeRun run =
                    run_scheme(bench, configs[i].scheme, configs[i].nx, configs[i].dt, 0.0, tau);
                if (rep == 0 || run.seconds < best) best = run.seconds;
            }
            rows.push_back(RuntimeRow{configs[i].scheme, configs[i].nx, label, tau, best, 1.0,
                                      gate_eps[i], gate_ok[i]});
        }
        double cn_seconds = rows.front().seconds;
        for (const auto& row : rows)
            if (row.scheme == Scheme::CrankNicolson) cn_seconds = row.seconds;
        for (auto& row : rows) row.ratio = row.seconds / cn_seconds;
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
    }
    return result;
}

}  // namespace quntherm
