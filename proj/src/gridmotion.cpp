#include "quntherm/gridmotion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>
#include <string>

namespace quntherm {

namespace {

double pow_abs(double v, double p) {
    const double a = std::abs(v);
    if (p == 1.0) return a;
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    return std::pow(a, p);
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

void check_samples(const MonitorSamples& w, int n_intervals, const char* context) {
    if (static_cast<int>(w.values.size()) != n_intervals)
        throw std::invalid_argument(std::string(context) +
                                    ": monitor sample count does not match interval count");
    for (double v : w.values)
        if (!(std::isfinite(v) && v > 0.0))
            throw std::invalid_argument(std::string(context) +
                                        ": monitor samples must be positive and finite");
}

}  // namespace

void MonitorConfig::validate() const {
    require(std::isfinite(alpha1) && alpha1 >= 0.0, "MonitorConfig: alpha1 must be >= 0");
    require(std::isfinite(alpha2) && alpha2 >= 0.0, "MonitorConfig: alpha2 must be >= 0");
    require(std::isfinite(beta1) && beta1 > 0.0, "MonitorConfig: beta1 must be > 0");
    require(std::isfinite(beta2) && beta2 > 0.0, "MonitorConfig: beta2 must be > 0");
    require(std::isfinite(beta_mesh) && beta_mesh > 0.0, "MonitorConfig: beta_mesh must be > 0");
    require(std::isfinite(sigma) && sigma >= 0.0, "MonitorConfig: sigma must be >= 0");
    require(std::isfinite(init_tol_rel) && init_tol_rel > 0.0,
            "MonitorConfig: init_tol_rel must be > 0");
    require(init_max_iter >= 1, "MonitorConfig: init_max_iter must be >= 1");
}

MovingMesh::MovingMesh(std::vector<double> nodes, double length)
    : nodes_(std::move(nodes)), length_(length) {
    require(std::isfinite(length_) && length_ > 0.0, "MovingMesh: length must be positive");
    require(nodes_.size() >= 5, "MovingMesh: need at least 4 intervals");
    require(nodes_.front() == 0.0, "MovingMesh: first node must sit exactly at 0");
    require(nodes_.back() == length_, "MovingMesh: last node must sit exactly at length");
    for (std::size_t j = 0; j + 1 < nodes_.size(); ++j) {
        if (!std::isfinite(nodes_[j + 1]) || !(nodes_[j] < nodes_[j + 1]))
            throw std::invalid_argument("MovingMesh: nodes must be strictly increasing");
    }
}

MovingMesh MovingMesh::uniform(int n_intervals, double length) {
    require(n_intervals >= 4, "MovingMesh: need at least 4 intervals");
    require(std::isfinite(length) && length > 0.0, "MovingMesh: length must be positive");
    std::vector<double> x(static_cast<std::size_t>(n_intervals) + 1);
    for (int j = 0; j <= n_intervals; ++j)
        x[static_cast<std::size_t>(j)] = length * static_cast<double>(j) / n_intervals;
    x.front() = 0.0;
    x.back() = length;
    return MovingMesh(std::move(x), length);
}

bool MovingMesh::is_uniform(double rel_tol) const {
    const double target = length_ / intervals();
    for (int j = 0; j < intervals(); ++j) {
        const double dx = nodes_[static_cast<std::size_t>(j) + 1] - nodes_[static_cast<std::size_t>(j)];
        if (std::abs(dx - target) > rel_tol * length_) return false;
    }
    return true;
}

std::vector<double> MovingMesh::interval_jacobian() const {
    const int n = intervals();
    const double h = reference_spacing();
    std::vector<double> jac(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        jac[static_cast<std::size_t>(j)] =
            (nodes_[static_cast<std::size_t>(j) + 1] - nodes_[static_cast<std::size_t>(j)]) / h;
    return jac;
}

std::vector<double> MovingMesh::node_jacobian() const {
    const int n = intervals();
    const double h = reference_spacing();
    std::vector<double> jac(static_cast<std::size_t>(n) + 1);
    jac[0] = (nodes_[1] - nodes_[0]) / h;
    for (int j = 1; j < n; ++j)
        jac[static_cast<std::size_t>(j)] =
            (nodes_[static_cast<std::size_t>(j) + 1] - nodes_[static_cast<std::size_t>(j) - 1]) /
            (2.0 * h);
    jac[static_cast<std::size_t>(n)] =
        (nodes_[static_cast<std::size_t>(n)] - nodes_[static_cast<std::size_t>(n) - 1]) / h;
    return jac;
}

MonitorSamples evaluate_monitor(std::span<const double> field, const MovingMesh& mesh,
                                const MonitorConfig& cfg) {
    cfg.validate();
    const int n = mesh.intervals();
    if (static_cast<int>(field.size()) != n + 1)
        throw std::invalid_argument("evaluate_monitor: field size must be node count");
    for (double v : field)
        if (!std::isfinite(v))
            throw std::invalid_argument("evaluate_monitor: field contains non-finite values");

    MonitorSamples w;
    w.values.resize(static_cast<std::size_t>(n));
    const auto& x = mesh.nodes();
    for (int j = 0; j < n; ++j) {
        const std::size_t k = static_cast<std::size_t>(j);
        const double um = 0.5 * (field[k] + field[k + 1]);
        const double grad = (field[k + 1] - field[k]) / (x[k + 1] - x[k]);
        w.values[k] = 1.0 + cfg.alpha1 * pow_abs(um, cfg.beta1) +
                      cfg.alpha2 * pow_abs(grad, cfg.beta2);
    }
    return w;
}

MonitorSamples smooth_monitor(const MonitorSamples& w, double sigma) {
    require(std::isfinite(sigma) && sigma >= 0.0, "smooth_monitor: sigma must be >= 0");
    const std::size_t n = w.values.size();
    for (double v : w.values)
        if (!std::isfinite(v))
            throw std::invalid_argument("smooth_monitor: samples must be finite");
    if (sigma == 0.0 || n <= 2) return w;

    // Interior samples solve an implicit three-point relaxation; the two end
    // samples pass through unchanged.
    const std::size_t m = n - 2;
    TridiagonalSystem sys(m);
    for (std::size_t i = 0; i < m; ++i) {
        sys.lower[i] = -0.5 * sigma;
        sys.diag[i] = 1.0 + sigma;
        sys.upper[i] = -0.5 * sigma;
        sys.rhs[i] = w.values[i + 1];
    }
    sys.rhs[0] += 0.5 * sigma * w.values.front();
    sys.rhs[m - 1] += 0.5 * sigma * w.values.back();
    assert_interior_dominance(sys, 0, m, "smooth_monitor");
    std::vector<double> s = solve_tridiagonal(std::move(sys));

    MonitorSamples out;
    out.values.resize(n);
    out.values.front() = w.values.front();
    std::copy(s.begin(), s.end(), out.values.begin() + 1);
    out.values.back() = w.values.back();
    return out;
}

MovingMesh equidistribute(const MonitorSamples& w, double length) {
    require(std::isfinite(length) && length > 0.0, "equidistribute: length must be positive");
    const int n = static_cast<int>(w.values.size());
    require(n >= 4, "equidistribute: need at least 4 samples");
    check_samples(w, n, "equidistribute");

    // Steady limit of the mesh-motion equation: interior nodes satisfy
    // w_{j+1/2}(x_{j+1}-x_j) = w_{j-1/2}(x_j-x_{j-1}).
    const std::size_t m = static_cast<std::size_t>(n) - 1;
    TridiagonalSystem sys(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double wl = w.values[i];
        const double wr = w.values[i + 1];
        sys.lower[i] = -wl;
        sys.diag[i] = wl + wr;
        sys.upper[i] = -wr;
        sys.rhs[i] = 0.0;
    }
    sys.rhs[m - 1] += w.values[static_cast<std::size_t>(n) - 1] * length;
    assert_interior_dominance(sys, 0, m, "equidistribute");
    std::vector<double> sol = solve_tridiagonal(std::move(sys));

    std::vector<double> x(static_cast<std::size_t>(n) + 1);
    x.front() = 0.0;
    std::copy(sol.begin(), sol.end(), x.begin() + 1);
    x.back() = length;
    return MovingMesh(std::move(x), length);
}

MovingMesh generate_initial_mesh(const std::function<double(double)>& field, int n_intervals,
                                 const MonitorConfig& cfg, double length) {
    cfg.validate();
    require(static_cast<bool>(field), "generate_initial_mesh: field must be callable");
    MovingMesh mesh = MovingMesh::uniform(n_intervals, length);
    const double tol = cfg.init_tol_rel * length;
    // Each pass re-places the interior nodes at equal quantiles of the
    // cumulative monitor integral along the current mesh.  Integrating in
    // physical space keeps the update anchored to where the monitor is
    // actually large, so steep fronts pull nodes in within a few dozen
    // passes instead of hopping between neighbouring intervals.  Damping is
    // only a fallback: the blend factor backs off when the residual stops
    // decreasing and recovers once progress resumes.
    double omega = 1.0;
    double prev_residual = std::numeric_limits<double>::infinity();

    std::vector<double> u(static_cast<std::size_t>(n_intervals) + 1);
    std::vector<double> cum(static_cast<std::size_t>(n_intervals) + 1);
    for (int iter = 0;; ++iter) {
        for (int j = 0; j <= n_intervals; ++j) u[static_cast<std::size_t>(j)] = field(mesh.node(j));
        MonitorSamples w = smooth_monitor(evaluate_monitor(u, mesh, cfg), cfg.sigma);
        const double residual = equidistribution_residual(mesh, w);
        if (residual <= tol) return mesh;
        if (iter >= cfg.init_max_iter) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.3e", residual);
            throw MeshError("generate_initial_mesh: equidistribution did not converge within " +
                            std::to_string(cfg.init_max_iter) + " iterations (residual " + buf +
                            ")");
        }
        omega = residual >= prev_residual ? std::max(0.02, omega * 0.7)
                                          : std::min(1.0, omega * 1.05);
        prev_residual = residual;

        const auto& x = mesh.nodes();
        cum[0] = 0.0;
        for (int j = 0; j < n_intervals; ++j) {
            const std::size_t k = static_cast<std::size_t>(j);
            cum[k + 1] = cum[k] + w.values[k] * (x[k + 1] - x[k]);
        }
        const double total = cum[static_cast<std::size_t>(n_intervals)];
        std::vector<double> blended(mesh.nodes());
        int seg = 0;
        for (int i = 1; i < n_intervals; ++i) {
            const double target = total * static_cast<double>(i) / n_intervals;
            while (seg + 1 < n_intervals && cum[static_cast<std::size_t>(seg) + 1] < target) ++seg;
            const std::size_t k = static_cast<std::size_t>(seg);
            const double xi = x[k] + (target - cum[k]) / w.values[k];
            const std::size_t b = static_cast<std::size_t>(i);
            blended[b] = (1.0 - omega) * blended[b] + omega * xi;
        }
        mesh = MovingMesh(std::move(blended), length);
    }
}

MovingMesh advance_mesh(const MovingMesh& mesh, const MonitorSamples& w, double dt,
                        double beta_mesh) {
    require(std::isfinite(dt) && dt > 0.0, "advance_mesh: dt must be > 0");
    require(std::isfinite(beta_mesh) && beta_mesh > 0.0, "advance_mesh: beta_mesh must be > 0");
    const int n = mesh.intervals();
    check_samples(w, n, "advance_mesh");

    const double h = mesh.reference_spacing();
    const double inv_h2 = 1.0 / (h * h);
    const double relax = beta_mesh / dt;
    const auto& x = mesh.nodes();

    const std::size_t m = static_cast<std::size_t>(n) - 1;
    TridiagonalSystem sys(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double wl = w.values[i] * inv_h2;
        const double wr = w.values[i + 1] * inv_h2;
        sys.lower[i] = -wl;
        sys.diag[i] = wl + wr + relax;
        sys.upper[i] = -wr;
        sys.rhs[i] = relax * x[i + 1];
    }
    // Fold in the pinned end nodes (x_0 = 0 contributes nothing).
    sys.rhs[m - 1] += w.values[static_cast<std::size_t>(n) - 1] * inv_h2 * mesh.length();
    assert_interior_dominance(sys, 0, m, "advance_mesh");
    std::vector<double> sol = solve_tridiagonal(std::move(sys));

    std::vector<double> xn(static_cast<std::size_t>(n) + 1);
    xn.front() = 0.0;
    std::copy(sol.begin(), sol.end(), xn.begin() + 1);
    xn.back() = mesh.length();
    for (std::size_t j = 0; j + 1 < xn.size(); ++j) {
        if (!(xn[j] < xn[j + 1]))
            throw MeshError("advance_mesh: node crossing; increase beta_mesh or reduce dt");
    }
    return MovingMesh(std::move(xn), mesh.length());
}

double equidistribution_residual(const MovingMesh& mesh, const MonitorSamples& w) {
    const int n = mesh.intervals();
    check_samples(w, n, "equidistribution_residual");
    const auto& x = mesh.nodes();
    double r = 0.0;
    for (int j = 1; j < n; ++j) {
        const std::size_t k = static_cast<std::size_t>(j);
        const double flux_r = w.values[k] * (x[k + 1] - x[k]);
        const double flux_l = w.values[k - 1] * (x[k] - x[k - 1]);
        r = std::max(r, std::abs(flux_r - flux_l));
    }
    return r;
}

}  // namespace quntherm
