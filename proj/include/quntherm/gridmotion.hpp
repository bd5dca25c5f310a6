#pragma once

#include <functional>
#include <span>
#include <vector>

#include "quntherm/tridiag.hpp"

namespace quntherm {

// Parameters of the mesh-density monitor
//     w = 1 + alpha1*|u|^beta1 + alpha2*|du/dx|^beta2
// together with the knobs of the mesh-motion machinery: the smoothing
// strength sigma, the mesh relaxation parameter beta_mesh (larger = more
// sluggish mesh), and the stopping rule of the initial equidistribution
// iteration.
struct MonitorConfig {
    double alpha1 = 0.9;
    double beta1 = 2.0;
    double alpha2 = 0.1;
    double beta2 = 2.0;
    double beta_mesh = 100.0;
    double sigma = 10.0;
    double init_tol_rel = 1e-10;  // initial-mesh residual tolerance, relative to domain length
    int init_max_iter = 200;

    void validate() const;  // throws std::invalid_argument
};

// Strictly increasing node set x_0 = 0 < x_1 < ... < x_N = length mapped
// from the uniform reference grid q_j = j/N.  N >= 4.
class MovingMesh {
public:
    MovingMesh(std::vector<double> nodes, double length);

    static MovingMesh uniform(int n_intervals, double length = 1.0);

    int intervals() const { return static_cast<int>(nodes_.size()) - 1; }  // N
    int node_count() const { return static_cast<int>(nodes_.size()); }     // N + 1
    double length() const { return length_; }
    double reference_spacing() const { return 1.0 / intervals(); }         // h = 1/N

    const std::vector<double>& nodes() const { return nodes_; }
    double node(int j) const { return nodes_[static_cast<std::size_t>(j)]; }

    bool is_uniform(double rel_tol = 1e-12) const;

    // Interval Jacobian J_{j+1/2} = (x_{j+1} - x_j)/h, N values.
    std::vector<double> interval_jacobian() const;
    // Nodal Jacobian, N+1 values: centered differences inside, one-sided at
    // the two boundary nodes.
    std::vector<double> node_jacobian() const;

private:
    std::vector<double> nodes_;
    double length_;
};

// One monitor value per interval, sampled at the interval midpoint.
struct MonitorSamples {
    std::vector<double> values;
};

// Discrete monitor on the intervals of `mesh`:
//     w_{j+1/2} = 1 + alpha1*|(u_j+u_{j+1})/2|^beta1
//                   + alpha2*|(u_{j+1}-u_j)/(x_{j+1}-x_j)|^beta2.
// `field` holds nodal values (N+1 entries).
MonitorSamples evaluate_monitor(std::span<const double> field, const MovingMesh& mesh,
                                const MonitorConfig& cfg);

// Implicit smoothing: solves
//     (1+sigma)*s_i - (sigma/2)*(s_{i-1} + s_{i+1}) = w_i
// on interior samples with the two end samples copied through unchanged.
// Linear in w; sigma = 0 is the identity.
MonitorSamples smooth_monitor(const MonitorSamples& w, double sigma);

// Single linear equidistribution solve: nodes of the mesh satisfying
//     w_{j+1/2}(x_{j+1} - x_j) = w_{j-1/2}(x_j - x_{j-1})
// exactly for the given fixed samples, with x_0 = 0 and x_N = length.
MovingMesh equidistribute(const MonitorSamples& w, double length);

// Adapted initial mesh for a nodal field given as a function of x.
// Damped fixed-point iteration: evaluate the monitor on the current mesh,
// smooth it, equidistribute, blend x <- (1-omega)x + omega*x_new with
// omega = 0.5, until the equidistribution residual of the smoothed monitor
// drops below cfg.init_tol_rel * length.  Throws MeshError if the budget
// cfg.init_max_iter is exhausted.
MovingMesh generate_initial_mesh(const std::function<double(double)>& field, int n_intervals,
                                 const MonitorConfig& cfg, double length = 1.0);

// One implicit step of the parabolic mesh-motion equation
//     (1/h) * [ w_{j+1/2}(x_{j+1}-x_j)/h - w_{j-1/2}(x_j-x_{j-1})/h ]
//         = beta_mesh * (x_j^{new} - x_j^{old}) / dt
// with the new positions on the left-hand side (backward Euler).  End nodes
// stay pinned.  Throws MeshError if the new nodes are not strictly ordered.
MovingMesh advance_mesh(const MovingMesh& mesh, const MonitorSamples& w, double dt,
                        double beta_mesh);

// max_j |w_{j+1/2}(x_{j+1}-x_j) - w_{j-1/2}(x_j-x_{j-1})| over interior nodes.
double equidistribution_residual(const MovingMesh& mesh, const MonitorSamples& w);

}  // namespace quntherm
