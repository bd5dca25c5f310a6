#pragma once

#include <span>

namespace quntherm {

// Piecewise-linear interpolation on strictly increasing abscissae, clamped at
// the ends.
double linear_interp(std::span<const double> xs, std::span<const double> ys, double x);

// Four-point Lagrange (piecewise-cubic) interpolation on a uniform grid
// starting at x0 with spacing dx; the stencil is clamped near the ends.
double cubic_interp_uniform(double x0, double dx, std::span<const double> ys, double x);

}  // namespace quntherm
