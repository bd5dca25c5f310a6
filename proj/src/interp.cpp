#include "quntherm/interp.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace quntherm {

double linear_interp(std::span<const double> xs, std::span<const double> ys, double x) {
    const std::size_t n = xs.size();
    if (x <= xs.front()) return ys.front();
    if (x >= xs.back()) return ys.back();
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    const std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    const std::size_t j = std::min(i + 1, n - 1);
    const double w = (x - xs[i]) / (xs[j] - xs[i]);
    return ys[i] + w * (ys[j] - ys[i]);
}

double cubic_interp_uniform(double x0, double dx, std::span<const double> ys, double x) {
    const std::size_t n = ys.size();
    const double s = (x - x0) / dx;
    if (n < 4) {  // degenerate input: fall back to linear between neighbours
        const double sc = std::clamp(s, 0.0, static_cast<double>(n - 1));
        const std::size_t i = std::min(static_cast<std::size_t>(sc), n - 2);
        return ys[i] + (sc - static_cast<double>(i)) * (ys[i + 1] - ys[i]);
    }
    long long i = static_cast<long long>(std::floor(s));
    // Clamp the 4-point stencil {i-1, i, i+1, i+2} into range.
    i = std::clamp<long long>(i, 1, static_cast<long long>(n) - 3);
    const double t = s - static_cast<double>(i);
    const double ym = ys[static_cast<std::size_t>(i - 1)];
    const double y0 = ys[static_cast<std::size_t>(i)];
    const double y1 = ys[static_cast<std::size_t>(i + 1)];
    const double y2 = ys[static_cast<std::size_t>(i + 2)];
    // Lagrange basis on offsets {-1, 0, 1, 2}.
    const double lm = -t * (t - 1.0) * (t - 2.0) / 6.0;
    const double l0 = (t + 1.0) * (t - 1.0) * (t - 2.0) / 2.0;
    const double l1 = -(t + 1.0) * t * (t - 2.0) / 2.0;
    const double l2 = (t + 1.0) * t * (t - 1.0) / 6.0;
    return lm * ym + l0 * y0 + l1 * y1 + l2 * y2;
}

}  // namespace quntherm
