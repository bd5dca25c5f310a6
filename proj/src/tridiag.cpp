#include "quntherm/tridiag.hpp"

#include <cmath>
#include <string>

namespace quntherm {

std::vector<double> solve_tridiagonal(TridiagonalSystem sys) {
    const std::size_t n = sys.size();
    if (n == 0) return {};
    auto& l = sys.lower;
    auto& d = sys.diag;
    auto& u = sys.upper;
    auto& b = sys.rhs;

    for (std::size_t i = 1; i < n; ++i) {
        if (d[i - 1] == 0.0 || !std::isfinite(d[i - 1]))
            throw SolverError("tridiagonal solve: zero or non-finite pivot at row " +
                              std::to_string(i - 1));
        const double m = l[i] / d[i - 1];
        d[i] -= m * u[i - 1];
        b[i] -= m * b[i - 1];
    }
    if (d[n - 1] == 0.0 || !std::isfinite(d[n - 1]))
        throw SolverError("tridiagonal solve: zero or non-finite pivot at last row");

    std::vector<double> x(n);
    x[n - 1] = b[n - 1] / d[n - 1];
    for (std::size_t i = n - 1; i-- > 0;) x[i] = (b[i] - u[i] * x[i + 1]) / d[i];
    return x;
}

void assert_interior_dominance(const TridiagonalSystem& sys, std::size_t first,
                               std::size_t last, const char* context) {
    // Tiny slack absorbs roundoff in rows that are dominant only weakly.
    for (std::size_t i = first; i < last; ++i) {
        const double lhs = std::abs(sys.diag[i]);
        const double rhs = std::abs(sys.lower[i]) + std::abs(sys.upper[i]);
        if (!(lhs >= rhs * (1.0 - 1e-12)))
            throw SolverError(std::string(context) +
                              ": lost diagonal dominance at row " + std::to_string(i) +
                              " (check coefficient positivity / step size)");
    }
}

}  // namespace quntherm
