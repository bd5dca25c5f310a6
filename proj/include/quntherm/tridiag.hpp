#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace quntherm {

// Raised when a linear solve or a time step cannot be completed.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Raised when mesh generation or motion produces an invalid grid.
class MeshError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Tridiagonal system  lower[i]*x[i-1] + diag[i]*x[i] + upper[i]*x[i+1] = rhs[i].
// lower[0] and upper[n-1] are ignored.
struct TridiagonalSystem {
    std::vector<double> lower, diag, upper, rhs;

    explicit TridiagonalSystem(std::size_t n)
        : lower(n, 0.0), diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0) {}

    std::size_t size() const { return diag.size(); }
};

// Thomas algorithm, destroys the system in place and returns the solution.
// Throws SolverError on a vanishing pivot.  Callers assembling diffusion
// rows are expected to keep them diagonally dominant; see
// assert_interior_dominance below.
std::vector<double> solve_tridiagonal(TridiagonalSystem sys);

// Checks weak diagonal dominance |d| >= |l| + |u| on rows [first, last).
// Throws SolverError naming `context` if violated.  Interior rows of every
// parabolic step assembled in this project satisfy this for positive
// coefficients, so a violation indicates bad inputs (negative k*, c*, w).
void assert_interior_dominance(const TridiagonalSystem& sys, std::size_t first,
                               std::size_t last, const char* context);

}  // namespace quntherm
