#pragma once

#include <memory>
#include <optional>

#include "bslab/spectra.hpp"

namespace bslab {

/// Solution of (-Delta_h + q - z) u = 0 with u = f on the boundary faces
/// (or of the forcing problem (A_q - z) u = F with f = 0).
struct BVPSolution {
    const Grid* grid = nullptr;
    Complex z;
    BoundaryFunction f;             // boundary datum
    GridField u;                    // interior values, boundary = f
    std::optional<GridField> v;     // u minus the analytic extension (probe path)
    double residual = 0.0;          // ||(-Delta_h + q - z) u||_Omega
};

/// Apply (-Delta_h + q - z) to a field, reading boundary neighbors from the
/// field's boundary values (zero when absent). Returns interior values.
Vec apply_shifted_operator(const PotentialField& q, Complex z, const GridField& u);

/// One factorization of (A_q - z), reusable across right-hand sides.
/// Immutable once built; concurrent solves against distinct right-hand sides
/// must be externally serialized per instance (cheap at desk scale).
class DirichletSolver {
public:
    /// known_spectrum, when supplied, arms the near-spectrum guard:
    /// z closer than 1e-8 to an eigenvalue is refused with the nearest one named.
    DirichletSolver(const PotentialField& q, Complex z,
                    const RealVec* known_spectrum = nullptr);
    ~DirichletSolver();
    DirichletSolver(DirichletSolver&&) noexcept;
    DirichletSolver& operator=(DirichletSolver&&) noexcept;

    Complex z() const { return z_; }
    const Grid& grid() const;

    /// Lift path: move the boundary datum into the stencil right-hand side.
    BVPSolution solve(const BoundaryFunction& f) const;

    /// Probe path: correct an analytic extension by the resolvent of its
    /// interior residual. f_ext must carry boundary values.
    BVPSolution solve_with_extension(const GridField& f_ext) const;

    /// Forcing problem (A_q - z) u = F with zero boundary values.
    BVPSolution solve_forcing(const GridField& forcing) const;

    /// (A_q - z)^{-1} applied to an interior vector.
    Vec apply_resolvent(const Vec& rhs) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    Complex z_;
};

BVPSolution solve_dirichlet(const PotentialField& q, Complex z, const BoundaryFunction& f,
                            const std::optional<GridField>& f_ext = std::nullopt,
                            const RealVec* known_spectrum = nullptr);

/// Outward-normal trace of a BVP solution (keeps the solution's boundary values).
BoundaryFunction normal_derivative(const BVPSolution& sol, TraceScheme scheme);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace bslab
