#include "bslab/bvp.hpp"

#include <Eigen/SparseLU>

#include <cmath>
#include <sstream>

#include "bslab/errors.hpp"

namespace bslab {

Vec apply_shifted_operator(const PotentialField& q, Complex z, const GridField& u) {
    if (u.grid == nullptr || !u.grid->compatible(*q.grid))
        throw std::invalid_argument("apply_shifted_operator: grid mismatch");
    const GridField lap = discrete_laplacian(u);
    Vec out = -lap.values;
    out.array() += (q.values.array().cast<Complex>() - z) * u.values.array();
    return out;
}

struct DirichletSolver::Impl {
    const Grid* grid = nullptr;
    PotentialField q;  // value copy keeps the solver self-contained
    Eigen::SparseLU<SparseComplex> lu;
    double solve_tol = 1e-10;
};

DirichletSolver::DirichletSolver(const PotentialField& q, Complex z,
                                 const RealVec* known_spectrum)
    : impl_(std::make_unique<Impl>()), z_(z) {
    if (known_spectrum != nullptr && known_spectrum->size() > 0) {
        int nearest = 0;
        double dist = std::numeric_limits<double>::infinity();
        for (int k = 0; k < known_spectrum->size(); ++k) {
            const double d = std::abs(Complex((*known_spectrum)[k], 0.0) - z);
            if (d < dist) {
                dist = d;
                nearest = k;
            }
        }
        if (dist < 1e-8) {
            std::ostringstream os;
            os << "spectral parameter z=" << z.real() << "+" << z.imag() << "i sits on the spectrum"
               << " (nearest eigenvalue " << (*known_spectrum)[nearest] << " at index "
               << nearest + 1 << ")";
            throw NumericalError(os.str());
        }
    }

    impl_->grid = q.grid;
    impl_->q = q;
    const DiscreteOperator op = assemble_operator(q);
    SparseComplex A = op.matrix.cast<Complex>();
    const int N = static_cast<int>(A.rows());
    for (int i = 0; i < N; ++i) A.coeffRef(i, i) -= z;
    A.makeCompressed();
    impl_->lu.compute(A);
    if (impl_->lu.info() != Eigen::Success) {
        std::ostringstream os;
        os << "sparse factorization of (A_q - z) failed for z=" << z.real() << "+" << z.imag()
           << "i (parameter on or too close to the spectrum?)";
        throw NumericalError(os.str());
    }
}

DirichletSolver::~DirichletSolver() = default;
DirichletSolver::DirichletSolver(DirichletSolver&&) noexcept = default;
DirichletSolver& DirichletSolver::operator=(DirichletSolver&&) noexcept = default;

const Grid& DirichletSolver::grid() const { return *impl_->grid; }

Vec DirichletSolver::apply_resolvent(const Vec& rhs) const {
    Vec x = impl_->lu.solve(rhs);
    if (impl_->lu.info() != Eigen::Success)
        throw NumericalError("resolvent solve failed (near-singular system)");
    return x;
}

namespace {
double solution_residual(const PotentialField& q, Complex z, const GridField& u) {
    const Vec r = apply_shifted_operator(q, z, u);
    return r.norm() * std::sqrt(q.grid->cell_volume());
}
}  // namespace

BVPSolution DirichletSolver::solve(const BoundaryFunction& f) const {
    const Grid& g = *impl_->grid;
    if (f.grid == nullptr || !f.grid->compatible(g))
        throw std::invalid_argument("solve: boundary datum on a different grid");

    // move the known boundary values across the stencil: rhs_i += f(b)/h^2
    Vec rhs = Vec::Zero(g.interior_count());
    for (int b = 0; b < g.face_count(); ++b) {
        const BoundaryFace& face = g.faces()[b];
        const double ih2 = 1.0 / (g.spacing(face.axis) * g.spacing(face.axis));
        rhs[face.interior] += f.values[b] * ih2;
    }

    BVPSolution sol;
    sol.grid = &g;
    sol.z = z_;
    sol.f = f;
    sol.u.grid = &g;
    sol.u.values = apply_resolvent(rhs);
    sol.u.boundary = f.values;
    sol.residual = solution_residual(impl_->q, z_, sol.u);
    return sol;
}

BVPSolution DirichletSolver::solve_with_extension(const GridField& f_ext) const {
    const Grid& g = *impl_->grid;
    if (f_ext.grid == nullptr || !f_ext.grid->compatible(g))
        throw std::invalid_argument("solve_with_extension: extension on a different grid");
    if (!f_ext.boundary)
        throw std::invalid_argument("solve_with_extension: extension must carry boundary values");

    const Vec residual = apply_shifted_operator(impl_->q, z_, f_ext);
    const Vec v = apply_resolvent(-residual);

    BVPSolution sol;
    sol.grid = &g;
    sol.z = z_;
    sol.f = BoundaryFunction{&g, *f_ext.boundary};
    sol.u.grid = &g;
    sol.u.values = f_ext.values + v;
    sol.u.boundary = *f_ext.boundary;
    sol.v = GridField{&g, v, std::nullopt};
    sol.residual = solution_residual(impl_->q, z_, sol.u);
    return sol;
}

BVPSolution DirichletSolver::solve_forcing(const GridField& forcing) const {
    const Grid& g = *impl_->grid;
    if (forcing.grid == nullptr || !forcing.grid->compatible(g))
        throw std::invalid_argument("solve_forcing: forcing on a different grid");
    BVPSolution sol;
    sol.grid = &g;
    sol.z = z_;
    sol.f = BoundaryFunction::zero(g);
    sol.u.grid = &g;
    sol.u.values = apply_resolvent(forcing.values);
    sol.u.boundary = Vec::Zero(g.face_count());
    const Vec r = apply_shifted_operator(impl_->q, z_, sol.u) - forcing.values;
    sol.residual = r.norm() * std::sqrt(g.cell_volume());
    return sol;
}

BVPSolution solve_dirichlet(const PotentialField& q, Complex z, const BoundaryFunction& f,
                            const std::optional<GridField>& f_ext,
                            const RealVec* known_spectrum) {
    DirichletSolver solver(q, z, known_spectrum);
    if (f_ext) return solver.solve_with_extension(*f_ext);
    return solver.solve(f);
}

BoundaryFunction normal_derivative(const BVPSolution& sol, TraceScheme scheme) {
    return boundary_trace(sol.u, *sol.grid, scheme);
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("loglog_slope: needs at least two samples");
    const int n = static_cast<int>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(std::max(y[i], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace bslab
