#include "bslab/operators.hpp"

#include <vector>

#include "bslab/rng.hpp"

namespace bslab {

DiscreteOperator assemble_operator(const PotentialField& q) {
    const Grid& g = *q.grid;
    const int n = g.dim();
    const int N = g.interior_count();

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(N) * (2 * n + 1));
    for (int i = 0; i < N; ++i) {
        double diag = q.values[i];
        for (int a = 0; a < n; ++a) {
            const double ih2 = 1.0 / (g.spacing(a) * g.spacing(a));
            diag += 2.0 * ih2;
            for (int side = 0; side < 2; ++side) {
                const int j = g.neighbor(i, a, side);
                if (j >= 0) trip.emplace_back(i, j, -ih2);
            }
        }
        trip.emplace_back(i, i, diag);
    }

    DiscreteOperator op;
    op.grid = &g;
    op.matrix.resize(N, N);
    op.matrix.setFromTriplets(trip.begin(), trip.end());
    op.matrix.makeCompressed();
    op.potential_min = q.values.minCoeff();
    op.recorded_c = q.recorded_c;
    return op;
}

Complex quadratic_form(const PotentialField& q, const GridField& u, const GridField& v) {
    const Grid& g = *q.grid;
    if (u.grid == nullptr || v.grid == nullptr || !u.grid->compatible(g) || !v.grid->compatible(g))
        throw std::invalid_argument("quadratic_form: grid mismatch");
    auto reject_boundary = [](const GridField& f, const char* name) {
        if (f.boundary && f.boundary->cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument(std::string("quadratic_form: ") + name +
                                        " must vanish on the boundary");
    };
    reject_boundary(u, "u");
    reject_boundary(v, "v");

    const int n = g.dim();
    Complex acc(0.0, 0.0);
    // gradient term: one forward difference per lattice edge; edges whose far
    // end is a boundary node contribute with value zero there
    for (int i = 0; i < g.interior_count(); ++i) {
        for (int a = 0; a < n; ++a) {
            const double ih2 = 1.0 / (g.spacing(a) * g.spacing(a));
            const int jhi = g.neighbor(i, a, 1);
            const Complex du = (jhi >= 0 ? u.values[jhi] : Complex(0, 0)) - u.values[i];
            const Complex dv = (jhi >= 0 ? v.values[jhi] : Complex(0, 0)) - v.values[i];
            acc += du * std::conj(dv) * ih2;
            // the low-side edge is owned by the low neighbor except when that
            // neighbor is the boundary
            if (g.neighbor(i, a, 0) < 0) acc += u.values[i] * std::conj(v.values[i]) * ih2;
        }
    }
    // potential term
    acc += (u.values.array() * v.values.array().conjugate() * q.values.array().cast<Complex>())
               .sum();
    return acc * g.cell_volume();
}

CoercivityReport check_form_coercivity(const PotentialField& q, int samples, std::uint64_t seed) {
    if (samples < 1) throw std::invalid_argument("check_form_coercivity: samples must be >= 1");
    const Grid& g = *q.grid;
    PotentialSpec zero_spec;  // q = 0, for the Dirichlet-energy part of the H1 norm
    const PotentialField q0 = sample_potential(zero_spec, g);

    Rng rng(seed);
    CoercivityReport rep;
    rep.samples = samples;
    rep.c_used = q.recorded_c;
    rep.min_kappa = std::numeric_limits<double>::infinity();
    for (int s = 0; s < samples; ++s) {
        GridField u = GridField::zero(g);
        for (int i = 0; i < g.interior_count(); ++i)
            u.values[i] = Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        const double l2sq = inner_omega(u, u).real();
        const double energy = quadratic_form(q0, u, u).real();
        const double form = quadratic_form(q, u, u).real();
        const double h1sq = l2sq + energy;
        const double kappa = (form + rep.c_used * l2sq) / h1sq;
        rep.min_kappa = std::min(rep.min_kappa, kappa);
    }
    rep.coercive = rep.min_kappa > 0.0;
    return rep;
}

}  // namespace bslab
