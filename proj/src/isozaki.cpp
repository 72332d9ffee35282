#include "bslab/isozaki.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "bslab/errors.hpp"

namespace bslab {

namespace {

double dot3(const std::array<double, kMaxDim>& a, const std::array<double, kMaxDim>& b, int n) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

double norm3(const std::array<double, kMaxDim>& a, int n) { return std::sqrt(dot3(a, a, n)); }

/// Pairings <f, psi_k>_Gamma for all columns at once.
Vec gamma_pairings(const CMat& traces, int K, const Vec& f, const RealVec& measures) {
    const Vec weighted = f.array() * measures.array().cast<Complex>();
    return traces.leftCols(K).adjoint() * weighted;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Probe make_probe(const Grid& grid, std::span<const double> xi, double tau,
                 const ProbeOptions& opts) {
    const int n = grid.dim();
    if (n < 2)
        throw std::invalid_argument("make_probe: probes need dim >= 2 (eta orthogonal to xi)");
    if (static_cast<int>(xi.size()) != n)
        throw std::invalid_argument("make_probe: xi size does not match grid dim");

    Probe p;
    p.grid = &grid;
    for (int a = 0; a < n; ++a) p.xi[a] = xi[a];
    p.tau = tau;
    const double xi_norm = norm3(p.xi, n);

    if (!(tau >= 1.0))
        throw std::invalid_argument("make_probe: tau must be >= 1");
    p.tau_admissible = tau >= xi_norm;
    if (!p.tau_admissible) {
        if (!opts.allow_tau_below_xi)
            throw std::invalid_argument("make_probe: tau < |xi| (pass allow_tau_below_xi to force)");
        if (!(tau >= 0.5 * xi_norm))
            throw std::invalid_argument("make_probe: tau < |xi|/2, the probe direction does not exist");
    }

    if (opts.explicit_eta) {
        p.eta = *opts.explicit_eta;
        if (std::abs(norm3(p.eta, n) - 1.0) > 1e-10 ||
            std::abs(dot3(p.eta, p.xi, n)) > 1e-10 * std::max(1.0, xi_norm))
            throw std::invalid_argument("make_probe: explicit eta must be unit and orthogonal to xi");
    } else if (xi_norm == 0.0) {
        p.eta[0] = 1.0;
    } else {
        int best = 0;
        for (int a = 1; a < n; ++a)
            if (std::abs(p.xi[a]) < std::abs(p.xi[best])) best = a;
        for (int a = 0; a < n; ++a) p.eta[a] = -p.xi[best] * p.xi[a] / (xi_norm * xi_norm);
        p.eta[best] += 1.0;
        const double en = norm3(p.eta, n);
        for (int a = 0; a < n; ++a) p.eta[a] /= en;
    }

    p.beta = std::sqrt(std::max(0.0, 1.0 - xi_norm * xi_norm / (4.0 * tau * tau)));
    for (int a = 0; a < n; ++a) {
        p.eta_plus[a] = p.beta * p.eta[a] - p.xi[a] / (2.0 * tau);
        p.eta_minus[a] = p.beta * p.eta[a] + p.xi[a] / (2.0 * tau);
    }
    p.lambda_plus = Complex(tau * tau - 1.0, 2.0 * tau);
    p.lambda_minus = Complex(tau * tau - 1.0, -2.0 * tau);

    if (std::abs(norm3(p.eta_plus, n) - 1.0) > 1e-12 ||
        std::abs(norm3(p.eta_minus, n) - 1.0) > 1e-12)
        throw NumericalError("make_probe: probe directions drifted off the unit sphere");

    // f+(x) = exp((i tau - 1) eta+ . x),  f-(x) = exp((i tau + 1) eta- . x)
    auto sample = [&](const std::array<double, kMaxDim>& dir, double growth) {
        GridField f = GridField::zero(grid);
        f.boundary = Vec::Zero(grid.face_count());
        for (int i = 0; i < grid.interior_count(); ++i) {
            const auto x = grid.position_of(i);
            const double s = dot3(dir, x, n);
            f.values[i] = std::exp(growth * s) * Complex(std::cos(tau * s), std::sin(tau * s));
        }
        for (int b = 0; b < grid.face_count(); ++b) {
            const auto& x = grid.faces()[b].position;
            const double s = dot3(dir, x, n);
            (*f.boundary)[b] = std::exp(growth * s) * Complex(std::cos(tau * s), std::sin(tau * s));
        }
        return f;
    };
    p.f_plus = sample(p.eta_plus, -1.0);
    p.f_minus = sample(p.eta_minus, +1.0);
    return p;
}

IsozakiValue s_direct(const DirichletSolver& solver, const Probe& probe, TraceScheme scheme) {
    if (std::abs(solver.z() - probe.lambda_plus) > 0.0)
        throw std::invalid_argument("s_direct: solver is factorized at a different energy");
    if (!solver.grid().compatible(*probe.grid))
        throw std::invalid_argument("s_direct: probe grid mismatch");
    const BVPSolution sol = solver.solve_with_extension(probe.f_plus);
    const BoundaryFunction trace = normal_derivative(sol, scheme);
    IsozakiValue out;
    out.tau = probe.tau;
    out.value = inner_gamma(trace, probe.boundary_minus());
    out.route = Route::direct;
    out.diagnostic = sol.residual;
    return out;
}

IsozakiValue s_direct(const PotentialField& q, const Probe& probe, TraceScheme scheme) {
    DirichletSolver solver(q, probe.lambda_plus);
    return s_direct(solver, probe, scheme);
}

BoundaryFunction representation_series(const SpectralDataset& ds, const Grid& grid,
                                       Complex lambda, Complex mu, const BoundaryFunction& f,
                                       int K) {
    if (!ds.grid_matches(grid))
        throw std::invalid_argument("representation_series: dataset grid metadata mismatch");
    if (K < 1 || K > ds.K)
        throw std::invalid_argument("representation_series: K out of range");
    for (int k = 0; k < K; ++k) {
        if (std::abs(lambda - Complex(ds.eigenvalues[k], 0)) < 1e-8 ||
            std::abs(mu - Complex(ds.eigenvalues[k], 0)) < 1e-8)
            throw NumericalError("representation_series: spectral parameter on the spectrum (index " +
                                 std::to_string(k + 1) + ")");
    }
    const Vec pair = gamma_pairings(ds.traces, K, f.values, grid.face_measures());
    Vec coef(K);
    for (int k = 0; k < K; ++k) {
        const Complex lk(ds.eigenvalues[k], 0.0);
        coef[k] = (mu - lambda) * pair[k] / ((lambda - lk) * (mu - lk));
    }
    BoundaryFunction out = BoundaryFunction::zero(grid);
    out.values = ds.traces.leftCols(K) * coef;
    return out;
}

std::pair<IsozakiValue, SeriesTerms> s_series_diff(const SpectralDataset& ds1,
                                                   const SpectralDataset& ds2,
                                                   const Probe& probe, int K) {
    if (ds1.dim != ds2.dim || ds1.res != ds2.res || ds1.extent != ds2.extent)
        throw std::invalid_argument("s_series_diff: datasets live on different grids");
    if (!ds1.grid_matches(*probe.grid))
        throw std::invalid_argument("s_series_diff: probe grid does not match the datasets");
    if (K < 1 || K > std::min(ds1.K, ds2.K))
        throw std::invalid_argument("s_series_diff: K exceeds a dataset");

    const Grid& g = *probe.grid;
    const Vec fplus = *probe.f_plus.boundary;
    const Vec fminus = *probe.f_minus.boundary;
    const Vec a1 = gamma_pairings(ds1.traces, K, fplus, g.face_measures());
    const Vec a2 = gamma_pairings(ds2.traces, K, fplus, g.face_measures());
    const Vec b1c = gamma_pairings(ds1.traces, K, fminus, g.face_measures());
    const Vec b2c = gamma_pairings(ds2.traces, K, fminus, g.face_measures());

    SeriesTerms terms;
    terms.truncation = K;
    terms.terms.resize(K);
    terms.partial_sums.resize(K);
    Complex sum(0.0, 0.0);
    for (int k = 0; k < K; ++k) {
        const Complex d1 = probe.lambda_plus - Complex(ds1.eigenvalues[k], 0.0);
        const Complex d2 = probe.lambda_plus - Complex(ds2.eigenvalues[k], 0.0);
        const Complex b1 = std::conj(b1c[k]);
        const Complex b2 = std::conj(b2c[k]);
        SeriesTerms::Term t;
        t.k = k + 1;
        t.A = (a1[k] - a2[k]) * b1 / d1;
        t.B = a2[k] * (b1 - b2) / d2;
        t.C = (ds1.eigenvalues[k] - ds2.eigenvalues[k]) * a2[k] * b1 / (d1 * d2);
        sum += t.A + t.B + t.C;
        terms.terms[k] = t;
        terms.partial_sums[k] = sum;
    }

    IsozakiValue out;
    out.tau = probe.tau;
    out.value = sum;
    out.route = Route::series;
    out.diagnostic = static_cast<double>(K);
    return {out, terms};
}

ParsevalReport parseval_check(const SpectralDataset& ds, const PotentialField& q,
                              const Probe& probe, int sign) {
    const Grid& g = *probe.grid;
    if (!ds.grid_matches(g))
        throw std::invalid_argument("parseval_check: dataset grid metadata mismatch");
    const Complex z = sign >= 0 ? probe.lambda_plus : probe.lambda_minus;
    const GridField& fext = sign >= 0 ? probe.f_plus : probe.f_minus;

    const Vec pair = gamma_pairings(ds.traces, ds.K, *fext.boundary, g.face_measures());
    double lhs = 0.0;
    for (int k = 0; k < ds.K; ++k)
        lhs += std::norm(pair[k] / (z - Complex(ds.eigenvalues[k], 0.0)));

    DirichletSolver solver(q, z);
    const BVPSolution sol = solver.solve_with_extension(fext);
    const double rhs = inner_omega(sol.u, sol.u).real();

    ParsevalReport rep;
    rep.coefficient_sum = lhs;
    rep.solution_norm_sq = rhs;
    rep.relative_gap = std::abs(lhs - rhs) / std::max(rhs, 1e-300);
    return rep;
}

namespace {

/// Residual diagnostic |int v q conj(f-) dx| for one potential at lambda_tau^+,
/// with v the resolvent correction -(A - lambda_tau^+)^{-1}(q f_tau^+).
double residual_pairing_term(const DirichletSolver& solver, const PotentialField& q,
                             const Probe& probe) {
    const Vec forcing = q.values.array().cast<Complex>() * probe.f_plus.values.array();
    const Vec v = solver.apply_resolvent(-forcing);
    const Vec integrand = v.array() * q.values.array().cast<Complex>() *
                          probe.f_minus.values.array().conjugate();
    return std::abs(integrand.sum() * q.grid->cell_volume());
}

void finish_table(ConvergenceTable& table) {
    std::vector<double> xs, ys;
    for (const auto& r : table.rows) {
        if (!r.skipped && r.abs_err > 0.0) {
            xs.push_back(r.tau);
            ys.push_back(r.abs_err);
        }
    }
    table.slope = xs.size() >= 2 ? loglog_slope(xs, ys) : 0.0;
}

}  // namespace

ConvergenceTable tau_sweep_diff(const PotentialField& q1, const PotentialField& q2,
                                std::span<const double> xi, const std::vector<double>& tau_list,
                                TraceScheme scheme, bool force_tau) {
    const Grid& g = *q1.grid;
    for (std::size_t i = 1; i < tau_list.size(); ++i)
        if (!(tau_list[i] > tau_list[i - 1]))
            throw std::invalid_argument("tau_sweep_diff: tau list must be ascending");

    const Complex oracle = oracle_fourier(q1, q2, xi);
    double xi_norm = 0.0;
    for (double c : xi) xi_norm += c * c;
    xi_norm = std::sqrt(xi_norm);

    ConvergenceTable table;
    for (double tau : tau_list) {
        ConvergenceRow row;
        row.tau = tau;
        row.oracle = oracle;
        if (tau > g.nyquist_tau() && !force_tau) {
            row.skipped = true;
            table.warnings.push_back("tau=" + fmt(tau) + " above the grid ceiling 1/(4h)=" +
                                     fmt(g.nyquist_tau()) + ", skipped");
            table.rows.push_back(row);
            continue;
        }
        if (tau < std::max(1.0, xi_norm)) {
            row.skipped = true;
            table.warnings.push_back("tau=" + fmt(tau) + " below max(1,|xi|)=" +
                                     fmt(std::max(1.0, xi_norm)) + ", probe refused");
            table.rows.push_back(row);
            continue;
        }
        const Probe probe = make_probe(g, xi, tau);
        DirichletSolver s1(q1, probe.lambda_plus);
        DirichletSolver s2(q2, probe.lambda_plus);
        row.s_diff = s_direct(s1, probe, scheme).value - s_direct(s2, probe, scheme).value;
        row.abs_err = std::abs(row.s_diff - oracle);
        row.residual_diag = residual_pairing_term(s1, q1, probe) + residual_pairing_term(s2, q2, probe);
        table.rows.push_back(row);
    }
    finish_table(table);
    return table;
}

ConvergenceTable tau_sweep_diff(const SpectralDataset& ds1, const SpectralDataset& ds2,
                                const Grid& grid, const PotentialField& q1,
                                const PotentialField& q2, std::span<const double> xi,
                                const std::vector<double>& tau_list, int K, bool force_tau) {
    for (std::size_t i = 1; i < tau_list.size(); ++i)
        if (!(tau_list[i] > tau_list[i - 1]))
            throw std::invalid_argument("tau_sweep_diff: tau list must be ascending");
    const Complex oracle = oracle_fourier(q1, q2, xi);
    double xi_norm = 0.0;
    for (double c : xi) xi_norm += c * c;
    xi_norm = std::sqrt(xi_norm);

    ConvergenceTable table;
    for (double tau : tau_list) {
        ConvergenceRow row;
        row.tau = tau;
        row.oracle = oracle;
        if ((tau > grid.nyquist_tau() && !force_tau) || tau < std::max(1.0, xi_norm)) {
            row.skipped = true;
            table.warnings.push_back("tau=" + fmt(tau) + " outside the admissible window, skipped");
            table.rows.push_back(row);
            continue;
        }
        const Probe probe = make_probe(grid, xi, tau);
        row.s_diff = s_series_diff(ds1, ds2, probe, K).first.value;
        row.abs_err = std::abs(row.s_diff - oracle);
        DirichletSolver s1(q1, probe.lambda_plus);
        DirichletSolver s2(q2, probe.lambda_plus);
        row.residual_diag = residual_pairing_term(s1, q1, probe) + residual_pairing_term(s2, q2, probe);
        table.rows.push_back(row);
    }
    finish_table(table);
    return table;
}

std::string ConvergenceTable::to_csv() const {
    std::ostringstream os;
    os << "tau,re_s,im_s,re_oracle,im_oracle,abs_err,residual_diag\n";
    for (const auto& r : rows) {
        if (r.skipped) continue;
        os << fmt(r.tau) << ',' << fmt(r.s_diff.real()) << ',' << fmt(r.s_diff.imag()) << ','
           << fmt(r.oracle.real()) << ',' << fmt(r.oracle.imag()) << ',' << fmt(r.abs_err) << ','
           << fmt(r.residual_diag) << '\n';
    }
    return os.str();
}

double residual_pairing(const PotentialField& q, const Probe& probe) {
    DirichletSolver solver(q, probe.lambda_plus);
    return residual_pairing_term(solver, q, probe);
}

ShiftDecayTable shift_solution_norm_decay(const PotentialField& q, std::span<const double> xi,
                                          const std::vector<double>& tau_list) {
    if (tau_list.size() < 2)
        throw std::invalid_argument("shift_solution_norm_decay: needs at least two tau values");
    for (std::size_t i = 1; i < tau_list.size(); ++i)
        if (!(tau_list[i] > tau_list[i - 1]))
            throw std::invalid_argument("shift_solution_norm_decay: tau list must be ascending");

    const Grid& g = *q.grid;
    ShiftDecayTable table;
    for (double tau : tau_list) {
        const Probe probe = make_probe(g, xi, tau);
        DirichletSolver solver(q, probe.lambda_plus);

        ShiftDecayRow row;
        row.tau = tau;
        // the resolvent correction with its analytic forcing q f_tau^+
        const Vec forcing =
            q.values.array().cast<Complex>() * probe.f_plus.values.array();
        const Vec v_res = solver.apply_resolvent(-forcing);
        row.norm_resolvent = v_res.norm() * std::sqrt(g.cell_volume());
        // the same correction from the discrete solve (carries the h^2 floor)
        const BVPSolution sol = solver.solve_with_extension(probe.f_plus);
        row.norm_bvp = norm_omega(*sol.v);
        table.rows.push_back(row);
    }
    std::vector<double> xs, y1, y2;
    for (const auto& r : table.rows) {
        xs.push_back(r.tau);
        y1.push_back(std::max(r.norm_resolvent, 1e-300));
        y2.push_back(std::max(r.norm_bvp, 1e-300));
    }
    table.slope_resolvent = loglog_slope(xs, y1);
    table.slope_bvp = loglog_slope(xs, y2);
    return table;
}

}  // namespace bslab
