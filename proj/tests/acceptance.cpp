// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its own grid, potentials, probe parameters and
// tolerance in code; derived thresholds (floors, direct-route references) are
// computed inside the run that asserts against them.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "bslab/reconstruct.hpp"
#include "bslab/verify.hpp"

using namespace bslab;

namespace {

int g_failures = 0;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void report(int criterion, const char* name, bool pass, const std::string& detail,
            double seconds) {
    std::printf("[%s] %2d %-26s %s (%.1f s)\n", pass ? "PASS" : "FAIL", criterion, name,
                detail.c_str(), seconds);
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

Grid unit_square(int m) {
    const double ext[2] = {1.0, 1.0};
    const int res[2] = {m, m};
    return Grid::build(2, ext, res);
}

PotentialSpec bump_spec() {
    PotentialSpec s;
    s.kind = PotentialKind::gaussian_bump;
    s.amplitude = 5.0;
    s.center = {0.5, 0.5, 0.0};
    s.width = 0.1;
    return s;
}

PotentialSpec zero_spec() { return PotentialSpec{}; }

PotentialSpec singular_spec() {
    PotentialSpec s;
    s.kind = PotentialKind::inverse_power;
    s.amplitude = 1.0;
    s.center = {0.511, 0.493, 0.0};  // off every lattice used below
    s.exponent = 0.8;
    return s;
}

BoundaryFunction smooth_datum(const Grid& g) {
    BoundaryFunction f = BoundaryFunction::zero(g);
    for (int b = 0; b < g.face_count(); ++b) {
        const auto& x = g.faces()[b].position;
        f.values[b] = Complex(1.0 + 0.5 * x[0], 0.25 * x[1]);
    }
    return f;
}

// ---------------------------------------------------------------------------
// 1. Large-frequency limit of the probe functional difference: the error
//    against the quadrature transform decreases in tau and, at tau = 16, sits
//    within 3x of the floor measured on the refined grid.
void criterion_1() {
    Timer timer;
    const std::vector<std::array<double, 2>> xis = {
        {0.0, 0.0}, {2.0 * M_PI, 0.0}, {2.0 * M_PI, 2.0 * M_PI}};
    const std::vector<double> taus = {4.0, 8.0, 16.0};

    auto sweep_errors = [&](const Grid& g) {
        const PotentialField q1 = sample_potential(bump_spec(), g);
        const PotentialField q2 = sample_potential(zero_spec(), g);
        // err[xi][tau], negative where the probe precondition rejects the pair
        std::vector<std::vector<double>> err(xis.size(),
                                             std::vector<double>(taus.size(), -1.0));
        for (std::size_t t = 0; t < taus.size(); ++t) {
            const Complex z(taus[t] * taus[t] - 1.0, 2.0 * taus[t]);
            DirichletSolver s1(q1, z);
            DirichletSolver s2(q2, z);
            for (std::size_t x = 0; x < xis.size(); ++x) {
                const double xi_norm = std::hypot(xis[x][0], xis[x][1]);
                if (taus[t] < std::max(1.0, xi_norm)) continue;
                const Probe probe = make_probe(g, xis[x], taus[t]);
                const Complex diff = s_direct(s1, probe, TraceScheme::onesided2).value -
                                     s_direct(s2, probe, TraceScheme::onesided2).value;
                err[x][t] = std::abs(diff - oracle_fourier(q1, q2, xis[x]));
            }
        }
        return err;
    };

    const auto err64 = sweep_errors(unit_square(64));
    bool pass = true;
    std::string detail;
    for (std::size_t x = 0; x < xis.size(); ++x) {
        double prev = -1.0;
        detail += " xi" + std::to_string(x) + ":[";
        for (std::size_t t = 0; t < taus.size(); ++t) {
            if (err64[x][t] < 0.0) {
                detail += " -";
                continue;  // tau below |xi|: no probe
            }
            if (prev >= 0.0 && !(err64[x][t] < prev)) pass = false;
            prev = err64[x][t];
            detail += " " + fmt(err64[x][t]);
        }
        detail += "]";
    }

    // floor at res 128^2, tau = 16 only
    const Grid g128 = unit_square(128);
    const PotentialField q1f = sample_potential(bump_spec(), g128);
    const PotentialField q2f = sample_potential(zero_spec(), g128);
    const Complex z16(16.0 * 16.0 - 1.0, 32.0);
    DirichletSolver f1(q1f, z16);
    DirichletSolver f2(q2f, z16);
    for (std::size_t x = 0; x < xis.size(); ++x) {
        const Probe probe = make_probe(g128, xis[x], 16.0);
        const Complex diff = s_direct(f1, probe, TraceScheme::onesided2).value -
                             s_direct(f2, probe, TraceScheme::onesided2).value;
        const double floor = std::abs(diff - oracle_fourier(q1f, q2f, xis[x]));
        if (!(err64[x].back() <= 3.0 * floor)) pass = false;
        detail += " floor" + std::to_string(x) + ":" + fmt(floor);
    }
    report(1, "fourier-limit", pass,
           "errors decrease in tau, within 3x of the 128^2 floor;" + detail, timer.seconds());
    if (!pass)
        std::printf(
            "       note: the xi=0 sub-case is discretization-limited at res 64^2, tau 16\n"
            "       (tau at 98%% of the grid ceiling 1/(4h)); the sampled probe is a discrete\n"
            "       plane wave whose symbol misses lambda_tau by |sigma| ~ tau^4 h^2/12 = 1.3,\n"
            "       injecting an O(tau^3 h^2) term that exceeds the true large-tau error there.\n");
}

// ---------------------------------------------------------------------------
// 2. Route equivalence at full basis: the series over the boundary spectral
//    data reproduces the direct solve difference to 1e-7.
void criterion_2() {
    Timer timer;
    const Grid g = unit_square(24);
    const PotentialField q1 = sample_potential(bump_spec(), g);
    const PotentialField q2 = sample_potential(zero_spec(), g);
    const int N = g.interior_count();
    const SpectralDataset ds1 = build_dataset(q1, N, TraceScheme::flux1, 1e-10);
    const SpectralDataset ds2 = build_dataset(q2, N, TraceScheme::flux1, 1e-10);

    bool pass = true;
    std::string detail;
    for (const std::array<double, 2> xi : {std::array<double, 2>{2.0 * M_PI, 0.0},
                                           std::array<double, 2>{0.0, 0.0}}) {
        const Probe probe = make_probe(g, xi, 8.0);
        const Complex direct = s_direct(q1, probe, TraceScheme::flux1).value -
                               s_direct(q2, probe, TraceScheme::flux1).value;
        const Complex series = s_series_diff(ds1, ds2, probe, N).first.value;
        const double gap = std::abs(series - direct);
        if (!(gap <= 1e-7 * (1.0 + std::abs(direct)))) pass = false;
        detail += " gap:" + fmt(gap);
    }
    report(2, "route-equivalence", pass, "|series - direct| <= 1e-7 (1+|direct|);" + detail,
           timer.seconds());
}

// ---------------------------------------------------------------------------
// 3. The representation series at full truncation equals the direct trace
//    difference of the two solves in L2(Gamma) to 1e-8.
void criterion_3() {
    Timer timer;
    const Grid g = unit_square(24);
    const PotentialField q = sample_potential(bump_spec(), g);
    const int N = g.interior_count();
    const SpectralDataset ds = build_dataset(q, N, TraceScheme::flux1, 1e-10);
    const BoundaryFunction f = smooth_datum(g);

    const Complex lambda(63.0, 16.0);
    const Complex mu(-50.0, 0.0);
    const BVPSolution ul = solve_dirichlet(q, lambda, f);
    const BVPSolution um = solve_dirichlet(q, mu, f);
    const BoundaryFunction direct{
        &g, normal_derivative(ul, TraceScheme::flux1).values -
                normal_derivative(um, TraceScheme::flux1).values};
    const BoundaryFunction series = representation_series(ds, g, lambda, mu, f, N);
    const double gap = norm_gamma({&g, series.values - direct.values}) / norm_gamma(direct);
    report(3, "representation-series", gap <= 1e-8,
           "relative L2(Gamma) gap " + fmt(gap) + " <= 1e-8", timer.seconds());
}

// ---------------------------------------------------------------------------
// 4. Parseval identity between the squared spectral coefficients of the probed
//    solutions and their interior norms, both potentials and both signs.
void criterion_4() {
    Timer timer;
    const Grid g = unit_square(24);
    const int N = g.interior_count();
    const Probe probe = make_probe(g, std::array<double, 2>{2.0 * M_PI, 0.0}, 8.0);
    bool pass = true;
    std::string detail;
    for (const PotentialSpec& spec : {bump_spec(), zero_spec()}) {
        const PotentialField q = sample_potential(spec, g);
        const SpectralDataset ds = build_dataset(q, N, TraceScheme::flux1, 1e-10);
        for (int sign : {+1, -1}) {
            const ParsevalReport rep = parseval_check(ds, q, probe, sign);
            if (!(rep.relative_gap <= 1e-8)) pass = false;
            detail += " " + fmt(rep.relative_gap);
        }
    }
    report(4, "parseval", pass, "relative gaps" + detail + " <= 1e-8", timer.seconds());
}

// ---------------------------------------------------------------------------
// 5. Decay of the normal-derivative difference as the spectral parameter goes
//    to -infinity, in L^p(Gamma) with p = 2n/(n+2) = 1.
void criterion_5() {
    Timer timer;
    const Grid g = unit_square(32);
    const PotentialField q1 = sample_potential(bump_spec(), g);
    const PotentialField q2 = sample_potential(zero_spec(), g);
    const BoundaryFunction f = smooth_datum(g);
    const double p = 2.0 * g.dim() / (g.dim() + 2.0);

    std::vector<double> absl, norms;
    bool decreasing = true;
    for (double lambda : {-1e2, -1e3, -1e4, -1e5}) {
        const BVPSolution u1 = solve_dirichlet(q1, Complex(lambda, 0.0), f);
        const BVPSolution u2 = solve_dirichlet(q2, Complex(lambda, 0.0), f);
        const BoundaryFunction diff{&g,
                                    normal_derivative(u1, TraceScheme::flux1).values -
                                        normal_derivative(u2, TraceScheme::flux1).values};
        const double nrm = lp_gamma_norm(diff, p);
        if (!norms.empty() && !(nrm < norms.back())) decreasing = false;
        absl.push_back(-lambda);
        norms.push_back(nrm);
    }
    const double slope = loglog_slope(absl, norms);
    report(5, "lambda-decay", decreasing && slope <= -0.1,
           "strictly decreasing, log-log slope " + fmt(slope) + " <= -0.1", timer.seconds());
}

// ---------------------------------------------------------------------------
// 6. Resolvent-correction decay: slope of ||v|| against tau in [-1.2, -0.8].
void criterion_6() {
    Timer timer;
    const Grid g = unit_square(96);
    const PotentialField q = sample_potential(bump_spec(), g);
    const ShiftDecayTable t = shift_solution_norm_decay(
        q, std::array<double, 2>{0.0, 0.0}, {8.0, 16.0, 32.0, 64.0});
    const bool pass = t.slope_resolvent <= -0.8 && t.slope_resolvent >= -1.2;
    report(6, "resolvent-decay", pass,
           "slope " + fmt(t.slope_resolvent) + " in [-1.2, -0.8] (discrete-solve route " +
               fmt(t.slope_bvp) + ")",
           timer.seconds());
}

// ---------------------------------------------------------------------------
// 7. Trace bound for a singular potential: the ratio sequence stays flat in
//    the median sense over the first 200 eigenpairs.
void criterion_7() {
    Timer timer;
    const Grid g = unit_square(48);
    const PotentialField q = sample_potential(singular_spec(), g);
    const SpectralDataset ds = build_dataset(q, 200, TraceScheme::flux1, 1e-10);
    const TraceBoundReport rep = verify_trace_bound(ds);
    const double ratio = rep.top_decile_median / rep.overall_median;
    report(7, "trace-bound", !rep.flagged,
           "top-decile median / overall median = " + fmt(ratio) + " <= 3", timer.seconds());
}

// ---------------------------------------------------------------------------
// 8. Stability of the normal-derivative estimate constant under refinement,
//    for a bounded and a singular potential.
void criterion_8() {
    Timer timer;
    bool pass = true;
    std::string detail;
    for (const PotentialSpec& spec : {bump_spec(), singular_spec()}) {
        const double coarse = trace_estimate_max_ratio(spec, unit_square(32), 20, TraceScheme::flux1, 7);
        const double fine = trace_estimate_max_ratio(spec, unit_square(64), 20, TraceScheme::flux1, 13);
        const double growth = fine / coarse;
        if (!(growth <= 1.5)) pass = false;
        detail += " growth:" + fmt(growth);
    }
    report(8, "trace-estimate-stability", pass, "max-ratio growth" + detail + " <= 1.5",
           timer.seconds());
}

// ---------------------------------------------------------------------------
// 9. End-to-end uniqueness shadow: identical data reconstructs exactly zero;
//    the data-only (series) reconstruction of the bump stays within 2x of the
//    direct-route reconstruction error on the same grid.
void criterion_9() {
    Timer timer;
    const Grid g = unit_square(48);
    const PotentialField q1 = sample_potential(bump_spec(), g);
    const PotentialField q2 = sample_potential(zero_spec(), g);
    const int N = g.interior_count();
    const double tau = g.nyquist_tau();  // 12.25
    const FrequencyGrid fgrid = build_frequency_grid(g, 4.0 * M_PI);
    RealVec truth = q1.values - q2.values;

    const SpectralDataset ds1 = build_dataset(q1, N, TraceScheme::onesided2, 1e-10);
    const SpectralDataset ds2 = build_dataset(q2, N, TraceScheme::onesided2, 1e-10);

    // identical datasets give the exact zero field
    const ReconstructionResult zero = reconstruct_series(ds1, ds1, g, fgrid, tau, N);
    const bool zero_ok = zero.field.cwiseAbs().maxCoeff() == 0.0;

    const ReconstructionResult direct =
        reconstruct_direct(q1, q2, fgrid, tau, TraceScheme::onesided2, &truth);
    const ReconstructionResult series = reconstruct_series(ds1, ds2, g, fgrid, tau, N, &truth);
    const bool within = series.metrics.rel_l2_error <= 2.0 * direct.metrics.rel_l2_error;

    report(9, "uniqueness-shadow", zero_ok && within,
           "zero-data max|field| = " + fmt(zero.field.cwiseAbs().maxCoeff()) + ", series err " +
               fmt(series.metrics.rel_l2_error) + " <= 2 x direct err " +
               fmt(direct.metrics.rel_l2_error),
           timer.seconds());
}

// ---------------------------------------------------------------------------
// 10. Hypothesis sensitivity: decaying perturbations respond linearly in the
//     magnitude; a non-decaying trace bias of the same size responds >= 5x
//     more strongly.
void criterion_10() {
    Timer timer;
    const Grid g = unit_square(24);
    const PotentialField q = sample_potential(bump_spec(), g);
    const int N = g.interior_count();
    const SpectralDataset ds = build_dataset(q, N, TraceScheme::flux1, 1e-10);
    const FrequencyGrid fgrid = build_frequency_grid(g, 2.0 * M_PI);
    const double tau = g.nyquist_tau();  // 6.25

    auto recon_norm = [&](PerturbMode mode, double eps) {
        const SpectralDataset pert = perturb_dataset(ds, mode, eps, 2026);
        return reconstruct_series(ds, pert, g, fgrid, tau, N).metrics.field_l2_norm;
    };

    const double eps = 1e-2;
    bool pass = true;
    std::string detail;
    for (auto mode : {PerturbMode::trace_noise_l2, PerturbMode::eigen_shift_decaying}) {
        const double ratio = recon_norm(mode, eps) / recon_norm(mode, eps / 2.0);
        if (!(ratio >= 1.6 && ratio <= 2.4)) pass = false;
        detail += std::string(" ") + to_string(mode) + ":" + fmt(ratio);
    }
    const double decaying = recon_norm(PerturbMode::trace_noise_l2, eps);
    const double constant = recon_norm(PerturbMode::trace_noise_constant, eps);
    const double separation = constant / decaying;
    if (!(separation >= 5.0)) pass = false;
    detail += " separation:" + fmt(separation);
    report(10, "hypothesis-sensitivity", pass,
           "linear-response ratios in [1.6, 2.4];" + detail + " >= 5", timer.seconds());
}

}  // namespace

int main() {
    using CriterionFn = void (*)();
    const CriterionFn criteria[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                    criterion_5, criterion_6, criterion_7, criterion_8,
                                    criterion_9, criterion_10};
    int index = 0;
    for (CriterionFn fn : criteria) {
        ++index;
        try {
            fn();
        } catch (const std::exception& e) {
            report(index, "aborted", false, std::string("threw: ") + e.what(), 0.0);
        }
    }
    if (g_failures == 0) {
        std::printf("acceptance: all criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criterion(s) failed\n", g_failures);
    return 1;
}
