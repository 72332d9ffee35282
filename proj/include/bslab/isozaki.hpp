#pragma once

#include <utility>
#include <vector>

#include "bslab/bvp.hpp"

namespace bslab {

/// One complex-geometrical-optics probe pair. The two exponentials
/// f^{+-}(x) = exp(i (tau +- i) eta^{+-} . x) solve the free equation at the
/// complex energies (tau +- i)^2 and their product tends to exp(-i xi . x).
struct Probe {
    const Grid* grid = nullptr;
    std::array<double, kMaxDim> xi{};
    std::array<double, kMaxDim> eta{};  // unit, orthogonal to xi
    double tau = 0.0;
    double beta = 0.0;                           // sqrt(1 - |xi|^2/(4 tau^2))
    std::array<double, kMaxDim> eta_plus{};      // beta eta - xi/(2 tau)
    std::array<double, kMaxDim> eta_minus{};     // beta eta + xi/(2 tau)
    Complex lambda_plus, lambda_minus;           // (tau +- i)^2
    GridField f_plus, f_minus;                   // interior samples + boundary samples
    bool tau_admissible = true;                  // tau >= max(1, |xi|)

    BoundaryFunction boundary_plus() const { return {grid, *f_plus.boundary}; }
    BoundaryFunction boundary_minus() const { return {grid, *f_minus.boundary}; }
};

struct ProbeOptions {
    std::optional<std::array<double, kMaxDim>> explicit_eta;
    /// Accept max(1,|xi|)/2 <= tau < max(1,|xi|) (probe still exists there);
    /// the probe is marked inadmissible instead of rejected.
    bool allow_tau_below_xi = false;
};

/// Deterministic eta rule: standard basis vector with the smallest |xi_a|
/// component, xi projected out, normalized; e_1 when xi = 0.
Probe make_probe(const Grid& grid, std::span<const double> xi, double tau,
                 const ProbeOptions& opts = {});

enum class Route { direct, series };

struct IsozakiValue {
    double tau = 0.0;
    Complex value;
    Route route = Route::direct;
    double diagnostic = 0.0;  // solver residual (direct) or truncation K (series)
};

/// Boundary pairing of the probed solution against the conjugate probe:
/// solve at z = lambda_plus with datum f_plus, trace, pair with f_minus.
IsozakiValue s_direct(const PotentialField& q, const Probe& probe,
                      TraceScheme scheme = TraceScheme::flux1);
/// Same, reusing a prebuilt factorization at z = probe.lambda_plus.
IsozakiValue s_direct(const DirichletSolver& solver, const Probe& probe,
                      TraceScheme scheme = TraceScheme::flux1);

/// Truncated representation of dnu(u_lambda - u_mu) from boundary spectral
/// data alone:
///   (mu - lambda) sum_k <f, psi_k> / ((lambda - lambda_k)(mu - lambda_k)) psi_k.
BoundaryFunction representation_series(const SpectralDataset& ds, const Grid& grid,
                                       Complex lambda, Complex mu, const BoundaryFunction& f,
                                       int K);

struct SeriesTerms {
    struct Term {
        int k = 0;  // 1-based
        Complex A, B, C;
    };
    std::vector<Term> terms;
    std::vector<Complex> partial_sums;  // prefix sums of A+B+C
    int truncation = 0;
};

/// Difference of the probe functionals computed from two spectral datasets
/// alone, as the convergent series sum_k (A_k + B_k + C_k) with
///   A_k = <f+, psi_1k - psi_2k> conj(<f-, psi_1k>) / (lambda+ - lambda_1k)
///   B_k = <f+, psi_2k> conj(<f-, psi_1k - psi_2k>) / (lambda+ - lambda_2k)
///   C_k = (lambda_1k - lambda_2k) <f+, psi_2k> conj(<f-, psi_1k>)
///         / ((lambda+ - lambda_1k)(lambda+ - lambda_2k)).
/// With these denominators the split telescopes exactly, so at full K the sum
/// reproduces the direct-route difference to solver precision.
std::pair<IsozakiValue, SeriesTerms> s_series_diff(const SpectralDataset& ds1,
                                                   const SpectralDataset& ds2,
                                                   const Probe& probe, int K);

struct ParsevalReport {
    double coefficient_sum = 0.0;   // sum_k |<f, psi_k> / (lambda_tau - lambda_k)|^2
    double solution_norm_sq = 0.0;  // ||u||^2_Omega from the direct solve
    double relative_gap = 0.0;
};

/// Parseval identity between the squared spectral coefficients of the probed
/// solution and its interior norm; exact at full K with flux1 traces.
ParsevalReport parseval_check(const SpectralDataset& ds, const PotentialField& q,
                              const Probe& probe, int sign);

struct ConvergenceRow {
    double tau = 0.0;
    Complex s_diff;
    Complex oracle;
    double abs_err = 0.0;
    double residual_diag = 0.0;  // |int v1 q1 conj(f-)| + |int v2 q2 conj(f-)|
    bool skipped = false;        // tau refused (above the grid ceiling, or probe impossible)
};

struct ConvergenceTable {
    std::vector<ConvergenceRow> rows;
    double slope = 0.0;  // log-log slope of abs_err over the evaluated rows
    std::vector<std::string> warnings;

    std::string to_csv() const;
};

/// Sweep the probe frequency and compare the functional difference against
/// the quadrature oracle of the potential-difference Fourier transform.
/// tau above the grid ceiling 1/(4h) is skipped with a warning unless forced.
ConvergenceTable tau_sweep_diff(const PotentialField& q1, const PotentialField& q2,
                                std::span<const double> xi, const std::vector<double>& tau_list,
                                TraceScheme scheme = TraceScheme::onesided2,
                                bool force_tau = false);
ConvergenceTable tau_sweep_diff(const SpectralDataset& ds1, const SpectralDataset& ds2,
                                const Grid& grid, const PotentialField& q1,
                                const PotentialField& q2, std::span<const double> xi,
                                const std::vector<double>& tau_list, int K,
                                bool force_tau = false);

struct ShiftDecayRow {
    double tau = 0.0;
    double norm_resolvent = 0.0;  // || (A - lambda_tau)^{-1} (q f_tau) ||, the analytic forcing
    double norm_bvp = 0.0;        // || u - f_ext || from the discrete solve (carries the h floor)
};

struct ShiftDecayTable {
    std::vector<ShiftDecayRow> rows;
    double slope_resolvent = 0.0;
    double slope_bvp = 0.0;
};

/// Decay of the resolvent correction v = u - f_tau as tau grows.
ShiftDecayTable shift_solution_norm_decay(const PotentialField& q, std::span<const double> xi,
                                          const std::vector<double>& tau_list);

/// |int v q conj(f_tau^-) dx| with v = -(A_q - lambda_tau^+)^{-1}(q f_tau^+),
/// the residual pairing that vanishes in the large-tau limit.
double residual_pairing(const PotentialField& q, const Probe& probe);

}  // namespace bslab
