#pragma once

#include "bslab/isozaki.hpp"

namespace bslab {

/// Frequencies (2 pi / L_a) k_a for integer tuples k, restricted to
/// |xi| <= xi_max. Contains 0, closed under negation, lexicographic order
/// over the integer tuples (documented, part of the container format).
struct FrequencyGrid {
    int dim = 0;
    std::array<double, kMaxDim> extent{};
    double xi_max = 0.0;
    std::vector<std::array<double, kMaxDim>> xis;
    std::vector<int> negation_partner;  // index of -xi for each xi

    int size() const { return static_cast<int>(xis.size()); }
    int index_of_zero() const;
};

FrequencyGrid build_frequency_grid(const Grid& grid, double xi_max);

/// Probe-based samples of the Fourier transform of q1 - q2, Hermitian
/// symmetrized over negated-frequency pairs before inversion.
struct FourierSamples {
    std::vector<Complex> values;   // one per frequency, symmetrized
    double tau = 0.0;
    Route route = Route::direct;
    double hermitian_asymmetry = 0.0;  // max |s(xi) - conj(s(-xi))| before symmetrization
};

FourierSamples fourier_sample(const PotentialField& q1, const PotentialField& q2,
                              const FrequencyGrid& fgrid, double tau,
                              TraceScheme scheme = TraceScheme::onesided2);
/// Series-route sampling is pure linear algebra on shared immutable data, so
/// the frequencies may be computed by several workers; results are written by
/// index, keeping the output independent of the thread count.
FourierSamples fourier_sample(const SpectralDataset& ds1, const SpectralDataset& ds2,
                              const Grid& grid, const FrequencyGrid& fgrid, double tau, int K,
                              int threads = 1);

/// Truncated Fourier synthesis (1/|Omega|) sum_xi s(xi) exp(i xi . x) on the
/// interior nodes; the imaginary residue is measured and dropped.
struct SynthesizedField {
    RealVec values;             // real part, one per interior node
    double imag_residue = 0.0;  // max |imaginary part| before dropping
};

SynthesizedField invert_fourier(const std::vector<Complex>& samples, const FrequencyGrid& fgrid,
                                const Grid& grid);

struct ReconstructionMetrics {
    double rel_l2_error = -1.0;  // vs truth, when known (-1 otherwise)
    double max_error = -1.0;
    double hermitian_asymmetry = 0.0;
    double imag_residue = 0.0;
    double field_l2_norm = 0.0;
};

struct ReconstructionResult {
    FrequencyGrid fgrid;
    std::vector<Complex> samples;
    double tau = 0.0;
    Route route = Route::direct;
    RealVec field;  // real reconstruction of q1 - q2 on the interior nodes
    ReconstructionMetrics metrics;
};

ReconstructionMetrics error_metrics(const RealVec& field, const Grid& grid,
                                    const RealVec* truth, double hermitian_asymmetry,
                                    double imag_residue);

/// End-to-end: sample the fingerprint, symmetrize, synthesize, measure.
ReconstructionResult reconstruct_direct(const PotentialField& q1, const PotentialField& q2,
                                        const FrequencyGrid& fgrid, double tau,
                                        TraceScheme scheme = TraceScheme::onesided2,
                                        const RealVec* truth = nullptr);
ReconstructionResult reconstruct_series(const SpectralDataset& ds1, const SpectralDataset& ds2,
                                        const Grid& grid, const FrequencyGrid& fgrid, double tau,
                                        int K, const RealVec* truth = nullptr, int threads = 1);

/// Container (version 2 of the dataset envelope) and CSV of (xi, Re, Im).
void save_reconstruction(const ReconstructionResult& r, const std::string& path);
std::string reconstruction_csv(const ReconstructionResult& r);

}  // namespace bslab
