#pragma once

#include <cstdint>
#include <string>

#include "bslab/operators.hpp"

namespace bslab {

enum class TraceScheme : std::uint8_t {
    flux1 = 0,      // (u(b) - u(b_in))/h, the exact partner of the discrete Green identity
    onesided2 = 1,  // (3u(b) - 4u(b_in) + u(b_in2))/(2h), second-order accurate
};

enum class Provenance : std::uint8_t { computed = 0, perturbed = 1, loaded = 2 };

const char* to_string(TraceScheme s);
const char* to_string(Provenance p);

/// The lowest K eigenpairs of a discrete operator, orthonormal under the
/// inner_omega weight, eigenvalues ascending. Eigenvectors are real and the
/// basis inside numerically degenerate clusters is canonicalized, so the
/// same matrix always yields the same eigenvectors.
struct Eigensystem {
    const Grid* grid = nullptr;
    RealVec eigenvalues;  // ascending
    RMat vectors;         // interior_count x K, column k = phi_k
    double tol = 0.0;

    GridField eigenfield(int k) const;
};

struct EigenOptions {
    int dense_threshold = 4096;  // dense solve at or below, shift-invert Lanczos above
    int max_iterations = 0;      // 0 = automatic budget
    std::uint64_t seed = 0x5eed;
};

Eigensystem compute_eigenpairs(const DiscreteOperator& op, int K, double tol,
                               const EigenOptions& opts = {});

/// Outward-normal boundary trace of a grid field. flux1 uses the boundary
/// value (zero when absent) and the adjacent interior value; onesided2 adds
/// the second interior node.
BoundaryFunction boundary_trace(const GridField& phi, const Grid& grid, TraceScheme scheme);

/// Boundary spectral data: eigenvalues lambda_k and traces psi_k, plus the
/// grid metadata needed to reconnect the traces to a Grid.
struct SpectralDataset {
    int dim = 0;
    std::array<double, kMaxDim> extent{};
    std::array<int, kMaxDim> res{};
    int K = 0;
    RealVec eigenvalues;
    CMat traces;  // face_count x K, column k = psi_k
    TraceScheme trace_scheme = TraceScheme::flux1;
    Provenance provenance = Provenance::computed;
    double trace_bound_constant = 0.0;  // recorded C with ||psi_k|| <= C (1+|lambda_k|)

    Grid make_grid() const;
    bool grid_matches(const Grid& g) const;
};

SpectralDataset build_dataset(const PotentialField& q, int K, TraceScheme scheme, double tol,
                              const EigenOptions& opts = {});

SpectralDataset dataset_from_eigensystem(const Eigensystem& es, const Grid& grid,
                                         TraceScheme scheme);

void save_dataset(const SpectralDataset& ds, const std::string& path);
SpectralDataset load_dataset(const std::string& path);

enum class PerturbMode {
    eigen_shift_decaying,   // lambda_k += magnitude / k         (hypothesis-preserving)
    eigen_shift_constant,   // lambda_k += magnitude             (hypothesis-violating)
    trace_noise_l2,         // psi_k += magnitude w_k g_k with sum ||.||^2 <= magnitude^2
    trace_noise_constant,   // psi_k += magnitude g_k, ||g_k||_Gamma = 1
    drop_leading_j,         // remove the first round(magnitude) eigenpairs
};

const char* to_string(PerturbMode m);

SpectralDataset perturb_dataset(const SpectralDataset& ds, PerturbMode mode, double magnitude,
                                std::uint64_t seed);

struct TraceBoundReport {
    RealVec ratios;             // r_k = ||psi_k|| / (1 + |lambda_k|)
    double max_ratio = 0.0;
    double overall_median = 0.0;
    double top_decile_median = 0.0;
    bool flagged = false;       // top-decile median > 3x overall median
};

/// Boundedness heuristic for the trace estimate ||psi_k|| <= C (1+|lambda_k|).
TraceBoundReport verify_trace_bound(const SpectralDataset& ds);

}  // namespace bslab
