#include "bslab/spectra.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "bslab/errors.hpp"
#include "bslab/rng.hpp"

namespace bslab {

const char* to_string(TraceScheme s) {
    return s == TraceScheme::flux1 ? "flux1" : "onesided2";
}

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::computed: return "computed";
        case Provenance::perturbed: return "perturbed";
        case Provenance::loaded: return "loaded";
    }
    return "?";
}

const char* to_string(PerturbMode m) {
    switch (m) {
        case PerturbMode::eigen_shift_decaying: return "eigen_shift_decaying";
        case PerturbMode::eigen_shift_constant: return "eigen_shift_constant";
        case PerturbMode::trace_noise_l2: return "trace_noise_l2";
        case PerturbMode::trace_noise_constant: return "trace_noise_constant";
        case PerturbMode::drop_leading_j: return "drop_leading_j";
    }
    return "?";
}

GridField Eigensystem::eigenfield(int k) const {
    GridField f = GridField::zero(*grid);
    f.values = vectors.col(k).cast<Complex>();
    return f;
}

namespace {

/// Deterministic basis inside numerically degenerate clusters: replace the
/// solver's arbitrary cluster basis by Gram-Schmidt of the projections of the
/// coordinate directions e_0, e_1, ... (interior index order) onto the
/// cluster subspace, then fix signs. The result depends only on the subspace.
void canonicalize(RealVec& lambda, RMat& V) {
    const int K = static_cast<int>(lambda.size());
    const int N = static_cast<int>(V.rows());
    int start = 0;
    while (start < K) {
        int end = start + 1;
        while (end < K &&
               lambda[end] - lambda[end - 1] < 1e-8 * (1.0 + std::abs(lambda[end])))
            ++end;
        const int d = end - start;
        if (d > 1) {
            RMat basis = V.middleCols(start, d);  // euclidean-orthonormal
            RMat out(N, d);
            int filled = 0;
            for (int idx = 0; idx < N && filled < d; ++idx) {
                // projection of e_idx onto the cluster subspace
                RealVec w = basis * basis.row(idx).transpose();
                for (int j = 0; j < filled; ++j) w -= out.col(j).dot(w) * out.col(j);
                const double nrm = w.norm();
                if (nrm > 1e-6) {
                    out.col(filled) = w / nrm;
                    ++filled;
                }
            }
            // fall back to the solver basis for any remaining directions
            for (int j = 0; j < d && filled < d; ++j) {
                RealVec w = basis.col(j);
                for (int m = 0; m < filled; ++m) w -= out.col(m).dot(w) * out.col(m);
                const double nrm = w.norm();
                if (nrm > 1e-8) {
                    out.col(filled) = w / nrm;
                    ++filled;
                }
            }
            if (filled < d)
                throw NumericalError("cluster canonicalization lost a direction");
            V.middleCols(start, d) = out;
        }
        start = end;
    }
    // sign rule: first component exceeding 1e-8 of the max magnitude is positive
    for (int k = 0; k < K; ++k) {
        const double cap = V.col(k).cwiseAbs().maxCoeff();
        for (int i = 0; i < N; ++i) {
            if (std::abs(V(i, k)) > 1e-8 * cap) {
                if (V(i, k) < 0.0) V.col(k) = -V.col(k);
                break;
            }
        }
    }
}

Eigensystem finalize(const DiscreteOperator& op, RealVec lambda, RMat V, double tol) {
    canonicalize(lambda, V);
    Eigensystem es;
    es.grid = op.grid;
    es.tol = tol;
    es.eigenvalues = std::move(lambda);
    // Omega-orthonormal: euclidean-orthonormal columns scaled by h^{-n/2}
    es.vectors = V / std::sqrt(op.grid->cell_volume());
    // residual guarantee
    const int K = static_cast<int>(es.eigenvalues.size());
    for (int k = 0; k < K; ++k) {
        const double r =
            (op.matrix * es.vectors.col(k) - es.eigenvalues[k] * es.vectors.col(k)).norm() /
            es.vectors.col(k).norm();
        if (!(r <= 100.0 * tol * (1.0 + std::abs(es.eigenvalues[k])))) {
            std::ostringstream os;
            os << "eigensolver residual " << r << " out of tolerance at index " << k + 1;
            throw NumericalError(os.str());
        }
    }
    return es;
}

Eigensystem dense_eigenpairs(const DiscreteOperator& op, int K, double tol) {
    const RMat A = RMat(op.matrix);
    Eigen::SelfAdjointEigenSolver<RMat> es(A);
    if (es.info() != Eigen::Success)
        throw NumericalError("dense symmetric eigensolver failed to converge at index 1");
    RealVec lambda = es.eigenvalues().head(K);
    RMat V = es.eigenvectors().leftCols(K);
    return finalize(op, std::move(lambda), std::move(V), tol);
}

/// Shift-invert Lanczos with full reorthogonalization. The shift sits below
/// the whole spectrum, so the lowest eigenvalues of A map to the largest,
/// well-separated eigenvalues of (A - sigma)^{-1}.
Eigensystem lanczos_eigenpairs(const DiscreteOperator& op, int K, double tol,
                               const EigenOptions& opts) {
    const int N = static_cast<int>(op.matrix.rows());
    const double sigma = std::min(0.0, op.potential_min) - 1.0;

    SparseReal shifted = op.matrix;
    for (int i = 0; i < N; ++i) shifted.coeffRef(i, i) -= sigma;
    shifted.makeCompressed();
    Eigen::SimplicialLDLT<SparseReal> ldlt(shifted);
    if (ldlt.info() != Eigen::Success)
        throw NumericalError("shift-invert factorization failed");

    const int budget =
        opts.max_iterations > 0 ? opts.max_iterations : std::min(N, std::max(8 * K, 400));

    RMat basis(N, std::min(budget + 1, N));
    std::vector<double> alpha, beta;
    Rng rng(opts.seed);
    RealVec v(N);
    for (int i = 0; i < N; ++i) v[i] = rng.uniform(-1.0, 1.0);
    v.normalize();
    basis.col(0) = v;

    int built = 0;  // number of completed Lanczos columns
    auto extract = [&](int j) -> std::pair<RealVec, RMat> {
        RMat T = RMat::Zero(j, j);
        for (int i = 0; i < j; ++i) {
            T(i, i) = alpha[i];
            if (i + 1 < j) {
                T(i, i + 1) = beta[i];
                T(i + 1, i) = beta[i];
            }
        }
        Eigen::SelfAdjointEigenSolver<RMat> tes(T);
        return {tes.eigenvalues(), tes.eigenvectors()};
    };

    for (int j = 0; j < budget && j < N; ++j) {
        RealVec w = ldlt.solve(basis.col(j));
        const double a = basis.col(j).dot(w);
        alpha.push_back(a);
        w -= a * basis.col(j);
        if (j > 0) w -= beta[j - 1] * basis.col(j - 1);
        // full reorthogonalization, twice for safety
        for (int pass = 0; pass < 2; ++pass)
            w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
        double b = w.norm();
        if (b < 1e-14) {
            // invariant subspace hit: restart with a fresh orthogonal direction
            for (int i = 0; i < N; ++i) w[i] = rng.uniform(-1.0, 1.0);
            for (int pass = 0; pass < 2; ++pass)
                w -= basis.leftCols(j + 1) * (basis.leftCols(j + 1).transpose() * w);
            b = w.norm();
            if (b < 1e-14) {
                built = j + 1;
                break;
            }
        }
        beta.push_back(b);
        if (j + 1 < basis.cols()) basis.col(j + 1) = w / b;
        built = j + 1;

        // convergence test: explicit residuals of the K mapped Ritz pairs
        // (the tridiagonal residual estimate is far too optimistic after the
        // shift-invert mapping, so check A phi - lambda phi directly)
        if (built >= K + 2 && (built % 10 == 0 || built == budget)) {
            auto [theta, Y] = extract(built);
            bool done = true;
            for (int t = 0; t < K && done; ++t) {
                const int col = built - 1 - t;  // largest thetas at the tail
                const double lam = sigma + 1.0 / theta[col];
                const RealVec x = basis.leftCols(built) * Y.col(col);
                const double resid = (op.matrix * x - lam * x).norm() / x.norm();
                if (resid > 0.5 * tol * (1.0 + std::abs(lam))) done = false;
            }
            if (done) break;
        }
    }

    auto [theta, Y] = extract(built);
    if (built < K)
        throw NumericalError("Lanczos stopped before reaching the requested count at index " +
                             std::to_string(built + 1));
    RealVec lambda(K);
    RMat V(N, K);
    for (int t = 0; t < K; ++t) {
        // t-th largest theta of the inverse operator is the t-th smallest
        // eigenvalue of A
        const int col = built - 1 - t;
        lambda[t] = sigma + 1.0 / theta[col];
        V.col(t) = basis.leftCols(built) * Y.col(col);
    }
    // tighten orthogonality of the Ritz vectors
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j < k; ++j) V.col(k) -= V.col(j).dot(V.col(k)) * V.col(j);
        V.col(k).normalize();
    }
    for (int k = 0; k < K; ++k) {
        const double r = (op.matrix * V.col(k) - lambda[k] * V.col(k)).norm();
        if (!(r <= tol * (1.0 + std::abs(lambda[k])))) {
            std::ostringstream os;
            os << "Lanczos failed to converge at index " << k + 1 << " (residual " << r << ")";
            throw NumericalError(os.str());
        }
    }
    return finalize(op, std::move(lambda), std::move(V), tol);
}

}  // namespace

Eigensystem compute_eigenpairs(const DiscreteOperator& op, int K, double tol,
                               const EigenOptions& opts) {
    const int N = static_cast<int>(op.matrix.rows());
    if (K < 1 || K > N)
        throw std::invalid_argument("compute_eigenpairs: K must be in [1, interior node count]");
    if (!(tol > 0.0)) throw std::invalid_argument("compute_eigenpairs: tol must be positive");
    if (N <= opts.dense_threshold) return dense_eigenpairs(op, K, tol);
    return lanczos_eigenpairs(op, K, tol, opts);
}

BoundaryFunction boundary_trace(const GridField& phi, const Grid& grid, TraceScheme scheme) {
    if (phi.grid == nullptr || !phi.grid->compatible(grid))
        throw std::invalid_argument("boundary_trace: grid mismatch");
    BoundaryFunction psi = BoundaryFunction::zero(grid);
    const auto& faces = grid.faces();
    for (int b = 0; b < grid.face_count(); ++b) {
        const BoundaryFace& f = faces[b];
        const double h = grid.spacing(f.axis);
        const Complex ub = phi.boundary ? (*phi.boundary)[b] : Complex(0, 0);
        if (scheme == TraceScheme::flux1) {
            psi.values[b] = (ub - phi.values[f.interior]) / h;
        } else {
            psi.values[b] =
                (3.0 * ub - 4.0 * phi.values[f.interior] + phi.values[f.interior2]) / (2.0 * h);
        }
    }
    return psi;
}

Grid SpectralDataset::make_grid() const {
    std::array<double, kMaxDim> e = extent;
    std::array<int, kMaxDim> r = res;
    return Grid::build(dim, std::span<const double>(e.data(), dim),
                       std::span<const int>(r.data(), dim));
}

bool SpectralDataset::grid_matches(const Grid& g) const {
    if (g.dim() != dim) return false;
    for (int a = 0; a < dim; ++a)
        if (g.res(a) != res[a] || g.extent(a) != extent[a]) return false;
    return true;
}

SpectralDataset dataset_from_eigensystem(const Eigensystem& es, const Grid& grid,
                                         TraceScheme scheme) {
    SpectralDataset ds;
    ds.dim = grid.dim();
    for (int a = 0; a < grid.dim(); ++a) {
        ds.extent[a] = grid.extent(a);
        ds.res[a] = grid.res(a);
    }
    ds.K = static_cast<int>(es.eigenvalues.size());
    ds.eigenvalues = es.eigenvalues;
    ds.traces.resize(grid.face_count(), ds.K);
    ds.trace_scheme = scheme;
    ds.provenance = Provenance::computed;
    for (int k = 0; k < ds.K; ++k) {
        const BoundaryFunction psi = boundary_trace(es.eigenfield(k), grid, scheme);
        ds.traces.col(k) = psi.values;
        const double r = norm_gamma(psi) / (1.0 + std::abs(ds.eigenvalues[k]));
        ds.trace_bound_constant = std::max(ds.trace_bound_constant, r);
    }
    return ds;
}

SpectralDataset build_dataset(const PotentialField& q, int K, TraceScheme scheme, double tol,
                              const EigenOptions& opts) {
    const DiscreteOperator op = assemble_operator(q);
    const Eigensystem es = compute_eigenpairs(op, K, tol, opts);
    return dataset_from_eigensystem(es, *q.grid, scheme);
}

SpectralDataset perturb_dataset(const SpectralDataset& ds, PerturbMode mode, double magnitude,
                                std::uint64_t seed) {
    SpectralDataset out = ds;
    out.provenance = Provenance::perturbed;
    Rng rng(seed);
    const int nfaces = static_cast<int>(ds.traces.rows());

    // unit-Gamma-norm pseudo-random boundary function for trace modes
    const Grid grid = ds.make_grid();
    auto random_direction = [&]() {
        BoundaryFunction gdir = BoundaryFunction::zero(grid);
        for (int b = 0; b < nfaces; ++b) gdir.values[b] = Complex(rng.normal(), 0.0);
        const double n = norm_gamma(gdir);
        gdir.values /= n;
        return gdir.values;
    };

    switch (mode) {
        case PerturbMode::eigen_shift_decaying:
            for (int k = 0; k < out.K; ++k) out.eigenvalues[k] += magnitude / (k + 1);
            break;
        case PerturbMode::eigen_shift_constant:
            for (int k = 0; k < out.K; ++k) out.eigenvalues[k] += magnitude;
            break;
        case PerturbMode::trace_noise_l2: {
            // weights (sqrt6/pi)/k make the squared Gamma-norms sum to <= magnitude^2
            const double scale = std::sqrt(6.0) / M_PI;
            for (int k = 0; k < out.K; ++k)
                out.traces.col(k) += magnitude * scale / (k + 1) * random_direction();
            break;
        }
        case PerturbMode::trace_noise_constant: {
            // the same unit-norm direction in every mode: a systematic,
            // non-decaying bias whose tail energy sum diverges with K
            const Vec dir = random_direction();
            for (int k = 0; k < out.K; ++k) out.traces.col(k) += magnitude * dir;
            break;
        }
        case PerturbMode::drop_leading_j: {
            const int j = std::max(0, static_cast<int>(std::llround(magnitude)));
            if (j >= ds.K)
                throw std::invalid_argument("drop_leading_j: would drop the whole dataset");
            out.K = ds.K - j;
            out.eigenvalues = ds.eigenvalues.tail(out.K).eval();
            out.traces = ds.traces.rightCols(out.K).eval();
            break;
        }
    }
    return out;
}

TraceBoundReport verify_trace_bound(const SpectralDataset& ds) {
    if (ds.K < 10) throw std::invalid_argument("verify_trace_bound: needs K >= 10");
    const Grid grid = ds.make_grid();
    TraceBoundReport rep;
    rep.ratios.resize(ds.K);
    for (int k = 0; k < ds.K; ++k) {
        BoundaryFunction psi{&grid, ds.traces.col(k)};
        rep.ratios[k] = norm_gamma(psi) / (1.0 + std::abs(ds.eigenvalues[k]));
    }
    rep.max_ratio = rep.ratios.maxCoeff();

    auto median_of = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t n = v.size();
        return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
    };
    std::vector<double> all(rep.ratios.data(), rep.ratios.data() + ds.K);
    rep.overall_median = median_of(all);
    const int decile = std::max(1, ds.K / 10);
    std::vector<double> top(rep.ratios.data() + ds.K - decile, rep.ratios.data() + ds.K);
    rep.top_decile_median = median_of(top);
    rep.flagged = rep.top_decile_median > 3.0 * rep.overall_median;
    return rep;
}

}  // namespace bslab
