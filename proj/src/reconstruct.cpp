#include "bslab/reconstruct.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <thread>
#include <sstream>

#include "binio.hpp"
#include "bslab/errors.hpp"

namespace bslab {

namespace {
std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

int FrequencyGrid::index_of_zero() const {
    for (int i = 0; i < size(); ++i) {
        bool zero = true;
        for (int a = 0; a < dim; ++a)
            if (xis[i][a] != 0.0) zero = false;
        if (zero) return i;
    }
    throw std::logic_error("frequency grid lost its zero frequency");
}

FrequencyGrid build_frequency_grid(const Grid& grid, double xi_max) {
    if (!(xi_max >= 0.0)) throw std::invalid_argument("build_frequency_grid: xi_max must be >= 0");
    FrequencyGrid fg;
    fg.dim = grid.dim();
    fg.xi_max = xi_max;
    std::array<double, kMaxDim> base{};
    std::array<int, kMaxDim> M{};
    for (int a = 0; a < fg.dim; ++a) {
        fg.extent[a] = grid.extent(a);
        base[a] = 2.0 * M_PI / grid.extent(a);
        M[a] = static_cast<int>(std::floor(xi_max / base[a] + 1e-12));
    }
    // lexicographic over integer tuples, most negative first
    std::array<int, kMaxDim> k{};
    std::map<std::array<int, kMaxDim>, int> order;
    std::vector<std::array<int, kMaxDim>> tuples;
    const int n = fg.dim;
    std::function<void(int)> rec = [&](int axis) {
        if (axis == n) {
            double norm2 = 0.0;
            for (int a = 0; a < n; ++a) norm2 += (k[a] * base[a]) * (k[a] * base[a]);
            if (norm2 <= xi_max * xi_max * (1.0 + 1e-12)) {
                order[k] = static_cast<int>(tuples.size());
                tuples.push_back(k);
            }
            return;
        }
        for (int v = -M[axis]; v <= M[axis]; ++v) {
            k[axis] = v;
            rec(axis + 1);
        }
    };
    rec(0);

    fg.xis.reserve(tuples.size());
    fg.negation_partner.resize(tuples.size());
    for (const auto& t : tuples) {
        std::array<double, kMaxDim> xi{};
        for (int a = 0; a < n; ++a) xi[a] = t[a] * base[a];
        fg.xis.push_back(xi);
    }
    for (std::size_t i = 0; i < tuples.size(); ++i) {
        std::array<int, kMaxDim> neg{};
        for (int a = 0; a < n; ++a) neg[a] = -tuples[i][a];
        const auto it = order.find(neg);
        if (it == order.end())
            throw std::logic_error("frequency grid is not closed under negation");
        fg.negation_partner[i] = it->second;
    }
    return fg;
}

namespace {

void symmetrize(FourierSamples& s, const FrequencyGrid& fgrid) {
    const std::vector<Complex> raw = s.values;
    s.hermitian_asymmetry = 0.0;
    for (int i = 0; i < fgrid.size(); ++i) {
        const int j = fgrid.negation_partner[i];
        s.hermitian_asymmetry =
            std::max(s.hermitian_asymmetry, std::abs(raw[i] - std::conj(raw[j])));
        s.values[i] = 0.5 * (raw[i] + std::conj(raw[j]));
    }
}

}  // namespace

FourierSamples fourier_sample(const PotentialField& q1, const PotentialField& q2,
                              const FrequencyGrid& fgrid, double tau, TraceScheme scheme) {
    const Grid& g = *q1.grid;
    FourierSamples out;
    out.tau = tau;
    out.route = Route::direct;
    out.values.resize(fgrid.size());

    // one factorization per potential serves every frequency
    const Complex z(tau * tau - 1.0, 2.0 * tau);
    DirichletSolver s1(q1, z);
    DirichletSolver s2(q2, z);
    ProbeOptions opts;
    opts.allow_tau_below_xi = true;  // the Nyquist ceiling may force tau slightly under |xi|
    for (int i = 0; i < fgrid.size(); ++i) {
        const Probe probe =
            make_probe(g, std::span<const double>(fgrid.xis[i].data(), g.dim()), tau, opts);
        out.values[i] = s_direct(s1, probe, scheme).value - s_direct(s2, probe, scheme).value;
    }
    symmetrize(out, fgrid);
    return out;
}

FourierSamples fourier_sample(const SpectralDataset& ds1, const SpectralDataset& ds2,
                              const Grid& grid, const FrequencyGrid& fgrid, double tau, int K,
                              int threads) {
    FourierSamples out;
    out.tau = tau;
    out.route = Route::series;
    out.values.resize(fgrid.size());
    ProbeOptions opts;
    opts.allow_tau_below_xi = true;
    // probes are built sequentially so precondition failures throw cleanly;
    // the per-frequency series sums are pure and run on shared const data
    std::vector<Probe> probes;
    probes.reserve(fgrid.size());
    for (int i = 0; i < fgrid.size(); ++i)
        probes.push_back(
            make_probe(grid, std::span<const double>(fgrid.xis[i].data(), grid.dim()), tau, opts));
    auto sample_range = [&](int begin, int stride) {
        for (int i = begin; i < fgrid.size(); i += stride)
            out.values[i] = s_series_diff(ds1, ds2, probes[i], K).first.value;
    };
    const int workers = std::max(1, std::min(threads, fgrid.size()));
    if (workers == 1) {
        sample_range(0, 1);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(sample_range, w, workers);
        for (auto& t : pool) t.join();
    }
    symmetrize(out, fgrid);
    return out;
}

SynthesizedField invert_fourier(const std::vector<Complex>& samples, const FrequencyGrid& fgrid,
                                const Grid& grid) {
    if (static_cast<int>(samples.size()) != fgrid.size())
        throw std::invalid_argument("invert_fourier: sample count does not match the frequency grid");
    for (int i = 0; i < fgrid.size(); ++i)
        if (fgrid.negation_partner[fgrid.negation_partner[i]] != i)
            throw std::invalid_argument("invert_fourier: frequency grid not closed under negation");

    double volume = 1.0;
    for (int a = 0; a < grid.dim(); ++a) volume *= grid.extent(a);

    SynthesizedField out;
    out.values.resize(grid.interior_count());
    for (int i = 0; i < grid.interior_count(); ++i) {
        const auto x = grid.position_of(i);
        Complex acc(0.0, 0.0);
        for (int s = 0; s < fgrid.size(); ++s) {
            double phase = 0.0;
            for (int a = 0; a < grid.dim(); ++a) phase += fgrid.xis[s][a] * x[a];
            acc += samples[s] * Complex(std::cos(phase), std::sin(phase));
        }
        acc /= volume;
        out.values[i] = acc.real();
        out.imag_residue = std::max(out.imag_residue, std::abs(acc.imag()));
    }
    return out;
}

ReconstructionMetrics error_metrics(const RealVec& field, const Grid& grid, const RealVec* truth,
                                    double hermitian_asymmetry, double imag_residue) {
    ReconstructionMetrics m;
    m.hermitian_asymmetry = hermitian_asymmetry;
    m.imag_residue = imag_residue;
    m.field_l2_norm = field.norm() * std::sqrt(grid.cell_volume());
    if (truth != nullptr) {
        if (truth->size() != field.size())
            throw std::invalid_argument("error_metrics: truth size mismatch");
        const double tn = truth->norm() * std::sqrt(grid.cell_volume());
        const double diff = (field - *truth).norm() * std::sqrt(grid.cell_volume());
        m.rel_l2_error = tn > 0.0 ? diff / tn : diff;
        m.max_error = (field - *truth).cwiseAbs().maxCoeff();
    }
    return m;
}

namespace {
ReconstructionResult assemble_result(FourierSamples samples, FrequencyGrid fgrid,
                                     const Grid& grid, const RealVec* truth) {
    ReconstructionResult r;
    r.tau = samples.tau;
    r.route = samples.route;
    const SynthesizedField field = invert_fourier(samples.values, fgrid, grid);
    r.field = field.values;
    r.metrics =
        error_metrics(r.field, grid, truth, samples.hermitian_asymmetry, field.imag_residue);
    r.samples = std::move(samples.values);
    r.fgrid = std::move(fgrid);
    return r;
}
}  // namespace

ReconstructionResult reconstruct_direct(const PotentialField& q1, const PotentialField& q2,
                                        const FrequencyGrid& fgrid, double tau,
                                        TraceScheme scheme, const RealVec* truth) {
    return assemble_result(fourier_sample(q1, q2, fgrid, tau, scheme), fgrid, *q1.grid, truth);
}

ReconstructionResult reconstruct_series(const SpectralDataset& ds1, const SpectralDataset& ds2,
                                        const Grid& grid, const FrequencyGrid& fgrid, double tau,
                                        int K, const RealVec* truth, int threads) {
    return assemble_result(fourier_sample(ds1, ds2, grid, fgrid, tau, K, threads), fgrid, grid,
                           truth);
}

// Reconstruction record: same envelope as the dataset container, version 2.
void save_reconstruction(const ReconstructionResult& r, const std::string& path) {
    binio::Writer w;
    w.raw("BSD1", 4);
    w.u32(2);
    w.u32(static_cast<std::uint32_t>(r.fgrid.dim));
    for (int a = 0; a < r.fgrid.dim; ++a) w.f64(r.fgrid.extent[a]);
    w.f64(r.fgrid.xi_max);
    w.f64(r.tau);
    w.u8(r.route == Route::direct ? 0 : 1);
    w.u32(static_cast<std::uint32_t>(r.fgrid.size()));
    for (int i = 0; i < r.fgrid.size(); ++i) {
        for (int a = 0; a < r.fgrid.dim; ++a) w.f64(r.fgrid.xis[i][a]);
        w.f64(r.samples[i].real());
        w.f64(r.samples[i].imag());
    }
    w.u32(static_cast<std::uint32_t>(r.field.size()));
    for (int i = 0; i < r.field.size(); ++i) w.f64(r.field[i]);
    w.f64(r.metrics.rel_l2_error);
    w.f64(r.metrics.max_error);
    w.f64(r.metrics.hermitian_asymmetry);
    w.f64(r.metrics.imag_residue);
    w.f64(r.metrics.field_l2_norm);
    w.finish_with_crc();
    binio::write_file(path, w.bytes());
}

std::string reconstruction_csv(const ReconstructionResult& r) {
    std::ostringstream os;
    for (int a = 0; a < r.fgrid.dim; ++a) os << "xi_" << a << ',';
    os << "re_qhat,im_qhat\n";
    for (int i = 0; i < r.fgrid.size(); ++i) {
        for (int a = 0; a < r.fgrid.dim; ++a) os << fmt(r.fgrid.xis[i][a]) << ',';
        os << fmt(r.samples[i].real()) << ',' << fmt(r.samples[i].imag()) << '\n';
    }
    return os.str();
}

}  // namespace bslab
