#include "bslab/commands.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <thread>

#include "bslab/errors.hpp"

namespace bslab {

namespace {

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw NumericalError("cannot write " + path);
    out << text;
}

std::filesystem::path ensure_outdir(const RunConfig& cfg) {
    std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

struct ForwardData {
    Grid grid;
    PotentialField q1, q2;
    SpectralDataset ds1, ds2;
};

ForwardData build_forward(const RunConfig& cfg) {
    ForwardData d{cfg.make_grid(), {}, {}, {}, {}};
    d.q1 = sample_potential(cfg.q1, d.grid);
    d.q2 = sample_potential(cfg.q2, d.grid);
    const int K = cfg.effective_K();
    d.ds1 = build_dataset(d.q1, K, cfg.spectra.scheme, cfg.spectra.tol);
    if (cfg.perturbation) {
        d.ds2 = perturb_dataset(d.ds1, cfg.perturbation->mode, cfg.perturbation->magnitude,
                                cfg.seed);
    } else {
        d.ds2 = build_dataset(d.q2, K, cfg.spectra.scheme, cfg.spectra.tol);
    }
    return d;
}

double pick_tau(const RunConfig& cfg, const Grid& grid) {
    const double ceiling = grid.nyquist_tau();
    if (cfg.isozaki.tau_list.empty()) return ceiling;
    const double tau = cfg.isozaki.tau_list.back();
    if (tau > ceiling && !cfg.isozaki.force_tau) return ceiling;
    return tau;
}

}  // namespace

void cmd_forward(const RunConfig& cfg, std::ostream& log) {
    const auto dir = ensure_outdir(cfg);
    const ForwardData d = build_forward(cfg);
    for (const auto& w : d.q1.warnings) log << "warning (q1): " << w << '\n';
    for (const auto& w : d.q2.warnings) log << "warning (q2): " << w << '\n';

    const auto p1 = (dir / "dataset1.bsd").string();
    const auto p2 = (dir / "dataset2.bsd").string();
    save_dataset(d.ds1, p1);
    save_dataset(d.ds2, p2);

    log << "forward: K=" << d.ds1.K << " eigenpairs per dataset, trace scheme "
        << to_string(d.ds1.trace_scheme) << '\n';
    log << "  dataset1 " << p1 << "  lambda_1=" << d.ds1.eigenvalues[0]
        << " lambda_K=" << d.ds1.eigenvalues[d.ds1.K - 1]
        << " trace bound C=" << d.ds1.trace_bound_constant << '\n';
    log << "  dataset2 " << p2 << "  lambda_1=" << d.ds2.eigenvalues[0]
        << " lambda_K=" << d.ds2.eigenvalues[d.ds2.K - 1]
        << " trace bound C=" << d.ds2.trace_bound_constant
        << " (provenance " << to_string(d.ds2.provenance) << ")\n";
}

void cmd_reconstruct(const RunConfig& cfg, std::ostream& log) {
    if (!cfg.isozaki.fgrid_xi_max)
        throw ConfigError("reconstruct needs isozaki.fgrid_xi_max");
    const auto dir = ensure_outdir(cfg);
    const Grid grid = cfg.make_grid();
    const PotentialField q1 = sample_potential(cfg.q1, grid);
    const PotentialField q2 = sample_potential(cfg.q2, grid);
    const FrequencyGrid fgrid = build_frequency_grid(grid, *cfg.isozaki.fgrid_xi_max);
    const double tau = pick_tau(cfg, grid);
    log << "reconstruct: " << fgrid.size() << " frequencies, tau=" << tau
        << " (grid ceiling " << grid.nyquist_tau() << ")\n";

    // the truth is available whenever the run is configured from potentials
    RealVec truth = q1.values - q2.values;
    const bool synthetic_pair = !cfg.perturbation.has_value();

    auto report = [&](const ReconstructionResult& r, const char* tag) {
        const auto base = dir / (std::string("reconstruction_") + tag);
        save_reconstruction(r, base.string() + ".bsd");
        write_text(base.string() + ".csv", reconstruction_csv(r));
        log << "  [" << tag << "] field L2 norm " << r.metrics.field_l2_norm;
        if (r.metrics.rel_l2_error >= 0.0)
            log << ", relative L2 error " << r.metrics.rel_l2_error << ", max error "
                << r.metrics.max_error;
        log << ", hermitian asymmetry " << r.metrics.hermitian_asymmetry << ", imag residue "
            << r.metrics.imag_residue << '\n';
    };

    std::optional<ReconstructionResult> direct, series;
    if (cfg.isozaki.route == SweepRoute::direct || cfg.isozaki.route == SweepRoute::both) {
        direct = reconstruct_direct(q1, q2, fgrid, tau, cfg.spectra.scheme,
                                    synthetic_pair ? &truth : nullptr);
        report(*direct, "direct");
    }
    if (cfg.isozaki.route == SweepRoute::series || cfg.isozaki.route == SweepRoute::both) {
        const ForwardData d = build_forward(cfg);
        series = reconstruct_series(d.ds1, d.ds2, grid, fgrid, tau, d.ds1.K,
                                    synthetic_pair ? &truth : nullptr, cfg.threads);
        report(*series, "series");
    }
    if (direct && series) {
        const double gap = (direct->field - series->field).norm() * std::sqrt(grid.cell_volume());
        log << "  route gap ||direct - series||_L2 = " << gap << '\n';
    }
}

void cmd_sweep(const RunConfig& cfg, std::ostream& log) {
    if (cfg.isozaki.xi_list.empty()) throw ConfigError("sweep needs isozaki.xi_list");
    if (cfg.isozaki.tau_list.empty()) throw ConfigError("sweep needs isozaki.tau_list");
    const auto dir = ensure_outdir(cfg);
    const Grid grid = cfg.make_grid();
    const PotentialField q1 = sample_potential(cfg.q1, grid);
    const PotentialField q2 = sample_potential(cfg.q2, grid);

    std::optional<ForwardData> fwd;
    if (cfg.isozaki.route != SweepRoute::direct) fwd = build_forward(cfg);

    // frequencies are independent; run them on workers and merge in order
    const int count = static_cast<int>(cfg.isozaki.xi_list.size());
    std::vector<ConvergenceTable> tables(count);
    std::vector<std::exception_ptr> errors(count);
    auto run_one = [&](int i) {
        try {
            const auto& xi = cfg.isozaki.xi_list[i];
            if (cfg.isozaki.route == SweepRoute::direct) {
                tables[i] = tau_sweep_diff(q1, q2, xi, cfg.isozaki.tau_list, cfg.spectra.scheme,
                                           cfg.isozaki.force_tau);
            } else {
                tables[i] = tau_sweep_diff(fwd->ds1, fwd->ds2, grid, q1, q2, xi,
                                           cfg.isozaki.tau_list, fwd->ds1.K,
                                           cfg.isozaki.force_tau);
            }
        } catch (...) {
            errors[i] = std::current_exception();
        }
    };
    const int workers = std::max(1, std::min(cfg.threads, count));
    if (workers == 1) {
        for (int i = 0; i < count; ++i) run_one(i);
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                for (int i = w; i < count; i += workers) run_one(i);
            });
        }
        for (auto& t : pool) t.join();
    }
    for (int i = 0; i < count; ++i)
        if (errors[i]) std::rethrow_exception(errors[i]);

    for (int i = 0; i < count; ++i) {
        const auto path = dir / ("sweep_xi" + std::to_string(i) + ".csv");
        write_text(path.string(), tables[i].to_csv());
        for (const auto& w : tables[i].warnings) log << "warning: " << w << '\n';
        log << "sweep xi" << i << " -> " << path.string() << " (error slope " << tables[i].slope
            << ")\n";
    }
}

VerificationReport cmd_verify(const RunConfig& cfg, const std::string& which, std::ostream& log) {
    const auto dir = ensure_outdir(cfg);
    const VerificationReport rep = run_verification(cfg, which);
    write_text((dir / "report.tsv").string(), rep.to_tsv());
    rep.print_human(log);
    log << "report written to " << (dir / "report.tsv").string() << '\n';
    return rep;
}

}  // namespace bslab
