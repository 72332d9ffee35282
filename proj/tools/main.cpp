// bslab: boundary spectral data laboratory for the discrete Schrodinger
// operator. Generates Dirichlet eigenpair boundary data, probes it with
// complex-exponential test functions, and reconstructs potential differences
// from the boundary data alone.

#include <CLI11.hpp>

#include <iostream>

#include "bslab/commands.hpp"
#include "bslab/errors.hpp"

namespace {

struct CommonArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int threads = 0;
    bool force_tau = false;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--config", args.config_path, "run configuration file")->required();
    cmd->add_option("--out", args.out_dir, "output directory (overrides config)");
    cmd->add_option("--seed", args.seed, "seed override")->each([&](const std::string&) {
        args.seed_set = true;
    });
    cmd->add_option("--threads", args.threads, "worker threads (overrides config)");
    cmd->add_flag("--force-tau", args.force_tau,
                  "run tau values above the grid ceiling 1/(4h) (with a warning)");
}

bslab::RunConfig load(const CommonArgs& args) {
    bslab::RunConfig cfg = bslab::load_config_file(args.config_path);
    if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
    if (args.seed_set) cfg.seed = args.seed;
    if (args.threads > 0) cfg.threads = args.threads;
    if (args.force_tau) cfg.isozaki.force_tau = true;
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"boundary spectral data laboratory"};
    app.require_subcommand(1);

    CommonArgs fwd_args, rec_args, sweep_args, verify_args;
    std::string verify_which = "all";

    CLI::App* fwd = app.add_subcommand("forward", "generate boundary spectral datasets");
    add_common(fwd, fwd_args);
    CLI::App* rec = app.add_subcommand("reconstruct", "reconstruct the potential difference");
    add_common(rec, rec_args);
    CLI::App* sweep = app.add_subcommand("sweep", "tau sweeps against the Fourier oracle");
    add_common(sweep, sweep_args);
    CLI::App* verify = app.add_subcommand("verify", "run verification checks");
    add_common(verify, verify_args);
    verify->add_option("check", verify_which,
                       "check name (lambda_decay|trace_estimate|resolvent_decay|"
                       "residual_decay|parseval|trace_ratio|all)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (fwd->parsed()) {
            bslab::cmd_forward(load(fwd_args), std::cout);
        } else if (rec->parsed()) {
            bslab::cmd_reconstruct(load(rec_args), std::cout);
        } else if (sweep->parsed()) {
            bslab::cmd_sweep(load(sweep_args), std::cout);
        } else if (verify->parsed()) {
            const auto rep = bslab::cmd_verify(load(verify_args), verify_which, std::cout);
            return rep.all_pass() ? 0 : 2;
        }
    } catch (const bslab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "numerical stage failed: " << e.what() << '\n';
        return 4;
    }
    return 0;
}
