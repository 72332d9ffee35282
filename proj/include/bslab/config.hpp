#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bslab/reconstruct.hpp"

namespace bslab {

enum class SweepRoute { direct, series, both };

struct DomainConfig {
    int dim = 2;
    std::vector<double> extent = {1.0, 1.0};
    std::vector<int> res = {16, 16};
};

struct SpectraConfig {
    int K = 0;  // 0 means the full basis
    double tol = 1e-10;
    TraceScheme scheme = TraceScheme::flux1;
};

struct IsozakiConfig {
    std::vector<std::vector<double>> xi_list;   // explicit frequencies, or
    std::optional<double> fgrid_xi_max;         // a frequency-grid radius
    std::vector<double> tau_list;
    SweepRoute route = SweepRoute::direct;
    bool force_tau = false;
};

struct PerturbationConfig {
    PerturbMode mode = PerturbMode::eigen_shift_decaying;
    double magnitude = 0.0;
};

struct VerifyConfig {
    std::vector<double> lambda_list = {-1e2, -1e3, -1e4, -1e5};
    int samples = 20;
};

struct RunConfig {
    DomainConfig domain;
    PotentialSpec q1, q2;
    SpectraConfig spectra;
    IsozakiConfig isozaki;
    std::optional<PerturbationConfig> perturbation;
    VerifyConfig verify;
    std::string output_dir = "out";
    std::uint64_t seed = 1;
    int threads = 1;

    Grid make_grid() const;
    int full_basis_count() const;
    int effective_K() const;  // K, or the full basis when K == 0
};

/// Flat, line-oriented key = value format with [section] headers.
/// Unknown sections or keys are rejected.
RunConfig parse_config(const std::string& text);
RunConfig load_config_file(const std::string& path);
std::string serialize_config(const RunConfig& cfg);

}  // namespace bslab
