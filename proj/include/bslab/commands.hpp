#pragma once

#include <iosfwd>

#include "bslab/verify.hpp"

namespace bslab {

/// Generate and persist the boundary spectral datasets for both potentials.
/// When a perturbation block is present, the second dataset is the perturbed
/// copy of the first instead of a fresh computation (hypothesis studies).
void cmd_forward(const RunConfig& cfg, std::ostream& log);

/// Sample the Fourier fingerprint over the configured frequency grid and
/// synthesize the reconstruction; writes container + CSV and prints metrics.
void cmd_reconstruct(const RunConfig& cfg, std::ostream& log);

/// Tau sweeps per configured frequency; one CSV per frequency.
void cmd_sweep(const RunConfig& cfg, std::ostream& log);

/// Run the named verification checks, write the TSV report, print the summary.
VerificationReport cmd_verify(const RunConfig& cfg, const std::string& which, std::ostream& log);

}  // namespace bslab
