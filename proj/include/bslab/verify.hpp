#pragma once

#include <iosfwd>

#include "bslab/config.hpp"

namespace bslab {

enum class CheckStatus { pass, fail, warn };

struct Check {
    std::string name;
    CheckStatus status = CheckStatus::fail;
    double measured = 0.0;
    double threshold = 0.0;
    std::string anchor;  // the identity or estimate the check exercises
    double runtime_s = 0.0;
    std::string detail;
};

struct VerificationReport {
    std::vector<Check> checks;

    bool all_pass() const;
    void append(VerificationReport other);
    /// Line format: check<TAB>status<TAB>measured<TAB>threshold<TAB>anchor
    std::string to_tsv() const;
    void print_human(std::ostream& os) const;
};

/// Decay of the normal-derivative difference of the two solutions as the
/// spectral parameter goes to -infinity, in the L^p(Gamma) norm, p = 2n/(n+2).
VerificationReport verify_lambda_decay(const RunConfig& cfg);

/// Stability under mesh refinement of the constant in
/// ||dnu u|| <= C (||u|| + ||F||) for the forcing problem.
VerificationReport verify_trace_estimate(const RunConfig& cfg);

/// 1/tau decay of the resolvent correction norm.
VerificationReport verify_resolvent_decay(const RunConfig& cfg);

/// Decay of the residual pairing int v q conj(f-) dx along the tau sweep.
VerificationReport verify_residual_decay(const RunConfig& cfg);

/// Parseval identity between spectral coefficients and the solution norm.
VerificationReport verify_parseval(const RunConfig& cfg);

/// Boundedness of ||psi_k|| / (1 + |lambda_k|).
VerificationReport verify_trace_ratio(const RunConfig& cfg);

VerificationReport run_verification(const RunConfig& cfg, const std::string& which);

/// Max over random forcings of ||dnu u|| / (||u|| + ||F||) at z = 0.
double trace_estimate_max_ratio(const PotentialSpec& spec, const Grid& grid, int samples,
                                TraceScheme scheme, std::uint64_t seed);

}  // namespace bslab
