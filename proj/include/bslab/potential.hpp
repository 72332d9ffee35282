#pragma once

#include <array>
#include <string>
#include <vector>

#include "bslab/grid.hpp"

namespace bslab {

enum class PotentialKind { constant, gaussian_bump, cosine_separable, inverse_power, grid_samples };

/// Parametric description of a potential q. The class bound lower_bound_c is
/// the declared constant c with q >= -c; the actually observed bound is
/// recorded at sampling time.
struct PotentialSpec {
    PotentialKind kind = PotentialKind::constant;
    double amplitude = 0.0;                  // constant value / bump amplitude / power scale
    std::array<double, kMaxDim> center{};    // gaussian_bump, inverse_power
    double width = 0.1;                      // gaussian_bump
    double exponent = 0.0;                   // inverse_power alpha
    std::array<int, kMaxDim> mode{};         // cosine_separable integer mode per axis
    std::vector<double> samples;             // grid_samples
    double lower_bound_c = 0.0;
};

/// Real samples of q at the interior nodes plus the admissibility metadata.
struct PotentialField {
    const Grid* grid = nullptr;
    RealVec values;
    double recorded_c = 0.0;   // max(0, -min(values))
    double lp_norm = 0.0;      // discrete L^{max(2, 3n/5)}(Omega) norm
    std::vector<std::string> warnings;
};

/// Class exponent max(2, 3n/5) of the admissible potential space.
double class_exponent(int dim);

/// Sample a potential on the interior nodes. Enforces the inverse_power
/// admissibility alpha * max(2, 3n/5) < n and rejects singular centers that
/// coincide with a grid node; soft violations of the declared class bound are
/// reported through the warning channel, not as errors.
PotentialField sample_potential(const PotentialSpec& spec, const Grid& grid);

/// Direct quadrature of the potential-difference Fourier transform,
///   sum_x (q1 - q2)(x) exp(-i xi . x) h^n,
/// the independent oracle against which probe-based samples are compared.
Complex oracle_fourier(const PotentialField& q1, const PotentialField& q2,
                       std::span<const double> xi);

}  // namespace bslab
