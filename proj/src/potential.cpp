#include "bslab/potential.hpp"

#include <cmath>
#include <sstream>

#include "bslab/errors.hpp"

namespace bslab {

double class_exponent(int dim) { return std::max(2.0, 3.0 * dim / 5.0); }

namespace {

double eval_at(const PotentialSpec& spec, const Grid& g, const std::array<double, kMaxDim>& x) {
    switch (spec.kind) {
        case PotentialKind::constant:
            return spec.amplitude;
        case PotentialKind::gaussian_bump: {
            double r2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                const double d = x[a] - spec.center[a];
                r2 += d * d;
            }
            return spec.amplitude * std::exp(-r2 / (2.0 * spec.width * spec.width));
        }
        case PotentialKind::cosine_separable: {
            double v = spec.amplitude;
            for (int a = 0; a < g.dim(); ++a)
                v *= std::cos(2.0 * M_PI * spec.mode[a] * x[a] / g.extent(a));
            return v;
        }
        case PotentialKind::inverse_power: {
            double r2 = 0.0;
            for (int a = 0; a < g.dim(); ++a) {
                const double d = x[a] - spec.center[a];
                r2 += d * d;
            }
            return spec.amplitude * std::pow(r2, -0.5 * spec.exponent);
        }
        case PotentialKind::grid_samples:
            return 0.0;  // handled by the caller
    }
    return 0.0;
}

}  // namespace

PotentialField sample_potential(const PotentialSpec& spec, const Grid& grid) {
    const int n = grid.dim();

    if (spec.kind == PotentialKind::inverse_power) {
        if (!(spec.exponent > 0.0))
            throw ConfigError("inverse_power: exponent must be positive");
        if (!(spec.exponent * class_exponent(n) < n)) {
            std::ostringstream os;
            os << "inverse_power: alpha=" << spec.exponent << " is inadmissible, needs alpha*"
               << class_exponent(n) << " < " << n;
            throw ConfigError(os.str());
        }
        // the singular center must not hit a node of the closed lattice
        for (int a = 0; a < n; ++a) {
            const double t = spec.center[a] / grid.spacing(a);
            if (std::abs(t - std::round(t)) * grid.spacing(a) < 1e-9 &&
                spec.center[a] > -1e-9 && spec.center[a] < grid.extent(a) + 1e-9) {
                // aligned on this axis; singular only if aligned on all of them
                bool on_node = true;
                for (int b = 0; b < n; ++b) {
                    const double s = spec.center[b] / grid.spacing(b);
                    if (std::abs(s - std::round(s)) * grid.spacing(b) >= 1e-9) on_node = false;
                }
                if (on_node)
                    throw ConfigError("inverse_power: singular center coincides with a grid node");
                break;
            }
        }
    }
    if (spec.kind == PotentialKind::grid_samples &&
        static_cast<int>(spec.samples.size()) != grid.interior_count())
        throw ConfigError("grid_samples: sample count must equal interior node count");

    PotentialField q;
    q.grid = &grid;
    q.values.resize(grid.interior_count());
    for (int i = 0; i < grid.interior_count(); ++i) {
        if (spec.kind == PotentialKind::grid_samples)
            q.values[i] = spec.samples[static_cast<std::size_t>(i)];
        else
            q.values[i] = eval_at(spec, grid, grid.position_of(i));
    }

    q.recorded_c = std::max(0.0, -q.values.minCoeff());
    const double p = class_exponent(n);
    q.lp_norm = std::pow((q.values.array().abs().pow(p) * grid.cell_volume()).sum(), 1.0 / p);

    if (q.recorded_c > spec.lower_bound_c + 1e-12) {
        std::ostringstream os;
        os << "potential dips below the declared class bound: min(q)=" << -q.recorded_c
           << " < -c=" << -spec.lower_bound_c;
        q.warnings.push_back(os.str());
    }
    return q;
}

Complex oracle_fourier(const PotentialField& q1, const PotentialField& q2,
                       std::span<const double> xi) {
    const Grid& g = *q1.grid;
    if (q2.grid == nullptr || !q2.grid->compatible(g))
        throw std::invalid_argument("oracle_fourier: grid mismatch");
    Complex acc(0.0, 0.0);
    for (int i = 0; i < g.interior_count(); ++i) {
        const auto x = g.position_of(i);
        double phase = 0.0;
        for (int a = 0; a < g.dim(); ++a) phase += xi[a] * x[a];
        acc += (q1.values[i] - q2.values[i]) * Complex(std::cos(phase), -std::sin(phase));
    }
    return acc * g.cell_volume();
}

}  // namespace bslab
