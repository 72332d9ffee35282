#pragma once

#include "bslab/potential.hpp"

namespace bslab {

/// Sparse symmetric representation of -Delta_h + diag(q) on the interior
/// nodes (2n+1 point stencil, Dirichlet rows drop the boundary neighbors).
struct DiscreteOperator {
    const Grid* grid = nullptr;
    SparseReal matrix;
    double potential_min = 0.0;
    double recorded_c = 0.0;
};

DiscreteOperator assemble_operator(const PotentialField& q);

/// Sesquilinear energy form: forward-difference gradients over all lattice
/// edges (boundary values zero) plus the potential term. For Dirichlet
/// fields this equals inner_omega(A_q u, v) exactly, by summation by parts.
/// Rejects fields carrying nonzero boundary values.
Complex quadratic_form(const PotentialField& q, const GridField& u, const GridField& v);

struct CoercivityReport {
    double min_kappa = 0.0;   // smallest observed (a_q(u,u)+c||u||^2) / ||u||^2_{H1,h}
    double c_used = 0.0;
    int samples = 0;
    bool coercive = false;
};

/// Randomized check that a_q(u,u) + c ||u||^2 controls the discrete H^1 norm.
CoercivityReport check_form_coercivity(const PotentialField& q, int samples,
                                       std::uint64_t seed = 1);

}  // namespace bslab
