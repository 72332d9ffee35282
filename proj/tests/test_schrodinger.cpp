#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bslab/operators.hpp"
#include "bslab/rng.hpp"

using namespace bslab;

namespace {

Grid unit_square(int m) {
    const double ext[2] = {1.0, 1.0};
    const int res[2] = {m, m};
    return Grid::build(2, ext, res);
}

Grid interval(int m, double L = 1.0) {
    return Grid::build(1, std::span<const double>(&L, 1), std::span<const int>(&m, 1));
}

PotentialSpec bump(double amp = 5.0, double width = 0.1) {
    PotentialSpec s;
    s.kind = PotentialKind::gaussian_bump;
    s.amplitude = amp;
    s.center = {0.5, 0.5, 0.5};
    s.width = width;
    return s;
}

GridField random_dirichlet(const Grid& g, Rng& rng) {
    GridField u = GridField::zero(g);
    for (int i = 0; i < g.interior_count(); ++i) u.values[i] = Complex(rng.normal(), rng.normal());
    return u;
}

double sparse_max_abs(const SparseReal& m) {
    double v = 0.0;
    for (int k = 0; k < m.outerSize(); ++k)
        for (SparseReal::InnerIterator it(m, k); it; ++it) v = std::max(v, std::abs(it.value()));
    return v;
}

}  // namespace

TEST_CASE("sample_potential basics") {
    const Grid g = unit_square(8);
    PotentialSpec zero;
    const PotentialField q0 = sample_potential(zero, g);
    CHECK(q0.values.cwiseAbs().maxCoeff() == 0.0);
    CHECK(q0.recorded_c == 0.0);
    CHECK(q0.lp_norm == 0.0);

    const Grid g64 = unit_square(64);
    const PotentialField qb = sample_potential(bump(), g64);
    int argmax = 0;
    qb.values.maxCoeff(&argmax);
    // peak lands on the node nearest the center
    const auto x = g64.position_of(argmax);
    CHECK(std::abs(x[0] - 0.5) <= 0.5 * g64.spacing(0) + 1e-15);
    CHECK(std::abs(x[1] - 0.5) <= 0.5 * g64.spacing(1) + 1e-15);
    // the node is at most h/2 off-center, so the sampled peak sits just below 5
    CHECK(qb.values[argmax] == doctest::Approx(5.0).epsilon(0.01));
    CHECK(qb.recorded_c == 0.0);
}

TEST_CASE("negative potential records its bound and warns beyond the declared class") {
    const Grid g = unit_square(6);
    PotentialSpec s;
    s.kind = PotentialKind::constant;
    s.amplitude = -2.5;
    s.lower_bound_c = 1.0;  // declared bound is too optimistic
    const PotentialField q = sample_potential(s, g);
    CHECK(q.recorded_c == doctest::Approx(2.5).epsilon(1e-15));
    CHECK(q.warnings.size() == 1);

    s.lower_bound_c = 3.0;
    CHECK(sample_potential(s, g).warnings.empty());
}

TEST_CASE("inverse_power admissibility and refinement") {
    const double ext[3] = {1.0, 1.0, 1.0};
    PotentialSpec s;
    s.kind = PotentialKind::inverse_power;
    s.amplitude = 1.0;
    s.center = {0.511, 0.497, 0.503};
    s.exponent = 1.0;  // alpha * max(2, 9/5) = 2 < 3, admissible in 3-D

    const int res_h[3] = {8, 8, 8};
    const int res_h2[3] = {17, 17, 17};  // exactly h/2
    const Grid gh = Grid::build(3, ext, res_h);
    const Grid gh2 = Grid::build(3, ext, res_h2);
    const PotentialField qh = sample_potential(s, gh);
    const PotentialField qh2 = sample_potential(s, gh2);
    CHECK(qh.values.allFinite());
    CHECK(qh2.values.allFinite());
    // alpha = 1 < 3/2 keeps q in L^2: the discrete norm settles under refinement
    const double ratio = qh2.lp_norm / qh.lp_norm;
    CHECK(ratio < 1.2);
    CHECK(ratio > 1.0 / 1.2);

    // inadmissible exponent in 2-D: alpha * 2 >= 2
    PotentialSpec bad = s;
    CHECK_THROWS(sample_potential(bad, unit_square(8)));

    // singular center on a grid node
    PotentialSpec on_node = s;
    on_node.exponent = 0.8;
    on_node.center = {0.5, 0.5, 0.5};
    const int res9[3] = {9, 9, 9};  // h = 0.1, node at 0.5
    CHECK_THROWS(sample_potential(on_node, Grid::build(3, ext, res9)));
}

TEST_CASE("assemble_operator stencil, 1-D m=3") {
    const Grid g = interval(3);
    PotentialSpec zero;
    const DiscreteOperator op = assemble_operator(sample_potential(zero, g));
    const RMat A = RMat(op.matrix);
    // h = 1/4: diagonal 2/h^2 = 32, off-diagonal -1/h^2 = -16
    CHECK(A(0, 0) == 32.0);
    CHECK(A(1, 1) == 32.0);
    CHECK(A(0, 1) == -16.0);
    CHECK(A(1, 0) == -16.0);
    CHECK(A(0, 2) == 0.0);
}

TEST_CASE("operator symmetry is exact; constant shift adds s I exactly") {
    const Grid g = unit_square(10);
    const PotentialField qb = sample_potential(bump(), g);
    const DiscreteOperator op = assemble_operator(qb);
    CHECK(sparse_max_abs(SparseReal(op.matrix - SparseReal(op.matrix.transpose()))) == 0.0);

    // q + 5 via explicit samples
    PotentialSpec gs;
    gs.kind = PotentialKind::grid_samples;
    gs.samples.assign(qb.values.data(), qb.values.data() + qb.values.size());
    for (auto& v : gs.samples) v += 5.0;
    const DiscreteOperator op_plus = assemble_operator(sample_potential(gs, g));

    SparseReal expect = op.matrix;
    for (int i = 0; i < expect.rows(); ++i) expect.coeffRef(i, i) += 5.0;
    CHECK(sparse_max_abs(SparseReal(op_plus.matrix - expect)) == 0.0);
}

TEST_CASE("quadratic form equals the operator pairing exactly") {
    const Grid g = unit_square(9);
    const PotentialField q = sample_potential(bump(3.0, 0.2), g);
    const DiscreteOperator op = assemble_operator(q);
    Rng rng(5);
    for (int rep = 0; rep < 4; ++rep) {
        const GridField u = random_dirichlet(g, rng);
        const GridField v = random_dirichlet(g, rng);
        const Complex form = quadratic_form(q, u, v);
        GridField au = GridField::zero(g);
        au.values = op.matrix.cast<Complex>() * u.values;
        const Complex pairing = inner_omega(au, v);
        CHECK(std::abs(form - pairing) <= 1e-12 * (std::abs(form) + 1.0));
        // Hermitian symmetry
        CHECK(std::abs(quadratic_form(q, v, u) - std::conj(form)) <=
              1e-12 * (std::abs(form) + 1.0));
    }
    // nonzero boundary values are rejected
    GridField bad = random_dirichlet(g, rng);
    bad.boundary = Vec::Ones(g.face_count());
    CHECK_THROWS(quadratic_form(q, bad, bad));
}

TEST_CASE("q=0 energy is nonnegative and eigenvector energy is lambda") {
    const Grid g = interval(12);
    PotentialSpec zero;
    const PotentialField q0 = sample_potential(zero, g);
    Rng rng(9);
    const GridField u = random_dirichlet(g, rng);
    CHECK(quadratic_form(q0, u, u).real() >= 0.0);

    // lowest closed-form eigenvector: a_0(phi, phi) = lambda_1 ||phi||^2
    const double h = g.spacing(0);
    Vec phi(12);
    for (int j = 0; j < 12; ++j) phi[j] = std::sin(M_PI * (j + 1) * h);
    const GridField pf = GridField::interior(g, phi);
    const double lambda1 = 4.0 / (h * h) * std::pow(std::sin(M_PI * h / 2.0), 2);
    CHECK(quadratic_form(q0, pf, pf).real() ==
          doctest::Approx(lambda1 * inner_omega(pf, pf).real()).epsilon(1e-12));
}

TEST_CASE("coercivity check") {
    const Grid g = unit_square(8);
    PotentialSpec zero;
    const PotentialField q0 = sample_potential(zero, g);
    const CoercivityReport rep0 = check_form_coercivity(q0, 16, 42);
    CHECK(rep0.coercive);
    // kappa >= lambda_1 / (1 + lambda_1) from the Rayleigh quotient
    const double h = g.spacing(0);
    const double lambda1 = 2.0 * 4.0 / (h * h) * std::pow(std::sin(M_PI * h / 2.0), 2);
    CHECK(rep0.min_kappa >= lambda1 / (1.0 + lambda1) - 1e-12);

    // q = -c0 with the same seed: the +c||u||^2 term cancels the shift exactly
    PotentialSpec neg;
    neg.kind = PotentialKind::constant;
    neg.amplitude = -2.0;
    const PotentialField qn = sample_potential(neg, g);
    const CoercivityReport repn = check_form_coercivity(qn, 16, 42);
    CHECK(repn.c_used == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(repn.min_kappa == doctest::Approx(rep0.min_kappa).epsilon(1e-12));

    const CoercivityReport repb = check_form_coercivity(sample_potential(bump(), g), 16, 7);
    CHECK(repb.coercive);
    CHECK(repb.min_kappa > 0.0);
}
