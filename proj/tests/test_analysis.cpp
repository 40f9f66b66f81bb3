#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hqec/hqec.hpp"

using namespace hqec;

TEST_CASE("no-jump rate closed form at hand-checked points") {
    // Γ = α² − 2αβ_r⟨σx⟩ + |β|²
    CHECK(gamma_analytic(1.0, {Complex(1.0), 1.0}) == doctest::Approx(0.0));
    CHECK(gamma_analytic(1.0, {Complex(-1.0), -1.0}) == doctest::Approx(0.0));
    CHECK(gamma_analytic(1.0, {Complex(1.0), -1.0}) == doctest::Approx(4.0));
    CHECK(gamma_analytic(2.0, {Complex(0.0), 0.3}) == doctest::Approx(4.0));
    CHECK(gamma_analytic(1.5, {Complex(0.5, 2.0), 0.4}) ==
          doctest::Approx(2.25 - 2.0 * 1.5 * 0.5 * 0.4 + 4.25));
}

TEST_CASE("numeric no-jump rate matches the closed form on product states") {
    double alpha = 1.5, kappa_r = 1.0;
    int n = 48;
    for (double br : {-1.0, 0.0, 0.8})
        for (double sx : {-1.0, 0.2, 1.0}) {
            AnsatzState st{Complex(br), sx};
            double got = gamma_numeric(alpha, kappa_r, ansatz_state(st, n));
            CHECK(std::abs(got - gamma_analytic(alpha, st)) < 1e-8);
        }
    // complex displacement: the imaginary part enters only through |β|²
    AnsatzState st{Complex(0.4, 0.9), -0.5};
    CHECK(std::abs(gamma_numeric(alpha, 2.0, ansatz_state(st, n)) -
                   2.0 * gamma_analytic(alpha, st)) < 1e-8);
}

TEST_CASE("spin superposition hits the requested x expectation") {
    for (double sx : {-1.0, -0.3, 0.0, 0.6, 1.0}) {
        StateVector s = spin_with_sx(sx);
        CHECK(std::abs(expectation(s, pauli(Axis::x)).real() - sx) < 1e-14);
        CHECK(s.norm() == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("decay-rate grid is zero exactly on the two codeword points") {
    GammaGrid g = gamma_grid(1.0, -2.0, 2.0, -1.0, 1.0, 5);
    // corners (β=±2α... ) and center checked against the closed form
    for (int i = 0; i < 5; ++i)
        for (int j = 0; j < 5; ++j)
            CHECK(g.values(i, j) ==
                  doctest::Approx(gamma_analytic(1.0, {Complex(g.beta_r[i]), g.sx[j]})));
    CHECK(g.values(3, 4) == doctest::Approx(0.0));  // β=1, sx=1
    CHECK(g.values(1, 0) == doctest::Approx(0.0));  // β=−1, sx=−1
}

TEST_CASE("jump ladder identities hold at tight truncation margins") {
    IdentityReport rep = jump_action_check(1.0, 3, 40);
    CHECK(rep.entries.size() == 5);
    CHECK(rep.pass(1e-9));
    CHECK(rep.first_failure(1e-9).empty());
    // undersized truncation degrades the residual but stays reported
    IdentityReport loose = jump_action_check(1.0, 3, 22);
    CHECK(loose.max_residual() > rep.max_residual());
}

TEST_CASE("displaced families are orthonormal and complete") {
    double alpha = 1.2;
    int n = 40;
    for (auto dir : {JumpDirection::forward, JumpDirection::backward}) {
        CHECK(jump_basis_orthonormality_defect(alpha, dir, 4, n) < 1e-10);
        CHECK(jump_basis_completeness_defect(alpha, dir, n) < 1e-10);
    }
}

TEST_CASE("jump graph carries the ladder rates of the recovery channel") {
    double alpha = 1.3, kappa_r = 2.0;
    JumpGraph g = markov_graph(alpha, kappa_r, 2, 40);
    // forward (μ, n>0) has exactly one decay edge with rate κ_R·n
    int src = g.index_of(+1, JumpDirection::forward, 2);
    auto out = g.edges_from(src);
    REQUIRE(out.size() == 1);
    CHECK(out[0].target == g.index_of(-1, JumpDirection::backward, 1));
    CHECK(out[0].rate == doctest::Approx(kappa_r * 2.0).epsilon(1e-8));
    // the forward ground pair is dark: no outgoing edges
    CHECK(g.edges_from(g.index_of(+1, JumpDirection::forward, 0)).empty());
    CHECK(g.edges_from(g.index_of(-1, JumpDirection::forward, 0)).empty());
    // backward (μ, n) feeds the forward family at 4α² (return) and n (decay)
    src = g.index_of(-1, JumpDirection::backward, 1);
    out = g.edges_from(src);
    REQUIRE(out.size() == 2);
    double r_ret = 0.0, r_dec = 0.0;
    for (const auto& e : out) {
        if (e.target == g.index_of(+1, JumpDirection::forward, 1)) r_ret = e.rate;
        if (e.target == g.index_of(+1, JumpDirection::forward, 0)) r_dec = e.rate;
    }
    CHECK(r_ret == doctest::Approx(kappa_r * 4.0 * alpha * alpha).epsilon(1e-8));
    CHECK(r_dec == doctest::Approx(kappa_r * 1.0).epsilon(1e-8));
}

TEST_CASE("codewords are dark states of the recovery channel") {
    double alpha = 1.5;
    HybridCode code = make_hybrid_code(alpha, 44);
    SteadyStateReport rep = steady_state_check(
        alpha, 1.0, {code.logical_plus, code.logical_minus, code.logical_zero()});
    for (const auto& e : rep.entries) {
        CHECK(e.eigen_residual < 1e-9);
        CHECK(e.lindblad_residual < 1e-8);
    }
}

TEST_CASE("trace distance on known pairs") {
    Matrix p0 = Matrix::Zero(2, 2), p1 = Matrix::Zero(2, 2), mix(2, 2);
    p0(0, 0) = 1.0;
    p1(1, 1) = 1.0;
    mix << 0.5, 0.0, 0.0, 0.5;
    CHECK(trace_distance(p0, p1) == doctest::Approx(1.0));
    CHECK(trace_distance(p0, p0) == doctest::Approx(0.0));
    CHECK(trace_distance(p0, mix) == doctest::Approx(0.5));
}

TEST_CASE("bath elimination tracks the effective recovery channel") {
    double alpha = 1.0;
    BathParams bath{0.08, 1.0, 3};
    HybridCode code = make_hybrid_code(alpha, 16);
    // start slightly off the code space so the recovery has work to do
    StateVector tilted =
        (code.logical_plus + Complex(0.2) * tensor(spin_minus(),
                                                   coherent_state(1.0, 16)))
            .normalized();
    DensityMatrix rho0 = DensityMatrix::pure(tilted);
    EvolveOptions opts;
    opts.rel_tol = 1e-6;
    opts.abs_tol = 1e-10;
    AdiabaticComparison cmp =
        adiabatic_elimination_compare(alpha, bath, rho0, 10.0, 4, opts);
    CHECK_FALSE(cmp.regime_warning);
    CHECK(cmp.series.times.size() == 4);
    CHECK(cmp.max_trace_distance < 0.05);
    BathParams fast{0.2, 1.0, 3};
    CHECK(adiabatic_elimination_compare(alpha, fast, rho0, 1.0, 1, opts)
              .regime_warning);
}
