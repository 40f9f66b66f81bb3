#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hqec/hqec.hpp"

using namespace hqec;

TEST_CASE("damped oscillator keeps the analytic coherent trajectory") {
    double kappa = 0.7, a0 = 1.1, t = 1.3;
    int n = default_truncation(a0);
    Liouvillian liou = dissipator(fock_destroy(n), kappa);
    DensityMatrix rho0 = DensityMatrix::pure(coherent_state(a0, n));

    for (Engine engine : {Engine::rk45, Engine::spectral}) {
        if (engine == Engine::spectral && n > 24) continue;
        EvolveOptions opts;
        opts.engine = engine;
        DensityMatrix rho = evolve(liou, rho0, t, opts);
        double amp = a0 * std::exp(-0.5 * kappa * t);
        CHECK(std::abs(expectation(rho, fock_destroy(n)).real() - amp) < 1e-6);
        CHECK(std::abs(expectation(rho, number(n)).real() - amp * amp) < 1e-6);
        // the state stays exactly coherent
        StateVector target = coherent_state(amp, n);
        Complex fid = target.amplitudes().adjoint() * rho.matrix() *
                      target.amplitudes();
        CHECK(std::abs(fid.real() - 1.0) < 1e-6);
    }
}

TEST_CASE("spin amplitude damping decays the excited population exponentially") {
    double gamma = 0.45, t = 2.0;
    Liouvillian liou = dissipator(fock_destroy(2), gamma);
    DensityMatrix rho0 =
        DensityMatrix::pure(StateVector::basis(SpaceLabel::fock(2), 1));
    DensityMatrix rho = evolve(liou, rho0, t);
    CHECK(std::abs(rho.matrix()(1, 1).real() - std::exp(-gamma * t)) < 1e-8);
}

TEST_CASE("coherent Rabi drive reproduces cos(Ωt)") {
    double omega = 2.0 * std::numbers::pi;
    Operator h = 0.5 * omega * pauli(Axis::x);
    Liouvillian liou = hamiltonian_liouvillian(h);
    DensityMatrix rho0 = DensityMatrix::pure(StateVector::basis(SpaceLabel::spin(), 0));
    std::vector<double> times = {0.1, 0.25, 0.4, 0.75, 1.0};
    TimeSeries s = evolve_series(liou, rho0, times, {{"sz", pauli(Axis::z)}});
    for (std::size_t i = 0; i < times.size(); ++i) {
        CHECK(s.times[i] == doctest::Approx(times[i]).epsilon(1e-12));
        CHECK(std::abs(s.values[i][0].real() - std::cos(omega * times[i])) < 1e-7);
    }
}

TEST_CASE("pure dephasing damps coherences as exp(-2 kappa t)") {
    double kappa = 0.3, t = 1.7;
    Liouvillian liou = dissipator(pauli(Axis::z), kappa);
    DensityMatrix rho0 = DensityMatrix::pure(spin_plus());
    DensityMatrix rho = evolve(liou, rho0, t);
    CHECK(std::abs(rho.matrix()(0, 1).real() -
                   0.5 * std::exp(-2.0 * kappa * t)) < 1e-9);
    CHECK(rho.matrix()(0, 0).real() == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("thermal bath relaxes to the expected occupation") {
    double kappa = 1.0, n_th = 0.4;
    int n = 14;
    Liouvillian liou = dissipator(fock_destroy(n), kappa * (n_th + 1.0)) +
                       dissipator(fock_create(n), kappa * n_th);
    DensityMatrix rho0 =
        DensityMatrix::pure(StateVector::basis(SpaceLabel::fock(n), 0));
    EvolveOptions opts;
    opts.engine = Engine::spectral;
    opts.leakage_check = false;  // the thermal tail is geometric, not leakage
    DensityMatrix rho = evolve(liou, rho0, 60.0, opts);
    CHECK(std::abs(expectation(rho, number(n)).real() - n_th) < 1e-4);
}

TEST_CASE("evolution is a semigroup under restarts") {
    int n = 16;
    Liouvillian liou = dissipator(fock_destroy(n), 0.6) +
                       hamiltonian_liouvillian(number(n));
    DensityMatrix rho0 = DensityMatrix::pure(coherent_state(0.7, n));
    DensityMatrix direct = evolve(liou, rho0, 1.0);
    DensityMatrix stepped = evolve(liou, evolve(liou, rho0, 0.35), 0.65);
    CHECK((direct.matrix() - stepped.matrix()).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("spectral and RK45 engines agree") {
    int n = 16;
    SpaceLabel s = SpaceLabel::spin_fock(n);
    NoiseParams p;
    p.kappa_th = 0.4;
    p.n_th = 0.1;
    p.kappa_n = 0.2;
    p.kappa_sx = 0.05;
    p.kappa_sz = 0.1;
    Liouvillian liou = error_liouvillian(p, s);
    DensityMatrix rho0 = DensityMatrix::pure(
        tensor(spin_plus(), coherent_state(0.4, n)));
    EvolveOptions rk, sp;
    rk.engine = Engine::rk45;
    sp.engine = Engine::spectral;
    rk.leakage_check = sp.leakage_check = false;
    DensityMatrix a = evolve(liou, rho0, 2.5, rk);
    DensityMatrix b = evolve(liou, rho0, 2.5, sp);
    CHECK((a.matrix() - b.matrix()).cwiseAbs().maxCoeff() < 1e-7);
}

TEST_CASE("series sampling validates its time grid") {
    Liouvillian liou = dissipator(pauli(Axis::z), 0.1);
    DensityMatrix rho0 = DensityMatrix::pure(spin_plus());
    CHECK_THROWS(evolve_series(liou, rho0, {}, {{"sz", pauli(Axis::z)}}));
    CHECK_THROWS(evolve_series(liou, rho0, {0.2, 0.1}, {{"sz", pauli(Axis::z)}}));
    CHECK_THROWS(evolve_series(liou, rho0, {0.1, 0.1}, {{"sz", pauli(Axis::z)}}));
}

TEST_CASE("a drive that escapes the truncation raises leakage") {
    int n = 8;
    // linear drive displacing the vacuum well past an 8-level truncation
    Operator h(SpaceLabel::fock(n),
               Matrix(kI * (fock_create(n).matrix() - fock_destroy(n).matrix()) *
                      4.0));
    Liouvillian liou = hamiltonian_liouvillian(h);
    DensityMatrix rho0 =
        DensityMatrix::pure(StateVector::basis(SpaceLabel::fock(n), 0));
    CHECK_THROWS_AS(evolve(liou, rho0, 1.0), leakage_error);
}

TEST_CASE("invalid tolerances are rejected before integrating") {
    EvolveOptions opts;
    opts.rel_tol = -1.0;
    Liouvillian liou = dissipator(pauli(Axis::z), 0.1);
    DensityMatrix rho0 = DensityMatrix::pure(spin_plus());
    CHECK_THROWS_AS(evolve(liou, rho0, 1.0, opts), config_error);
}
