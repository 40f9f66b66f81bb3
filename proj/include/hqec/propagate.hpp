#pragma once

// Time evolution of density matrices under a fixed Liouvillian.
//
// Two engines:
//  - adaptive Dormand–Prince RK45 on the (matrix-valued) master equation,
//    with re-hermitization after each accepted step;
//  - a spectral solve (dense eigendecomposition of the vectorized
//    Liouvillian) for horizons far beyond the stiffness scale, as needed for
//    exponentially suppressed logical rates.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hqec/liouville.hpp"
#include "hqec/spaces.hpp"

#if defined(HQEC_USE_LAPACKE)
#define LAPACK_COMPLEX_CPP
#include <lapacke.h>
#endif

namespace hqec {

enum class Engine { automatic, rk45, spectral };

struct EvolveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    double max_step = std::numeric_limits<double>::infinity();
    bool rehermitize = true;
    bool leakage_check = true;
    Engine engine = Engine::automatic;

    void validate() const {
        if (rel_tol <= 0 || abs_tol <= 0 || max_step <= 0)
            throw config_error("integration tolerances must be positive");
    }
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<std::string> names;
    std::vector<std::vector<Complex>> values;  // values[i][j] = names[j] at times[i]

    void push(double t, std::vector<Complex> record) {
        if (!times.empty() && t <= times.back())
            throw error("time series times must be strictly increasing");
        if (record.size() != names.size())
            throw error("time series record width mismatch");
        times.push_back(t);
        values.push_back(std::move(record));
    }

    std::vector<double> column_real(const std::string& name) const {
        std::size_t j = 0;
        while (j < names.size() && names[j] != name) ++j;
        if (j == names.size()) throw error("no column '" + name + "'");
        std::vector<double> out(times.size());
        for (std::size_t i = 0; i < times.size(); ++i) out[i] = values[i][j].real();
        return out;
    }
};

namespace detail {

// Dormand–Prince 5(4) tableau.
struct Dopri5 {
    static constexpr double c[7] = {0., 1. / 5, 3. / 10, 4. / 5, 8. / 9, 1., 1.};
    static constexpr double a2[1] = {1. / 5};
    static constexpr double a3[2] = {3. / 40, 9. / 40};
    static constexpr double a4[3] = {44. / 45, -56. / 15, 32. / 9};
    static constexpr double a5[4] = {19372. / 6561, -25360. / 2187, 64448. / 6561,
                                     -212. / 729};
    static constexpr double a6[5] = {9017. / 3168, -355. / 33, 46732. / 5247,
                                     49. / 176, -5103. / 18656};
    static constexpr double b[6] = {35. / 384, 0., 500. / 1113, 125. / 192,
                                    -2187. / 6784, 11. / 84};
    // b - b* (5th-order minus embedded 4th-order weights)
    static constexpr double e[7] = {71. / 57600,  0.,          -71. / 16695,
                                    71. / 1920,   -17253. / 339200,
                                    22. / 525,    -1. / 40};
};

inline double error_ratio(const Matrix& err, const Matrix& y0, const Matrix& y1,
                          double atol, double rtol) {
    double scale0 = std::max(y0.cwiseAbs().maxCoeff(), y1.cwiseAbs().maxCoeff());
    double tol = atol + rtol * scale0;
    return err.cwiseAbs().maxCoeff() / tol;
}

}  // namespace detail

// Integrates dρ/dt = L(ρ) from 0 to t.  `sample` (optional) is invoked at the
// requested monotone sample times with a dense-output-free exact landing (the
// step size is clipped to hit each sample time).
inline Matrix rk45_integrate(const Liouvillian& liou, Matrix rho, double t_final,
                             const EvolveOptions& opts,
                             const std::vector<double>& sample_times = {},
                             const std::function<void(double, const Matrix&)>& sample = {}) {
    using T = detail::Dopri5;
    opts.validate();
    if (t_final < 0) throw error("evolve requires t >= 0");

    double t = 0.0;
    std::size_t next_sample = 0;
    auto emit_due = [&](double now) {
        while (sample && next_sample < sample_times.size() &&
               sample_times[next_sample] <= now * (1 + 1e-14) + 1e-300) {
            sample(sample_times[next_sample], rho);
            ++next_sample;
        }
    };
    emit_due(t);
    if (t_final == 0.0) return rho;

    double scale = liou.rate_scale();
    double h = (scale > 0) ? 0.1 / scale : t_final;
    h = std::min({h, t_final, opts.max_step});

    Matrix k[7];
    k[0] = liou.apply(rho);
    const int max_steps = 50'000'000;
    for (int step = 0; step < max_steps; ++step) {
        if (t >= t_final * (1 - 1e-14)) break;
        double target = t_final;
        if (sample && next_sample < sample_times.size())
            target = std::min(target, sample_times[next_sample]);
        h = std::min(h, target - t);

        Matrix y = rho + h * T::a2[0] * k[0];
        k[1] = liou.apply(y);
        y = rho + h * (T::a3[0] * k[0] + T::a3[1] * k[1]);
        k[2] = liou.apply(y);
        y = rho + h * (T::a4[0] * k[0] + T::a4[1] * k[1] + T::a4[2] * k[2]);
        k[3] = liou.apply(y);
        y = rho + h * (T::a5[0] * k[0] + T::a5[1] * k[1] + T::a5[2] * k[2] +
                       T::a5[3] * k[3]);
        k[4] = liou.apply(y);
        y = rho + h * (T::a6[0] * k[0] + T::a6[1] * k[1] + T::a6[2] * k[2] +
                       T::a6[3] * k[3] + T::a6[4] * k[4]);
        k[5] = liou.apply(y);
        Matrix y5 = rho + h * (T::b[0] * k[0] + T::b[2] * k[2] + T::b[3] * k[3] +
                               T::b[4] * k[4] + T::b[5] * k[5]);
        k[6] = liou.apply(y5);
        Matrix err = h * (T::e[0] * k[0] + T::e[2] * k[2] + T::e[3] * k[3] +
                          T::e[4] * k[4] + T::e[5] * k[5] + T::e[6] * k[6]);

        double ratio = detail::error_ratio(err, rho, y5, opts.abs_tol, opts.rel_tol);
        if (ratio <= 1.0) {
            t += h;
            rho = std::move(y5);
            if (opts.rehermitize) rho = 0.5 * (rho + rho.adjoint().eval());
            k[0] = opts.rehermitize ? liou.apply(rho) : k[6];  // FSAL when unmodified
            emit_due(t);
        }
        double grow = (ratio > 0) ? 0.9 * std::pow(ratio, -0.2) : 5.0;
        h *= std::clamp(grow, 0.2, 5.0);
        h = std::min(h, opts.max_step);
        if (!(h > 0) || t + h == t)
            throw integration_error("step size underflow in RK45");
        if (step == max_steps - 1)
            throw integration_error("RK45 step budget exhausted");
    }
    emit_due(t_final);
    return rho;
}

// Spectral solver: diagonalizes the dense vectorized Liouvillian once and
// evaluates ρ(t) at arbitrary times in O(d⁴) -> O(d²) per time.
class SpectralPropagator {
  public:
    explicit SpectralPropagator(const Liouvillian& liou)
        : space_(liou.space()), d_(liou.dim()) {
        Matrix l = liou.matrix();
        long n = l.rows();
        eigvals_.resize(n);
        eigvecs_.resize(n, n);
#if defined(HQEC_USE_LAPACKE)
        lapack_int info = LAPACKE_zgeev(
            LAPACK_COL_MAJOR, 'N', 'V', static_cast<lapack_int>(n),
            reinterpret_cast<lapack_complex_double*>(l.data()),
            static_cast<lapack_int>(n),
            reinterpret_cast<lapack_complex_double*>(eigvals_.data()), nullptr, 1,
            reinterpret_cast<lapack_complex_double*>(eigvecs_.data()),
            static_cast<lapack_int>(n));
        if (info != 0)
            throw integration_error("zgeev failed on the Liouvillian matrix");
#else
        Eigen::ComplexEigenSolver<Matrix> es(l);
        if (es.info() != Eigen::Success)
            throw integration_error("eigendecomposition of the Liouvillian failed");
        eigvals_ = es.eigenvalues();
        eigvecs_ = es.eigenvectors();
#endif
        lu_.compute(eigvecs_);
    }

    const SpaceLabel& space() const { return space_; }

    // Modal coefficients of an initial state; reusable across times.
    Vector coefficients(const Matrix& rho0) const {
        return lu_.solve(vec(rho0));
    }

    Matrix state_at(const Vector& coeffs, double t) const {
        Vector phases(coeffs.size());
        for (long i = 0; i < coeffs.size(); ++i) {
            Complex lt = eigvals_(i) * t;
            // Decaying modes only; growth beyond roundoff means a spurious
            // positive eigenvalue from the decomposition, clamp it.
            if (lt.real() > 0) lt = Complex(0.0, lt.imag());
            phases(i) = std::exp(lt) * coeffs(i);
        }
        return unvec(eigvecs_ * phases, d_);
    }

    Matrix evolve(const Matrix& rho0, double t) const {
        return state_at(coefficients(rho0), t);
    }

  private:
    SpaceLabel space_;
    long d_;
    Vector eigvals_;
    Matrix eigvecs_;
    Eigen::PartialPivLU<Matrix> lu_;
};

inline Engine select_engine(const Liouvillian& liou, double t_final,
                            const EvolveOptions& opts) {
    if (opts.engine != Engine::automatic) return opts.engine;
    // Spectral pays off when the horizon dwarfs the stiffness scale and the
    // d²×d² decomposition is tractable.
    double stiffness = liou.rate_scale() * t_final;
    return (stiffness > 1e5 && liou.dim() <= 96) ? Engine::spectral : Engine::rk45;
}

inline DensityMatrix finalize_state(const SpaceLabel& space, Matrix rho,
                                    const EvolveOptions& opts) {
    if (opts.rehermitize) rho = 0.5 * (rho + rho.adjoint().eval());
    DensityMatrix out(space, std::move(rho));
    out.check(1e-8, 1e-8, -1e-6);
    if (opts.leakage_check) check_leakage(out, "evolve");
    return out;
}

inline DensityMatrix evolve(const Liouvillian& liou, const DensityMatrix& rho0,
                            double t, const EvolveOptions& opts = {}) {
    require_same_space(liou.space(), rho0.space(), "evolve");
    Engine engine = select_engine(liou, t, opts);
    Matrix rho;
    if (engine == Engine::spectral) {
        SpectralPropagator prop(liou);
        rho = prop.evolve(rho0.matrix(), t);
    } else {
        rho = rk45_integrate(liou, rho0.matrix(), t, opts);
    }
    return finalize_state(liou.space(), std::move(rho), opts);
}

inline Complex expectation_matrix(const Matrix& rho, const Operator& o) {
    return (rho * o.matrix()).trace();
}

inline TimeSeries evolve_series(
    const Liouvillian& liou, const DensityMatrix& rho0,
    const std::vector<double>& times,
    const std::vector<std::pair<std::string, Operator>>& observables,
    const EvolveOptions& opts = {}) {
    require_same_space(liou.space(), rho0.space(), "evolve_series");
    if (times.empty()) throw error("evolve_series: empty time grid");
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        if (times[i + 1] <= times[i])
            throw error("evolve_series: times must be strictly increasing");
    if (times.front() < 0) throw error("evolve_series: negative time");

    TimeSeries out;
    for (const auto& [name, op] : observables) {
        require_same_space(liou.space(), op.space(), "evolve_series observable");
        out.names.push_back(name);
    }

    auto record = [&](double t, const Matrix& rho) {
        std::vector<Complex> row;
        row.reserve(observables.size());
        for (const auto& [name, op] : observables)
            row.push_back(expectation_matrix(rho, op));
        out.push(t, std::move(row));
        if (opts.leakage_check)
            check_leakage(DensityMatrix(liou.space(), rho), "evolve_series");
    };

    Engine engine = select_engine(liou, times.back(), opts);
    if (engine == Engine::spectral) {
        SpectralPropagator prop(liou);
        Vector coeffs = prop.coefficients(rho0.matrix());
        for (double t : times) {
            Matrix rho = prop.state_at(coeffs, t);
            if (opts.rehermitize) rho = 0.5 * (rho + rho.adjoint().eval());
            record(t, rho);
        }
    } else {
        rk45_integrate(liou, rho0.matrix(), times.back(), opts, times, record);
    }
    return out;
}

}  // namespace hqec
