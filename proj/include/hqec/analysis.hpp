#pragma once

// Analytic verification layer: closed-form no-jump decay rates, the displaced
// dual bases and their jump algebra, the approximate Markov diagram of the
// recovery dynamics, steady-state characterization, and the adiabatic
// elimination check for the two-mode system–bath model.

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "hqec/liouville.hpp"
#include "hqec/propagate.hpp"
#include "hqec/spaces.hpp"

namespace hqec {

// Product ansatz |φ⟩_s ⊗ |β⟩_b, parameterized by β and ⟨σx⟩ of the spin part.
struct AnsatzState {
    Complex beta;
    double sx = 0.0;  // ⟨σx⟩ ∈ [−1, 1]
};

// Γ(ψ) = α² − 2αβ_r⟨σx⟩ + |β|², in units of κ_R.
inline double gamma_analytic(double alpha, const AnsatzState& state) {
    return alpha * alpha - 2.0 * alpha * state.beta.real() * state.sx +
           std::norm(state.beta);
}

// κ_R ⟨ψ|R†R|ψ⟩: the no-jump population decay rate 2i⟨H_NH⟩.
inline double gamma_numeric(double alpha, double kappa_r, const StateVector& psi) {
    Operator r = recovery_jump(alpha, psi.space());
    StateVector rp = r * psi;
    return kappa_r * rp.inner(rp).real();
}

// Spin state with ⟨σx⟩ = sx (real superposition of |±⟩).
inline StateVector spin_with_sx(double sx) {
    double c = std::sqrt((1.0 + sx) / 2.0);
    double s = std::sqrt((1.0 - sx) / 2.0);
    return spin_plus() * Complex(c) + spin_minus() * Complex(s);
}

inline StateVector ansatz_state(const AnsatzState& a, int fock_dim) {
    return tensor(spin_with_sx(a.sx), coherent_state(a.beta, fock_dim));
}

struct GammaGrid {
    std::vector<double> beta_r;
    std::vector<double> sx;
    Eigen::MatrixXd values;  // values(i, j) = Γ at (beta_r[i], sx[j])
};

inline GammaGrid gamma_grid(double alpha, double beta_min, double beta_max,
                            double sx_min, double sx_max, int resolution) {
    if (resolution < 2) throw config_error("gamma_grid resolution must be >= 2");
    GammaGrid g;
    g.values.resize(resolution, resolution);
    for (int i = 0; i < resolution; ++i)
        g.beta_r.push_back(beta_min + (beta_max - beta_min) * i / (resolution - 1));
    for (int j = 0; j < resolution; ++j)
        g.sx.push_back(sx_min + (sx_max - sx_min) * j / (resolution - 1));
    for (int i = 0; i < resolution; ++i)
        for (int j = 0; j < resolution; ++j)
            g.values(i, j) = gamma_analytic(alpha, {Complex(g.beta_r[i]), g.sx[j]});
    return g;
}

// ---- displaced dual bases for the jump-operator action ------------------

enum class JumpDirection { forward, backward };

// |±, →n⟩ = D(±α)|±⟩ ⊗ |n⟩,  |±, ←n⟩ = D(∓α)|±⟩ ⊗ |n⟩.
inline StateVector jump_basis(double alpha, JumpDirection dir, int mu, int n,
                              int fock_dim) {
    if (mu != +1 && mu != -1) throw error("jump_basis: mu must be ±1");
    if (n < 0 || n >= fock_dim) throw dimension_error("jump_basis: n out of range");
    double sign = (dir == JumpDirection::forward) ? double(mu) : -double(mu);
    Operator d = displacement(sign * alpha, fock_dim, false);
    StateVector spin = (mu > 0) ? spin_plus() : spin_minus();
    StateVector out =
        tensor(spin, d * StateVector::basis(SpaceLabel::fock(fock_dim), n));
    check_leakage(out, "jump_basis");
    return out;
}

struct IdentityReport {
    struct Entry {
        std::string name;
        double max_residual;
    };
    std::vector<Entry> entries;

    double max_residual() const {
        double m = 0.0;
        for (const auto& e : entries) m = std::max(m, e.max_residual);
        return m;
    }
    bool pass(double tol) const { return max_residual() <= tol; }
    std::string first_failure(double tol) const {
        for (const auto& e : entries)
            if (e.max_residual > tol) return e.name;
        return "";
    }
};

// Residuals of the six jump-action identities for n ≤ n_max:
//   R|±,→n⟩   = ∓√n |∓,←(n−1)⟩
//   R|±,←n⟩   = 2α|∓,→n⟩ ∓ √n |∓,→(n−1)⟩
//   R†|±,→n⟩  = 2α|∓,←n⟩ ± √(n+1)|∓,←(n+1)⟩
//   R†|±,←n⟩  = ±√(n+1)|∓,→(n+1)⟩
inline IdentityReport jump_action_check(double alpha, int n_max, int fock_dim = 0) {
    if (fock_dim == 0) fock_dim = default_truncation(alpha) + n_max + 2;
    SpaceLabel space = SpaceLabel::spin_fock(fock_dim);
    Operator r = recovery_jump(alpha, space);
    Operator rd = r.adjoint();
    auto fwd = JumpDirection::forward;
    auto bwd = JumpDirection::backward;
    auto basis = [&](JumpDirection d, int mu, int n) {
        return jump_basis(alpha, d, mu, n, fock_dim);
    };

    IdentityReport rep;
    auto check = [&](const std::string& name, auto&& lhs_of, auto&& rhs_of) {
        double worst = 0.0;
        for (int mu : {+1, -1})
            for (int n = 0; n <= n_max; ++n) {
                StateVector lhs = lhs_of(mu, n);
                StateVector rhs = rhs_of(mu, n);
                worst = std::max(worst, (lhs - rhs).norm());
            }
        rep.entries.push_back({name, worst});
    };

    auto zero = [&] {
        return StateVector(space, Vector::Zero(space.dim()));
    };
    check(
        "R on forward basis", [&](int mu, int n) { return r * basis(fwd, mu, n); },
        [&](int mu, int n) {
            if (n == 0) return zero();
            return basis(bwd, -mu, n - 1) * Complex(-mu * std::sqrt(double(n)));
        });
    check(
        "R on backward basis", [&](int mu, int n) { return r * basis(bwd, mu, n); },
        [&](int mu, int n) {
            StateVector out = basis(fwd, -mu, n) * Complex(2.0 * alpha);
            if (n > 0)
                out = out + basis(fwd, -mu, n - 1) * Complex(-mu * std::sqrt(double(n)));
            return out;
        });
    check(
        "R† on forward basis", [&](int mu, int n) { return rd * basis(fwd, mu, n); },
        [&](int mu, int n) {
            return basis(bwd, -mu, n) * Complex(2.0 * alpha) +
                   basis(bwd, -mu, n + 1) * Complex(mu * std::sqrt(double(n + 1)));
        });
    check(
        "R† on backward basis", [&](int mu, int n) { return rd * basis(bwd, mu, n); },
        [&](int mu, int n) {
            return basis(fwd, -mu, n + 1) * Complex(mu * std::sqrt(double(n + 1)));
        });
    // Spin-factor actions σx|±⟩ = ±|±⟩ and σz|±⟩ = |∓⟩.
    {
        double worst = 0.0;
        Matrix sx = pauli(Axis::x).matrix(), sz = pauli(Axis::z).matrix();
        for (int mu : {+1, -1}) {
            Vector v = (mu > 0 ? spin_plus() : spin_minus()).amplitudes();
            Vector o = (mu > 0 ? spin_minus() : spin_plus()).amplitudes();
            worst = std::max(worst, (sx * v - double(mu) * v).norm());
            worst = std::max(worst, (sz * v - o).norm());
        }
        rep.entries.push_back({"Pauli action on |±⟩", worst});
    }
    return rep;
}

// Gram-matrix deviation from identity within one arrow-direction family.
inline double jump_basis_orthonormality_defect(double alpha, JumpDirection dir,
                                               int n_max, int fock_dim) {
    std::vector<StateVector> states;
    for (int mu : {+1, -1})
        for (int n = 0; n <= n_max; ++n)
            states.push_back(jump_basis(alpha, dir, mu, n, fock_dim));
    double worst = 0.0;
    for (std::size_t i = 0; i < states.size(); ++i)
        for (std::size_t j = 0; j < states.size(); ++j) {
            Complex g = states[i].inner(states[j]);
            worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

// ‖Σ|μ,dir n⟩⟨μ,dir n| − 1‖_max over the full (truncation-limited) family.
inline double jump_basis_completeness_defect(double alpha, JumpDirection dir,
                                             int fock_dim, int guard = kGuardLevels) {
    SpaceLabel space = SpaceLabel::spin_fock(fock_dim);
    Matrix sum = Matrix::Zero(space.dim(), space.dim());
    for (int mu : {+1, -1})
        for (int n = 0; n < fock_dim; ++n) {
            // top levels of the displaced family leak past the truncation
            Operator d = displacement((dir == JumpDirection::forward ? mu : -mu) *
                                          alpha,
                                      fock_dim, false);
            StateVector spin = (mu > 0) ? spin_plus() : spin_minus();
            StateVector s =
                tensor(spin, d * StateVector::basis(SpaceLabel::fock(fock_dim), n));
            sum += s.amplitudes() * s.amplitudes().adjoint();
        }
    // Compare on the subspace clear of the truncation edge.
    long keep = 2L * (fock_dim - guard);
    std::vector<long> idx;
    for (int spin = 0; spin < 2; ++spin)
        for (int n = 0; n < fock_dim - guard; ++n) idx.push_back(spin * fock_dim + n);
    double worst = 0.0;
    for (long i : idx)
        for (long j : idx)
            worst = std::max(worst, std::abs(sum(i, j) - (i == j ? 1.0 : 0.0)));
    (void)keep;
    return worst;
}

// ---- Markov diagram ------------------------------------------------------

struct JumpGraph {
    struct Node {
        int mu;  // ±1 spin-family label
        JumpDirection dir;
        int n;
    };
    struct Edge {
        int source;
        int target;
        double rate;  // in units of 1/time (κ_R folded in)
    };
    std::vector<Node> nodes;
    std::vector<Edge> edges;

    int index_of(int mu, JumpDirection dir, int n) const {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].mu == mu && nodes[i].dir == dir && nodes[i].n == n)
                return static_cast<int>(i);
        return -1;
    }
    std::vector<Edge> edges_from(int source) const {
        std::vector<Edge> out;
        for (const auto& e : edges)
            if (e.source == source) out.push_back(e);
        return out;
    }
};

// Edge rates κ_R |⟨target|R|source⟩|², with targets taken from the
// orthonormal family the jump lands in (forward sources land in the backward
// family and vice versa); inter-branch coherence is discarded.
inline JumpGraph markov_graph(double alpha, double kappa_r, int n_max = 3,
                              int fock_dim = 0) {
    if (fock_dim == 0) fock_dim = default_truncation(alpha) + n_max + 2;
    SpaceLabel space = SpaceLabel::spin_fock(fock_dim);
    Operator r = recovery_jump(alpha, space);

    JumpGraph g;
    for (auto dir : {JumpDirection::forward, JumpDirection::backward})
        for (int mu : {+1, -1})
            for (int n = 0; n <= n_max; ++n) g.nodes.push_back({mu, dir, n});

    for (std::size_t s = 0; s < g.nodes.size(); ++s) {
        const auto& src = g.nodes[s];
        StateVector jumped = r * jump_basis(alpha, src.dir, src.mu, src.n, fock_dim);
        JumpDirection landing = (src.dir == JumpDirection::forward)
                                    ? JumpDirection::backward
                                    : JumpDirection::forward;
        for (std::size_t t = 0; t < g.nodes.size(); ++t) {
            const auto& dst = g.nodes[t];
            if (dst.dir != landing) continue;
            Complex amp = jump_basis(alpha, dst.dir, dst.mu, dst.n, fock_dim)
                              .inner(jumped);
            double rate = kappa_r * std::norm(amp);
            if (rate > 1e-12 * kappa_r * std::max(1.0, alpha * alpha))
                g.edges.push_back({static_cast<int>(s), static_cast<int>(t), rate});
        }
    }
    return g;
}

// ---- steady-state characterization --------------------------------------

struct SteadyStateReport {
    struct Entry {
        double eigen_residual;     // ‖R|ψ⟩ − λ|ψ⟩‖ with λ = ⟨ψ|R|ψ⟩
        double lindblad_residual;  // ‖L_R(|ψ⟩⟨ψ|)‖_F
    };
    std::vector<Entry> entries;
};

inline SteadyStateReport steady_state_check(double alpha, double kappa_r,
                                            const std::vector<StateVector>& candidates) {
    SteadyStateReport rep;
    for (const auto& psi : candidates) {
        Operator r = recovery_jump(alpha, psi.space());
        StateVector rp = r * psi;
        Complex lambda = psi.inner(rp);
        double eig_res = (rp - psi * lambda).norm();
        Liouvillian lr = recovery_liouvillian(alpha, kappa_r, psi.space());
        double lind_res = lr.apply(DensityMatrix::pure(psi)).norm();
        rep.entries.push_back({eig_res, lind_res});
    }
    return rep;
}

// ---- adiabatic elimination ----------------------------------------------

inline double trace_distance(const Matrix& rho, const Matrix& sigma) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(
        Matrix(0.5 * ((rho - sigma) + (rho - sigma).adjoint())),
        Eigen::EigenvaluesOnly);
    return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

struct AdiabaticComparison {
    TimeSeries series;  // column "trace_distance"
    double max_trace_distance = 0.0;
    bool regime_warning = false;  // g/γ_b > 0.1, outside the adiabatic regime
};

// Evolves ρ0 ⊗ |0⟩⟨0|_bath under the two-mode generator, traces out the
// bath, and compares against κ_R D[R] with κ_R = 4g²/γ_b.
inline AdiabaticComparison adiabatic_elimination_compare(
    double alpha, const BathParams& bath, const DensityMatrix& rho0, double t_final,
    int samples, EvolveOptions opts = {}) {
    bath.validate();
    if (rho0.space().num_factors() != 2)
        throw dimension_error("adiabatic compare expects a spin ⊗ Fock initial state");
    int n = rho0.space().factors()[1].dim;
    SpaceLabel space3 = SpaceLabel::spin_fock_bath(n, bath.n_bath);
    double kappa_r = bath.effective_kappa_r();

    AdiabaticComparison out;
    out.regime_warning = bath.g / bath.gamma_b > 0.1;

    Matrix bath_vac = Matrix::Zero(bath.n_bath, bath.n_bath);
    bath_vac(0, 0) = 1.0;
    Matrix joint0 = kron(rho0.matrix(), bath_vac);

    std::vector<double> times;
    for (int k = 1; k <= samples; ++k) times.push_back(t_final * k / samples);

    Liouvillian joint_liou = two_mode_liouvillian(alpha, bath, space3);
    Liouvillian eff_liou = recovery_liouvillian(alpha, kappa_r, rho0.space());

    // March both integrations across the shared sample grid.
    Matrix joint = joint0;
    Matrix eff = rho0.matrix();
    double t = 0.0;
    out.series.names = {"trace_distance"};
    for (double ts : times) {
        joint = rk45_integrate(joint_liou, std::move(joint), ts - t, opts);
        eff = rk45_integrate(eff_liou, std::move(eff), ts - t, opts);
        t = ts;
        DensityMatrix reduced = partial_trace(DensityMatrix(space3, joint),
                                              {"spin", "boson"});
        double dist = trace_distance(reduced.matrix(), eff);
        out.max_trace_distance = std::max(out.max_trace_distance, dist);
        out.series.push(ts, {Complex(dist)});
    }
    return out;
}

}  // namespace hqec
