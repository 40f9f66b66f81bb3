#pragma once

// Superoperator layer: GKSL dissipators, the hybrid-qubit error Liouvillian,
// the engineered recovery Liouvillian, and the two-mode system–bath generator.
//
// Vectorization is fixed to column stacking: vec(AρB) = (Bᵀ ⊗ A) vec(ρ).

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "hqec/spaces.hpp"

namespace hqec {

using SparseMatrix = Eigen::SparseMatrix<Complex>;

inline Vector vec(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix unvec(const Vector& v, long d) {
    return Eigen::Map<const Matrix>(v.data(), d, d);
}

class Liouvillian {
  public:
    struct HamiltonianTerm {
        Matrix h;
        SparseMatrix h_sparse;
    };
    struct JumpTerm {
        double rate;
        Matrix l;
        SparseMatrix l_sparse;
        SparseMatrix l_adj_sparse;
        SparseMatrix ldl_sparse;  // L†L
    };

    explicit Liouvillian(SpaceLabel space) : space_(std::move(space)) {}

    static Liouvillian zero(const SpaceLabel& space) { return Liouvillian(space); }

    const SpaceLabel& space() const { return space_; }
    long dim() const { return space_.dim(); }

    void add_hamiltonian(const Operator& h) {
        require_same_space(space_, h.space(), "liouvillian hamiltonian");
        SparseMatrix hs = h.matrix().sparseView();
        terms_h_.push_back({h.matrix(), std::move(hs)});
    }

    void add_jump(double rate, const Operator& l) {
        require_same_space(space_, l.space(), "liouvillian jump");
        if (rate < 0.0) throw error("jump rate must be nonnegative");
        if (rate == 0.0) return;
        SparseMatrix ls = l.matrix().sparseView();
        SparseMatrix lad = Matrix(l.matrix().adjoint()).sparseView();
        SparseMatrix ldl = Matrix(l.matrix().adjoint() * l.matrix()).sparseView();
        terms_j_.push_back({rate, l.matrix(), std::move(ls), std::move(lad), std::move(ldl)});
    }

    const std::vector<HamiltonianTerm>& hamiltonian_terms() const { return terms_h_; }
    const std::vector<JumpTerm>& jump_terms() const { return terms_j_; }

    // L(ρ), evaluated term-wise with sparse operator products.
    Matrix apply(const Matrix& rho) const {
        Matrix out = Matrix::Zero(rho.rows(), rho.cols());
        for (const auto& t : terms_h_) {
            out.noalias() -= kI * (t.h_sparse * rho);
            out.noalias() += kI * (rho * t.h_sparse);
        }
        for (const auto& t : terms_j_) {
            Matrix lr = t.l_sparse * rho;            // Lρ
            out.noalias() += t.rate * (lr * t.l_adj_sparse);
            Matrix dl = t.ldl_sparse * rho;          // L†Lρ
            out.noalias() -= (0.5 * t.rate) * dl;
            out.noalias() -= (0.5 * t.rate) * (rho * t.ldl_sparse);
        }
        return out;
    }

    Matrix apply(const DensityMatrix& rho) const {
        require_same_space(space_, rho.space(), "liouvillian apply");
        return apply(rho.matrix());
    }

    // Dense d²×d² matrix under the column-stacking convention.
    Matrix matrix() const {
        long d = dim();
        Matrix id = Matrix::Identity(d, d);
        Matrix out = Matrix::Zero(d * d, d * d);
        for (const auto& t : terms_h_) {
            out.noalias() -= kI * kron(id, t.h);
            out.noalias() += kI * kron(t.h.transpose(), id);
        }
        for (const auto& t : terms_j_) {
            Matrix ldl = t.l.adjoint() * t.l;
            out.noalias() += t.rate * kron(t.l.conjugate(), t.l);
            out.noalias() -= (0.5 * t.rate) * kron(id, ldl);
            out.noalias() -= (0.5 * t.rate) * kron(ldl.transpose(), id);
        }
        return out;
    }

    Liouvillian operator+(const Liouvillian& o) const {
        require_same_space(space_, o.space_, "liouvillian add");
        Liouvillian out = *this;
        out.terms_h_.insert(out.terms_h_.end(), o.terms_h_.begin(), o.terms_h_.end());
        out.terms_j_.insert(out.terms_j_.end(), o.terms_j_.begin(), o.terms_j_.end());
        return out;
    }

    // Crude spectral-radius proxy used for integrator step-size seeding.
    double rate_scale() const {
        double s = 0.0;
        for (const auto& t : terms_h_) s += t.h.cwiseAbs().maxCoeff();
        for (const auto& t : terms_j_) {
            double m = 0.0;
            for (int k = 0; k < t.ldl_sparse.outerSize(); ++k)
                for (SparseMatrix::InnerIterator it(t.ldl_sparse, k); it; ++it)
                    m = std::max(m, std::abs(it.value()));
            s += t.rate * m;
        }
        return s;
    }

  private:
    SpaceLabel space_;
    std::vector<HamiltonianTerm> terms_h_;
    std::vector<JumpTerm> terms_j_;
};

inline Liouvillian dissipator(const Operator& l, double rate = 1.0) {
    Liouvillian out(l.space());
    out.add_jump(rate, l);
    return out;
}

inline Liouvillian hamiltonian_liouvillian(const Operator& h) {
    if (!h.is_hermitian(1e-10))
        throw error("hamiltonian_liouvillian: non-Hermitian generator");
    Liouvillian out(h.space());
    out.add_hamiltonian(h);
    return out;
}

// ---- noise model ---------------------------------------------------------

enum class ThermalMode { finite_temperature, classical_field };

struct NoiseParams {
    double kappa_th = 0.0;  // thermal coupling rate (finite-temperature mode)
    double n_th = 0.0;      // mean thermal occupation
    double gamma_th = 0.0;  // classical-field rate (infinite-temperature limit)
    double kappa_n = 0.0;   // bosonic dephasing D[n̂]
    double kappa_sx = 0.0;  // qubit bit flip D[σx]
    double kappa_sz = 0.0;  // qubit phase flip D[σz]
    double kappa_R = 0.0;   // recovery rate
    ThermalMode thermal_mode = ThermalMode::finite_temperature;

    void validate() const {
        if (kappa_th < 0 || n_th < 0 || gamma_th < 0 || kappa_n < 0 ||
            kappa_sx < 0 || kappa_sz < 0 || kappa_R < 0)
            throw config_error("noise rates must be nonnegative");
    }
};

struct BathParams {
    double g = 0.0;        // system-bath drive rate
    double gamma_b = 0.0;  // bath relaxation rate
    int n_bath = 8;        // bath Fock truncation

    void validate() const {
        if (g <= 0 || gamma_b <= 0) throw config_error("bath rates must be positive");
        if (n_bath < 2) throw config_error("bath truncation must be >= 2");
    }

    double effective_kappa_r() const { return 4.0 * g * g / gamma_b; }
};

// L_E = L_th + κ_n D[n̂] + κ_σx D[σx] + κ_σz D[σz] on a spin ⊗ Fock space.
inline Liouvillian error_liouvillian(const NoiseParams& p, const SpaceLabel& space) {
    p.validate();
    if (space.num_factors() != 2 || space.factors()[0].dim != 2)
        throw dimension_error("error_liouvillian expects a spin ⊗ Fock space");
    int n = space.factors()[1].dim;
    Operator a = embed(fock_destroy(n), space, 1);
    Liouvillian out(space);
    if (p.thermal_mode == ThermalMode::finite_temperature) {
        out.add_jump(p.kappa_th * (p.n_th + 1.0), a);
        out.add_jump(p.kappa_th * p.n_th, a.adjoint());
    } else {
        out.add_jump(p.gamma_th, a);
        out.add_jump(p.gamma_th, a.adjoint());
    }
    out.add_jump(p.kappa_n, embed(number(n), space, 1));
    out.add_jump(p.kappa_sx, embed(pauli(Axis::x), space, 0));
    out.add_jump(p.kappa_sz, embed(pauli(Axis::z), space, 0));
    return out;
}

// R = σz(α − σx ⊗ â): the CV-DV correlated recovery jump.
inline Operator recovery_jump(double alpha, const SpaceLabel& space) {
    if (alpha <= 0.0) throw error("recovery_jump requires alpha > 0");
    if (space.num_factors() != 2 || space.factors()[0].dim != 2)
        throw dimension_error("recovery_jump expects a spin ⊗ Fock space");
    int n = space.factors()[1].dim;
    Operator sz = embed(pauli(Axis::z), space, 0);
    Operator sxa = tensor(pauli(Axis::x), fock_destroy(n));
    return sz * (alpha * Operator::identity(space) - Operator(space, sxa.matrix()));
}

inline Liouvillian recovery_liouvillian(double alpha, double kappa_r,
                                        const SpaceLabel& space) {
    Liouvillian out(space);
    if (kappa_r > 0.0) out.add_jump(kappa_r, recovery_jump(alpha, space));
    return out;
}

// Two-photon stabilizer jump â² − α² for the cat-qubit baseline, embedded on
// the bosonic factor of `space` (which may be Fock-only).
inline Operator cat_recovery_jump(double alpha, const SpaceLabel& space) {
    int idx = -1;
    for (std::size_t i = 0; i < space.num_factors(); ++i)
        if (space.factors()[i].dim > 2) idx = static_cast<int>(i);
    if (idx < 0 && space.num_factors() == 1) idx = 0;
    if (idx < 0) throw dimension_error("cat_recovery_jump: no bosonic factor");
    int n = space.factors()[idx].dim;
    Operator a = fock_destroy(n);
    Operator l = a * a - (alpha * alpha) * Operator::identity(a.space());
    return embed(l, space, idx);
}

// H_SB = g[α σz b̂† − i σy â b̂†] + h.c. on spin ⊗ Fock ⊗ bath.
inline Operator system_bath_hamiltonian(double alpha, const BathParams& b,
                                        const SpaceLabel& space3) {
    b.validate();
    if (space3.num_factors() != 3 || space3.factors()[0].dim != 2)
        throw dimension_error("system_bath_hamiltonian expects spin ⊗ Fock ⊗ bath");
    int n = space3.factors()[1].dim;
    int nb = space3.factors()[2].dim;
    Matrix bd = fock_create(nb).matrix();
    Matrix term = alpha * kron(pauli(Axis::z).matrix(),
                               kron(Matrix::Identity(n, n), bd)) -
                  kI * kron(pauli(Axis::y).matrix(),
                            kron(fock_destroy(n).matrix(), bd));
    Matrix h = b.g * term;
    h += h.adjoint().eval();
    return Operator(space3, std::move(h));
}

// −i[H_SB, ·] + γ_b D[b̂]
inline Liouvillian two_mode_liouvillian(double alpha, const BathParams& b,
                                        const SpaceLabel& space3) {
    Liouvillian out(space3);
    out.add_hamiltonian(system_bath_hamiltonian(alpha, b, space3));
    int nb = space3.factors()[2].dim;
    out.add_jump(b.gamma_b, embed(fock_destroy(nb), space3, 2));
    return out;
}

}  // namespace hqec
