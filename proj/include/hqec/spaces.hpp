#pragma once

// Hilbert-space kernel: labeled tensor-product spaces and the dense
// operators/states living on them (spin-1/2 factors, truncated Fock factors).

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "hqec/errors.hpp"

namespace hqec {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr Complex kI{0.0, 1.0};

// Combined population allowed in the top kGuardLevels Fock levels before a
// leakage_error is raised.
inline constexpr double kLeakageTol = 1e-8;
inline constexpr int kGuardLevels = 3;

struct Factor {
    std::string name;
    int dim = 0;

    bool operator==(const Factor&) const = default;
};

class SpaceLabel {
  public:
    SpaceLabel() = default;
    explicit SpaceLabel(std::vector<Factor> factors) : factors_(std::move(factors)) {
        for (const auto& f : factors_) {
            if (f.dim < 1) throw dimension_error("factor '" + f.name + "' has dim < 1");
        }
    }

    static SpaceLabel spin(const std::string& name = "spin") {
        return SpaceLabel({{name, 2}});
    }
    static SpaceLabel fock(int n, const std::string& name = "boson") {
        return SpaceLabel({{name, n}});
    }
    // spin ⊗ Fock composite used by the hybrid qubit.
    static SpaceLabel spin_fock(int n) {
        return SpaceLabel({{"spin", 2}, {"boson", n}});
    }
    // spin ⊗ Fock ⊗ bath-Fock composite of the two-mode model.
    static SpaceLabel spin_fock_bath(int n, int n_bath) {
        return SpaceLabel({{"spin", 2}, {"boson", n}, {"bath", n_bath}});
    }

    const std::vector<Factor>& factors() const { return factors_; }
    std::size_t num_factors() const { return factors_.size(); }

    long dim() const {
        long d = 1;
        for (const auto& f : factors_) d *= f.dim;
        return d;
    }

    int factor_index(const std::string& name) const {
        for (std::size_t i = 0; i < factors_.size(); ++i)
            if (factors_[i].name == name) return static_cast<int>(i);
        throw dimension_error("unknown factor '" + name + "'");
    }

    SpaceLabel tensor(const SpaceLabel& other) const {
        std::vector<Factor> f = factors_;
        f.insert(f.end(), other.factors_.begin(), other.factors_.end());
        return SpaceLabel(std::move(f));
    }

    std::string to_string() const {
        std::string s;
        for (const auto& f : factors_) {
            if (!s.empty()) s += " ⊗ ";
            s += f.name + "(" + std::to_string(f.dim) + ")";
        }
        return s.empty() ? "scalar" : s;
    }

    bool operator==(const SpaceLabel&) const = default;

  private:
    std::vector<Factor> factors_;
};

inline void require_same_space(const SpaceLabel& a, const SpaceLabel& b,
                               const char* what) {
    if (!(a == b))
        throw dimension_error(std::string(what) + ": space mismatch (" +
                              a.to_string() + " vs " + b.to_string() + ")");
}

class Operator {
  public:
    Operator() = default;
    Operator(SpaceLabel space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() != space_.dim())
            throw dimension_error("operator matrix does not match its space");
    }

    static Operator identity(const SpaceLabel& s) {
        return Operator(s, Matrix::Identity(s.dim(), s.dim()));
    }
    static Operator zero(const SpaceLabel& s) {
        return Operator(s, Matrix::Zero(s.dim(), s.dim()));
    }

    const SpaceLabel& space() const { return space_; }
    const Matrix& matrix() const { return m_; }
    long dim() const { return m_.rows(); }

    Operator adjoint() const { return Operator(space_, m_.adjoint()); }

    Operator operator+(const Operator& o) const {
        require_same_space(space_, o.space_, "operator add");
        return Operator(space_, m_ + o.m_);
    }
    Operator operator-(const Operator& o) const {
        require_same_space(space_, o.space_, "operator sub");
        return Operator(space_, m_ - o.m_);
    }
    Operator operator*(const Operator& o) const {
        require_same_space(space_, o.space_, "operator multiply");
        return Operator(space_, m_ * o.m_);
    }
    Operator operator*(Complex c) const { return Operator(space_, c * m_); }
    Operator operator-() const { return Operator(space_, -m_); }
    friend Operator operator*(Complex c, const Operator& o) { return o * c; }
    friend Operator operator*(double c, const Operator& o) { return o * Complex(c); }

    bool is_hermitian(double tol = 1e-10) const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff() <= tol;
    }

  private:
    SpaceLabel space_;
    Matrix m_;
};

class StateVector {
  public:
    StateVector() = default;
    StateVector(SpaceLabel space, Vector amps)
        : space_(std::move(space)), v_(std::move(amps)) {
        if (v_.size() != space_.dim())
            throw dimension_error("state vector does not match its space");
    }

    static StateVector basis(const SpaceLabel& s, long index) {
        Vector v = Vector::Zero(s.dim());
        v(index) = 1.0;
        return StateVector(s, v);
    }

    const SpaceLabel& space() const { return space_; }
    const Vector& amplitudes() const { return v_; }
    double norm() const { return v_.norm(); }

    StateVector normalized() const {
        double n = v_.norm();
        if (n == 0.0) throw error("cannot normalize the zero vector");
        return StateVector(space_, v_ / n);
    }

    StateVector operator+(const StateVector& o) const {
        require_same_space(space_, o.space_, "state add");
        return StateVector(space_, v_ + o.v_);
    }
    StateVector operator-(const StateVector& o) const {
        require_same_space(space_, o.space_, "state sub");
        return StateVector(space_, v_ - o.v_);
    }
    StateVector operator*(Complex c) const { return StateVector(space_, c * v_); }
    friend StateVector operator*(Complex c, const StateVector& s) { return s * c; }

    Complex inner(const StateVector& o) const {
        require_same_space(space_, o.space_, "inner product");
        return v_.adjoint() * o.v_;
    }

  private:
    SpaceLabel space_;
    Vector v_;
};

inline StateVector operator*(const Operator& a, const StateVector& psi) {
    require_same_space(a.space(), psi.space(), "operator apply");
    return StateVector(psi.space(), a.matrix() * psi.amplitudes());
}

class DensityMatrix {
  public:
    DensityMatrix() = default;
    DensityMatrix(SpaceLabel space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() != space_.dim())
            throw dimension_error("density matrix does not match its space");
    }

    static DensityMatrix pure(const StateVector& psi) {
        return DensityMatrix(psi.space(),
                             psi.amplitudes() * psi.amplitudes().adjoint());
    }
    static DensityMatrix maximally_mixed(const SpaceLabel& s) {
        long d = s.dim();
        return DensityMatrix(s, Matrix::Identity(d, d) / double(d));
    }

    const SpaceLabel& space() const { return space_; }
    const Matrix& matrix() const { return m_; }
    long dim() const { return m_.rows(); }

    double trace_real() const { return m_.trace().real(); }
    double hermiticity_defect() const {
        return (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
    }
    double min_eigenvalue() const {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m_ + m_.adjoint()),
                                                 Eigen::EigenvaluesOnly);
        return es.eigenvalues().minCoeff();
    }

    // Validity gates used after propagation.
    void check(double trace_tol = 1e-8, double herm_tol = 1e-8,
               double eig_floor = -1e-6) const {
        if (std::abs(trace_real() - 1.0) > trace_tol)
            throw integration_error("density matrix trace drifted from 1");
        if (hermiticity_defect() > herm_tol)
            throw integration_error("density matrix lost Hermiticity");
        if (min_eigenvalue() < eig_floor)
            throw integration_error("density matrix lost positivity");
    }

  private:
    SpaceLabel space_;
    Matrix m_;
};

// ---- single-factor constructors ----------------------------------------

inline Operator fock_destroy(int n) {
    if (n < 2) throw error("fock_destroy requires truncation N >= 2");
    Matrix m = Matrix::Zero(n, n);
    for (int k = 1; k < n; ++k) m(k - 1, k) = std::sqrt(double(k));
    return Operator(SpaceLabel::fock(n), m);
}

inline Operator fock_create(int n) { return fock_destroy(n).adjoint(); }

inline Operator number(int n) {
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = double(k);
    return Operator(SpaceLabel::fock(n), m);
}

inline Operator parity(int n) {
    Matrix m = Matrix::Zero(n, n);
    for (int k = 0; k < n; ++k) m(k, k) = (k % 2 == 0) ? 1.0 : -1.0;
    return Operator(SpaceLabel::fock(n), m);
}

enum class Axis { x, y, z };

inline Operator pauli(Axis axis) {
    Matrix m(2, 2);
    switch (axis) {
        case Axis::x: m << 0, 1, 1, 0; break;
        case Axis::y: m << 0, -kI, kI, 0; break;
        case Axis::z: m << 1, 0, 0, -1; break;
    }
    return Operator(SpaceLabel::spin(), m);
}

// X-eigenstates |±⟩ of the spin.
inline StateVector spin_plus() {
    Vector v(2);
    v << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    return StateVector(SpaceLabel::spin(), v);
}
inline StateVector spin_minus() {
    Vector v(2);
    v << 1.0 / std::sqrt(2.0), -1.0 / std::sqrt(2.0);
    return StateVector(SpaceLabel::spin(), v);
}

// ---- tensor products ----------------------------------------------------

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Operator tensor(const Operator& a, const Operator& b) {
    return Operator(a.space().tensor(b.space()), kron(a.matrix(), b.matrix()));
}

inline StateVector tensor(const StateVector& a, const StateVector& b) {
    Vector out(a.amplitudes().size() * b.amplitudes().size());
    for (long i = 0; i < a.amplitudes().size(); ++i)
        out.segment(i * b.amplitudes().size(), b.amplitudes().size()) =
            a.amplitudes()(i) * b.amplitudes();
    return StateVector(a.space().tensor(b.space()), out);
}

// Embeds a single-factor operator into `space` at factor `index`, identity on
// the remaining factors.
inline Operator embed(const Operator& op, const SpaceLabel& space, int index) {
    const auto& fs = space.factors();
    if (index < 0 || index >= static_cast<int>(fs.size()))
        throw dimension_error("embed: factor index out of range");
    if (op.dim() != fs[index].dim)
        throw dimension_error("embed: operator does not fit factor '" +
                              fs[index].name + "'");
    Matrix m = (index == 0) ? op.matrix() : Matrix::Identity(fs[0].dim, fs[0].dim);
    for (std::size_t i = 1; i < fs.size(); ++i) {
        if (static_cast<int>(i) == index)
            m = kron(m, op.matrix());
        else
            m = kron(m, Matrix::Identity(fs[i].dim, fs[i].dim));
    }
    return Operator(space, std::move(m));
}

inline Operator embed(const Operator& op, const SpaceLabel& space,
                      const std::string& factor_name) {
    return embed(op, space, space.factor_index(factor_name));
}

// ---- leakage guard ------------------------------------------------------

// Population of |psi⟩ in the top kGuardLevels levels of every bosonic factor.
inline double fock_tail_population(const StateVector& psi) {
    const auto& fs = psi.space().factors();
    double tail = 0.0;
    long right = psi.space().dim();
    for (std::size_t f = 0; f < fs.size(); ++f) {
        right /= fs[f].dim;
        if (fs[f].dim <= 2) continue;  // spin factors have no Fock tail
        long left = psi.space().dim() / (fs[f].dim * right);
        int lo = std::max(0, fs[f].dim - kGuardLevels);
        for (long l = 0; l < left; ++l)
            for (int k = lo; k < fs[f].dim; ++k)
                for (long r = 0; r < right; ++r)
                    tail += std::norm(psi.amplitudes()((l * fs[f].dim + k) * right + r));
    }
    return tail;
}

inline double fock_tail_population(const DensityMatrix& rho) {
    const auto& fs = rho.space().factors();
    double tail = 0.0;
    long right = rho.space().dim();
    for (std::size_t f = 0; f < fs.size(); ++f) {
        right /= fs[f].dim;
        if (fs[f].dim <= 2) continue;
        long left = rho.space().dim() / (fs[f].dim * right);
        int lo = std::max(0, fs[f].dim - kGuardLevels);
        for (long l = 0; l < left; ++l)
            for (int k = lo; k < fs[f].dim; ++k)
                for (long r = 0; r < right; ++r) {
                    long idx = (l * fs[f].dim + k) * right + r;
                    tail += rho.matrix()(idx, idx).real();
                }
    }
    return tail;
}

template <typename State>
inline void check_leakage(const State& s, const char* what) {
    double tail = fock_tail_population(s);
    if (tail > kLeakageTol)
        throw leakage_error(std::string(what) + ": Fock-tail population " +
                            std::to_string(tail) + " exceeds guard; increase truncation");
}

// ---- displacement and coherent states -----------------------------------

// Matrix exponential of the truncated generator α â† − α* â.  The guard
// checks the tail of D(α)|0⟩; constructors that displace other states run
// their own guard.  guarded=false skips the check (used for logical-Z
// constructions where D(2α) acts only on already-displaced states).
inline Operator displacement(Complex alpha, int n, bool guarded = true) {
    Operator a = fock_destroy(n);
    Matrix gen = alpha * a.matrix().adjoint() - std::conj(alpha) * a.matrix();
    Operator d(SpaceLabel::fock(n), gen.exp());
    if (guarded) {
        StateVector vac = StateVector::basis(SpaceLabel::fock(n), 0);
        check_leakage(d * vac, "displacement");
    }
    return d;
}

inline StateVector coherent_state(Complex alpha, int n) {
    StateVector psi = displacement(alpha, n) * StateVector::basis(SpaceLabel::fock(n), 0);
    check_leakage(psi, "coherent_state");
    return psi;
}

// Default Fock truncation for amplitude α (real, α ≥ 0): keeps the Poisson
// tail below the leakage guard for α ≤ 3.
inline int default_truncation(double alpha) {
    int n = static_cast<int>(std::ceil(alpha * alpha + 6.0 * alpha + 10.0));
    return std::max(n, 16);
}

// ---- partial trace ------------------------------------------------------

inline DensityMatrix partial_trace(const DensityMatrix& rho,
                                   const std::vector<std::string>& keep) {
    if (keep.empty()) throw dimension_error("partial_trace: keep set is empty");
    const auto& fs = rho.space().factors();
    std::vector<bool> keep_mask(fs.size(), false);
    for (const auto& name : keep) keep_mask[rho.space().factor_index(name)] = true;

    std::vector<Factor> kept;
    long dk = 1, dt = 1;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        if (keep_mask[i]) {
            kept.push_back(fs[i]);
            dk *= fs[i].dim;
        } else {
            dt *= fs[i].dim;
        }
    }
    SpaceLabel out_space{kept};

    // Map a full multi-index to (kept, traced) row-major sub-indices.
    auto split = [&](long idx) {
        long k = 0, t = 0;
        for (std::size_t i = 0; i < fs.size(); ++i) {
            long stride = 1;
            for (std::size_t j = i + 1; j < fs.size(); ++j) stride *= fs[j].dim;
            long digit = (idx / stride) % fs[i].dim;
            if (keep_mask[i])
                k = k * fs[i].dim + digit;
            else
                t = t * fs[i].dim + digit;
        }
        return std::pair<long, long>{k, t};
    };

    long d = rho.dim();
    std::vector<long> kidx(d), tidx(d);
    for (long i = 0; i < d; ++i) {
        auto [k, t] = split(i);
        kidx[i] = k;
        tidx[i] = t;
    }
    // Gather indices by traced digit so the reduction is a sum of submatrices.
    Matrix out = Matrix::Zero(dk, dk);
    std::vector<std::vector<long>> by_t(dt);
    for (long i = 0; i < d; ++i) by_t[tidx[i]].push_back(i);
    for (long t = 0; t < dt; ++t) {
        const auto& rows = by_t[t];
        for (long i : rows)
            for (long j : rows) out(kidx[i], kidx[j]) += rho.matrix()(i, j);
    }
    return DensityMatrix(out_space, std::move(out));
}

inline Complex expectation(const DensityMatrix& rho, const Operator& o) {
    require_same_space(rho.space(), o.space(), "expectation");
    return (rho.matrix() * o.matrix()).trace();
}

inline Complex expectation(const StateVector& psi, const Operator& o) {
    require_same_space(psi.space(), o.space(), "expectation");
    return psi.amplitudes().adjoint() * (o.matrix() * psi.amplitudes());
}

}  // namespace hqec
