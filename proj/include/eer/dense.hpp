#pragma once

// Dense complex-matrix core: strong types for operators, states and
// bipartitions, plus the spectral calculus everything else is built on.

#include <Eigen/Dense>

#include <complex>
#include <string>
#include <utility>

#include "eer/errors.hpp"

namespace eer {

template <class Scalar>
using ComplexMatrix =
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;
template <class Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;
template <class Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Index = Eigen::Index;

// Relative tolerance for declared Hermiticity; inputs beyond it are
// rejected, never symmetrized.
inline constexpr double hermitian_rel_tol = 1e-12;

template <class Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
    if (m.size() == 0) return 0.0;
    return m.derived().cwiseAbs().maxCoeff();
}

template <class Scalar = double>
struct BasicOperator {
    ComplexMatrix<Scalar> mat;
    bool hermitian_hint = false;

    BasicOperator() = default;

    template <class Derived>
    explicit BasicOperator(const Eigen::MatrixBase<Derived>& m, bool hint = false)
        : mat(m), hermitian_hint(hint) {
        if (mat.rows() != mat.cols())
            throw dimension_error("operator must be square, got " +
                                  std::to_string(mat.rows()) + "x" +
                                  std::to_string(mat.cols()));
        if (hermitian_hint) {
            const double scale = max_abs(mat);
            const double dev = max_abs(mat - mat.adjoint());
            if (dev > hermitian_rel_tol * (scale > 0 ? scale : 1.0))
                throw hermiticity_error(
                    "hermitian_hint set but max|M - M^H| = " + std::to_string(dev));
        }
    }

    Index dim() const { return mat.rows(); }
};

using Operator = BasicOperator<double>;

template <class Scalar = double>
struct BasicPureState {
    ComplexVector<Scalar> amplitudes;

    BasicPureState() = default;

    template <class Derived>
    explicit BasicPureState(const Eigen::MatrixBase<Derived>& v) : amplitudes(v) {
        const double n = amplitudes.norm();
        if (std::abs(n - 1.0) > 1e-12)
            throw state_error("pure state norm " + std::to_string(n) + " != 1");
    }

    Index dim() const { return amplitudes.size(); }
};

using PureState = BasicPureState<double>;

template <class Scalar = double>
struct BasicDensityMatrix {
    BasicOperator<Scalar> op;

    BasicDensityMatrix() = default;

    template <class Derived>
    explicit BasicDensityMatrix(const Eigen::MatrixBase<Derived>& m)
        : op(m, /*hint=*/true) {
        const std::complex<Scalar> tr = op.mat.trace();
        if (std::abs(tr - std::complex<Scalar>(1, 0)) > 1e-12)
            throw state_error("density matrix trace " + std::to_string(tr.real()) +
                              " != 1");
        Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(
            op.mat, Eigen::EigenvaluesOnly);
        if (es.info() != Eigen::Success)
            throw state_error("eigenvalue check failed on density matrix");
        if (es.eigenvalues().minCoeff() < -1e-12)
            throw state_error("density matrix has eigenvalue " +
                              std::to_string(es.eigenvalues().minCoeff()));
    }

    const ComplexMatrix<Scalar>& mat() const { return op.mat; }
    Index dim() const { return op.dim(); }
};

using DensityMatrix = BasicDensityMatrix<double>;

struct BipartitePartition {
    Index d_A = 0;
    Index d_B = 0;

    void check(Index dim) const {
        if (d_A < 1 || d_B < 1 || d_A * d_B != dim)
            throw partition_error("partition " + std::to_string(d_A) + "x" +
                                  std::to_string(d_B) + " does not factor dim " +
                                  std::to_string(dim));
    }
};

enum class Keep { A, B };

template <class Scalar>
BasicDensityMatrix<Scalar> projector(const BasicPureState<Scalar>& psi) {
    return BasicDensityMatrix<Scalar>(psi.amplitudes *
                                      psi.amplitudes.adjoint());
}

// Kronecker product on raw matrices; block (i,j) is A(i,j)*B.
template <class DA, class DB>
auto kron_dense(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B)
    -> Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> {
    Eigen::Matrix<typename DA::Scalar, Eigen::Dynamic, Eigen::Dynamic> out(
        A.rows() * B.rows(), A.cols() * B.cols());
    for (Index i = 0; i < A.rows(); ++i)
        for (Index j = 0; j < A.cols(); ++j)
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) =
                A(i, j) * B.derived();
    return out;
}

template <class Scalar>
BasicOperator<Scalar> kron(const BasicOperator<Scalar>& A,
                           const BasicOperator<Scalar>& B) {
    return BasicOperator<Scalar>(kron_dense(A.mat, B.mat),
                                 A.hermitian_hint && B.hermitian_hint);
}

// Partial trace on a raw matrix over the kept/discarded tensor factors.
template <class Scalar>
ComplexMatrix<Scalar> partial_trace_dense(const ComplexMatrix<Scalar>& m,
                                          const BipartitePartition& part,
                                          Keep keep) {
    part.check(m.rows());
    const Index dA = part.d_A, dB = part.d_B;
    if (keep == Keep::A) {
        ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(dA, dA);
        for (Index a = 0; a < dA; ++a)
            for (Index a2 = 0; a2 < dA; ++a2)
                for (Index b = 0; b < dB; ++b)
                    out(a, a2) += m(a * dB + b, a2 * dB + b);
        return out;
    }
    ComplexMatrix<Scalar> out = ComplexMatrix<Scalar>::Zero(dB, dB);
    for (Index b = 0; b < dB; ++b)
        for (Index b2 = 0; b2 < dB; ++b2)
            for (Index a = 0; a < dA; ++a)
                out(b, b2) += m(a * dB + b, a * dB + b2);
    return out;
}

template <class Scalar>
BasicDensityMatrix<Scalar> partial_trace(const BasicDensityMatrix<Scalar>& rho,
                                         const BipartitePartition& part,
                                         Keep keep) {
    return BasicDensityMatrix<Scalar>(
        partial_trace_dense<Scalar>(rho.mat(), part, keep));
}

template <class Scalar>
BasicOperator<Scalar> commutator(const BasicOperator<Scalar>& A,
                                 const BasicOperator<Scalar>& B) {
    if (A.dim() != B.dim())
        throw dimension_error("commutator of dims " + std::to_string(A.dim()) +
                              " and " + std::to_string(B.dim()));
    return BasicOperator<Scalar>(A.mat * B.mat - B.mat * A.mat);
}

template <class Scalar>
struct HermitianEig {
    RealVector<Scalar> values;       // ascending
    ComplexMatrix<Scalar> vectors;   // columns, unitary
};

template <class Scalar>
HermitianEig<Scalar> hermitian_eig(const BasicOperator<Scalar>& H) {
    if (!H.hermitian_hint)
        throw hermiticity_error("hermitian_eig requires hermitian_hint");
    Eigen::SelfAdjointEigenSolver<ComplexMatrix<Scalar>> es(H.mat);
    if (es.info() != Eigen::Success)
        throw contract_error("eigendecomposition did not converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

enum class MatrixFunc { exp, log, power };

template <class Scalar>
struct SpectralResult {
    BasicOperator<Scalar> op;
    int floored_count = 0;  // eigenvalues clamped to spectral_floor
};

// f applied on the spectrum, rotated back. log and fractional power clamp
// eigenvalues at spectral_floor; floor 0 turns clamping into an error.
template <class Scalar>
SpectralResult<Scalar> matrix_func_hermitian(const BasicOperator<Scalar>& H,
                                             MatrixFunc f,
                                             Scalar spectral_floor = Scalar(1e-14),
                                             Scalar exponent = Scalar(1)) {
    auto eig = hermitian_eig(H);
    RealVector<Scalar> lam = eig.values;
    int floored = 0;
    if (f == MatrixFunc::log || f == MatrixFunc::power) {
        for (Index i = 0; i < lam.size(); ++i) {
            if (lam(i) < spectral_floor) {
                lam(i) = spectral_floor;
                ++floored;
            }
        }
        const bool frac = f == MatrixFunc::power &&
                          exponent != std::round(exponent);
        const bool neg_pow = f == MatrixFunc::power && exponent < Scalar(0);
        for (Index i = 0; i < lam.size(); ++i) {
            const bool bad_log = f == MatrixFunc::log && lam(i) <= Scalar(0);
            const bool bad_pow = (frac && lam(i) < Scalar(0)) ||
                                 (neg_pow && lam(i) == Scalar(0));
            if (bad_log || bad_pow)
                throw singular_spectrum_error(
                    "eigenvalue " + std::to_string(lam(i)) +
                    " outside the domain of the requested spectral function");
        }
    }
    RealVector<Scalar> flam(lam.size());
    for (Index i = 0; i < lam.size(); ++i) {
        switch (f) {
            case MatrixFunc::exp: flam(i) = std::exp(lam(i)); break;
            case MatrixFunc::log: flam(i) = std::log(lam(i)); break;
            case MatrixFunc::power: flam(i) = std::pow(lam(i), exponent); break;
        }
    }
    ComplexMatrix<Scalar> out = eig.vectors *
                                flam.template cast<std::complex<Scalar>>().asDiagonal() *
                                eig.vectors.adjoint();
    SpectralResult<Scalar> res;
    res.op = BasicOperator<Scalar>(out, /*hint=*/true);
    res.floored_count = floored;
    return res;
}

// tr(AB) without forming the product.
template <class DA, class DB>
auto trace_product(const Eigen::MatrixBase<DA>& A, const Eigen::MatrixBase<DB>& B)
    -> typename DA::Scalar {
    return A.derived().transpose().cwiseProduct(B.derived()).sum();
}

template <class Scalar>
std::complex<Scalar> expectation(const BasicOperator<Scalar>& O,
                                 const BasicDensityMatrix<Scalar>& rho) {
    if (O.dim() != rho.dim())
        throw dimension_error("expectation dims " + std::to_string(O.dim()) +
                              " vs " + std::to_string(rho.dim()));
    return trace_product(rho.mat(), O.mat);
}

template <class Scalar>
bool is_hollow(const BasicOperator<Scalar>& M, Scalar tol) {
    const double scale = max_abs(M.mat);
    if (scale == 0.0) return true;
    return M.mat.diagonal().cwiseAbs().maxCoeff() <= tol * scale;
}

template <class Scalar>
bool is_diagonal(const BasicOperator<Scalar>& M, Scalar tol) {
    const double scale = max_abs(M.mat);
    if (scale == 0.0) return true;
    ComplexMatrix<Scalar> off = M.mat;
    off.diagonal().setZero();
    return max_abs(off) <= tol * scale;
}

}  // namespace eer
