#ifndef WEFT_NUMERICS_HPP
#define WEFT_NUMERICS_HPP

// Deterministic dense complex-matrix kernel: Hermitian spectral calculus,
// PSD square roots, pseudo-inverses, norms, Kronecker products.
// Everything here is a pure function of its arguments; identical inputs
// give bit-identical outputs (single-threaded Eigen, no randomized solves).

#include <vector>

#include "types.hpp"

namespace weft {

// Kronecker product with the left factor most significant:
// (kron(A,B))[(iA*rowsB+iB),(jA*colsB+jB)] = A[iA,jA]*B[iB,jB].
inline Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

inline Matrix identity(Eigen::Index n) { return Matrix::Identity(n, n); }

// Largest singular value, computed as sqrt(max eig of A*A).
inline double op_norm(const Matrix& A) {
    if (A.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Matrix> es(A.adjoint() * A, Eigen::EigenvaluesOnly);
    double lam = es.eigenvalues().maxCoeff();
    return std::sqrt(std::max(0.0, lam));
}

inline bool is_hermitian(const Matrix& A, double tol) {
    double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    return (A - A.adjoint()).cwiseAbs().maxCoeff() <= tol * scale;
}

// Eigendecomposition of a Hermitian matrix. Eigenvalues ascending; each
// eigenvector's first component of modulus > norm*1e-12 is rotated to the
// positive real axis so the factorization is reproducible.
struct HermitianEigen {
    RealVector eigenvalues; // ascending
    Matrix eigenvectors;    // unitary, columns
};

inline HermitianEigen hermitian_eigen(const Matrix& A, double tol = 1e-9) {
    if (A.rows() != A.cols()) throw ShapeMismatch("hermitian_eigen: square matrix required");
    if (!is_hermitian(A, tol)) throw NotHermitian("hermitian_eigen: input not Hermitian within tol");
    Eigen::SelfAdjointEigenSolver<Matrix> es((A + Matrix(A.adjoint())) / 2.0);
    HermitianEigen out{es.eigenvalues(), es.eigenvectors()};
    for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
        auto col = out.eigenvectors.col(j);
        double colnorm = col.norm();
        for (Eigen::Index i = 0; i < col.size(); ++i) {
            if (std::abs(col(i)) > 1e-12 * colnorm) {
                cx phase = std::conj(col(i)) / std::abs(col(i));
                out.eigenvectors.col(j) *= phase;
                break;
            }
        }
    }
    return out;
}

// Spectral functional calculus on a Hermitian input.
template <class F>
inline Matrix hermitian_calculus(const Matrix& A, F&& f, double tol = 1e-9) {
    HermitianEigen ed = hermitian_eigen(A, tol);
    RealVector mapped(ed.eigenvalues.size());
    for (Eigen::Index i = 0; i < mapped.size(); ++i) mapped(i) = f(ed.eigenvalues(i));
    return ed.eigenvectors * mapped.cast<cx>().asDiagonal() * ed.eigenvectors.adjoint();
}

// PSD square root; eigenvalues in [-tol*||A||, 0) are clamped to zero,
// anything lower is an error.
inline Matrix psd_sqrt(const Matrix& A, double tol = 1e-9) {
    HermitianEigen ed = hermitian_eigen(A, tol);
    double scale = std::max(ed.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
    double floor = -tol * std::max(scale, 1e-300);
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
        if (ed.eigenvalues(i) < floor)
            throw NotPositive("psd_sqrt: eigenvalue " + std::to_string(ed.eigenvalues(i)) +
                              " below -tol*norm");
    RealVector mapped(ed.eigenvalues.size());
    for (Eigen::Index i = 0; i < mapped.size(); ++i)
        mapped(i) = std::sqrt(std::max(0.0, ed.eigenvalues(i)));
    return ed.eigenvectors * mapped.cast<cx>().asDiagonal() * ed.eigenvectors.adjoint();
}

// t -> t^(-1/2) on eigenvalues above rank_tol*||A||, 0 below.
inline Matrix pinv_sqrt(const Matrix& A, double rank_tol = 1e-12, double tol = 1e-9) {
    HermitianEigen ed = hermitian_eigen(A, tol);
    double scale = std::max(ed.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
    double floor = -tol * std::max(scale, 1e-300);
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
        if (ed.eigenvalues(i) < floor) throw NotPositive("pinv_sqrt: input not PSD within tol");
    double cut = rank_tol * std::max(scale, 1e-300);
    RealVector mapped(ed.eigenvalues.size());
    for (Eigen::Index i = 0; i < mapped.size(); ++i)
        mapped(i) = ed.eigenvalues(i) > cut ? 1.0 / std::sqrt(ed.eigenvalues(i)) : 0.0;
    return ed.eigenvectors * mapped.cast<cx>().asDiagonal() * ed.eigenvectors.adjoint();
}

inline bool is_projection(const Matrix& P, double tol = 1e-9) {
    if (P.rows() != P.cols()) return false;
    return op_norm(P * P - P) <= tol && op_norm(Matrix(P - P.adjoint())) <= tol;
}

// Rank-one resolution X = sum_a xi_a xi_a^* of a PSD matrix; columns are
// sqrt(lambda_a) u_a over eigenvalues above tol*||X||.
inline std::vector<Vector> positive_expand(const Matrix& X, double tol = 1e-9) {
    HermitianEigen ed = hermitian_eigen(X, tol);
    double scale = std::max(ed.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
    double floor = -tol * std::max(scale, 1e-300);
    std::vector<Vector> cols;
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i) {
        double lam = ed.eigenvalues(i);
        if (lam < floor) throw NotPositive("positive_expand: input not PSD within tol");
        if (lam > tol * std::max(scale, 1e-300))
            cols.push_back(std::sqrt(lam) * ed.eigenvectors.col(i));
    }
    return cols;
}

// Orthonormal basis of the column span (deterministic, eigen-based).
// abs_floor, when positive, discards singular directions below it outright,
// which keeps noise-level inputs from acquiring spurious rank.
inline Matrix range_basis(const Matrix& A, double rank_tol = 1e-12, double abs_floor = 0.0) {
    if (A.cols() == 0 || A.rows() == 0) return Matrix(A.rows(), 0);
    Matrix G = A * A.adjoint();
    HermitianEigen ed = hermitian_eigen(G, 1e-9);
    double scale = std::max(ed.eigenvalues.cwiseAbs().maxCoeff(), 0.0);
    double cut = std::max({rank_tol * scale, abs_floor * abs_floor, 1e-300});
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
        if (ed.eigenvalues(i) > cut) ++r;
    Matrix B(A.rows(), r);
    Eigen::Index j = 0;
    for (Eigen::Index i = 0; i < ed.eigenvalues.size(); ++i)
        if (ed.eigenvalues(i) > cut) B.col(j++) = ed.eigenvectors.col(i);
    return B;
}

// Moore-Penrose pseudo-inverse through the Hermitian calculus.
inline Matrix pinv(const Matrix& A, double rank_tol = 1e-12) {
    // A^+ = (A^*A)^+ A^*; (A^*A)^+ = (pinv_sqrt(A^*A))^2
    Matrix S = pinv_sqrt(A.adjoint() * A, rank_tol);
    return S * S * A.adjoint();
}

inline double min_eig_hermitian(const Matrix& A, double tol = 1e-9) {
    return hermitian_eigen(A, tol).eigenvalues.minCoeff();
}

inline double rel_residual(const Matrix& lhs, const Matrix& rhs) {
    double scale = std::max(op_norm(rhs), 1e-300);
    return op_norm(lhs - rhs) / scale;
}

} // namespace weft

#endif
