#ifndef WEFT_DILATION_HPP
#define WEFT_DILATION_HPP

// Explicit coextension, fully-coisometric certification and the desk-scale
// Wold decomposition.

#include "points.hpp"

namespace weft {

// Residual of sum_k v^{(k)} (X_k (x) I) v^{(k)*} = I.
inline VerificationReport fully_coisometric_check(const ReprPoint& v,
                                                  const AdmissibleSequence& X, double tol) {
    SeriesSum s = series_sum(v, X, tol);
    double residual = op_norm(Matrix(s.S - identity(v.m)));
    return VerificationReport::make("fully_coisometric", residual, tol, s.tail_bound);
}

struct Coextension {
    Matrix U_basis;           // orthonormal basis of U = closure(ran Q^(1/2)), m x r
    Matrix Y;                 // H -> U in basis coordinates, r x m
    ReprPoint v;              // fully coisometric point on U
    PoissonKernel K;          // the kernel leg of V
    Matrix D_basis;           // basis of D_* = closure(ran Delta)
    VerificationReport isometry;      // V*V = I
    VerificationReport intertwining;  // (w* (+) v*) V = (I_E (x) V) z*
    VerificationReport coisometry;    // v fully coisometric (when U != 0)
};

// V h = K_Z(z) h (+) Y h with Y = Q^(1/2) and v = Lambda^*,
// Lambda (Y h) = (I_E (x) Y) z^* h.
inline Coextension coextend(const ReprPoint& z, const AdmissibleSequence& X,
                            const WeightSequence& Z, int N, const Tol& tol = {}) {
    Coextension out;
    out.K = poisson_kernel(z, X, Z, N, tol.tol);
    Matrix Q = out.K.Q;
    // eigenvalues of Q below the Q-iteration accuracy are numerically zero
    double q_tol = std::min(tol.tol, 1e-11);
    HermitianEigen eq = hermitian_eigen(Q, tol.tol * 10);
    double cut = std::max(tol.rank_tol * std::max(0.0, eq.eigenvalues.maxCoeff()), 100 * q_tol);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < eq.eigenvalues.size(); ++i)
        if (eq.eigenvalues(i) > cut) ++r;
    out.U_basis = Matrix(z.m, r);
    {
        Eigen::Index c = 0;
        for (Eigen::Index i = 0; i < eq.eigenvalues.size(); ++i)
            if (eq.eigenvalues(i) > cut) out.U_basis.col(c++) = eq.eigenvectors.col(i);
    }
    Matrix Qhalf = psd_sqrt(Q, tol.tol * 10);
    out.Y = out.U_basis.adjoint() * Qhalf; // r x m
    out.D_basis = range_basis(out.K.Delta, tol.rank_tol, 1e-7);

    // v on U: Lambda = (I (x) Y) z^* pinv(Y), v = Lambda^*
    ReprPoint v;
    v.model = z.model;
    v.m = int(r);
    if (r > 0) {
        Matrix Ypinv = pinv(out.Y, tol.rank_tol); // m x r
        if (z.model.kind == ModelKind::Free) {
            Matrix Lambda = kron(identity(z.model.d), out.Y) * z.row().adjoint() * Ypinv;
            std::vector<Matrix> vb;
            for (int i = 0; i < z.model.d; ++i)
                vb.push_back(Lambda.middleRows(Eigen::Index(i) * r, r).adjoint());
            v = ReprPoint::free_point(z.model, vb);
        } else {
            Matrix Lambda = out.Y * z.T.adjoint() * Ypinv;
            std::vector<Matrix> projs;
            for (int i = 0; i < z.model.n; ++i) {
                Vector ei = Vector::Zero(z.model.n);
                ei(i) = 1.0;
                projs.push_back(out.U_basis.adjoint() * z.sigma(ei) * out.U_basis);
            }
            v = ReprPoint::auto_point(z.model, Lambda.adjoint(), projs, 1e-6);
        }
    } else if (z.model.kind == ModelKind::Free) {
        std::vector<Matrix> vb(z.model.d, Matrix::Zero(0, 0));
        v.blocks = vb;
    }
    out.v = v;

    // (i) V isometry: K*K + Y*Y = I - Q + Q = I
    double iso = op_norm(Matrix(out.K.gram() + out.Y.adjoint() * out.Y - identity(z.m)));
    out.isometry = VerificationReport::make("coextension_isometry", iso, tol.tol, out.K.tail_bound);

    // (ii) componentwise intertwining, inner blocks:
    //      w* K_Z = (I_E (x) K_Z) z*  and  v* Y = (I_E (x) Y) z*
    double worst = 0.0;
    TruncatedFock bare(z.model, N, 1);
    if (z.model.kind == ModelKind::Free) {
        for (int i = 0; i < z.model.d; ++i) {
            GradedVector ei;
            ei.degree = 1;
            ei.entries = Vector::Zero(z.model.d);
            ei.entries(i) = 1.0;
            GradedOperator W = weighted_shift(ei, Z, bare);
            for (int k = 0; k + 1 <= N; ++k) {
                Matrix lhs = z.amp_module(W.block(k + 1, k)).adjoint() * out.K.block[k + 1];
                Matrix rhs = out.K.block[k] * z.blocks[i].adjoint();
                worst = std::max(worst, op_norm(Matrix(lhs - rhs)));
            }
        }
        if (r > 0)
            for (int i = 0; i < z.model.d; ++i)
                worst = std::max(worst, op_norm(Matrix(out.v.blocks[i].adjoint() * out.Y -
                                                       out.Y * z.blocks[i].adjoint())));
    } else {
        GradedVector one;
        one.degree = 1;
        one.entries = Vector::Ones(z.model.n);
        GradedOperator W = weighted_shift(one, Z, bare);
        for (int k = 0; k + 1 <= N; ++k) {
            Matrix lhs = z.amp_module(W.block(k + 1, k)).adjoint() * out.K.block[k + 1];
            Matrix rhs = out.K.block[k] * z.T.adjoint();
            worst = std::max(worst, op_norm(Matrix(lhs - rhs)));
        }
        if (r > 0)
            worst = std::max(worst,
                             op_norm(Matrix(out.v.T.adjoint() * out.Y - out.Y * z.T.adjoint())));
    }
    out.intertwining =
        VerificationReport::make("coextension_intertwine", worst, tol.tol, out.K.tail_bound, 1);

    // (iii) v fully coisometric on U
    if (r > 0)
        out.coisometry = fully_coisometric_check(out.v, X, tol.tol);
    else
        out.coisometry = VerificationReport::make("fully_coisometric", 0.0, tol.tol);
    return out;
}

struct WoldSplit {
    Matrix P_M;       // pi(P_0)
    Matrix K_ind;     // orthonormal basis, columns
    Matrix K_full;    // orthonormal basis of the complement
    int multiplicity = 0;
    int levels = 0;   // induced levels found
    VerificationReport projection;    // P_M is a projection
    VerificationReport orthogonality; // level images pairwise orthogonal + isometric
    VerificationReport induced_match; // u-images intertwine the induced shift
    VerificationReport full_coisometric; // restriction to K_full
};

// Wold decomposition of the representation generated by v (with weights Z
// associated to X): P_M = I - sum_k v^{(k)}(X_k (x) I)v^{(k)*} must be a
// projection; u = pinv_sqrt(v v*) v, K_ind = sum_k ran u^{(k)}(E^k (x) ran P_M).
inline WoldSplit wold(const ReprPoint& v, const AdmissibleSequence& X, const WeightSequence& Z,
                      const Tol& tol = {}) {
    if (v.model.kind != ModelKind::Free)
        throw InputError("wold: free model points only");
    WoldSplit out;
    SeriesSum s = series_sum(v, X, tol.tol);
    out.P_M = identity(v.m) - s.S;
    out.projection = VerificationReport::make(
        "wold_projection", std::max(op_norm(Matrix(out.P_M * out.P_M - out.P_M)),
                                    op_norm(Matrix(out.P_M - out.P_M.adjoint().eval()))),
        tol.tol, s.tail_bound);
    if (!out.projection.pass)
        throw NotAProjection("I - sum v^{(k)}(X_k (x) I)v^{(k)*} is not a projection; "
                             "the representation does not extend");

    // u = d^{(-1)} v reconstructed intrinsically: d_1^2 = v v^*
    Matrix d1sq = v.row() * v.row().adjoint();
    Matrix dinv = pinv_sqrt(d1sq, tol.rank_tol, tol.tol * 100);
    ReprPoint u = v;
    for (auto& b : u.blocks) b = dinv * b;

    Matrix B0 = range_basis(out.P_M, 1e-9, 1e-4);
    out.multiplicity = int(B0.cols());
    std::vector<Matrix> levels;
    levels.push_back(B0);
    double orth_worst = op_norm(Matrix(B0.adjoint() * B0 - identity(B0.cols())));
    Eigen::Index accum = B0.cols();
    int k = 1;
    int cap = 3 * v.m + 10;
    while (accum < v.m && k <= cap) {
        Matrix Lk = u.power(k) * kron(identity(tensor_dim(v.model, k)), B0);
        if (op_norm(Lk) <= tol.tol) break;
        // u^{(k)} restricted to E^k (x) ran P_M must be isometric...
        orth_worst = std::max(orth_worst,
                              op_norm(Matrix(Lk.adjoint() * Lk - identity(Lk.cols()))));
        // ...with image orthogonal to every earlier level
        for (const auto& Lj : levels)
            orth_worst = std::max(orth_worst, op_norm(Matrix(Lj.adjoint() * Lk)));
        accum += Lk.cols();
        levels.push_back(Lk);
        ++k;
    }
    out.levels = int(levels.size()) - 1;
    out.orthogonality = VerificationReport::make("wold_orthogonality", orth_worst, tol.tol * 10);

    Matrix Kind(v.m, accum);
    Eigen::Index c = 0;
    for (const auto& L : levels) {
        Kind.middleCols(c, L.cols()) = L;
        c += L.cols();
    }
    out.K_ind = Kind;

    // complement
    Matrix P_ind = Kind * Kind.adjoint();
    out.K_full = range_basis(Matrix(identity(v.m) - P_ind), 1e-9, 1e-4);

    // the u-images carry the induced (weighted) shift with multiplicity r
    double match_worst = 0.0;
    for (int i = 0; i < v.model.d; ++i) {
        GradedVector ei;
        ei.degree = 1;
        ei.entries = Vector::Zero(v.model.d);
        ei.entries(i) = 1.0;
        Matrix piW = v.row() * kron(Matrix(ei.entries), identity(v.m)); // pi(W_ei)
        for (int j = 0; j + 1 < int(levels.size()); ++j) {
            TruncatedFock bare(v.model, j + 1, 1);
            GradedOperator W = weighted_shift(ei, Z, bare);
            Matrix rhs = levels[j + 1] * kron(W.block(j + 1, j), identity(out.multiplicity));
            Matrix lhs = piW * levels[j];
            match_worst = std::max(match_worst, op_norm(Matrix(lhs - rhs)));
        }
    }
    out.induced_match = VerificationReport::make("wold_induced_match", match_worst, tol.tol * 10);

    // restriction to K_full is fully coisometric
    if (out.K_full.cols() > 0) {
        std::vector<Matrix> vb;
        for (int i = 0; i < v.model.d; ++i)
            vb.push_back(Matrix(out.K_full.adjoint() * v.blocks[i] * out.K_full));
        ReprPoint vfull = ReprPoint::free_point(v.model, vb);
        out.full_coisometric = fully_coisometric_check(vfull, X, tol.tol * 10);
    } else {
        out.full_coisometric = VerificationReport::make("fully_coisometric", 0.0, tol.tol);
    }
    return out;
}

} // namespace weft

#endif
