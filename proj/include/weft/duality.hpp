#ifndef WEFT_DUALITY_HPP
#define WEFT_DUALITY_HPP

// The sigma-dual correspondence E^sigma, the order-reversing U_k
// identifications, dual weights Z'/C, dual weighted shifts and numerical
// verification of the commutant theorem.
//
// Free model, sigma the m-dimensional ampliation. Elements of E^sigma are
// (d*m) x m matrices theta : H -> E (x) H. The abstract spaces
// (E^sigma)^{tensor k} (x) H are represented through U_k: every dual object
// is stored in E-coordinates on E^{tensor k} (x) H, and U-dependent
// identities are verified via tensor_eval on elementary tensors.

#include "fock.hpp"

namespace weft {

struct DualPoint {
    Matrix theta; // (d^j * m) x m, degree j element in E-coordinates
    int degree = 1;
};

// U_k(eta_1 (x) ... (x) eta_k (x) h) =
//     (I_{k-1} (x) eta_1)(I_{k-2} (x) eta_2) ... (I_1 (x) eta_{k-1}) eta_k (h):
// eta_k applies first, eta_1 is amplified the most and lands in the trailing
// tensor slots.
inline Vector tensor_eval(const CorrespondenceModel& model, const std::vector<Matrix>& etas,
                          const Vector& h) {
    if (model.kind != ModelKind::Free) throw InputError("tensor_eval: free model only");
    int k = int(etas.size());
    Vector v = h;
    for (int i = k - 1; i >= 0; --i) {
        int amp = k - 1 - i; // eta_{i+1} gets I_{d^(k-1-i)} in front
        v = kron(identity(tensor_dim(model, amp)), etas[size_t(i)]) * v;
    }
    return v;
}

// The same partial-evaluation rule for a degree-j dual element given in
// E-coordinates: U_{k+j}(theta (x) zeta (x) h) = (I_{d^k} (x) Theta) U_k(zeta (x) h).
inline Matrix dual_amplify(const CorrespondenceModel& model, const Matrix& Theta, int k) {
    return kron(identity(tensor_dim(model, k)), Theta);
}

// Dual weights: Z'_1 = Z_1, Z'_m = Z^{(m)} (Z^{(m-1)} (x) I_1)^{-1}.
inline Matrix dual_Zprime(const WeightSequence& Z, int m) {
    if (m < 1) throw InputError("dual_Zprime: m >= 1");
    if (m == 1) return Z.at(1);
    Matrix Zm = Z_power(Z, m);
    Matrix amp = kron(Z_power(Z, m - 1), identity(tensor_dim(Z.model, 1)));
    return Zm * amp.inverse();
}

// Dual weighted shift in E-coordinates: blocks
//   (k + j <- k) = (Z^{(k+j)} (Z^{(k)} (x) I_{d^j})^{-1} (x) I_m)(I_{d^k} (x) theta).
// For degree 1 the weight factor is Z'_{k+1}.
inline GradedOperator dual_shift(const DualPoint& th, const WeightSequence& Z,
                                 const TruncatedFock& F) {
    if (F.model.kind != ModelKind::Free) throw InputError("dual_shift: free model only");
    int j = th.degree;
    GradedOperator Y(F);
    for (int k = 0; k + j <= F.N; ++k) {
        Matrix wt = Z_power(Z, k + j) *
                    kron(Z_power(Z, k), identity(tensor_dim(F.model, j))).inverse();
        Y.set(k + j, k, kron(wt, identity(F.m)) * dual_amplify(F.model, th.theta, k));
    }
    return Y;
}

// Left action of b in sigma(M)' on the dual Fock space, in E-coordinates:
// level k block I_{d^k} (x) b.
inline GradedOperator dual_left_action(const Matrix& b, const TruncatedFock& F) {
    GradedOperator out(F);
    for (int k = 0; k <= F.N; ++k)
        out.set(k, k, kron(identity(tensor_dim(F.model, k)), b));
    return out;
}

// Commutators of the dual generators with the induced generators vanish on
// inner blocks, and the weight interchange Z'_{k+1}(Z_k (x) I) = Z_{k+1}(I (x) Z'_k)
// holds for every k < N.
inline VerificationReport commutant_check(const DualPoint& th, const GradedVector& xi,
                                          const Matrix& b, const WeightSequence& Z, int N,
                                          int m, double tol) {
    TruncatedFock F(Z.model, N, m);
    TruncatedFock bare(Z.model, N, 1);
    GradedOperator Yd = dual_shift(th, Z, F);
    GradedOperator Bd = dual_left_action(b, F);
    GradedOperator Wi = induce(weighted_shift(xi, Z, bare), m);
    double worst = 0.0;
    int excluded = 0;
    {
        GradedOperator C = Yd * Wi - Wi * Yd;
        int shift = th.degree + xi.degree;
        for (int k = 0; k + shift <= N; ++k)
            worst = std::max(worst, op_norm(C.block(k + shift, k)));
        excluded += shift;
    }
    {
        GradedOperator C = Bd * Wi - Wi * Bd;
        for (int k = 0; k + xi.degree <= N; ++k)
            worst = std::max(worst, op_norm(C.block(k + xi.degree, k)));
        excluded += xi.degree;
    }
    for (int k = 1; k + 1 <= N; ++k) {
        Matrix lhs = dual_Zprime(Z, k + 1) * kron(Z.at(k), identity(Z.model.d));
        Matrix rhs = Z.at(k + 1) * kron(identity(Z.model.d), dual_Zprime(Z, k));
        worst = std::max(worst, op_norm(Matrix(lhs - rhs)));
    }
    return VerificationReport::make("commutant", worst, tol, 0.0, excluded);
}

// Both sides of the mixed amplification identity
//   U*(A (x) I)U (I_sigma_m (x) U*(B (x) I)U) = U*(A (B (x) I_m) (x) I)U
// evaluated through tensor_eval on random elementary tensors.
inline VerificationReport mixed_amplification_check(const CorrespondenceModel& model, const Matrix& A, int km,
                                        const Matrix& B, int k, int m_aux, Rng& rng, int samples,
                                        double tol) {
    if (km != k + (km - k) || km <= k) throw InputError("mixed_amplification_check: need deg A > deg B");
    int mdeg = km - k;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        std::vector<Matrix> etas;
        for (int i = 0; i < km; ++i) etas.push_back(rng.matrix(model.d * m_aux, m_aux));
        Vector h = rng.vector(m_aux);

        // RHS: kron(A (B (x) I_{d^m}), I) applied to the full evaluation
        Vector full = tensor_eval(model, etas, h);
        Vector rhs = kron(Matrix(A * kron(B, identity(tensor_dim(model, mdeg)))),
                          identity(m_aux)) *
                     full;

        // LHS: evaluate the trailing k factors, amplify B, re-attach the
        // leading m sigma-factors (trailing E-slots), then apply A.
        std::vector<Matrix> tail(etas.begin() + mdeg, etas.end());
        Vector f = kron(B, identity(m_aux)) * tensor_eval(model, tail, h);
        Matrix M_eta = etas[size_t(mdeg - 1)]; // (I_{m-1} (x) eta_1) ... eta_m
        for (int i = mdeg - 2; i >= 0; --i)
            M_eta = kron(identity(tensor_dim(model, mdeg - 1 - i)), etas[size_t(i)]) * M_eta;
        Vector lhs = kron(A, identity(m_aux)) *
                     (kron(identity(tensor_dim(model, k)), M_eta) * f);
        worst = std::max(worst, (lhs - rhs).norm() /
                                    std::max(1.0, rhs.norm()));
    }
    return VerificationReport::make("mixed_amplification", worst, tol);
}

// Order-reversed chain identities for the dual weights in E-coordinates:
//   Z'_m (Z'_{m-1} (x) I_1) ... (Z'_{m-n} (x) I_n) = Z^{(m)} (Z^{(m-n-1)} (x) I_{n+1})^{-1}
// and, for n = m-1, the full chain equals Z^{(m)}; consequently the dual
// weights are associated with the reversed composition sums:
// chain* chain = R_m^{-2}.
inline VerificationReport dual_associated_check(const AdmissibleSequence& X,
                                                const WeightSequence& Z, int m_max, double tol) {
    RSequence R = compute_R(X, m_max);
    double worst = 0.0;
    for (int m = 1; m <= m_max; ++m) {
        Matrix chain = dual_Zprime(Z, m);
        for (int n = 1; n <= m - 1; ++n) {
            chain = chain * kron(dual_Zprime(Z, m - n), identity(tensor_dim(X.model, n)));
            Matrix rhs = Z_power(Z, m) *
                         kron(Z_power(Z, m - n - 1),
                              identity(tensor_dim(X.model, n + 1)))
                             .inverse();
            worst = std::max(worst, rel_residual(chain, rhs));
        }
        Matrix full = (m == 1) ? dual_Zprime(Z, 1) : chain;
        worst = std::max(worst, rel_residual(full, Z_power(Z, m)));
        worst = std::max(worst, rel_residual(Matrix(full.adjoint() * full),
                                             Matrix(R.sq(m).inverse())));
    }
    return VerificationReport::make("dual_associated", worst, tol);
}

struct SymbolResult {
    DualPoint theta;
    double reconstruction_residual = 0.0;
    int excluded_blocks = 0;
};

// Read the symbol of a certified band-j element of the commutant:
// g = block (j <- 0), theta = ((Z^{(j)})^{-1} (x) I_m) g; rebuilding the dual
// band operator from theta must reproduce A on inner blocks.
inline SymbolResult recover_symbol(const GradedOperator& A, int j, const WeightSequence& Z,
                                   double tol) {
    const TruncatedFock& F = A.space;
    for (const auto& [jk, B] : A.blocks)
        if (jk.first - jk.second != j && op_norm(B) > tol)
            throw NotInCommutant("recover_symbol: operator is not band-" + std::to_string(j));
    SymbolResult out;
    out.theta.degree = j;
    Matrix g = A.block(j, 0);
    out.theta.theta = kron(Z_power(Z, j).inverse(), identity(F.m)) * g;
    GradedOperator rebuilt = dual_shift(out.theta, Z, F);
    double worst = 0.0;
    for (int k = 0; k + j <= F.N; ++k)
        worst = std::max(worst, op_norm(Matrix(rebuilt.block(k + j, k) - A.block(k + j, k))));
    out.reconstruction_residual = worst;
    out.excluded_blocks = j;
    if (worst > tol * std::max(1.0, op_norm(g)) * 100)
        throw NotInCommutant("recover_symbol: reconstruction residual " + std::to_string(worst));
    return out;
}

} // namespace weft

#endif
