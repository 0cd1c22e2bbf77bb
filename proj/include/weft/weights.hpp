#ifndef WEFT_WEIGHTS_HPP
#define WEFT_WEIGHTS_HPP

// Admissible sequences X, the composition-sum operators R_k, canonical and
// positive associated weight sequences Z, association/equivalence tests and
// the Hypothesis A/B/C checks.

#include <optional>
#include <vector>

#include "model.hpp"
#include "report.hpp"

namespace weft {

// Optional geometric continuation ||X_k|| <= c*rho^k for degrees beyond the
// explicitly supplied support; used only in certified tail estimates.
struct GeometricBound {
    double c = 0.0;
    double rho = 0.0;
};

struct AdmissibleSequence {
    CorrespondenceModel model;
    std::vector<Matrix> X;  // X[k-1] acts on E^{tensor k}, k = 1..K_sup
    std::optional<GeometricBound> bound; // present => infinite support

    int support() const { return int(X.size()); }

    const Matrix& at(int k) const {
        if (k < 1 || k > support()) throw InputError("X_k outside explicit support");
        return X[k - 1];
    }

    // Reported growth: max_{k<=K_sup} ||X_k||^(1/k) (conservative surrogate
    // for limsup ||X_k||^(1/k); with a geometric continuation, also rho).
    double growth() const {
        double g = 0.0;
        for (int k = 1; k <= support(); ++k)
            g = std::max(g, std::pow(op_norm(at(k)), 1.0 / k));
        if (bound) g = std::max(g, bound->rho);
        return g;
    }

    // Growth seen from degree 2 on. The k = 1 term always dominates the
    // invertibility floor of X_1, so it is excluded when testing the strict
    // spectral-gap inequality of hypothesis C.
    double growth_tail() const {
        double g = 0.0;
        for (int k = 2; k <= support(); ++k)
            g = std::max(g, std::pow(op_norm(at(k)), 1.0 / k));
        if (bound) g = std::max(g, bound->rho);
        return g;
    }

    void validate(const Tol& tol = {}) const {
        if (support() < 1) throw NotAdmissible("X_1 is required");
        for (int k = 1; k <= support(); ++k) {
            std::int64_t dim = tensor_dim(model, k);
            if (at(k).rows() != dim || at(k).cols() != dim)
                throw NotAdmissible("X_" + std::to_string(k) + " has wrong dimension");
            if (!is_hermitian(at(k), tol.tol)) throw NotAdmissible("X_k must be Hermitian");
            double lo = min_eig_hermitian(at(k), tol.tol);
            if (lo < -tol.tol * std::max(1.0, op_norm(at(k))))
                throw NotAdmissible("X_k must be positive semidefinite");
        }
        double a = min_eig_hermitian(at(1), tol.tol);
        if (a <= tol.rank_tol * std::max(1.0, op_norm(at(1))))
            throw NotAdmissible("X_1 must be invertible");
        if (bound && (bound->c < 0 || bound->rho < 0))
            throw NotAdmissible("geometric bound must be nonnegative");
    }
};

// R_0 = 1 and R_k = (sum over compositions of k of tensor products of X's)^(1/2),
// computed through the recursion R_k^2 = sum_{l=1..k} X_l (x) R_{k-l}^2.
struct RSequence {
    CorrespondenceModel model;
    std::vector<Matrix> R;  // R[k], k = 0..N
    std::vector<Matrix> R2; // squares, kept to avoid re-squaring

    int degree() const { return int(R.size()) - 1; }
    const Matrix& at(int k) const { return R.at(k); }
    const Matrix& sq(int k) const { return R2.at(k); }
};

inline RSequence compute_R(const AdmissibleSequence& X, int N, const Tol& tol = {}) {
    X.validate(tol);
    RSequence out;
    out.model = X.model;
    out.R.reserve(N + 1);
    out.R2.reserve(N + 1);
    out.R.push_back(identity(tensor_dim(X.model, 0)));
    out.R2.push_back(identity(tensor_dim(X.model, 0)));
    for (int k = 1; k <= N; ++k) {
        if (X.bound && k > X.support())
            throw NotAdmissible("R_" + std::to_string(k) +
                                " needs X_k beyond the explicit support");
        std::int64_t dim = tensor_dim(X.model, k);
        Matrix acc = Matrix::Zero(dim, dim);
        for (int l = 1; l <= std::min(k, X.support()); ++l)
            acc += op_tensor(X.model, X.at(l), l, out.R2[k - l], k - l);
        Matrix Rk = psd_sqrt(acc, tol.tol);
        double lo = min_eig_hermitian(acc, tol.tol);
        if (lo < tol.rank_tol * std::max(1.0, op_norm(acc)))
            throw SingularR("R_" + std::to_string(k) + " is not invertible");
        out.R.push_back(std::move(Rk));
        out.R2.push_back(std::move(acc));
    }
    return out;
}

// Independent oracle for R_k^2: brute-force enumeration over all
// compositions alpha of k, summing tensor-product chains X_alpha(1) (x) ... .
// Exponential in k; intended for k <= 5 cross-checks.
inline Matrix composition_sum_bruteforce(const AdmissibleSequence& X, int k) {
    std::int64_t dim = tensor_dim(X.model, k);
    Matrix acc = Matrix::Zero(dim, dim);
    std::vector<int> parts;
    auto recurse = [&](auto&& self, int remaining) -> void {
        if (remaining == 0) {
            Matrix chain = X.at(parts[0]);
            int deg = parts[0];
            for (size_t i = 1; i < parts.size(); ++i) {
                chain = op_tensor(X.model, chain, deg, X.at(parts[i]), parts[i]);
                deg += parts[i];
            }
            acc += chain;
            return;
        }
        for (int p = 1; p <= std::min(remaining, X.support()); ++p) {
            parts.push_back(p);
            self(self, remaining - p);
            parts.pop_back();
        }
    };
    if (k >= 1) recurse(recurse, k);
    return acc;
}

struct WeightSequence {
    CorrespondenceModel model;
    std::vector<Matrix> Z; // Z[k], k = 0..N, Z[0] = I
    bool positive = false;
    bool canonical = false;

    int degree() const { return int(Z.size()) - 1; }
    const Matrix& at(int k) const { return Z.at(k); }
};

// Z^{(n)} = Z_n (I_E (x) Z_{n-1}) ... (I_{E^{n-1}} (x) Z_1); Z^{(0)} = 1.
inline Matrix Z_power(const WeightSequence& Z, int n) {
    Matrix acc = identity(tensor_dim(Z.model, 0));
    for (int k = 1; k <= n; ++k) {
        // acc = Z^{(k-1)}; Z^{(k)} = Z_k (I_E (x) Z^{(k-1)})
        Matrix amp = op_tensor(Z.model, identity(tensor_dim(Z.model, 1)), 1, acc, k - 1);
        acc = Z.at(k) * amp;
    }
    return acc;
}

// Canonical weights Z_k = R_k^{-1} (I_E (x) R_{k-1}); Z^{(m)} = R_m^{-1} >= 0.
inline WeightSequence canonical_Z(const RSequence& R, const Tol& tol = {}) {
    WeightSequence out;
    out.model = R.model;
    out.canonical = true;
    out.Z.push_back(identity(tensor_dim(R.model, 0)));
    for (int k = 1; k <= R.degree(); ++k) {
        Matrix Rk_inv = R.at(k).inverse();
        Matrix amp = op_tensor(R.model, identity(tensor_dim(R.model, 1)), 1, R.at(k - 1), k - 1);
        out.Z.push_back(Rk_inv * amp);
    }
    (void)tol;
    return out;
}

// The unique positive sequence associated with X:
// Z_1 = (R_1^{-2})^(1/2), Z_{m+1}^2 = ((I (x) Z^{(m)})^*)^{-1} R_{m+1}^{-2} (I (x) Z^{(m)})^{-1}.
inline WeightSequence positive_Z(const RSequence& R, const Tol& tol = {}) {
    WeightSequence out;
    out.model = R.model;
    out.positive = true;
    out.Z.push_back(identity(tensor_dim(R.model, 0)));
    Matrix Zpow = identity(tensor_dim(R.model, 0)); // Z^{(m)} for the built prefix
    for (int m = 0; m < R.degree(); ++m) {
        Matrix amp = op_tensor(R.model, identity(tensor_dim(R.model, 1)), 1, Zpow, m);
        Matrix amp_inv = amp.inverse();
        Matrix Rm1_inv2 = R.sq(m + 1).inverse();
        Matrix Zsq = amp_inv.adjoint() * Rm1_inv2 * amp_inv;
        Matrix Zm1 = psd_sqrt(Zsq, tol.tol);
        out.Z.push_back(Zm1);
        Zpow = Zm1 * amp;
    }
    return out;
}

// Association test: max_m || Z^{(m)*} Z^{(m)} - R_m^{-2} || / || R_m^{-2} ||.
inline VerificationReport check_associated(const WeightSequence& Z, const AdmissibleSequence& X,
                                           int N, double tol) {
    RSequence R = compute_R(X, N);
    double worst = 0.0;
    for (int m = 1; m <= N; ++m) {
        Matrix Zm = Z_power(Z, m);
        Matrix lhs = Zm.adjoint() * Zm;
        Matrix rhs = R.sq(m).inverse();
        worst = std::max(worst, rel_residual(lhs, rhs));
    }
    return VerificationReport::make("check_associated", worst, tol);
}

// Degreewise unitaries linking two weight sequences associated with the same
// admissible sequence: U_0 = I, U_k = B^{(k)} (A^{(k)})^{-1}, and
// B_{k+1} = U_{k+1} A_{k+1} (I_E (x) U_k)^*.
struct EquivalenceResult {
    std::vector<Matrix> U;
    double unitarity_residual = 0.0;
    double recurrence_residual = 0.0;
};

inline EquivalenceResult equivalence_unitaries(const WeightSequence& A, const WeightSequence& B,
                                               double tol) {
    if (A.degree() != B.degree()) throw ShapeMismatch("weight sequences of unequal length");
    EquivalenceResult res;
    res.U.push_back(identity(tensor_dim(A.model, 0)));
    for (int k = 1; k <= A.degree(); ++k) {
        Matrix Uk = Z_power(B, k) * Z_power(A, k).inverse();
        double u_res = op_norm(Matrix(Uk.adjoint() * Uk - identity(Uk.rows())));
        res.unitarity_residual = std::max(res.unitarity_residual, u_res);
        res.U.push_back(std::move(Uk));
    }
    for (int k = 0; k + 1 <= A.degree(); ++k) {
        Matrix amp = op_tensor(A.model, identity(tensor_dim(A.model, 1)), 1,
                               Matrix(res.U[k].adjoint()), k);
        Matrix rhs = res.U[k + 1] * A.at(k + 1) * amp;
        res.recurrence_residual = std::max(res.recurrence_residual,
                                           rel_residual(B.at(k + 1), rhs));
    }
    if (res.unitarity_residual > tol)
        throw NotEquivalent("some U_k fails unitarity: residual " +
                            std::to_string(res.unitarity_residual));
    return res;
}

// Hypothesis record.
//   A: compacts = adjointables; always true in these finite-dimensional models.
//   B: largest eps with Z_k >= eps*I over the computed range (Hermitian part).
//   C: spectral gap; a = min eig X_1, tested against the degree >= 2 growth.
struct HypothesisRecord {
    bool A = true;
    bool B = false;
    double epsilon = 0.0;
    bool C = false;
    double a = 0.0;
    double rho_reported = 0.0; // max_{k<=K_sup} ||X_k||^(1/k)
    double rho_tail = 0.0;     // same from degree 2 on; used for C
};

inline HypothesisRecord hypothesis_check(const AdmissibleSequence& X, const WeightSequence& Z,
                                         int N, const Tol& tol = {}) {
    HypothesisRecord rec;
    rec.a = min_eig_hermitian(X.at(1), tol.tol);
    rec.rho_reported = X.growth();
    rec.rho_tail = X.growth_tail();
    rec.C = rec.rho_tail < rec.a;
    double eps = std::numeric_limits<double>::infinity();
    bool hermitian = true;
    for (int k = 1; k <= std::min(N, Z.degree()); ++k) {
        if (!is_hermitian(Z.at(k), tol.tol)) { hermitian = false; break; }
        eps = std::min(eps, min_eig_hermitian(Z.at(k), tol.tol));
    }
    rec.epsilon = hermitian ? eps : 0.0;
    rec.B = hermitian && rec.epsilon > tol.tol;
    return rec;
}

// Canonical weights under the commutativity condition, with the certified
// lower bound Z_k >= (1/sqrt(b)) I, b = sum_m ||X_m|| / a^(m-1).
struct ConditionBResult {
    WeightSequence Z;
    double epsilon = 0.0; // certified lower bound
    double b = 0.0;
};

inline ConditionBResult conditionb_weights(const AdmissibleSequence& X, int N,
                                           const Tol& tol = {}) {
    RSequence R = compute_R(X, N, tol);
    for (int k = 1; k <= N; ++k) {
        Matrix amp = op_tensor(X.model, identity(tensor_dim(X.model, 1)), 1, R.at(k - 1), k - 1);
        double comm = op_norm(Matrix(R.at(k) * amp - amp * R.at(k)));
        if (comm > tol.tol * std::max(1.0, op_norm(R.at(k)) * op_norm(amp)))
            throw CommutativityFails("[R_k, I (x) R_{k-1}] != 0 at k = " + std::to_string(k));
    }
    double a = min_eig_hermitian(X.at(1), tol.tol);
    if (!(X.growth_tail() < a))
        throw HypothesisCFails("spectral gap rho < a fails (rho = " +
                               std::to_string(X.growth_tail()) + ", a = " + std::to_string(a) + ")");
    double b = 0.0;
    for (int m = 1; m <= X.support(); ++m) b += op_norm(X.at(m)) / std::pow(a, m - 1);
    if (X.bound) {
        // sum_{m>K} c rho^m / a^(m-1) = c*a*(rho/a)^(K+1) / (1 - rho/a)
        double q = X.bound->rho / a;
        b += X.bound->c * a * std::pow(q, X.support() + 1) / (1.0 - q);
    }
    ConditionBResult out;
    out.Z = canonical_Z(R, tol);
    out.b = b;
    out.epsilon = 1.0 / std::sqrt(b);
    return out;
}

} // namespace weft

#endif
