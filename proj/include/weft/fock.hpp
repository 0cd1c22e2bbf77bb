#ifndef WEFT_FOCK_HPP
#define WEFT_FOCK_HPP

// Truncated Fock space with graded block operators: creation operators,
// weighted shifts, the per-level defect identity, gauge/Fourier operators,
// the D_k diagonals and the rescaling isomorphism.
//
// Operators are stored only on degrees 0..N. Identities with degree shifts
// are asserted on inner blocks (input degree <= N - shift) and every
// verification reports how many blocks were excluded at the truncation edge.

#include <map>
#include <utility>

#include "weights.hpp"

namespace weft {

struct TruncatedFock {
    CorrespondenceModel model;
    int N = 0; // truncation degree
    int m = 1; // auxiliary Hilbert dimension (1 = bare Fock module)
    std::vector<std::int64_t> dims;    // per-level dimension tensor_dim(k)*m
    std::vector<std::int64_t> offsets; // prefix sums
    std::int64_t total = 0;

    TruncatedFock() = default;
    TruncatedFock(const CorrespondenceModel& mod, int N_, int m_ = 1)
        : model(mod), N(N_), m(m_) {
        for (int k = 0; k <= N; ++k) {
            dims.push_back(tensor_dim(model, k) * m);
            offsets.push_back(total);
            total += dims.back();
        }
    }

    bool operator==(const TruncatedFock& o) const {
        return N == o.N && m == o.m && total == o.total;
    }
};

struct GradedOperator {
    TruncatedFock space;
    std::map<std::pair<int, int>, Matrix> blocks; // (row degree, col degree) -> block

    GradedOperator() = default;
    explicit GradedOperator(const TruncatedFock& f) : space(f) {}

    bool has(int j, int k) const { return blocks.count({j, k}) > 0; }

    Matrix block(int j, int k) const {
        auto it = blocks.find({j, k});
        if (it != blocks.end()) return it->second;
        return Matrix::Zero(space.dims.at(j), space.dims.at(k));
    }

    void set(int j, int k, Matrix B) {
        if (B.rows() != space.dims.at(j) || B.cols() != space.dims.at(k))
            throw ShapeMismatch("graded block has inconsistent shape");
        blocks[{j, k}] = std::move(B);
    }

    GradedOperator adjoint() const {
        GradedOperator out(space);
        for (const auto& [jk, B] : blocks) out.set(jk.second, jk.first, B.adjoint());
        return out;
    }

    GradedOperator operator*(const GradedOperator& other) const {
        if (!(space == other.space)) throw ShapeMismatch("graded product on different spaces");
        GradedOperator out(space);
        for (const auto& [ij, A] : blocks)
            for (const auto& [jk, B] : other.blocks) {
                if (ij.second != jk.first) continue;
                auto key = std::make_pair(ij.first, jk.second);
                auto it = out.blocks.find(key);
                if (it == out.blocks.end())
                    out.blocks[key] = A * B;
                else
                    it->second += A * B;
            }
        return out;
    }

    GradedOperator operator+(const GradedOperator& other) const {
        GradedOperator out = *this;
        for (const auto& [jk, B] : other.blocks) {
            auto it = out.blocks.find(jk);
            if (it == out.blocks.end())
                out.blocks[jk] = B;
            else
                it->second += B;
        }
        return out;
    }

    GradedOperator operator-(const GradedOperator& other) const {
        GradedOperator out = *this;
        for (const auto& [jk, B] : other.blocks) {
            auto it = out.blocks.find(jk);
            if (it == out.blocks.end())
                out.blocks[jk] = -B;
            else
                it->second -= B;
        }
        return out;
    }

    GradedOperator scaled(cx s) const {
        GradedOperator out = *this;
        for (auto& [jk, B] : out.blocks) B *= s;
        return out;
    }

    Matrix dense() const {
        Matrix D = Matrix::Zero(space.total, space.total);
        for (const auto& [jk, B] : blocks)
            D.block(space.offsets.at(jk.first), space.offsets.at(jk.second), B.rows(), B.cols()) = B;
        return D;
    }

    double norm() const { return op_norm(dense()); }

    static GradedOperator identity_on(const TruncatedFock& f) {
        GradedOperator out(f);
        for (int k = 0; k <= f.N; ++k) out.set(k, k, weft::identity(f.dims[k]));
        return out;
    }
};

// ---- building blocks -------------------------------------------------------

// Matrix of theta -> xi (x) theta from level j to level j + deg(xi),
// including the auxiliary factor of dimension m.
inline Matrix creation_block(const CorrespondenceModel& model, const GradedVector& xi, int j,
                             int m) {
    if (model.kind == ModelKind::Free) {
        Matrix col = xi.entries;
        return kron(col, identity(tensor_dim(model, j) * m));
    }
    return kron(Matrix(model.alpha_pow(xi.entries, j).asDiagonal()), identity(m));
}

// Creation operator T_xi on the truncated Fock space; blocks above degree N
// are dropped.
inline GradedOperator creation(const GradedVector& xi, const TruncatedFock& F) {
    if (xi.degree < 1) throw InputError("creation: degree >= 1 required");
    GradedOperator T(F);
    for (int j = 0; j + xi.degree <= F.N; ++j)
        T.set(j + xi.degree, j, creation_block(F.model, xi, j, F.m));
    return T;
}

// The level-l restriction of the tensorial power W^{(k)}:
//   Z_l (I_E (x) Z_{l-1}) ... (I_{E^{k-1}} (x) Z_{l-k+1}),   l >= k >= 1,
// as a module operator on E^{tensor l}. For k = l this is Z^{(l)}.
inline Matrix wk_level(const WeightSequence& Z, int k, int l) {
    Matrix acc = identity(tensor_dim(Z.model, l));
    for (int i = 0; i < k; ++i) {
        Matrix amp = op_tensor(Z.model, identity(tensor_dim(Z.model, i)), i, Z.at(l - i), l - i);
        acc = acc * amp;
    }
    return acc;
}

// Level entry of the diagonal D_k: Z^{(l)} (I_{E^k} (x) Z^{(l-k)})^{-1} for l >= k.
inline Matrix dk_level(const WeightSequence& Z, int k, int l) {
    Matrix Zl = Z_power(Z, l);
    Matrix amp = op_tensor(Z.model, identity(tensor_dim(Z.model, k)), k, Z_power(Z, l - k), l - k);
    return Zl * amp.inverse();
}

// Weighted shift W_xi = D_k T_xi (k = deg xi). Built from the diagonal and
// cross-checked against the tensorial-power route W^{(k)} L_xi blockwise;
// the agreement threshold carries the backward-error scale of the inverse
// route's factors.
inline GradedOperator weighted_shift(const GradedVector& xi, const WeightSequence& Z,
                                     const TruncatedFock& F) {
    int k = xi.degree;
    if (k < 1) throw InputError("weighted_shift: degree >= 1 required");
    if (Z.degree() < F.N) throw InputError("weighted_shift: weights not defined through degree N");
    GradedOperator W(F);
    for (int j = 0; j + k <= F.N; ++j) {
        Matrix Zl = Z_power(Z, j + k);
        Matrix amp_inv = op_tensor(Z.model, identity(tensor_dim(Z.model, k)), k,
                                   Z_power(Z, j), j)
                             .inverse();
        Matrix diag_route =
            kron(Matrix(Zl * amp_inv), identity(F.m)) * creation_block(F.model, xi, j, F.m);
        Matrix power_route = kron(wk_level(Z, k, j + k), identity(F.m)) *
                             creation_block(F.model, xi, j, F.m);
        double scale = std::max(1.0, op_norm(Zl) * op_norm(amp_inv) *
                                         std::max(1.0, xi.entries.norm()));
        if (op_norm(Matrix(diag_route - power_route)) > 1e-12 * scale)
            throw Error("InternalCheck",
                        "weighted_shift: diagonal and tensorial-power routes disagree");
        W.set(j + k, j, std::move(diag_route));
    }
    return W;
}

// Per-level identity sum_{k=1..l} W^{(k)}|_l (X_k (x) I) (W^{(k)}|_l)^* = I,
// exact at every truncation level (no truncation error; level 0 must be 0).
inline VerificationReport defect_identity_check(const WeightSequence& Z, const AdmissibleSequence& X,
                                         const TruncatedFock& F, double tol) {
    double worst = 0.0;
    for (int l = 1; l <= F.N; ++l) {
        std::int64_t dim = tensor_dim(F.model, l);
        Matrix acc = Matrix::Zero(dim, dim);
        for (int k = 1; k <= std::min(l, X.support()); ++k) {
            Matrix M = wk_level(Z, k, l);
            Matrix mid = op_tensor(F.model, X.at(k), k, identity(tensor_dim(F.model, l - k)), l - k);
            acc += M * mid * M.adjoint();
        }
        worst = std::max(worst, op_norm(Matrix(acc - identity(dim))));
    }
    return VerificationReport::make("defect_identity", worst, tol);
}

// Band-j part of a graded operator: keep blocks (l + j, l).
inline GradedOperator fourier_coeff(const GradedOperator& A, int j) {
    GradedOperator out(A.space);
    for (const auto& [jk, B] : A.blocks)
        if (jk.first - jk.second == j) out.blocks[jk] = B;
    return out;
}

// Gauge conjugation: scale the band-j part by e^{ijt}.
inline GradedOperator gauge_conjugate(const GradedOperator& A, double t) {
    GradedOperator out(A.space);
    for (const auto& [jk, B] : A.blocks)
        out.blocks[jk] = std::exp(cx(0, t * double(jk.first - jk.second))) * B;
    return out;
}

// D_k (k >= 0) and its partial inverse D^{(-k)} (pass k < 0), as diagonal
// graded operators: D_k D^{(-k)} = sum_{j>=k} P_j.
inline GradedOperator Dk_diagonal(const WeightSequence& Z, int k, const TruncatedFock& F) {
    GradedOperator D(F);
    int a = std::abs(k);
    for (int l = a; l <= F.N; ++l) {
        Matrix entry = dk_level(Z, a, l);
        if (k < 0) entry = entry.inverse();
        D.set(l, l, kron(entry, identity(F.m)));
    }
    return D;
}

// Rescaling isomorphism onto the weighted Fock space: V eta = (Z^{(k)})^{-1} eta
// carrying the Gram matrices G_k = Z^{(k)*} Z^{(k)}; checks the isometry
// property and the G-adjoint identity V# T^F_xi V = W_xi on inner blocks.
inline VerificationReport rescale_check(const WeightSequence& Z, const TruncatedFock& F,
                                        double tol) {
    double worst = 0.0;
    std::vector<Matrix> Zpow, Gram;
    for (int l = 0; l <= F.N; ++l) {
        Zpow.push_back(Z_power(Z, l));
        Gram.push_back(Zpow.back().adjoint() * Zpow.back());
    }
    // inner-product transport: (V.)^* G (V.) = I per level
    for (int l = 0; l <= F.N; ++l) {
        Matrix Vl = Zpow[l].inverse();
        worst = std::max(worst,
                         op_norm(Matrix(Vl.adjoint() * Gram[l] * Vl - identity(Vl.rows()))));
    }
    // V# T^F_xi V = W_xi with V# = G^{-1} V^* G; blockwise this reduces to
    // Z^{(j+k)} (xi (x) .) Z^{(j)-1} = W_xi block.
    int excluded = 0;
    int dmax = F.model.kind == ModelKind::Free ? F.model.d : F.model.n;
    for (int deg = 1; deg <= std::min(2, F.N); ++deg) {
        for (int b = 0; b < (deg == 1 ? dmax : 1); ++b) {
            GradedVector xi;
            xi.degree = deg;
            xi.entries = Vector::Zero(tensor_dim(F.model, deg));
            xi.entries(b % xi.entries.size()) = 1.0;
            TruncatedFock bare(F.model, F.N, 1);
            GradedOperator W = weighted_shift(xi, Z, bare);
            for (int j = 0; j + deg <= F.N; ++j) {
                Matrix lhs = Zpow[j + deg] * creation_block(F.model, xi, j, 1) * Zpow[j].inverse();
                worst = std::max(worst, op_norm(Matrix(lhs - W.block(j + deg, j))));
            }
            excluded += deg; // blocks with j + deg > N per route
        }
    }
    return VerificationReport::make("rescaling", worst, tol, 0.0, excluded);
}

// Amplification T -> T (x) I_m from the bare Fock module to F (x) H.
inline GradedOperator induce(const GradedOperator& A, int m) {
    if (A.space.m != 1) throw InputError("induce: expected a bare (m = 1) operator");
    TruncatedFock F(A.space.model, A.space.N, m);
    GradedOperator out(F);
    for (const auto& [jk, B] : A.blocks) out.set(jk.first, jk.second, kron(B, identity(m)));
    return out;
}

// phi_infty(a) as a graded diagonal.
inline GradedOperator phi_infinity(const CorrespondenceModel& model, const Vector& a,
                                   const TruncatedFock& F) {
    GradedOperator out(F);
    for (int k = 0; k <= F.N; ++k)
        out.set(k, k, kron(left_action(model, a, k), identity(F.m)));
    return out;
}

} // namespace weft

#endif
