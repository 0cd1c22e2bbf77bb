#ifndef WEFT_CROSSED_HPP
#define WEFT_CROSSED_HPP

// Weighted crossed-product model over M = C^n with a permutation
// automorphism alpha: generators S, W, the diagonals D_k, phi_infty, the
// endomorphism beta(y) = S* y S and the gauge action, all on the truncated
// space of n(N+1) coordinates.

#include "model.hpp"
#include "report.hpp"

namespace weft {
namespace crossed {

struct AutoSpec {
    CorrespondenceModel model;       // Auto
    std::vector<Vector> z;           // z[k-1] = weight z_k, entrywise > 0, k = 1..N
    int N = 0;

    void validate() const {
        if (model.kind != ModelKind::Auto) throw InputError("crossed: auto model required");
        if (int(z.size()) < N) throw InputError("crossed: weights z_1..z_N required");
        for (const auto& zk : z) {
            if (zk.size() != model.n) throw ShapeMismatch("crossed: z_k must be an n-vector");
            for (int i = 0; i < model.n; ++i)
                if (!(zk(i).real() > 0) || std::abs(zk(i).imag()) > 0)
                    throw InputError("crossed: z_k must be entrywise positive");
        }
    }
};

struct Generators {
    AutoSpec spec;
    Matrix S;                 // unweighted shift, identity blocks
    Matrix W;                 // W = D_0 S
    std::map<int, Matrix> D;  // D_k for |k| <= N

    std::int64_t dim() const { return std::int64_t(spec.model.n) * (spec.N + 1); }

    Matrix P0() const {
        Matrix P = Matrix::Zero(dim(), dim());
        P.topLeftCorner(spec.model.n, spec.model.n) = identity(spec.model.n);
        return P;
    }

    // Projection onto levels j..N.
    Matrix P_from(int j) const {
        Matrix P = Matrix::Zero(dim(), dim());
        int n = spec.model.n;
        for (int l = std::max(0, j); l <= spec.N; ++l)
            P.block(std::int64_t(l) * n, std::int64_t(l) * n, n, n) = identity(n);
        return P;
    }

    Matrix phi(const Vector& a) const {
        Matrix out = Matrix::Zero(dim(), dim());
        int n = spec.model.n;
        for (int l = 0; l <= spec.N; ++l)
            out.block(std::int64_t(l) * n, std::int64_t(l) * n, n, n) =
                Matrix(spec.model.alpha_pow(a, l).asDiagonal());
        return out;
    }

    // gauge conjugation Ad(diag[lambda^l]): fixes the diagonals, W -> lambda W
    Matrix gauge(const Matrix& y, cx lambda) const {
        Matrix L = Matrix::Zero(dim(), dim());
        int n = spec.model.n;
        cx pw = 1.0;
        for (int l = 0; l <= spec.N; ++l) {
            L.block(std::int64_t(l) * n, std::int64_t(l) * n, n, n) = pw * identity(n);
            pw *= lambda;
        }
        return L * y * L.adjoint();
    }
};

// D_k for k >= 0 is diag[0,...,0, z_1, z_2, ...] with k+1 zero levels
// (so W = D_0 S); for k < 0 it is diag[z_{-k}, z_{1-k}, ...].
inline Generators build_generators(const AutoSpec& spec) {
    spec.validate();
    Generators g;
    g.spec = spec;
    int n = spec.model.n;
    std::int64_t dim = g.dim();
    g.S = Matrix::Zero(dim, dim);
    for (int l = 0; l + 1 <= spec.N; ++l)
        g.S.block(std::int64_t(l + 1) * n, std::int64_t(l) * n, n, n) = identity(n);
    auto weight_at = [&](int idx) -> Vector {
        // z_idx for idx >= 1 when available, else zero (enters only at the edge)
        if (idx >= 1 && idx <= int(spec.z.size())) return spec.z[size_t(idx - 1)];
        return Vector::Zero(n);
    };
    for (int k = -spec.N; k <= spec.N; ++k) {
        Matrix Dk = Matrix::Zero(dim, dim);
        for (int l = 0; l <= spec.N; ++l) {
            int idx = l - k; // diagonal entry z_{l-k}; zero when l - k < 1
            if (idx >= 1)
                Dk.block(std::int64_t(l) * n, std::int64_t(l) * n, n, n) =
                    Matrix(weight_at(idx).asDiagonal());
        }
        g.D[k] = std::move(Dk);
    }
    g.W = g.D[0] * g.S;
    return g;
}

inline Matrix beta(const Generators& g, const Matrix& y) { return g.S.adjoint() * y * g.S; }

// Residual of (I - P0)(y S - S beta(y)) on input degrees 0..N-1; certifies
// y S = S beta(y) modulo the ideal generated by P0. The dropped part
// P0 y S is returned as the defect.
struct IdealDefect {
    VerificationReport report;
    Matrix defect; // P0 (y S - S beta(y)) = P0 y S
};

inline IdealDefect ideal_defect(const Generators& g, const Matrix& y, double tol = 1e-12) {
    Matrix F = y * g.S - g.S * beta(g, y);
    Matrix inner = (identity(g.dim()) - g.P0()) * F;
    // exclude the edge column: S has no block out of level N
    int n = g.spec.model.n;
    double worst = 0.0;
    for (int l = 0; l + 1 <= g.spec.N; ++l)
        worst = std::max(worst, op_norm(Matrix(inner.middleCols(std::int64_t(l) * n, n))));
    IdealDefect out;
    out.report = VerificationReport::make("crossed_covariance", worst, tol, 0.0, 1);
    out.defect = g.P0() * F;
    return out;
}

// Conjugation by diag(lambda^k) fixes all D_k and phi(a), W -> lambda W.
inline VerificationReport gauge_check(const Generators& g, const std::vector<cx>& samples,
                                      double tol = 1e-12) {
    double worst = 0.0;
    Vector a(g.spec.model.n);
    for (int i = 0; i < g.spec.model.n; ++i) a(i) = cx(1.0 + i, 0.25 * i);
    Matrix phia = g.phi(a);
    for (cx lambda : samples) {
        for (const auto& [k, Dk] : g.D)
            worst = std::max(worst, op_norm(Matrix(g.gauge(Dk, lambda) - Dk)));
        worst = std::max(worst, op_norm(Matrix(g.gauge(phia, lambda) - phia)));
        worst = std::max(worst, op_norm(Matrix(g.gauge(g.W, lambda) - lambda * g.W)));
    }
    return VerificationReport::make("crossed_gauge", worst, tol);
}

} // namespace crossed
} // namespace weft

#endif
