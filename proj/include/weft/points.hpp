#ifndef WEFT_POINTS_HPP
#define WEFT_POINTS_HPP

// Representation points, discs with certified tail bounds, prepotentials,
// Poisson kernels, evaluation maps and Berezin transforms.
//
// A point z lives in the intertwiner space of a normal representation sigma
// of M on C^m. In the free model it is a d-tuple of m x m matrices (sigma is
// the m-fold ampliation of C, intertwining is automatic). In the auto model
// it is a single operator T with T sigma(alpha(a)) = sigma(a) T, where sigma
// is given by n commuting projections summing to I; the balanced tensors
// E^{tensor k} (x) H are identified with H, under which z^{(k)} becomes T^k.

#include <functional>
#include <map>

#include "fock.hpp"

namespace weft {

struct ReprPoint {
    CorrespondenceModel model;
    int m = 1;
    std::vector<Matrix> blocks; // Free: d blocks, each m x m
    Matrix T;                   // Auto: single m x m intertwiner
    std::vector<Matrix> sigma_projs; // Auto: n projections

    static ReprPoint free_point(const CorrespondenceModel& model, std::vector<Matrix> zs) {
        if (model.kind != ModelKind::Free) throw InputError("free_point: free model required");
        if (int(zs.size()) != model.d) throw ShapeMismatch("free_point: expected d blocks");
        ReprPoint p;
        p.model = model;
        p.m = int(zs.at(0).rows());
        for (const auto& z : zs)
            if (z.rows() != p.m || z.cols() != p.m)
                throw ShapeMismatch("free_point: blocks must be square of equal size");
        p.blocks = std::move(zs);
        return p;
    }

    static ReprPoint auto_point(const CorrespondenceModel& model, Matrix T,
                                std::vector<Matrix> projs, double tol = 1e-9) {
        if (model.kind != ModelKind::Auto) throw InputError("auto_point: auto model required");
        ReprPoint p;
        p.model = model;
        p.m = int(T.rows());
        p.T = std::move(T);
        p.sigma_projs = std::move(projs);
        if (int(p.sigma_projs.size()) != model.n)
            throw ShapeMismatch("auto_point: expected n projections");
        Matrix sum = Matrix::Zero(p.m, p.m);
        for (const auto& P : p.sigma_projs) {
            if (!is_projection(P, tol)) throw NotAnIntertwiner("sigma data is not a projection");
            sum += P;
        }
        if (op_norm(Matrix(sum - identity(p.m))) > tol)
            throw NotAnIntertwiner("sigma projections do not sum to I");
        // intertwining: T sigma(alpha(e_j)) = sigma(e_j) T for all j
        for (int j = 0; j < model.n; ++j) {
            Vector ej = Vector::Zero(model.n);
            ej(j) = 1.0;
            Matrix lhs = p.T * p.sigma(p.model.alpha_pow(ej, 1));
            Matrix rhs = p.sigma(ej) * p.T;
            if (op_norm(Matrix(lhs - rhs)) > tol * std::max(1.0, op_norm(p.T)))
                throw NotAnIntertwiner("T does not intertwine sigma and sigma o alpha");
        }
        return p;
    }

    Matrix sigma(const Vector& a) const {
        if (model.kind == ModelKind::Free) return a(0) * identity(m);
        Matrix S = Matrix::Zero(m, m);
        for (int i = 0; i < model.n; ++i) S += a(i) * sigma_projs[i];
        return S;
    }

    // Row matrix of z itself: Free [z_1 ... z_d]; Auto T.
    Matrix row() const {
        if (model.kind == ModelKind::Auto) return T;
        Matrix R(m, std::int64_t(model.d) * m);
        for (int i = 0; i < model.d; ++i) R.middleCols(std::int64_t(i) * m, m) = blocks[i];
        return R;
    }

    double norm() const { return op_norm(row()); }

    // Dimension of E^{tensor k} (x)_sigma H in the representation carried here.
    std::int64_t level_dim(int k) const {
        return model.kind == ModelKind::Free ? tensor_dim(model, k) * m : m;
    }

    // Matrix of z^{(k)} : E^{tensor k} (x) H -> H. Free: block at word w is
    // z_{w_1} ... z_{w_k}; Auto: T^k.
    Matrix power(int k) const {
        if (model.kind == ModelKind::Auto) {
            Matrix P = identity(m);
            for (int i = 0; i < k; ++i) P = T * P;
            return P;
        }
        Matrix P = identity(m); // k = 0
        for (int i = 0; i < k; ++i) {
            // z^{(j+1)} = z (I_E (x) z^{(j)}): prepend one letter
            Matrix next(m, P.cols() * model.d);
            for (int l = 0; l < model.d; ++l)
                next.middleCols(l * P.cols(), P.cols()) = blocks[l] * P;
            P = next;
        }
        return P;
    }

    // Module operator A on E^{tensor jin} -> E^{tensor jout}, amplified to the
    // point's kernel levels. Free: A (x) I_m. Auto: multiplication operators
    // only, carried to sigma(diag A).
    Matrix amp_module(const Matrix& A) const {
        if (model.kind == ModelKind::Free) return kron(A, identity(m));
        if (A.rows() != model.n || A.cols() != model.n)
            throw ShapeMismatch("amp_module: auto module operator must be n x n");
        return sigma(A.diagonal());
    }

    // I_{E^{tensor k}} (x) B for B in the commutant of sigma(M).
    Matrix amp_aux(const Matrix& B, int k) const {
        if (model.kind == ModelKind::Free) return kron(identity(tensor_dim(model, k)), B);
        return B;
    }

    // Insertion L_xi : H -> E^{tensor k} (x) H for xi of degree k.
    Matrix insertion_at(const GradedVector& xi) const {
        if (model.kind == ModelKind::Free) return kron(Matrix(xi.entries), identity(m));
        return sigma(xi.entries);
    }

    ReprPoint direct_sum(const ReprPoint& other) const {
        if (model.kind != other.model.kind) throw ShapeMismatch("direct_sum: different models");
        ReprPoint p;
        p.model = model;
        p.m = m + other.m;
        auto dsum = [&](const Matrix& A, const Matrix& B) {
            Matrix C = Matrix::Zero(p.m, p.m);
            C.topLeftCorner(m, m) = A;
            C.bottomRightCorner(other.m, other.m) = B;
            return C;
        };
        if (model.kind == ModelKind::Free) {
            for (int i = 0; i < model.d; ++i) p.blocks.push_back(dsum(blocks[i], other.blocks[i]));
        } else {
            p.T = dsum(T, other.T);
            for (int i = 0; i < model.n; ++i)
                p.sigma_projs.push_back(dsum(sigma_projs[i], other.sigma_projs[i]));
        }
        return p;
    }

    ReprPoint scaled(double r) const {
        ReprPoint p = *this;
        if (model.kind == ModelKind::Free)
            for (auto& b : p.blocks) b *= r;
        else
            p.T *= r;
        return p;
    }
};

// ---- certified tails --------------------------------------------------------

// Scalar majorant for the composition sums: with f(t) = sum_l ||X_l|| t^l and
// b_k defined by b_0 = 1, b_k = sum_l ||X_l|| b_{k-l}, one has
// ||R_k^2|| <= b_k and sum_k b_k t^k = 1/(1 - f(t)) whenever f(t) < 1.
struct TailMajorant {
    double t = 0.0;
    double f = 0.0;
    std::vector<double> b; // b_0..b_K

    static TailMajorant make(double t, const AdmissibleSequence& X, int K) {
        TailMajorant tm;
        tm.t = t;
        std::vector<double> xn(X.support() + 1, 0.0);
        for (int l = 1; l <= X.support(); ++l) xn[l] = op_norm(X.at(l));
        tm.f = 0.0;
        for (int l = 1; l <= X.support(); ++l) tm.f += xn[l] * std::pow(t, l);
        if (X.bound) {
            double q = X.bound->rho * t;
            if (q >= 1.0)
                tm.f = std::numeric_limits<double>::infinity();
            else
                tm.f += X.bound->c * std::pow(q, X.support() + 1) / (1.0 - q);
        }
        tm.b.assign(K + 1, 0.0);
        tm.b[0] = 1.0;
        for (int k = 1; k <= K; ++k) {
            double acc = 0.0;
            for (int l = 1; l <= std::min(k, X.support()); ++l) acc += xn[l] * tm.b[k - l];
            // a geometric continuation only enlarges the majorant's f; the
            // recursion keeps the explicit part, the remainder is folded
            // into tail_beyond through f.
            tm.b[k] = acc;
        }
        return tm;
    }

    bool certifiable() const { return f < 1.0; }

    // sum_{k > K} b_k t^k, exact via the generating function.
    double tail_beyond(int K) const {
        if (!certifiable()) throw CannotBoundTail("majorant generating function diverges");
        double partial = 0.0, tk = 1.0;
        for (int k = 0; k <= K; ++k) {
            partial += b[size_t(k)] * tk;
            tk *= t;
        }
        return std::max(0.0, 1.0 / (1.0 - f) - partial);
    }
};

// ---- prepotential and disc ---------------------------------------------------

struct SeriesSum {
    Matrix S;
    double tail_bound = 0.0;
};

// S = sum_{k>=1} z^{(k)} (X_k (x) I) z^{(k)*} over the explicit support, with
// a certified geometric tail when the sequence continues past it.
inline SeriesSum series_sum(const ReprPoint& z, const AdmissibleSequence& X, double tol = 1e-9) {
    (void)tol;
    SeriesSum out;
    out.S = Matrix::Zero(z.m, z.m);
    for (int k = 1; k <= X.support(); ++k) {
        Matrix P = z.power(k);
        out.S += P * z.amp_module(X.at(k)) * P.adjoint();
    }
    out.S = (out.S + Matrix(out.S.adjoint())) / 2.0;
    if (X.bound) {
        double q = z.norm() * z.norm() * X.bound->rho;
        if (q >= 1.0)
            throw CannotBoundTail("||z||^2 * rho >= 1 with infinite support");
        out.tail_bound = X.bound->c * std::pow(q, X.support() + 1) / (1.0 - q);
    }
    return out;
}

enum class Membership { Interior, Boundary, Outside, Indeterminate };

inline const char* to_string(Membership s) {
    switch (s) {
        case Membership::Interior: return "interior";
        case Membership::Boundary: return "boundary";
        case Membership::Outside: return "outside";
        default: return "indeterminate";
    }
}

struct DiscResult {
    Membership membership = Membership::Indeterminate;
    double norm = 0.0;
    double tail_bound = 0.0;
};

inline DiscResult disc_membership(const ReprPoint& z, const AdmissibleSequence& X,
                                  double tol = 1e-9) {
    SeriesSum s = series_sum(z, X, tol);
    DiscResult out;
    out.norm = op_norm(s.S);
    out.tail_bound = s.tail_bound;
    if (out.norm + s.tail_bound < 1.0 - tol)
        out.membership = Membership::Interior;
    else if (std::abs(out.norm - 1.0) <= tol + s.tail_bound)
        out.membership = Membership::Boundary;
    else if (out.norm - s.tail_bound > 1.0 + tol)
        out.membership = Membership::Outside;
    return out;
}

// Completely positive map in Kraus form; complete positivity is structural.
struct CPMap {
    std::vector<Matrix> kraus;
    int m = 0;

    Matrix apply(const Matrix& a) const {
        Matrix out = Matrix::Zero(m, m);
        for (const auto& K : kraus) out += K * a * K.adjoint();
        return out;
    }

    double norm() const { return op_norm(apply(identity(m))); }
};

// Prepotential Phi_z(a) = sum_k z^{(k)} (X_k (x) a) z^{(k)*}, Kraus factors
// read off column-blocks of z^{(k)} (X_k^(1/2) (x) I).
inline CPMap prepotential(const ReprPoint& z, const AdmissibleSequence& X, double tol = 1e-9) {
    DiscResult disc = disc_membership(z, X, tol);
    if (disc.membership == Membership::Outside || disc.membership == Membership::Indeterminate)
        throw OutsideDisc("prepotential: point not certified inside the closed disc");
    CPMap phi;
    phi.m = z.m;
    for (int k = 1; k <= X.support(); ++k) {
        Matrix B = z.power(k) * z.amp_module(psd_sqrt(X.at(k), tol));
        std::int64_t nblocks = B.cols() / z.m;
        for (std::int64_t w = 0; w < nblocks; ++w) phi.kraus.push_back(B.middleCols(w * z.m, z.m));
    }
    return phi;
}

// Q_z = lim_m Phi_z^m(I): decreasing limit, fixed point of Phi_z.
struct QLimit {
    Matrix Q;
    int iterations = 0;
    double last_increment = 0.0;
    Matrix iterate_at = Matrix();  // Phi^{telescope_depth}(I), when requested
    int telescope_depth = -1;
};

inline QLimit q_limit(const ReprPoint& z, const AdmissibleSequence& X, double tol = 1e-9,
                      int max_iter = 100000, int telescope_depth = -1) {
    CPMap phi = prepotential(z, X, tol);
    Matrix a = identity(z.m);
    QLimit out;
    out.telescope_depth = telescope_depth;
    if (telescope_depth == 0) out.iterate_at = a;
    for (int it = 1; it <= max_iter; ++it) {
        Matrix next = phi.apply(a);
        double inc = op_norm(Matrix(a - next));
        double mono = min_eig_hermitian(Matrix((a - next + (a - next).adjoint().eval()) / 2.0), tol);
        if (mono < -10 * tol)
            throw Error("InternalCheck", "q_limit: iterates failed to decrease");
        a = std::move(next);
        if (it == telescope_depth) out.iterate_at = a;
        out.iterations = it;
        out.last_increment = inc;
        if (inc <= tol && it >= telescope_depth) {
            out.Q = (a + Matrix(a.adjoint())) / 2.0;
            return out;
        }
    }
    throw NoConvergence("q_limit: max_iter reached, last increment " +
                        std::to_string(out.last_increment));
}

// Certified truncation bounds for the R-series at depth N, via the monotone
// telescope: the depth-N partial composition sums contain every chain with
// at most L = floor(N / support) parts, so the remainder is dominated by
// sum_{l > L} Phi^l(.). For the Delta-damped series (Poisson kernels) this
// gives || Phi^{L+1}(I) - Q ||; for the undamped series at an interior point
// it gives s^{L+1}/(1-s) with s = ||Phi(I)||.
inline double damped_tail_bound(const ReprPoint& z, const AdmissibleSequence& X, int N,
                                double damp_norm_sq, double q_tol = 1e-11) {
    if (damp_norm_sq < 1e-13) return 0.0;
    if (X.bound) {
        // incomplete prepotential: fall back to the geometric scalar majorant
        double t = z.norm() * z.norm();
        TailMajorant tm = TailMajorant::make(t, X, N);
        if (!tm.certifiable())
            throw CannotBoundTail("kernel tail not certifiable with infinite support");
        return damp_norm_sq * tm.tail_beyond(N);
    }
    int L = N / std::max(1, X.support());
    QLimit q = q_limit(z, X, q_tol, 200000, L + 1);
    return damp_norm_sq * op_norm(Matrix(q.iterate_at - q.Q)) + 2.0 * q_tol;
}

inline double undamped_tail_bound(const ReprPoint& z, const AdmissibleSequence& X, int N,
                                  double tol = 1e-9) {
    SeriesSum s = series_sum(z, X, tol);
    double snorm = op_norm(s.S) + s.tail_bound;
    if (snorm >= 1.0 - 1e-12)
        throw CannotBoundTail("undamped R-series certified only at interior points (||S|| = " +
                              std::to_string(snorm) + ")");
    int L = N / std::max(1, X.support());
    return std::pow(snorm, L + 1) / (1.0 - snorm);
}

// ---- potentials ---------------------------------------------------------------

struct ThetaResult {
    Matrix value;
    double tail_bound = 0.0;
    int terms = 0;
};

// Theta^R_z(a) = sum_k z^{(k)} (R_k^2 (x) a) z^{(k)*}, summed through the
// depth of R, with the certified interior telescope tail.
inline ThetaResult theta_R(const ReprPoint& z, const AdmissibleSequence& X, const RSequence& R,
                           const Matrix& a, double tol = 1e-9) {
    int K = R.degree();
    double tail_unit = undamped_tail_bound(z, X, K, tol);
    ThetaResult out;
    out.value = Matrix::Zero(z.m, z.m);
    for (int k = 0; k <= K; ++k) {
        Matrix P = z.power(k);
        if (z.model.kind == ModelKind::Free)
            out.value += P * kron(R.sq(k), a) * P.adjoint();
        else
            out.value += P * z.amp_module(R.sq(k)) * a * P.adjoint();
    }
    out.terms = K + 1;
    bool hermitian = is_hermitian(a, 1e-12);
    out.tail_bound = (hermitian ? 1.0 : 2.0) * tail_unit * op_norm(a);
    return out;
}

// Residual of (iota - Phi_z)(Theta(a)) = a.
inline VerificationReport potential_check(const ReprPoint& z, const AdmissibleSequence& X,
                                          const RSequence& R, const Matrix& a, double tol) {
    CPMap phi = prepotential(z, X, tol);
    ThetaResult th = theta_R(z, X, R, a, tol);
    Matrix lhs = th.value - phi.apply(th.value);
    double scale = std::max(op_norm(a), 1e-300);
    double residual = op_norm(Matrix(lhs - a)) / scale;
    double tail = (1.0 + phi.norm()) * th.tail_bound / scale;
    return VerificationReport::make("potential", residual, tol, tail);
}

// ---- Poisson kernel -----------------------------------------------------------

// Column operator K_Z(z) : H -> sum_k E^{tensor k} (x) H with blocks
// U_k (R_k (x) Delta) z^{(k)*}, where Delta = (I - S)^(1/2) and U_k is the
// degreewise unitary carrying the canonical weights to Z (U_k = Z^{(k)} R_k).
struct PoissonKernel {
    ReprPoint z;
    int N = 0;
    std::vector<Matrix> block; // block[k] : H -> level k
    Matrix Delta;
    Matrix Q;
    double tail_bound = 0.0; // on the missing mass of K*K

    Matrix gram() const {
        Matrix G = Matrix::Zero(z.m, z.m);
        for (const auto& B : block) G += B.adjoint() * B;
        return G;
    }
};

inline PoissonKernel poisson_kernel(const ReprPoint& z, const AdmissibleSequence& X,
                                    const WeightSequence& Z, int N, double tol = 1e-9) {
    DiscResult disc = disc_membership(z, X, tol);
    if (disc.membership == Membership::Outside || disc.membership == Membership::Indeterminate)
        throw OutsideDisc("poisson_kernel: point not certified inside the closed disc");
    RSequence R = compute_R(X, N);
    PoissonKernel K;
    K.z = z;
    K.N = N;
    SeriesSum s = series_sum(z, X, tol);
    Matrix ImS = identity(z.m) - s.S;
    // closed-disc membership certifies I - S >= -(tol + tail); clamp the noise
    if (min_eig_hermitian(ImS, tol * 10) < -10 * (tol + s.tail_bound))
        throw OutsideDisc("poisson_kernel: I - S has a genuinely negative eigenvalue");
    K.Delta = hermitian_calculus(
        ImS, [](double t) { return std::sqrt(std::max(0.0, t)); }, tol * 10);
    K.Q = q_limit(z, X, std::min(tol, 1e-11), 200000).Q;
    for (int k = 0; k <= N; ++k) {
        Matrix Uk = Z_power(Z, k) * R.at(k); // I for the canonical weights
        Matrix blk = z.amp_module(Matrix(Uk * R.at(k))) * z.amp_aux(K.Delta, k) *
                     z.power(k).adjoint();
        K.block.push_back(std::move(blk));
    }
    double dn = op_norm(K.Delta);
    K.tail_bound = damped_tail_bound(z, X, N, dn * dn);
    return K;
}

// || K*K - (I - Q) || <= tol + tail.
inline VerificationReport poisson_isometry_check(const PoissonKernel& K, double tol) {
    double residual = op_norm(Matrix(K.gram() - (identity(K.z.m) - K.Q)));
    return VerificationReport::make("poisson_isometry", residual, tol, K.tail_bound);
}

// Blockwise residual of K(z) L_xi^* z^* = (W_xi^* (x) I) K(z) on degrees
// 0..N-1 (degree N is the truncation edge).
inline VerificationReport intertwine_check(const ReprPoint& z, const AdmissibleSequence& X,
                                           const WeightSequence& Z, const GradedVector& xi,
                                           int N, double tol) {
    if (xi.degree != 1) throw InputError("intertwine_check: degree-1 vector expected");
    PoissonKernel K = poisson_kernel(z, X, Z, N, tol);
    TruncatedFock bare(z.model, N, 1);
    GradedOperator W = weighted_shift(xi, Z, bare);
    Matrix zLxi = z.power(1) * z.insertion_at(xi); // z L_xi : H -> H
    double worst = 0.0;
    for (int k = 0; k + 1 <= N; ++k) {
        Matrix lhs = K.block[k] * zLxi.adjoint();
        Matrix rhs = z.amp_module(W.block(k + 1, k)).adjoint() * K.block[k + 1];
        worst = std::max(worst, op_norm(Matrix(lhs - rhs)));
    }
    return VerificationReport::make("intertwine", worst, tol, K.tail_bound, 1);
}

// Evaluation map Psi_z(A) = K_Z(z)^* (A (x) I) K_Z(z) for a bare graded
// operator A (module level, m = 1), amplified at the point's representation.
struct Evaluation {
    Matrix value;
    double tail_bound = 0.0;
};

inline Evaluation evaluate(const ReprPoint& z, const GradedOperator& A,
                           const AdmissibleSequence& X, const WeightSequence& Z, int N,
                           double tol = 1e-9) {
    if (A.space.m != 1) throw InputError("evaluate: bare graded operator expected");
    if (A.space.N < N) throw InputError("evaluate: operator truncated below N");
    PoissonKernel K = poisson_kernel(z, X, Z, N, tol);
    Evaluation out;
    out.value = Matrix::Zero(z.m, z.m);
    // upper bound on ||A|| via the band decomposition: each band is a block
    // shift whose norm is its largest block, and ||A|| <= sum of band norms
    std::map<int, double> band_norm;
    for (const auto& [jk, B] : A.blocks) {
        int band = jk.first - jk.second;
        band_norm[band] = std::max(band_norm[band], op_norm(B));
        if (jk.first > N || jk.second > N) continue;
        out.value += K.block[jk.first].adjoint() * z.amp_module(B) * K.block[jk.second];
    }
    double anorm = 0.0;
    for (const auto& [band, nb] : band_norm) anorm += nb;
    // ||K_tail|| <= sqrt(tail), ||K_N|| <= 1: cross terms + pure tail term
    double ktail = std::sqrt(K.tail_bound);
    out.tail_bound = anorm * (K.tail_bound + 2.0 * ktail);
    return out;
}

// ---- polynomial elements and the Berezin transform ---------------------------

// a_0 + sum_k W_{xi_k}: the generic element of the algebraic weighted tensor
// algebra, stored by its coefficient data.
struct PolynomialElement {
    Vector a0;                        // scalar (Free, size 1) or n-vector (Auto)
    std::map<int, GradedVector> terms; // degree -> coefficient tensor

    static PolynomialElement scalar(const CorrespondenceModel& model, cx a) {
        PolynomialElement F;
        F.a0 = Vector::Constant(model.kind == ModelKind::Free ? 1 : model.n, a);
        return F;
    }

    void add_term(const GradedVector& xi) {
        auto it = terms.find(xi.degree);
        if (it == terms.end())
            terms[xi.degree] = xi;
        else
            it->second.entries += xi.entries;
    }

    int max_degree() const { return terms.empty() ? 0 : terms.rbegin()->first; }
};

// Product through the shift relations: W_xi W_eta = W_{xi (x) eta},
// phi(a) W_eta = W_{a . eta}, W_xi phi(b) = W_{xi . b}.
inline PolynomialElement poly_mul(const CorrespondenceModel& model, const PolynomialElement& F,
                                  const PolynomialElement& G) {
    PolynomialElement out;
    out.a0 = F.a0.cwiseProduct(G.a0);
    for (const auto& [k, xi] : F.terms) {
        // xi . b : right action of G.a0
        GradedVector t = xi;
        if (model.kind == ModelKind::Free)
            t.entries *= G.a0(0);
        else
            t.entries = t.entries.cwiseProduct(G.a0);
        out.add_term(t);
    }
    for (const auto& [l, eta] : G.terms) {
        // a . eta : left action of F.a0 in degree l
        GradedVector t = eta;
        t.entries = left_action(model, F.a0, l) * t.entries;
        out.add_term(t);
    }
    for (const auto& [k, xi] : F.terms)
        for (const auto& [l, eta] : G.terms) out.add_term(tensor_concat(model, xi, eta));
    return out;
}

// The graded operator phi_infty(a0) + sum_k W_{xi_k} on the bare Fock module.
inline GradedOperator poly_operator(const PolynomialElement& F, const WeightSequence& Z,
                                    const TruncatedFock& fock) {
    GradedOperator out = phi_infinity(fock.model, F.a0, fock);
    for (const auto& [k, xi] : F.terms) out = out + weighted_shift(xi, Z, fock);
    return out;
}

// Berezin transform: sigma(a0) + sum_k z^{(k)} L_{xi_k}, computed directly.
inline Matrix berezin(const PolynomialElement& F, const ReprPoint& z) {
    Matrix out = z.sigma(F.a0);
    for (const auto& [k, xi] : F.terms) out += z.power(k) * z.insertion_at(xi);
    return out;
}

// Matricial-family check: C z = w (I_E (x) C) and C sigma = tau C imply
// C f(z) = f(w) C for the Berezin transform of F.
inline VerificationReport respects_intertwiners_check(const PolynomialElement& F,
                                                      const ReprPoint& z, const ReprPoint& w,
                                                      const Matrix& C, double tol) {
    if (C.rows() != w.m || C.cols() != z.m)
        throw ShapeMismatch("respects_intertwiners_check: C must map H_sigma to H_tau");
    double scale = std::max({op_norm(C), 1.0});
    if (z.model.kind == ModelKind::Free) {
        for (int i = 0; i < z.model.d; ++i)
            if (op_norm(Matrix(C * z.blocks[i] - w.blocks[i] * C)) > tol * scale)
                throw NotAnIntertwiner("C z_i != w_i C");
    } else {
        if (op_norm(Matrix(C * z.T - w.T * C)) > tol * scale)
            throw NotAnIntertwiner("C T_z != T_w C");
        for (int i = 0; i < z.model.n; ++i) {
            Vector ei = Vector::Zero(z.model.n);
            ei(i) = 1.0;
            if (op_norm(Matrix(C * z.sigma(ei) - w.sigma(ei) * C)) > tol * scale)
                throw NotAnIntertwiner("C does not intertwine sigma and tau");
        }
    }
    double residual = op_norm(Matrix(C * berezin(F, z) - berezin(F, w) * C));
    return VerificationReport::make("respects_intertwiners", residual, tol * scale);
}

// ---- the Mueller isometry -----------------------------------------------------

struct MullerResult {
    std::vector<Matrix> block; // V : H -> sum_k E^{tensor k} (x) H
    VerificationReport isometry;
    VerificationReport intertwining;
    double tail_bound = 0.0;
};

// V = (I (x) ((iota - phi)(I))^(1/2)) diag[1, R_1, ...] C(z) for a completely
// positive phi whose potential is Theta^R_z; checks V*V = I and the shift
// intertwining V (z L_xi) = (W_xi (x) I) V on inner blocks.
inline MullerResult muller_isometry(const ReprPoint& z, const AdmissibleSequence& X,
                                    const RSequence& R, const CPMap& phi, int N, double tol) {
    if (phi.norm() > 1.0 + tol) throw NotAPotential("||phi|| > 1");
    // potential hypothesis on a Hermitian operator basis
    double hyp_worst = 0.0;
    std::vector<Matrix> samples;
    samples.push_back(identity(z.m));
    for (int i = 0; i < z.m; ++i)
        for (int j = i; j < z.m; ++j) {
            Matrix E = Matrix::Zero(z.m, z.m);
            E(i, j) += cx(0.5, 0);
            E(j, i) += cx(0.5, 0);
            samples.push_back(E);
            if (i != j) {
                Matrix F = Matrix::Zero(z.m, z.m);
                F(i, j) = cx(0, -0.5);
                F(j, i) = cx(0, 0.5);
                samples.push_back(F);
            }
        }
    double hyp_tail = 0.0;
    for (const auto& a : samples) {
        ThetaResult th = theta_R(z, X, R, a, tol);
        double res = op_norm(Matrix(th.value - phi.apply(th.value) - a));
        hyp_worst = std::max(hyp_worst, res);
        hyp_tail = std::max(hyp_tail, (1.0 + phi.norm()) * th.tail_bound);
    }
    if (hyp_worst > tol * 100 + hyp_tail)
        throw NotAPotential("Theta^R is not the potential of phi: residual " +
                            std::to_string(hyp_worst));

    Matrix ImPhiI = identity(z.m) - phi.apply(identity(z.m));
    if (min_eig_hermitian(ImPhiI, tol * 10) < -10 * tol)
        throw NotAPotential("(iota - phi)(I) is not positive");
    Matrix DeltaPhi = hermitian_calculus(
        ImPhiI, [](double t) { return std::sqrt(std::max(0.0, t)); }, tol * 10);
    MullerResult out;
    for (int k = 0; k <= N; ++k)
        out.block.push_back(z.amp_module(R.at(k)) * z.amp_aux(DeltaPhi, k) * z.power(k).adjoint());

    double dn = op_norm(DeltaPhi);
    out.tail_bound = damped_tail_bound(z, X, N, dn * dn);
    Matrix G = Matrix::Zero(z.m, z.m);
    for (const auto& B : out.block) G += B.adjoint() * B;
    out.isometry = VerificationReport::make("muller_isometry", op_norm(Matrix(G - identity(z.m))),
                                            tol, out.tail_bound);

    WeightSequence Z = canonical_Z(R);
    TruncatedFock bare(z.model, N, 1);
    double worst = 0.0;
    int nxi = z.model.kind == ModelKind::Free ? z.model.d : 1;
    for (int i = 0; i < nxi; ++i) {
        GradedVector xi;
        xi.degree = 1;
        xi.entries = Vector::Zero(tensor_dim(z.model, 1));
        if (z.model.kind == ModelKind::Free)
            xi.entries(i) = 1.0;
        else
            xi.entries.setOnes();
        GradedOperator W = weighted_shift(xi, Z, bare);
        Matrix zLxi = z.power(1) * z.insertion_at(xi);
        // coinvariance form, as for the Poisson kernel: V L_xi^* z^* = (W_xi^* (x) I) V
        for (int k = 0; k + 1 <= N; ++k) {
            Matrix lhs = out.block[k] * zLxi.adjoint();
            Matrix rhs = z.amp_module(W.block(k + 1, k)).adjoint() * out.block[k + 1];
            worst = std::max(worst, op_norm(Matrix(lhs - rhs)));
        }
    }
    out.intertwining =
        VerificationReport::make("muller_intertwine", worst, tol, out.tail_bound, nxi);
    return out;
}

} // namespace weft

#endif
