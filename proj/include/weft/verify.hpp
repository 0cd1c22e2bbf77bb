#ifndef WEFT_VERIFY_HPP
#define WEFT_VERIFY_HPP

// The full identity suite over a fixed, documented grid of randomized
// instances: d in {1,2}, m in {1,2,3}, N in {4,5,6}, support <= 3, X drawn
// PSD with a min-eigenvalue floor of 0.1 on X_1. Per-check seeds derive from
// the master seed, so runs are reproducible byte for byte.

#include <algorithm>
#include <chrono>

#include "dilation.hpp"
#include "duality.hpp"
#include "crossed.hpp"
#include "rng.hpp"

namespace weft {

// Random admissible sequence on the free model.
inline AdmissibleSequence random_admissible(const CorrespondenceModel& model, int support,
                                            Rng& rng) {
    AdmissibleSequence X;
    X.model = model;
    for (int k = 1; k <= support; ++k) {
        std::int64_t dim = tensor_dim(model, k);
        Matrix Xk = rng.psd(dim) / std::pow(2.0, k - 1);
        if (k == 1) Xk += 0.1 * identity(dim);
        if (model.kind == ModelKind::Auto) Xk = Matrix(Xk.diagonal().real().cast<cx>().asDiagonal());
        X.X.push_back(std::move(Xk));
    }
    return X;
}

inline GradedVector random_graded(const CorrespondenceModel& model, int degree, Rng& rng) {
    GradedVector v;
    v.degree = degree;
    v.entries = rng.vector(tensor_dim(model, degree));
    return v;
}

// Scale a raw point into the open disc, far enough in that the undamped
// R-series tail at truncation depth N is certified below `tail_target`.
inline ReprPoint certified_interior(const ReprPoint& raw, const AdmissibleSequence& X, int N,
                                    double tail_target = 1e-12) {
    ReprPoint z = raw;
    double nrm = z.norm();
    if (nrm > 0) z = z.scaled(0.4 / nrm);
    for (int tries = 0; tries < 80; ++tries) {
        try {
            if (undamped_tail_bound(z, X, N) <= tail_target &&
                disc_membership(z, X).membership == Membership::Interior)
                return z;
        } catch (const CannotBoundTail&) {
        }
        z = z.scaled(0.7);
    }
    throw Error("InternalCheck", "could not scale a point into the certified interior");
}

// Fully coisometric boundary point for a support-1 sequence: with B an
// m x dm coisometry, z = B (X_1^(-1/2) (x) I) satisfies
// z (X_1 (x) I) z^* = I, so Delta = 0 and Q = I.
inline ReprPoint boundary_point(const Matrix& X1, const CorrespondenceModel& model, int m,
                                Rng& rng) {
    std::int64_t dm = std::int64_t(model.d) * m;
    Matrix U = rng.unitary(dm);
    Matrix B = U.topRows(m); // coisometry
    Matrix zrow = B * kron(pinv_sqrt(X1, 1e-12), identity(m));
    std::vector<Matrix> blocks;
    for (int i = 0; i < model.d; ++i) blocks.push_back(zrow.middleCols(std::int64_t(i) * m, m));
    return ReprPoint::free_point(model, blocks);
}

namespace detail {

struct Suite {
    std::vector<VerificationReport> reports;
    std::string prefix;
    std::chrono::steady_clock::time_point mark = std::chrono::steady_clock::now();

    // wall time since the previous add, i.e. roughly the cost of this check
    void add(VerificationReport r, std::uint64_t seed = 0) {
        auto now = std::chrono::steady_clock::now();
        r.runtime_ms = std::chrono::duration<double, std::milli>(now - mark).count();
        mark = now;
        r.name = prefix + r.name;
        r.seed = seed;
        reports.push_back(std::move(r));
    }
    void add(const std::string& name, double residual, double tol, double tail = 0.0,
             int excluded = 0, std::uint64_t seed = 0) {
        add(VerificationReport::make(name, residual, tol, tail, excluded), seed);
    }
};

inline void run_free_instance(Suite& out, int d, int m, int N, std::uint64_t seed) {
    Rng rng(seed);
    rng.set_base(seed);
    CorrespondenceModel model = CorrespondenceModel::free(d);
    int support = 1 + int(rng.raw() % 3);
    AdmissibleSequence X = random_admissible(model, support, rng);
    RSequence R = compute_R(X, N);

    // composition-sum oracle
    {
        double worst = 0.0;
        for (int k = 1; k <= std::min(N, 5); ++k)
            worst = std::max(worst, rel_residual(composition_sum_bruteforce(X, k), R.sq(k)));
        out.add("r_composition", worst, 1e-10, 0, 0, seed);
    }

    WeightSequence Zc = canonical_Z(R);
    WeightSequence Zp = positive_Z(R);
    out.add(check_associated(Zc, X, N, 1e-10), seed);
    out.reports.back().name = out.prefix + "associated_canonical";
    out.add(check_associated(Zp, X, N, 1e-10), seed);
    out.reports.back().name = out.prefix + "associated_positive";

    {
        EquivalenceResult eq = equivalence_unitaries(Zc, Zp, 1e-9);
        out.add("equivalence_unitary", eq.unitarity_residual, 1e-9, 0, 0, seed);
        out.add("equivalence_recurrence", eq.recurrence_residual, 1e-9, 0, 0, seed);
    }

    // canonical-weight norm bound ||Z_k|| <= a^{-1/2}
    {
        double a = min_eig_hermitian(X.at(1));
        double worst = 0.0;
        for (int k = 1; k <= N; ++k)
            worst = std::max(worst, op_norm(Zc.at(k)) - 1.0 / std::sqrt(a));
        out.add("weight_norm_bound", std::max(0.0, worst), 1e-9, 0, 0, seed);
    }

    TruncatedFock bare(model, N, 1);
    out.add(defect_identity_check(Zc, X, bare, 1e-10), seed);
    out.add(rescale_check(Zc, bare, 1e-10), seed);

    // weighted-shift product law on inner blocks
    {
        int p = 1 + int(rng.raw() % 2), q = 1;
        GradedVector xi1 = random_graded(model, p, rng);
        GradedVector xi2 = random_graded(model, q, rng);
        GradedOperator W1 = weighted_shift(xi1, Zc, bare);
        GradedOperator W2 = weighted_shift(xi2, Zc, bare);
        GradedOperator W12 = weighted_shift(tensor_concat(model, xi1, xi2), Zc, bare);
        GradedOperator P = W1 * W2;
        double worst = 0.0;
        for (int k = 0; k + p + q <= N; ++k)
            worst = std::max(worst, op_norm(Matrix(P.block(k + p + q, k) - W12.block(k + p + q, k))));
        out.add("product_law", worst, 1e-10, 0, p + q, seed);
    }

    // Fourier banding and gauge covariance
    {
        GradedOperator A(bare);
        for (int band = 0; band <= std::min(2, N); ++band)
            for (int k = 0; k + band <= N; ++k)
                A.set(k + band, k, rng.matrix(bare.dims[k + band], bare.dims[k]));
        GradedOperator sum(bare);
        for (int jb = -N; jb <= N; ++jb) sum = sum + fourier_coeff(A, jb);
        out.add("fourier_reconstruction", (sum - A).norm(), 1e-12, 0, 0, seed);
        double worst = 0.0;
        for (int q = 0; q < 16; ++q) {
            double t = 2.0 * M_PI * q / 16.0;
            GradedOperator G = gauge_conjugate(A, t);
            for (int jb = 0; jb <= 2; ++jb) {
                GradedOperator lhs = fourier_coeff(G, jb);
                GradedOperator rhs = fourier_coeff(A, jb).scaled(std::exp(cx(0, jb * t)));
                worst = std::max(worst, (lhs - rhs).norm());
            }
        }
        out.add("gauge_covariance", worst, 1e-12, 0, 0, seed);
    }

    // D_k diagonals
    {
        int k = 1 + int(rng.raw() % std::min(2, N));
        GradedOperator Dk = Dk_diagonal(Zc, k, bare);
        GradedOperator Dmk = Dk_diagonal(Zc, -k, bare);
        GradedOperator prod = Dk * Dmk;
        GradedOperator proj(bare);
        for (int l = k; l <= N; ++l) proj.set(l, l, identity(bare.dims[l]));
        out.add("dk_partial_inverse", (prod - proj).norm(), 1e-10, 0, 0, seed);
        GradedVector xi = random_graded(model, k, rng);
        GradedOperator W = weighted_shift(xi, Zc, bare);
        GradedOperator DT = Dk * creation(xi, bare);
        out.add("dk_shift_factorization", (W - DT).norm(), 1e-10, 0, 0, seed);
    }

    // interior point: potential, kernels, evaluation, Berezin
    ReprPoint z = certified_interior(
        [&] {
            std::vector<Matrix> bs;
            for (int i = 0; i < d; ++i) bs.push_back(rng.matrix(m, m));
            return ReprPoint::free_point(model, bs);
        }(),
        X, N);
    {
        Matrix a = rng.psd(m);
        out.add(potential_check(z, X, R, a, 1e-8), seed);
        PoissonKernel K = poisson_kernel(z, X, Zc, N);
        out.add(poisson_isometry_check(K, 1e-8), seed);
        GradedVector e0 = random_graded(model, 1, rng);
        out.add(intertwine_check(z, X, Zc, e0, N, 1e-8), seed);

        // covariance: Psi(W_xi) = z^{(n)} L_xi, and unitality via A = I
        GradedVector xi2 = random_graded(model, std::min(2, N), rng);
        Evaluation ev = evaluate(z, weighted_shift(xi2, Zc, bare), X, Zc, N);
        Matrix covariant = z.power(xi2.degree) * z.insertion_at(xi2);
        out.add("berezin_covariance", op_norm(Matrix(ev.value - covariant)), 1e-8,
                ev.tail_bound + K.tail_bound, 0, seed);
        Evaluation evI = evaluate(z, GradedOperator::identity_on(bare), X, Zc, N);
        out.add("evaluation_unital", op_norm(Matrix(evI.value - (identity(m) - K.Q))), 1e-8,
                evI.tail_bound, 0, seed);
    }

    // Berezin homomorphism, direct sums, intertwiners
    {
        PolynomialElement F = PolynomialElement::scalar(model, cx(rng.gaussian(), rng.gaussian()));
        F.add_term(random_graded(model, 1, rng));
        if (N >= 2) F.add_term(random_graded(model, 2, rng));
        PolynomialElement G = PolynomialElement::scalar(model, cx(rng.gaussian(), 0));
        G.add_term(random_graded(model, 1, rng));
        PolynomialElement FG = poly_mul(model, F, G);
        Matrix lhs = berezin(FG, z);
        Matrix rhs = berezin(F, z) * berezin(G, z);
        out.add("berezin_multiplicative", op_norm(Matrix(lhs - rhs)), 1e-10, 0, 0, seed);

        // kernel-route homomorphism with degree padding (on instances where
        // the padded space stays at desk scale)
        int pad = F.max_degree() + G.max_degree();
        if (tensor_dim(model, N + pad) * m <= 800) {
            TruncatedFock big(model, N + pad, 1);
            RSequence Rbig = compute_R(X, N + pad);
            WeightSequence Zbig = canonical_Z(Rbig);
            Evaluation eF = evaluate(z, poly_operator(F, Zbig, big), X, Zbig, N + pad);
            Evaluation eG = evaluate(z, poly_operator(G, Zbig, big), X, Zbig, N + pad);
            Evaluation eFG = evaluate(z, poly_operator(FG, Zbig, big), X, Zbig, N + pad);
            out.add("evaluation_homomorphism", op_norm(Matrix(eFG.value - eF.value * eG.value)),
                    1e-8, eF.tail_bound + eG.tail_bound + eFG.tail_bound, 0, seed);
        }

        // intertwiner respect: inclusion into a direct sum, unitary transport
        ReprPoint y = certified_interior(
            [&] {
                std::vector<Matrix> bs;
                for (int i = 0; i < d; ++i) bs.push_back(rng.matrix(m, m));
                return ReprPoint::free_point(model, bs);
            }(),
            X, N);
        ReprPoint zy = z.direct_sum(y);
        Matrix C_incl = Matrix::Zero(z.m + y.m, z.m);
        C_incl.topRows(z.m) = identity(z.m);
        out.add(respects_intertwiners_check(F, z, zy, C_incl, 1e-9), seed);
        Matrix U = rng.unitary(m);
        std::vector<Matrix> wb;
        for (int i = 0; i < d; ++i) wb.push_back(Matrix(U * z.blocks[i] * U.adjoint()));
        ReprPoint w = ReprPoint::free_point(model, wb);
        out.add(respects_intertwiners_check(F, z, w, U, 1e-9), seed);
        Matrix dsum = berezin(F, zy);
        Matrix dsum_expected = Matrix::Zero(z.m + y.m, z.m + y.m);
        dsum_expected.topLeftCorner(z.m, z.m) = berezin(F, z);
        dsum_expected.bottomRightCorner(y.m, y.m) = berezin(F, y);
        out.add("berezin_direct_sum", op_norm(Matrix(dsum - dsum_expected)), 1e-12, 0, 0, seed);

        // boundary scaling continuity at sampled radii
        ReprPoint zb = boundary_point(X.at(1), model, m, rng);
        double prev = op_norm(berezin(F, zb.scaled(0.90)));
        double cur = op_norm(berezin(F, zb.scaled(0.91)));
        out.add("berezin_radial_continuity", std::abs(cur - prev), 0.5, 0, 0, seed);
    }

    // Mueller isometry at the interior point (phi = prepotential)
    {
        CPMap phi = prepotential(z, X);
        MullerResult mu = muller_isometry(z, X, R, phi, N, 1e-8);
        out.add(mu.isometry, seed);
        out.add(mu.intertwining, seed);
    }

    // coextension: interior (U = 0) and fully coisometric boundary (Q = I)
    {
        Coextension co = coextend(z, X, Zc, N);
        out.add(co.isometry, seed);
        out.reports.back().name = out.prefix + "coextension_isometry_interior";
        out.add(co.intertwining, seed);
        out.reports.back().name = out.prefix + "coextension_intertwine_interior";
        out.add("coextension_interior_trivial_U", double(co.U_basis.cols()), 0.5, 0, 0, seed);

        AdmissibleSequence X1only;
        X1only.model = model;
        X1only.X.push_back(X.at(1));
        RSequence R1 = compute_R(X1only, N);
        WeightSequence Z1 = canonical_Z(R1);
        ReprPoint zb = boundary_point(X1only.at(1), model, m, rng);
        out.add(fully_coisometric_check(zb, X1only, 1e-8), seed);
        Coextension cb = coextend(zb, X1only, Z1, N);
        out.add(cb.isometry, seed);
        out.reports.back().name = out.prefix + "coextension_isometry_boundary";
        out.add(cb.intertwining, seed);
        out.reports.back().name = out.prefix + "coextension_intertwine_boundary";
        out.add(cb.coisometry, seed);
        PoissonKernel Kb = poisson_kernel(zb, X1only, Z1, N);
        out.add(poisson_isometry_check(Kb, 1e-8), seed);
        out.reports.back().name = out.prefix + "poisson_isometry_boundary";
    }

    // Wold round-trip on induced (+) fully coisometric, support-1 companion.
    // A relative ridge keeps the companion well conditioned: the canonical
    // weight chains otherwise lose ~kappa(X_1)^(N/2) digits at depth N.
    {
        AdmissibleSequence X1only;
        X1only.model = model;
        X1only.X.push_back(Matrix(X.at(1) + 0.2 * op_norm(X.at(1)) * identity(d)));
        RSequence R1 = compute_R(X1only, N);
        WeightSequence Z1 = canonical_Z(R1);
        TruncatedFock Fm(model, N, 1);
        ReprPoint vfc = boundary_point(X1only.at(1), model, std::max(1, m - 1), rng);
        std::vector<Matrix> vb;
        for (int i = 0; i < d; ++i) {
            GradedVector ei;
            ei.degree = 1;
            ei.entries = Vector::Zero(d);
            ei.entries(i) = 1.0;
            Matrix ind = weighted_shift(ei, Z1, Fm).dense();
            Matrix full = Matrix::Zero(Fm.total + vfc.m, Fm.total + vfc.m);
            full.topLeftCorner(Fm.total, Fm.total) = ind;
            full.bottomRightCorner(vfc.m, vfc.m) = vfc.blocks[i];
            vb.push_back(full);
        }
        ReprPoint v = ReprPoint::free_point(model, vb);
        WoldSplit ws = wold(v, X1only, Z1);
        out.add(ws.projection, seed);
        out.add(ws.orthogonality, seed);
        out.add(ws.induced_match, seed);
        out.add(ws.full_coisometric, seed);
        out.reports.back().name = out.prefix + "wold_full_coisometric";
        bool dims_ok = ws.K_ind.cols() == Fm.total && ws.K_full.cols() == vfc.m;
        out.add("wold_dimension_recovery", dims_ok ? 0.0 : 1.0, 0.5, 0, 0, seed);
    }

    // duality: commutant, chains, symbol round-trip, mixed amplification
    {
        DualPoint th;
        th.degree = 1;
        th.theta = rng.matrix(std::int64_t(d) * m, m);
        GradedVector xi = random_graded(model, 1, rng);
        Matrix b = rng.matrix(m, m);
        out.add(commutant_check(th, xi, b, Zc, N, m, 1e-8), seed);
        out.add(dual_associated_check(X, Zc, std::min(N, 4), 1e-9), seed);

        TruncatedFock FH(model, N, m);
        GradedOperator Yd = dual_shift(th, Zc, FH);
        SymbolResult sym = recover_symbol(Yd, 1, Zc, 1e-9);
        out.add("symbol_roundtrip",
                op_norm(Matrix(sym.theta.theta - th.theta)) /
                    std::max(1.0, op_norm(th.theta)),
                1e-9, 0, 0, seed);

        // band-2 product of two dual shifts, recovered through its Fourier band
        if (N >= 2) {
            DualPoint th2;
            th2.degree = 1;
            th2.theta = rng.matrix(std::int64_t(d) * m, m);
            GradedOperator prod = dual_shift(th2, Zc, FH) * Yd;
            SymbolResult sym2 = recover_symbol(fourier_coeff(prod, 2), 2, Zc, 1e-8);
            out.add("symbol_fourier_band", sym2.reconstruction_residual, 1e-8, 0, 2, seed);
        }

        int kk = 1, mm = 1;
        Matrix A = rng.matrix(tensor_dim(model, kk + mm), tensor_dim(model, kk + mm));
        Matrix B = rng.matrix(tensor_dim(model, kk), tensor_dim(model, kk));
        out.add(mixed_amplification_check(model, A, kk + mm, B, kk, m, rng, 50, 1e-10), seed);

        // dual weight bound ||Z'_m||^2 <= ||X_1^{-1}||
        double xinv = 1.0 / min_eig_hermitian(X.at(1));
        double worst = 0.0;
        for (int mm2 = 1; mm2 <= N; ++mm2) {
            double nm = op_norm(dual_Zprime(Zc, mm2));
            worst = std::max(worst, nm * nm - xinv);
        }
        out.add("dual_weight_bound", std::max(0.0, worst), 1e-9, 0, 0, seed);
    }

    // q_limit direct-sum structure: interior (+) boundary gives Q = 0 (+) I
    {
        AdmissibleSequence X1only;
        X1only.model = model;
        X1only.X.push_back(X.at(1));
        ReprPoint zi = certified_interior(z, X1only, N);
        ReprPoint zb = boundary_point(X1only.at(1), model, m, rng);
        ReprPoint zsum = zi.direct_sum(zb);
        Matrix Q = q_limit(zsum, X1only, 1e-11, 200000).Q;
        Matrix expected = Matrix::Zero(2 * m, 2 * m);
        expected.bottomRightCorner(m, m) = identity(m);
        out.add("q_limit_direct_sum", op_norm(Matrix(Q - expected)), 1e-8, 0, 0, seed);
    }
}

inline void run_auto_instance(Suite& out, int n, int N, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    for (int i = n - 1; i > 0; --i) std::swap(perm[size_t(i)], perm[rng.raw() % (i + 1)]);
    CorrespondenceModel model = CorrespondenceModel::automorphism(perm);

    AdmissibleSequence X = random_admissible(model, 1 + int(rng.raw() % 3), rng);
    RSequence R = compute_R(X, N);
    WeightSequence Zc = canonical_Z(R);
    out.add(check_associated(Zc, X, N, 1e-10), seed);
    out.reports.back().name = out.prefix + "associated_canonical";
    out.add(defect_identity_check(Zc, X, TruncatedFock(model, N, 1), 1e-10), seed);

    // commutativity is automatic for diagonal weights: certified lower bound,
    // on a companion sequence with the required spectral gap
    {
        AdmissibleSequence Xc;
        Xc.model = model;
        for (int k = 1; k <= 3; ++k) {
            Vector xk(n);
            for (int i = 0; i < n; ++i)
                xk(i) = k == 1 ? cx(1.0 + rng.uniform01(), 0)
                               : cx(std::pow(0.4, k) * rng.uniform01(), 0);
            Xc.X.push_back(Matrix(xk.asDiagonal()));
        }
        ConditionBResult cb = conditionb_weights(Xc, N);
        double worst = 0.0;
        for (int k = 1; k <= N; ++k)
            worst = std::max(worst, cb.epsilon - min_eig_hermitian(cb.Z.at(k)));
        out.add("conditionb_bound", std::max(0.0, worst), 1e-9, 0, 0, seed);
    }

    // crossed-product relations with the canonical weights as z_k
    crossed::AutoSpec spec;
    spec.model = model;
    spec.N = N;
    for (int k = 1; k <= N; ++k) spec.z.push_back(Zc.at(k).diagonal());
    crossed::Generators g = crossed::build_generators(spec);
    {
        double worst = 0.0;
        std::int64_t inner = std::int64_t(n) * N; // levels 0..N-1
        for (int k = -(N - 1); k <= N - 1; ++k) {
            Matrix lhs = crossed::beta(g, g.D.at(k));
            Matrix rhs = g.D.at(k - 1);
            worst = std::max(worst,
                             op_norm(Matrix((lhs - rhs).topLeftCorner(inner, inner))));
        }
        Vector a = rng.vector(n);
        Matrix lhs = crossed::beta(g, g.phi(a));
        Matrix rhs = g.phi(model.alpha_pow(a, 1));
        worst = std::max(worst, op_norm(Matrix((lhs - rhs).topLeftCorner(inner, inner))));
        out.add("crossed_beta", worst, 1e-12, 0, 1, seed);
    }
    {
        std::vector<cx> samples;
        for (int q = 0; q < 8; ++q) samples.push_back(std::exp(cx(0, 2.0 * M_PI * q / 8.0)));
        out.add(crossed::gauge_check(g, samples, 1e-12), seed);
        out.add(crossed::ideal_defect(g, g.W.adjoint(), 1e-10).report, seed);
        out.reports.back().name = out.prefix + "crossed_covariance_Wstar";
        out.add(crossed::ideal_defect(g, g.phi(rng.vector(n)), 1e-12).report, seed);
        out.reports.back().name = out.prefix + "crossed_covariance_phi";
        // beta multiplicative on the inner range
        Matrix y1 = g.W * g.W.adjoint() + g.phi(rng.vector(n));
        Matrix y2 = g.D.at(1) + g.W.adjoint() * g.W;
        Matrix lhs = crossed::beta(g, Matrix(y1 * y2));
        Matrix rhs = crossed::beta(g, y1) * crossed::beta(g, y2);
        std::int64_t inner = std::int64_t(n) * (N - 1);
        out.add("crossed_beta_multiplicative",
                op_norm(Matrix((lhs - rhs).topLeftCorner(inner, inner))), 1e-12, 0, 2, seed);
    }
}

} // namespace detail

inline std::vector<VerificationReport> run_verification_suite(std::uint64_t seed) {
    detail::Suite suite;
    Rng master(seed);
    master.set_base(seed);
    for (int d : {1, 2})
        for (int m : {1, 2, 3})
            for (int N : {4, 5, 6}) {
                suite.prefix = "free_d" + std::to_string(d) + "_m" + std::to_string(m) + "_N" +
                               std::to_string(N) + "/";
                detail::run_free_instance(suite, d, m, N,
                                          master.derive((d * 100 + m * 10 + N)));
            }
    for (int n : {1, 2, 3})
        for (int N : {4, 6}) {
            suite.prefix = "auto_n" + std::to_string(n) + "_N" + std::to_string(N) + "/";
            detail::run_auto_instance(suite, n, N, master.derive(7000 + n * 10 + N));
        }
    std::sort(suite.reports.begin(), suite.reports.end(),
              [](const VerificationReport& a, const VerificationReport& b) {
                  return a.name < b.name;
              });
    return suite.reports;
}

} // namespace weft

#endif
