#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace weft;
using namespace weft::crossed;

namespace {

AutoSpec swap_spec(int N) {
    AutoSpec spec;
    spec.model = CorrespondenceModel::automorphism({1, 0});
    spec.N = N;
    for (int k = 1; k <= N + 2; ++k) {
        Vector z(2);
        z << cx(1.0 + 0.25 * k, 0), cx(2.0 / k, 0);
        spec.z.push_back(z);
    }
    return spec;
}

} // namespace

TEST_CASE("trivial crossed product is the unilateral shift") {
    AutoSpec spec;
    spec.model = CorrespondenceModel::automorphism({0});
    spec.N = 4;
    for (int k = 1; k <= 5; ++k) spec.z.push_back(Vector::Ones(1));
    Generators g = build_generators(spec);
    CHECK(op_norm(Matrix(g.W - g.S)) == 0.0);
    for (int k = 0; k < 4; ++k) CHECK(std::abs(g.S(k + 1, k) - cx(1, 0)) == 0.0);
}

TEST_CASE("phi applies alpha per degree") {
    AutoSpec spec = swap_spec(3);
    Generators g = build_generators(spec);
    Vector a(2);
    a << cx(1, 0), cx(2, 0);
    Matrix P = g.phi(a);
    double expect[] = {1, 2, 2, 1, 1, 2, 2, 1};
    for (int i = 0; i < 8; ++i) CHECK(std::abs(P(i, i) - cx(expect[i], 0)) == 0.0);
}

TEST_CASE("W acts as the weighted shift on coordinates") {
    AutoSpec spec = swap_spec(3);
    Generators g = build_generators(spec);
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 2; ++i) {
            Vector e = Vector::Zero(g.dim());
            e(2 * k + i) = 1.0;
            Vector out = g.W * e;
            Vector expect = Vector::Zero(g.dim());
            expect(2 * (k + 1) + i) = spec.z[size_t(k)](i); // z_{k+1}(i)
            CHECK((out - expect).norm() < 1e-14);
        }
}

TEST_CASE("beta shifts the diagonals") {
    AutoSpec spec = swap_spec(4);
    Generators g = build_generators(spec);
    std::int64_t inner = 2 * 4; // levels 0..N-1
    for (int k = -3; k <= 3; ++k) {
        Matrix lhs = beta(g, g.D.at(k));
        Matrix rhs = g.D.at(k - 1);
        CHECK(op_norm(Matrix((lhs - rhs).topLeftCorner(inner, inner))) < 1e-14);
    }
    Vector a(2);
    a << cx(0.5, 0.5), cx(-1, 0.25);
    Matrix lhs = beta(g, g.phi(a));
    Matrix rhs = g.phi(spec.model.alpha_pow(a, 1));
    CHECK(op_norm(Matrix((lhs - rhs).topLeftCorner(inner, inner))) < 1e-14);
    // beta(I) = I on the inner range
    Matrix bI = beta(g, identity(g.dim()));
    CHECK(op_norm(Matrix((bI - identity(g.dim())).topLeftCorner(inner, inner))) == 0.0);
}

TEST_CASE("beta is multiplicative on the inner range") {
    AutoSpec spec = swap_spec(4);
    Generators g = build_generators(spec);
    Rng rng(71);
    Matrix y1 = g.W * g.W.adjoint() + g.phi(rng.vector(2));
    Matrix y2 = g.D.at(1) + g.W.adjoint() * g.W;
    Matrix lhs = beta(g, Matrix(y1 * y2));
    Matrix rhs = beta(g, y1) * beta(g, y2);
    std::int64_t inner = 2 * 3; // one more level lost to the S* S edge
    CHECK(op_norm(Matrix((lhs - rhs).topLeftCorner(inner, inner))) < 1e-12);
}

TEST_CASE("covariance defect is supported in ran P0") {
    AutoSpec spec = swap_spec(4);
    Generators g = build_generators(spec);
    CHECK(ideal_defect(g, identity(g.dim())).report.pass);
    CHECK(op_norm(ideal_defect(g, identity(g.dim())).defect) == 0.0);

    // y in the diagonal algebra: zero defect
    CHECK(ideal_defect(g, g.D.at(1)).report.pass);
    CHECK(op_norm(ideal_defect(g, g.D.at(1)).defect) < 1e-14);

    Vector a(2);
    a << cx(2, 0), cx(3, 0);
    IdealDefect dphi = ideal_defect(g, g.phi(a));
    CHECK(dphi.report.pass);
    CHECK(op_norm(dphi.defect) < 1e-14);

    // y = W^*: the defect is genuinely supported at P0
    IdealDefect dw = ideal_defect(g, Matrix(g.W.adjoint()));
    CHECK(dw.report.pass);
    CHECK(op_norm(dw.defect) > 0.1);
    CHECK(op_norm(Matrix((identity(g.dim()) - g.P0()) * dw.defect)) < 1e-14);
}

TEST_CASE("gauge action") {
    AutoSpec spec = swap_spec(4);
    Generators g = build_generators(spec);
    CHECK(gauge_check(g, {cx(1, 0)}, 1e-14).pass);
    CHECK(gauge_check(g, {cx(0, 1)}, 1e-12).pass); // lambda = i
    std::vector<cx> eighth;
    for (int q = 0; q < 8; ++q) eighth.push_back(std::exp(cx(0, 2 * M_PI * q / 8)));
    CHECK(gauge_check(g, eighth, 1e-12).pass);
    // D_3 fixed under every sampled rotation
    for (cx lam : eighth)
        CHECK(op_norm(Matrix(g.gauge(g.D.at(3), lam) - g.D.at(3))) < 1e-13);
}

TEST_CASE("trivial weights reduce to the classical covariance") {
    AutoSpec spec;
    spec.model = CorrespondenceModel::automorphism({1, 0});
    spec.N = 4;
    for (int k = 1; k <= 6; ++k) spec.z.push_back(Vector::Ones(2));
    Generators g = build_generators(spec);
    CHECK(op_norm(Matrix(g.W - g.S)) == 0.0);
    // phi(a) S = S phi(alpha(a)) holds on the nose, not just modulo the ideal
    Vector a(2);
    a << cx(1, 2), cx(-3, 0.5);
    CHECK(op_norm(Matrix(g.phi(a) * g.S - g.S * g.phi(spec.model.alpha_pow(a, 1)))) == 0.0);
    CHECK(ideal_defect(g, g.phi(a)).report.pass);
}

TEST_CASE("partial inverses of the diagonals") {
    AutoSpec spec = swap_spec(4);
    Generators g = build_generators(spec);
    for (int k = 0; k <= 3; ++k) {
        Matrix Dk = g.D.at(k);
        Matrix pinvD = pinv(Dk);
        // D_k has k+1 leading zero levels: D_k D_k^+ = sum_{j>k} P_j
        Matrix expect = g.P_from(k + 1);
        CHECK(op_norm(Matrix(Dk * pinvD - expect)) < 1e-12);
    }
    CHECK(op_norm(Matrix(g.D.at(-1) * pinv(g.D.at(-1)) - identity(g.dim()))) < 1e-12);
}
