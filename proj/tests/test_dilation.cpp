#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace weft;
using namespace weft::testing;

TEST_CASE("fully coisometric certification") {
    CHECK(fully_coisometric_check(scalar_point(0.5), scalar_X({4.0}), 1e-12).pass);
    CHECK(!fully_coisometric_check(scalar_point(0.5), fibonacci_X(), 1e-8).pass);

    Rng rng(51);
    auto model = CorrespondenceModel::free(2);
    AdmissibleSequence X;
    X.model = model;
    X.X.push_back(identity(2));
    // v_1 = v_2 = U/sqrt(2) for a unitary U: sum v_i v_i^* = I
    Matrix U = rng.unitary(3);
    ReprPoint v = ReprPoint::free_point(model, {U / std::sqrt(2.0), U / std::sqrt(2.0)});
    CHECK(fully_coisometric_check(v, X, 1e-12).pass);
}

TEST_CASE("coextension at an interior point is the Poisson kernel") {
    Rng rng(52);
    auto model = CorrespondenceModel::free(2);
    AdmissibleSequence X = random_admissible(model, 2, rng);
    int N = 8;
    WeightSequence Z = canonical_Z(compute_R(X, N));
    std::vector<Matrix> zs{rng.matrix(2, 2), rng.matrix(2, 2)};
    ReprPoint z = certified_interior(ReprPoint::free_point(model, zs), X, N);
    Coextension co = coextend(z, X, Z, N);
    CHECK(co.U_basis.cols() == 0); // Q = 0 so U = {0}
    CHECK(co.isometry.pass);
    CHECK(co.intertwining.pass);
}

TEST_CASE("scalar boundary coextension: Q = 1, v = 1/2") {
    AdmissibleSequence X = scalar_X({4.0});
    WeightSequence Z = canonical_Z(compute_R(X, 8));
    ReprPoint z = scalar_point(0.5);
    Coextension co = coextend(z, X, Z, 8);
    REQUIRE(co.U_basis.cols() == 1);
    CHECK(std::abs(co.K.Q(0, 0) - cx(1, 0)) < 1e-12);
    CHECK(std::abs(std::abs(co.v.blocks[0](0, 0)) - 0.5) < 1e-12);
    CHECK(std::abs(std::abs(co.Y(0, 0)) - 1.0) < 1e-12);
    // 4 * |v|^2 = 1: fully coisometric
    CHECK(co.coisometry.pass);
    CHECK(co.isometry.pass);
    CHECK(co.intertwining.pass);
    // the kernel leg vanishes: V = 0 (+) 1
    for (const auto& B : co.K.block) CHECK(op_norm(B) < 1e-12);
}

TEST_CASE("block point splits into interior and boundary summands") {
    AdmissibleSequence X = scalar_X({4.0});
    WeightSequence Z = canonical_Z(compute_R(X, 26));
    ReprPoint z = scalar_point(0.3).direct_sum(scalar_point(0.5));
    Coextension co = coextend(z, X, Z, 26);
    CHECK(co.U_basis.cols() == 1); // only the boundary summand survives in U
    Matrix Qexpect = Matrix::Zero(2, 2);
    Qexpect(1, 1) = 1.0;
    CHECK(op_norm(Matrix(co.K.Q - Qexpect)) < 1e-9);
    CHECK(co.isometry.pass);
    CHECK(co.intertwining.pass);
    CHECK(co.coisometry.pass);
}

TEST_CASE("wold: truncated induced shift has P_M = P_0") {
    Rng rng(53);
    auto model = CorrespondenceModel::free(2);
    AdmissibleSequence X;
    X.model = model;
    X.X.push_back(rng.psd(2, 0.3));
    int N = 3;
    WeightSequence Z = canonical_Z(compute_R(X, N));
    TruncatedFock F(model, N, 1);
    std::vector<Matrix> vb;
    for (int i = 0; i < 2; ++i)
        vb.push_back(weighted_shift(unit_vector(model, 1, i), Z, F).dense());
    ReprPoint v = ReprPoint::free_point(model, vb);
    WoldSplit ws = wold(v, X, Z);
    CHECK(ws.projection.pass);
    Matrix P0 = Matrix::Zero(F.total, F.total);
    P0(0, 0) = 1.0;
    CHECK(op_norm(Matrix(ws.P_M - P0)) < 1e-10);
    CHECK(ws.multiplicity == 1);
    CHECK(ws.K_ind.cols() == F.total);
    CHECK(ws.K_full.cols() == 0);
    CHECK(ws.orthogonality.pass);
    CHECK(ws.induced_match.pass);
}

TEST_CASE("wold: fully coisometric input has trivial induced part") {
    Rng rng(54);
    auto model = CorrespondenceModel::free(2);
    AdmissibleSequence X;
    X.model = model;
    X.X.push_back(rng.psd(2, 0.2));
    WeightSequence Z = canonical_Z(compute_R(X, 4));
    ReprPoint v = boundary_point(X.at(1), model, 3, rng);
    WoldSplit ws = wold(v, X, Z);
    CHECK(op_norm(ws.P_M) < 1e-10);
    CHECK(ws.K_ind.cols() == 0);
    CHECK(ws.K_full.cols() == 3);
    CHECK(ws.full_coisometric.pass);
}

TEST_CASE("wold round trip recovers direct-sum dimensions") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        Rng rng(seed * 1000 + 7);
        auto model = CorrespondenceModel::free(2);
        AdmissibleSequence X;
        X.model = model;
        X.X.push_back(rng.psd(2, 0.25));
        int N = 2 + int(seed % 2);
        WeightSequence Z = canonical_Z(compute_R(X, N));
        TruncatedFock F(model, N, 1);
        int mfc = 1 + int(seed % 3);
        ReprPoint vfc = boundary_point(X.at(1), model, mfc, rng);
        std::vector<Matrix> vb;
        for (int i = 0; i < 2; ++i) {
            Matrix ind = weighted_shift(unit_vector(model, 1, i), Z, F).dense();
            Matrix full = Matrix::Zero(F.total + mfc, F.total + mfc);
            full.topLeftCorner(F.total, F.total) = ind;
            full.bottomRightCorner(mfc, mfc) = vfc.blocks[i];
            vb.push_back(full);
        }
        WoldSplit ws = wold(ReprPoint::free_point(model, vb), X, Z);
        CHECK(ws.projection.residual <= 1e-9);
        CHECK(ws.K_ind.cols() == F.total);
        CHECK(ws.K_full.cols() == mfc);
        CHECK(ws.multiplicity == 1);
        CHECK(ws.orthogonality.pass);
        CHECK(ws.induced_match.pass);
        CHECK(ws.full_coisometric.pass);
    }
}

TEST_CASE("wold rejects non-extendable inputs") {
    // an interior point: I - S is positive definite, not a projection
    AdmissibleSequence X = scalar_X({4.0});
    WeightSequence Z = canonical_Z(compute_R(X, 4));
    CHECK_THROWS_AS(wold(scalar_point(0.3), X, Z), NotAProjection);
}
