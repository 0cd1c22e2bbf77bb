#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace weft;
using namespace weft::testing;

TEST_CASE("Fibonacci composition sums") {
    AdmissibleSequence X = fibonacci_X();
    RSequence R = compute_R(X, 6);
    double expect[] = {1, 1, 2, 3, 5, 8, 13};
    for (int k = 0; k <= 6; ++k) CHECK(std::abs(sv(R.sq(k)) - expect[k]) < 1e-12);
    for (int k = 1; k <= 5; ++k)
        CHECK(rel_residual(composition_sum_bruteforce(X, k), R.sq(k)) < 1e-12);
}

TEST_CASE("unweighted sequence gives R = 1") {
    AdmissibleSequence X = scalar_X({1.0});
    RSequence R = compute_R(X, 8);
    for (int k = 0; k <= 8; ++k) CHECK(std::abs(sv(R.at(k)) - 1.0) < 1e-13);
}

TEST_CASE("free d=2 identity weights") {
    AdmissibleSequence X;
    X.model = CorrespondenceModel::free(2);
    X.X.push_back(identity(2));
    X.X.push_back(identity(4));
    RSequence R = compute_R(X, 3);
    CHECK(op_norm(Matrix(R.sq(2) - 2.0 * identity(4))) < 1e-12);
    CHECK(op_norm(Matrix(R.sq(3) - 3.0 * identity(8))) < 1e-12);
    CHECK(rel_residual(composition_sum_bruteforce(X, 3), R.sq(3)) < 1e-12);
}

TEST_CASE("random composition enumeration matches the recursion") {
    Rng rng(21);
    CorrespondenceModel model = CorrespondenceModel::free(2);
    AdmissibleSequence X = random_admissible(model, 3, rng);
    RSequence R = compute_R(X, 5);
    for (int k = 1; k <= 5; ++k)
        CHECK(rel_residual(composition_sum_bruteforce(X, k), R.sq(k)) < 1e-10);
}

TEST_CASE("canonical weights closed forms") {
    {
        AdmissibleSequence X = scalar_X({4.0});
        WeightSequence Z = canonical_Z(compute_R(X, 6));
        for (int k = 1; k <= 6; ++k) CHECK(std::abs(sv(Z.at(k)) - 0.5) < 1e-13);
    }
    {
        WeightSequence Z = canonical_Z(compute_R(fibonacci_X(), 5));
        double expect[] = {0, 1.0, std::sqrt(0.5), std::sqrt(2.0 / 3.0), std::sqrt(3.0 / 5.0)};
        for (int k = 1; k <= 4; ++k) CHECK(std::abs(sv(Z.at(k)) - expect[k]) < 1e-12);
    }
    {
        AdmissibleSequence X = scalar_X({1.0});
        WeightSequence Z = canonical_Z(compute_R(X, 5));
        for (int k = 1; k <= 5; ++k) CHECK(std::abs(sv(Z.at(k)) - 1.0) < 1e-13);
    }
}

TEST_CASE("positive weights") {
    // scalar case coincides with the canonical one
    AdmissibleSequence X = fibonacci_X();
    RSequence R = compute_R(X, 5);
    WeightSequence Zc = canonical_Z(R), Zp = positive_Z(R);
    for (int k = 0; k <= 5; ++k) CHECK(std::abs(sv(Zp.at(k)) - sv(Zc.at(k))) < 1e-12);

    // Z_1 = psd_sqrt(R_1^{-2})
    Rng rng(22);
    AdmissibleSequence X2 = random_admissible(CorrespondenceModel::free(2), 2, rng);
    RSequence R2 = compute_R(X2, 4);
    WeightSequence Zp2 = positive_Z(R2);
    CHECK(op_norm(Matrix(Zp2.at(1) - psd_sqrt(Matrix(R2.sq(1).inverse())))) < 1e-11);
    CHECK(check_associated(Zp2, X2, 4, 1e-9).pass);
    for (int k = 1; k <= 4; ++k) CHECK(min_eig_hermitian(Zp2.at(k)) > 0);
}

TEST_CASE("Z_power") {
    Rng rng(23);
    AdmissibleSequence X = random_admissible(CorrespondenceModel::free(2), 2, rng);
    WeightSequence Z = canonical_Z(compute_R(X, 4));
    CHECK(op_norm(Matrix(Z_power(Z, 1) - Z.at(1))) == 0.0);
    // recursion oracle Z^{(k+1)} = Z_{k+1} (I_d (x) Z^{(k)})
    for (int k = 1; k <= 3; ++k) {
        Matrix rhs = Z.at(k + 1) * kron(identity(2), Z_power(Z, k));
        CHECK(op_norm(Matrix(Z_power(Z, k + 1) - rhs)) < 1e-12);
    }
    // scalar product
    WeightSequence Zs = canonical_Z(compute_R(fibonacci_X(), 4));
    CHECK(std::abs(sv(Z_power(Zs, 3)) - sv(Zs.at(3)) * sv(Zs.at(2)) * sv(Zs.at(1))) < 1e-13);
}

TEST_CASE("association checks") {
    AdmissibleSequence X = fibonacci_X();
    RSequence R = compute_R(X, 5);
    WeightSequence Zc = canonical_Z(R);
    CHECK(check_associated(Zc, X, 5, 1e-10).pass);

    WeightSequence Zbad = Zc;
    for (int k = 1; k <= 5; ++k) Zbad.Z[k] *= 2.0;
    CHECK(!check_associated(Zbad, X, 5, 1e-10).pass);

    // unweighted Z = I against X = (1, 0, ...)
    AdmissibleSequence X1 = scalar_X({1.0});
    WeightSequence ZI = canonical_Z(compute_R(X1, 5));
    CHECK(check_associated(ZI, X1, 5, 1e-10).pass);

    // association identity exact in scalars: (z_k...z_1)^2 = 1/R_k^2
    for (int k = 1; k <= 5; ++k) {
        double prod = 1.0;
        for (int j = 1; j <= k; ++j) prod *= sv(Zc.at(j));
        CHECK(std::abs(prod * prod - 1.0 / sv(R.sq(k))) < 1e-12);
    }
}

TEST_CASE("equivalence of associated sequences") {
    Rng rng(24);
    AdmissibleSequence X = random_admissible(CorrespondenceModel::free(2), 2, rng);
    RSequence R = compute_R(X, 4);
    WeightSequence Zc = canonical_Z(R), Zp = positive_Z(R);
    EquivalenceResult eq = equivalence_unitaries(Zc, Zp, 1e-9);
    CHECK(eq.unitarity_residual < 1e-9);
    CHECK(eq.recurrence_residual < 1e-9);

    EquivalenceResult self = equivalence_unitaries(Zc, Zc, 1e-11);
    for (const auto& U : self.U)
        CHECK(op_norm(Matrix(U - identity(U.rows()))) < 1e-10);

    AdmissibleSequence Y = random_admissible(CorrespondenceModel::free(2), 2, rng);
    WeightSequence Zother = canonical_Z(compute_R(Y, 4));
    CHECK_THROWS_AS(equivalence_unitaries(Zc, Zother, 1e-9), NotEquivalent);
}

TEST_CASE("hypothesis record") {
    {
        AdmissibleSequence X = fibonacci_X();
        WeightSequence Z = canonical_Z(compute_R(X, 5));
        HypothesisRecord h = hypothesis_check(X, Z, 5);
        CHECK(h.A);
        CHECK(h.a == Catch::Approx(1.0));
        CHECK(h.rho_reported == Catch::Approx(1.0));
        CHECK(!h.C); // rho = a = 1, strict inequality fails
    }
    {
        AdmissibleSequence X = scalar_X({4.0});
        WeightSequence Z = canonical_Z(compute_R(X, 5));
        HypothesisRecord h = hypothesis_check(X, Z, 5);
        CHECK(h.rho_reported == Catch::Approx(4.0));
        CHECK(h.rho_tail == 0.0);
        CHECK(h.C);
        CHECK(h.a == Catch::Approx(4.0));
    }
    {
        AdmissibleSequence X = scalar_X({1.0});
        WeightSequence Z = canonical_Z(compute_R(X, 5));
        HypothesisRecord h = hypothesis_check(X, Z, 5);
        CHECK(h.B);
        CHECK(h.epsilon == Catch::Approx(1.0));
    }
}

TEST_CASE("condition B weights") {
    {
        AdmissibleSequence X = scalar_X({4.0});
        ConditionBResult cb = conditionb_weights(X, 5);
        CHECK(cb.b == Catch::Approx(4.0));
        CHECK(cb.epsilon == Catch::Approx(0.5));
        for (int k = 1; k <= 5; ++k) CHECK(std::abs(sv(cb.Z.at(k)) - 0.5) < 1e-12);
    }
    {
        // diagonal weights over the automorphism model commute automatically
        auto swap = CorrespondenceModel::automorphism({1, 0});
        AdmissibleSequence X;
        X.model = swap;
        Vector x1(2), x2(2);
        x1 << cx(2.0, 0), cx(3.0, 0);
        x2 << cx(0.5, 0), cx(0.25, 0);
        X.X.push_back(Matrix(x1.asDiagonal()));
        X.X.push_back(Matrix(x2.asDiagonal()));
        ConditionBResult cb = conditionb_weights(X, 5);
        for (int k = 1; k <= 5; ++k)
            CHECK(min_eig_hermitian(cb.Z.at(k)) >= cb.epsilon - 1e-12);
    }
    {
        // non-commuting composition sums fail the precondition
        AdmissibleSequence X;
        X.model = CorrespondenceModel::free(2);
        Matrix X1 = Matrix::Zero(2, 2);
        X1(0, 0) = 1.0;
        X1(1, 1) = 4.0;
        Matrix X2 = Matrix::Zero(4, 4);
        X2(0, 1) = cx(0.3, 0);
        X2(1, 0) = cx(0.3, 0);
        X2(0, 0) = 1.0;
        X2(1, 1) = 1.0;
        X2(2, 2) = 0.5;
        X2(3, 3) = 0.5;
        X.X.push_back(X1);
        X.X.push_back(X2);
        CHECK_THROWS_AS(conditionb_weights(X, 4), CommutativityFails);
    }
}

TEST_CASE("canonical weight norm bound") {
    Rng rng(25);
    AdmissibleSequence X = random_admissible(CorrespondenceModel::free(2), 3, rng);
    WeightSequence Z = canonical_Z(compute_R(X, 5));
    double a = min_eig_hermitian(X.at(1));
    for (int k = 1; k <= 5; ++k) CHECK(op_norm(Z.at(k)) <= 1.0 / std::sqrt(a) + 1e-10);
}

TEST_CASE("invalid admissible sequences are rejected") {
    AdmissibleSequence X;
    X.model = CorrespondenceModel::free(1);
    X.X.push_back(Matrix::Constant(1, 1, cx(0.0, 0))); // X_1 not invertible
    CHECK_THROWS_AS(compute_R(X, 3), NotAdmissible);

    AdmissibleSequence Y = scalar_X({1.0, -0.5});
    CHECK_THROWS_AS(compute_R(Y, 3), NotAdmissible);
}
