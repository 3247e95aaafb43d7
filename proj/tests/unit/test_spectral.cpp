#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "adiabound/spectral.hpp"
#include "adiabound/verify.hpp"

using namespace adiabound;

namespace {

// Largest singular value by power iteration on A^H A.
double power_norm(const Matrix& a) {
    Vector v = Vector::Ones(a.cols());
    double lam = 0.0;
    for (int it = 0; it < 2000; ++it) {
        Vector w = a.adjoint() * (a * v);
        lam = w.norm();
        v = w / lam;
    }
    return std::sqrt(lam);
}

}  // namespace

TEST(Spectral, PauliAlgebra) {
    const Matrix x = pauli_x(), y = pauli_y(), z = pauli_z();
    const Complex I(0.0, 1.0);
    EXPECT_LT((x * x - identity(2)).norm(), 1e-15);
    EXPECT_LT((x * y - I * z).norm(), 1e-15);
    EXPECT_DOUBLE_EQ(operator_two_norm(x), 1.0);
}

TEST(Spectral, TwoNormMatchesPowerIteration) {
    std::mt19937_64 rng(3);
    for (Eigen::Index d : {2, 3, 5}) {
        const Matrix h = random_hermitian(rng, d, 2.0);
        Matrix g = h;
        g(0, d - 1) += Complex(0.7, -0.2);  // non-Hermitian too
        EXPECT_NEAR(operator_two_norm(h), power_norm(h), 1e-10);
        EXPECT_NEAR(operator_two_norm(g), power_norm(g), 1e-10);
    }
}

TEST(Spectral, HermitianToleranceIsStrict) {
    Matrix m = pauli_x();
    m(0, 1) += 1e-13;
    EXPECT_NO_THROW(HermitianOperator{m});
    m(0, 1) += 1e-10;
    EXPECT_THROW(HermitianOperator{m}, ValidationError);
    EXPECT_THROW(HermitianOperator(Matrix(2, 3)), DimensionError);
    Matrix bad = pauli_z();
    bad(0, 0) = NAN;
    EXPECT_THROW(HermitianOperator{bad}, ValidationError);
}

TEST(Spectral, ProjectorValidation) {
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    EXPECT_EQ(Projector(p).rank(), 1);
    EXPECT_THROW(Projector(0.5 * identity(2)), ValidationError);
    EXPECT_THROW(Projector{pauli_y()}, ValidationError);
}

TEST(Spectral, EigendecomposeReconstructs) {
    std::mt19937_64 rng(5);
    const Matrix h = random_hermitian(rng, 5, 1.0);
    const SpectralData s = eigendecompose(HermitianOperator(h));
    const Matrix& V = s.eigenvectors;
    EXPECT_LT((V * s.eigenvalues.cast<Complex>().asDiagonal() * V.adjoint() - h).norm(), 1e-12);
    EXPECT_LT((V.adjoint() * V - identity(5)).norm(), 1e-12);
    for (Eigen::Index j = 1; j < 5; ++j) EXPECT_LE(s.eigenvalues(j - 1), s.eigenvalues(j));
    for (Eigen::Index j = 0; j < 5; ++j) {
        Eigen::Index k = 0;
        V.col(j).cwiseAbs().maxCoeff(&k);
        EXPECT_EQ(V(k, j).imag(), 0.0);
        EXPECT_GT(V(k, j).real(), 0.0);
    }
}

TEST(Spectral, TwoLevelAnglesBothSigns) {
    EXPECT_NEAR(two_level_angles(1.0, 0.0).theta, std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(two_level_angles(-1.0, 0.0).theta, -std::numbers::pi / 2, 1e-15);
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int k = 0; k < 100; ++k) {
        const double a = u(rng), b = u(rng);
        const TwoLevelEigen e = two_level_angles(a, b);
        const Matrix H = a * pauli_x() + b * pauli_z();
        const double r = std::hypot(a, b);
        EXPECT_LT((H * e.ground() + r * e.ground()).norm(), 1e-12);
        EXPECT_LT((H * e.excited() - r * e.excited()).norm(), 1e-12);
    }
    EXPECT_THROW(two_level_angles(0.0, 0.0), DegenerateSpectrumError);
}

TEST(Spectral, SubspaceProjectorIndices) {
    const SpectralData s = eigendecompose(HermitianOperator(pauli_z()));
    EXPECT_EQ(subspace_projector(s, 0, 1).rank(), 2);
    EXPECT_THROW(subspace_projector(s, 1, 0), IndexError);
    EXPECT_THROW(subspace_projector(s, 0, 2), IndexError);
}

TEST(Spectral, ProjectorDistanceIsSineOfAngle) {
    for (double phi : {0.0, 0.1, 0.7, std::numbers::pi / 2}) {
        Vector u(2), v(2);
        u << 1.0, 0.0;
        v << std::cos(phi), std::sin(phi);
        EXPECT_NEAR(projector_distance(Projector::onto(u), Projector::onto(v)), std::sin(phi), 1e-12);
    }
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    EXPECT_THROW(projector_distance(Projector(p), Projector(identity(2))), RankError);
}

TEST(Spectral, GapProfileBands) {
    Matrix h = Matrix::Zero(3, 3);
    h(1, 1) = 1.0;
    h(2, 2) = 4.0;
    const std::vector<double> s{0.0, 1.0};
    const std::vector<SpectralData> sp(2, eigendecompose(HermitianOperator(h)));
    const GapProfile g0 = gap_profile(s, sp, 0, 0);
    EXPECT_DOUBLE_EQ(g0.gamma_min, 1.0);
    EXPECT_DOUBLE_EQ(g0.D_max, 1.0);
    const GapProfile g01 = gap_profile(s, sp, 0, 1);
    EXPECT_DOUBLE_EQ(g01.gamma_min, 3.0);
    EXPECT_NEAR(g01.D_max, 1.0 + 2.0 / (3.0 * std::numbers::pi), 1e-15);
    const GapProfile g1 = gap_profile(s, sp, 1, 1);
    EXPECT_DOUBLE_EQ(g1.gamma_min, 1.0);
    EXPECT_THROW(gap_profile(s, sp, 0, 2), IndexError);

    const std::vector<SpectralData> flat(2, eigendecompose(HermitianOperator(identity(2))));
    EXPECT_THROW(gap_profile(s, flat, 0, 0), GapClosureError);
}
