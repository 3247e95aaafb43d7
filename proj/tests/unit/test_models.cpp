#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "adiabound/models.hpp"

using namespace adiabound;

TEST(Tong, HamiltonianLimits) {
    TongModel m;
    m.theta = 0.0;
    EXPECT_LT(operator_two_norm(tong_matrix(m, 3.0) - 5.0 * pauli_z()), 1e-15);
    const TongModel d;
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int k = 0; k < 1000; ++k) {
        const SpectralData s = eigendecompose(tong_hamiltonian(d, u(rng) / 100.0, 100.0));
        EXPECT_NEAR(s.eigenvalues(0), -5.0, 1e-12);
        EXPECT_NEAR(s.eigenvalues(1), 5.0, 1e-12);
    }
}

TEST(Tong, ExactUnitaryReference) {
    const TongModel m;
    EXPECT_LT(operator_two_norm(tong_exact_unitary(m, 0.0) - identity(2)), 1e-15);
    Matrix ref(2, 2);
    ref << Complex(0.9765676945237756, -0.21511226980721548), Complex(-0.001398269843326111, -0.0063477738101376194),
        Complex(0.001398269843326111, -0.0063477738101376194), Complex(0.9765676945237756, 0.21511226980721548);
    EXPECT_LT(operator_two_norm(tong_exact_unitary(m, 1.3) - ref), 1e-13);
    for (double t : {0.1, 7.0, 123.4}) {
        const Matrix U = tong_exact_unitary(m, t);
        EXPECT_LT(operator_two_norm(U.adjoint() * U - identity(2)), 1e-13);
    }
}

TEST(Tong, ExactUnitarySolvesSchrodinger) {
    const TongModel m;
    const double h = 1e-6;
    for (double t : {0.3, 2.0, 9.0}) {
        const Matrix dU = (tong_exact_unitary(m, t + h) - tong_exact_unitary(m, t - h)) / (2 * h);
        const Matrix rhs = Complex(0.0, -1.0) * tong_matrix(m, t) * tong_exact_unitary(m, t);
        EXPECT_LT(operator_two_norm(dU - rhs), 1e-8);
    }
}

TEST(Tong, ExactErrorForms) {
    const TongModel m;
    EXPECT_EQ(tong_exact_error(m, 0.0), 0.0);
    // Small-angle form agrees to a few 1e-8 on t <= 40.
    double worst = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double t = 0.1 * k;
        worst = std::max(worst, std::abs(tong_exact_error(m, t) - std::abs(std::sin(0.005 * t))));
    }
    EXPECT_LT(worst, 4e-8);
    EXPECT_GT(worst, 1e-9);
}

TEST(Tong, ResonanceReachesOne) {
    TongModel m;
    m.theta = 0.3;
    m.omega = 10.0 * std::cos(0.3);
    const double wb = m.omega_bar();
    EXPECT_NEAR(wb, 10.0 * std::sin(0.3), 1e-12);
    EXPECT_NEAR(tong_exact_error(m, std::numbers::pi / wb), 1.0, 1e-12);

    TongModel flat;
    flat.theta = 0.0;
    flat.omega = 10.0;
    EXPECT_EQ(flat.omega_bar(), 0.0);
    EXPECT_TRUE(std::isfinite(tong_exact_unitary(flat, 5.0).norm()));
    EXPECT_EQ(tong_exact_error(flat, 5.0), 0.0);
}

TEST(Tong, ExactErrorIsLeakageOfUnitary) {
    TongModel m;
    m.theta = 0.3;
    const Projector P = ground_projector(tong_drift(m).at(0.0));
    for (double t : {0.5, 3.0, 11.0}) {
        const double lk = adiabatic_error_operator_norm(tong_exact_unitary(m, t), P, Projector(P.complement()));
        EXPECT_NEAR(lk, tong_exact_error(m, t), 1e-12);
    }
}

TEST(Tong, BoundInputs) {
    const NoiseBoundInputs in = tong_bound_inputs(TongModel{});
    EXPECT_NEAR(in.derivatives.d1, 0.04999999166666708, 1e-16);
    EXPECT_NEAR(in.derivatives.d2, 0.4999999166666708, 1e-15);
    EXPECT_EQ(in.derivatives.c1, 0.0);
    EXPECT_EQ(in.gamma_bar, 10.0);

    TongModel zero;
    zero.theta = 0.0;
    EXPECT_EQ(tong_bound_inputs(zero).bound(5.0).value, 0.0);
    TongModel bad;
    bad.omega0 = 0.0;
    EXPECT_THROW(tong_bound_inputs(bad), Error);
}

TEST(Tong, FrameHasNoBerryConnection) {
    const TongModel m;
    const TongFrame f(m);
    const double h = 1e-6;
    for (double t : {0.0, 0.7, 4.0}) {
        const auto b = f.basis(t);
        const auto bp = f.basis(t + h);
        const auto bm = f.basis(t - h);
        for (int n = 0; n < 2; ++n) {
            const Vector d = (bp[n] - bm[n]) / (2 * h);
            EXPECT_LT(std::abs(b[n].dot(d)), 1e-8);
        }
        const Vector d0 = (bp[0] - bm[0]) / (2 * h);
        EXPECT_LT(std::abs(b[1].dot(d0) - f(t).coupling), 1e-8);
        const Matrix H = tong_matrix(m, t);
        EXPECT_LT((H * b[0] + 5.0 * b[0]).norm(), 1e-12);
    }
}

TEST(Flux, DriftAndGap) {
    const FluxQubitModel m;
    EXPECT_NEAR(2.0 * m.t1, 2513.274122871834, 1e-9);
    const Matrix H0 = flux_drift(m).value(0.0);
    EXPECT_LT(operator_two_norm(H0 + m.t1 * pauli_x()), 1e-12);
    const FluxCoefficients c = flux_coefficients(m, 0.0, 0.01);
    EXPECT_DOUBLE_EQ(c.a, -m.t1);
    EXPECT_EQ(c.b, 0.0);
    EXPECT_NEAR(c.theta, -std::numbers::pi / 2, 1e-15);
    EXPECT_NEAR(c.theta_dot, m.r1 * m.epsilon / (0.01 * m.t1), 1e-6);
}

TEST(Flux, ThetaDotMatchesNumericalDerivative) {
    FluxQubitModel m;
    attach_noise(m, FluxNoiseSpec{});
    const double tau = 0.01, h = 1e-9;
    for (double t : {0.001, 0.005, 0.009}) {
        const double fd = (flux_coefficients(m, t + h, tau).theta - flux_coefficients(m, t - h, tau).theta) / (2 * h);
        EXPECT_NEAR(flux_coefficients(m, t, tau).theta_dot, fd, 1e-5 * std::abs(fd));
    }
}

TEST(Flux, NoiseChannelsFromOneStream) {
    FluxQubitModel m;
    FluxNoiseSpec spec;
    spec.terms = 10;
    spec.seed = 5;
    attach_noise(m, spec);
    const auto all = seeded_phases(5, 20);
    EXPECT_EQ(m.noise1->phases(), std::vector<double>(all.begin(), all.begin() + 10));
    EXPECT_EQ(m.noise2->phases(), std::vector<double>(all.begin() + 10, all.end()));
}

TEST(Flux, BoundInputsFromReferenceAmplitudes) {
    const FluxQubitModel m;
    const NoiseBoundInputs in = flux_bound_inputs(m, {0.0, 9.11e-6, 0.1667});
    EXPECT_NEAR(in.derivatives.d1, 84.7149308596409, 1e-9);
    EXPECT_NEAR(in.derivatives.d2, 1550162.3462461184, 1e-6);
    EXPECT_NEAR(in.derivatives.c1, 1206.3715789784806, 1e-9);

    const NoiseBoundInputs z = flux_bound_inputs(m, {});
    EXPECT_EQ(z.derivatives.d1, 0.0);
    EXPECT_NEAR(z.gamma_bar, 2.0 * m.t1, 1e-12);
    EXPECT_EQ(z.overlaps.term(), 0.0);
}

TEST(Flux, CouplingFactorRecoversR2) {
    // d1 / sup|dN/dt| = r1 + sqrt(r2^2 + w^2); invert for r2 in units of E_J.
    const double EJ = kDefaultJosephsonEnergy;
    const double factor = 84.7149 / 9.11e-6;
    const double r2 = std::sqrt(std::pow(factor - 4.8 * EJ, 2) - std::pow(2.4 * EJ, 2)) / EJ;
    EXPECT_NEAR(r2, 1.0, 1e-3);
}

TEST(Flux, NoisyBoundNeedsTaus) {
    FluxQubitModel m;
    attach_noise(m, FluxNoiseSpec{});
    EXPECT_THROW(flux_bound_inputs(m, {1e-9, 1e-5, 0.5}), ValidationError);
    const std::vector<double> taus{0.01, 0.02};
    const NoiseBoundInputs in = flux_bound_inputs(m, {1e-9, 1e-5, 0.5}, taus);
    EXPECT_GT(in.overlaps.delta0, 0.0);
    EXPECT_LT(in.overlaps.delta0, 1e-4);
}

TEST(Flux, InvalidModel) {
    FluxQubitModel m;
    m.t1 = -1.0;
    EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Tabulated, ReproducesLinearData) {
    std::vector<double> a, b;
    for (int k = 0; k <= 10; ++k) {
        a.push_back(1.0);
        b.push_back(-1.0 + 0.2 * k);
    }
    const TabulatedTwoLevel t(a, b);
    for (double s : {0.0, 0.33, 0.5, 1.0}) {
        const ABSample p = t.at(s);
        EXPECT_NEAR(p.a, 1.0, 1e-12);
        EXPECT_NEAR(p.b, -1.0 + 2.0 * s, 1e-12);
        EXPECT_NEAR(p.b_dot, 2.0, 1e-10);
    }
    EXPECT_LE(derivative_consistency(t.schedule()), 1.0);
    EXPECT_THROW(TabulatedTwoLevel({1, 2, 3}, {1, 2, 3}), ValidationError);
    EXPECT_THROW(TabulatedTwoLevel({1, 2, 3, 4}, {1, 2, 3}), DimensionError);
}

TEST(Potential, MinimaAndSymmetry) {
    const FluxPotentialParams p;
    EXPECT_NEAR(flux_potential(p, 0.3, 0.2), flux_potential(p, 0.3 + 2 * std::numbers::pi, 0.2), 1e-12);
    EXPECT_NEAR(flux_potential(p, 0.3, 0.2), flux_potential(p, -0.3, -0.2), 1e-12);
    const auto x = flux_potential_stationary_point(p, 0.1, 0.9);
    EXPECT_NEAR(x[0], 0.0, 1e-12);
    EXPECT_NEAR(x[1], 0.895664793857865, 1e-12);
    const auto g = flux_potential_gradient(p, x[0], x[1]);
    EXPECT_LT(std::hypot(g[0], g[1]), 1e-10);
    const auto y = flux_potential_stationary_point(p, -0.1, -0.9);
    EXPECT_NEAR(y[1], -0.895664793857865, 1e-12);
    EXPECT_NEAR(flux_potential(p, x[0], x[1]), flux_potential(p, y[0], y[1]), 1e-12);
    EXPECT_LT(flux_potential(p, x[0], x[1]), flux_potential(p, 0.0, 0.0));
}
