#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "adiabound/models.hpp"
#include "adiabound/schedule.hpp"
#include "adiabound/verify.hpp"

using namespace adiabound;

namespace {

HamiltonianSchedule cosine_schedule(bool analytic) {
    HamiltonianSchedule h;
    h.value = [](double s) -> Matrix { return std::cos(s) * pauli_z(); };
    if (analytic) {
        h.first = [](double s) -> Matrix { return -std::sin(s) * pauli_z(); };
        h.second = [](double s) -> Matrix { return -std::cos(s) * pauli_z(); };
    }
    return h;
}

NoiseProcess cosine_noise(double amp, double nu) {
    const double w = 2.0 * std::numbers::pi * nu;
    NoiseProcess n;
    n.value = [=](double t) -> Matrix { return amp * std::cos(w * t) * pauli_z(); };
    n.first = [=](double t) -> Matrix { return -amp * w * std::sin(w * t) * pauli_z(); };
    n.second = [=](double t) -> Matrix { return -amp * w * w * std::cos(w * t) * pauli_z(); };
    n.longest_period = 1.0 / nu;
    return n;
}

}  // namespace

TEST(Grid, UniformEndpointsExact) {
    const auto g = uniform_grid(7, 0.0, 1.0);
    EXPECT_EQ(g.front(), 0.0);
    EXPECT_EQ(g.back(), 1.0);
    EXPECT_THROW(uniform_grid(1), ValidationError);
}

TEST(DerivativeBounds, ConstantScheduleIsZero) {
    HamiltonianSchedule h;
    h.value = [](double) -> Matrix { return pauli_x(); };
    const DerivativeBounds b = derivative_norm_bounds(h, uniform_grid(101));
    EXPECT_LT(b.b1, 1e-10);
    EXPECT_LT(b.b2, 1e-6);
}

TEST(DerivativeBounds, AnalyticAndFiniteDifference) {
    const auto grid = uniform_grid(1001);
    const DerivativeBounds a = derivative_norm_bounds(cosine_schedule(true), grid);
    EXPECT_NEAR(a.raw_b1, 0.8414709848078965, 1e-15);
    EXPECT_NEAR(a.raw_b2, 1.0, 1e-15);
    EXPECT_NEAR(a.b1, 1.01 * 0.8414709848078965, 1e-15);
    EXPECT_EQ(a.b1_tab.size(), grid.size());

    const DerivativeBounds f = derivative_norm_bounds(cosine_schedule(false), grid);
    EXPECT_NEAR(f.raw_b1, 0.8414709848078965, 1e-9);
    EXPECT_NEAR(f.raw_b2, 1.0, 1e-6);
}

TEST(DerivativeBounds, FluxDrift) {
    const DerivativeBounds b = derivative_norm_bounds(flux_drift(FluxQubitModel{}), uniform_grid(101));
    EXPECT_NEAR(b.raw_b1, 2e-4 * 4.8 * kDefaultJosephsonEnergy, 1e-9);
    EXPECT_EQ(b.raw_b2, 0.0);
}

TEST(DerivativeBounds, GridValidation) {
    EXPECT_THROW(derivative_norm_bounds(cosine_schedule(true), uniform_grid(100)), ValidationError);
    EXPECT_THROW(derivative_norm_bounds(cosine_schedule(true), uniform_grid(101, 0.0, 0.9)), ValidationError);
    HamiltonianSchedule bad;
    bad.value = [](double) -> Matrix { return pauli_z(); };
    bad.first = [](double s) -> Matrix { return (s > 0.5 ? NAN : 0.0) * pauli_z(); };
    EXPECT_THROW(derivative_norm_bounds(bad, uniform_grid(101)), EvaluationError);
}

TEST(DerivativeBounds, RefinementNeverDecreases) {
    std::mt19937_64 rng(21);
    for (int k = 0; k < 5; ++k) {
        const HamiltonianSchedule h = random_two_level(rng).schedule();
        const double coarse = derivative_norm_bounds(h, uniform_grid(101)).raw_b1;
        const double fine = derivative_norm_bounds(h, uniform_grid(1001)).raw_b1;
        EXPECT_GE(fine, coarse);
    }
}

TEST(Consistency, DetectsWrongDerivative) {
    EXPECT_LE(derivative_consistency(cosine_schedule(true)), 1.0);
    EXPECT_LE(derivative_consistency(flux_drift(FluxQubitModel{})), 1.0);
    HamiltonianSchedule wrong = cosine_schedule(true);
    wrong.first = [](double s) -> Matrix { return std::sin(s) * pauli_z(); };
    EXPECT_GT(derivative_consistency(wrong), 1.0);

    const NoiseProcess n = tong_noise(TongModel{});
    const auto times = uniform_grid(11, 0.0, 3.0);
    EXPECT_LE(derivative_consistency(n, times), 1.0);
}

TEST(TwoScale, SingleToneNoise) {
    const double amp = 0.01, nu = 5.0;
    const TwoScaleBounds ts = two_scale_bounds(cosine_schedule(true), cosine_noise(amp, nu), 10.0);
    const double w = 2.0 * std::numbers::pi * nu;
    EXPECT_NEAR(ts.c1, 1.01 * std::sin(1.0), 1e-12);
    EXPECT_GE(ts.d1, amp * w * (1.0 - 1e-4));
    EXPECT_LE(ts.d1, 1.01 * amp * w);
    EXPECT_GE(ts.d2, amp * w * w * (1.0 - 1e-4));
    EXPECT_LE(ts.d2, 1.01 * amp * w * w);
    EXPECT_THROW(two_scale_bounds(cosine_schedule(true), cosine_noise(amp, nu), 1.0), WindowError);
}

TEST(TwoScale, ZeroNoise) {
    const TwoScaleBounds ts = two_scale_bounds(flux_drift(FluxQubitModel{}), NoiseProcess::zero(2), 1.0);
    EXPECT_EQ(ts.d1, 0.0);
    EXPECT_EQ(ts.d2, 0.0);
}

TEST(Combine, ChainRule) {
    const NoiseProcess n = cosine_noise(0.3, 2.0);
    const HamiltonianSchedule c = combine(cosine_schedule(true), n, 0.7);
    HamiltonianSchedule fd = c;
    fd.first = nullptr;
    fd.second = nullptr;
    for (double s : {0.1, 0.5, 0.9}) {
        EXPECT_LT(operator_two_norm(c.derivative(s) - fd.derivative(s)), 1e-8);
        EXPECT_LT(operator_two_norm(c.second_derivative(s) - fd.second_derivative(s)), 1e-5);
    }
    EXPECT_THROW(combine(cosine_schedule(true), NoiseProcess::zero(3), 1.0), DimensionError);
}

TEST(GapProfileCombined, TongIsFlat) {
    const TongModel m;
    const GapProfile g = combined_gap_profile(tong_drift(m), tong_noise(m), 7.0, uniform_grid(201));
    for (double gam : g.gamma) EXPECT_NEAR(gam, 10.0, 1e-12);
}

TEST(GapProfileCombined, FluxMinimumAtStart) {
    const FluxQubitModel m;
    const GapProfile g = combined_gap_profile(flux_drift(m), NoiseProcess::zero(2), 1.0, uniform_grid(101));
    EXPECT_NEAR(g.gamma_min, 2.0 * m.t1, 1e-9);
    EXPECT_NEAR(g.gamma.front(), 2.0 * m.t1, 1e-9);
}

TEST(GapProfileCombined, WithinNoiseNormOfDrift) {
    const HamiltonianSchedule drift = flux_drift(FluxQubitModel{});
    NoiseProcess n = cosine_noise(30.0, 1.0);
    n.value = [](double t) -> Matrix { return 30.0 * std::cos(t) * pauli_x(); };
    const auto grid = uniform_grid(101);
    const GapProfile a = combined_gap_profile(drift, NoiseProcess::zero(2), 1.0, grid);
    const GapProfile b = combined_gap_profile(drift, n, 1.0, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_LE(std::abs(a.gamma[k] - b.gamma[k]), 2.0 * 30.0 + 1e-9);
}

TEST(EndpointOverlaps, ZeroAndTong) {
    const FluxQubitModel f;
    const EndpointOverlaps z = endpoint_overlaps(flux_drift(f), NoiseProcess::zero(2), 0.01);
    EXPECT_EQ(z.delta0, 0.0);
    EXPECT_EQ(z.delta1, 0.0);
    const TongModel m;
    const EndpointOverlaps t = endpoint_overlaps(tong_drift(m), tong_noise(m), 3.0);
    EXPECT_NEAR(t.delta0, 0.0004999999791666669, 1e-15);
    EXPECT_NEAR(t.delta1, 0.0004999999791666669, 1e-15);
    EXPECT_EQ(t.source, OverlapSource::exact_projector);
}

TEST(GroundProjector, DegenerateRejected) {
    EXPECT_THROW(ground_projector(HermitianOperator(identity(2))), DegenerateSpectrumError);
}

TEST(ProjectorDerivative, MatchesFiniteDifference) {
    std::mt19937_64 rng(4);
    const HamiltonianSchedule h = random_two_level(rng).schedule();
    const double d = 1e-6;
    for (double s : {0.2, 0.5, 0.8}) {
        const Matrix fd = (ground_projector(h.at(s + d)).matrix() - ground_projector(h.at(s - d)).matrix()) / (2 * d);
        EXPECT_LT(operator_two_norm(projector_derivative(h, s) - fd), 1e-7);
    }
    EXPECT_THROW(projector_derivative(h, 0.5, 0, 2), IndexError);
}
