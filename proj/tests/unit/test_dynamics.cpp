#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "adiabound/dynamics.hpp"
#include "adiabound/models.hpp"

using namespace adiabound;

TEST(RotatingFrame, FrozenForStaticHamiltonian) {
    const ABProvider ab = [](double) { return ABSample{1.0, 0.5, 0.0, 0.0}; };
    const Trajectory tr = evolve_rotating_frame(ab, 3.0, {});
    EXPECT_EQ(tr.final_error, 0.0);
    EXPECT_NEAR(std::abs(tr.back().c0), 1.0, 1e-14);
    EXPECT_NEAR(tr.back().phase, 3.0 * std::hypot(1.0, 0.5), 1e-10);
}

TEST(RotatingFrame, TongMatchesClosedForm) {
    const TongModel m;
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k) times.push_back(5.0 * k);
    const TongSimulation sim = tong_simulate(m, 50.0, times);
    ASSERT_EQ(sim.times.size(), times.size());
    for (std::size_t k = 0; k < times.size(); ++k) {
        EXPECT_EQ(sim.times[k], times[k]);
        EXPECT_NEAR(sim.errors[k], tong_exact_error(m, times[k]), 1e-6);
    }
    EXPECT_LT(sim.trajectory.max_norm_drift, 1e-8);
}

TEST(RotatingFrame, FluxNoiselessMatchesReference) {
    const FluxQubitModel m;
    const Trajectory tr = flux_simulate(m, 0.01);
    EXPECT_NEAR(tr.final_error, 0.02613001651348931, 1e-8);
    EXPECT_LT(tr.max_norm_drift, 1e-8);
    EXPECT_LE(tr.final_error, flux_bound_inputs(m, {}).bound(0.01).value);
}

TEST(RotatingFrame, AgreesWithDirectPropagator) {
    const FluxQubitModel m;
    const double tau = 0.002;
    const HamiltonianSchedule drift = flux_drift(m);
    const double direct = direct_adiabatic_error(drift, tau, direct_steps(drift, tau, 8.0));
    EXPECT_NEAR(flux_simulate(m, tau).final_error, direct, 1e-7);
}

TEST(RotatingFrame, LabStateIsEvolvedGroundState) {
    // Static Hamiltonian: lab state is e^{i r t} times the ground state.
    const ABProvider ab = [](double) { return ABSample{0.3, -0.4, 0.0, 0.0}; };
    const Trajectory tr = evolve_rotating_frame(ab, 2.0, {});
    const auto b = ab_basis(0.3, -0.4, 0.0);
    const Vector psi = lab_state(tr.back(), b[0], b[1]);
    EXPECT_LT((psi - std::polar(1.0, 0.5 * 2.0) * b[0]).norm(), 1e-9);
}

TEST(RotatingFrame, BasisBranchIsContinuous) {
    const auto a = ab_basis(-1e-3, -1.0, std::numbers::pi);
    const auto b = ab_basis(1e-3, -1.0, std::numbers::pi);
    EXPECT_LT((a[0] - b[0]).norm(), 1e-2);
}

TEST(RotatingFrame, StepBudgetExhausted) {
    IntegratorConfig cfg;
    cfg.max_steps = 10;
    EXPECT_THROW(flux_simulate(FluxQubitModel{}, 0.05, cfg), IntegrationError);
    cfg.rel_tol = -1.0;
    EXPECT_THROW(cfg.validate(), ValidationError);
}

TEST(RotatingFrame, DegenerateSchedule) {
    const ABProvider ab = [](double) { return ABSample{0.0, 0.0, 0.0, 0.0}; };
    EXPECT_THROW(evolve_rotating_frame(ab, 1.0, {}), DegenerateSpectrumError);
}

TEST(RotatingFrame, TrajectoryCsv) {
    const ABProvider ab = [](double) { return ABSample{1.0, 0.0, 0.0, 0.0}; };
    const Trajectory tr = evolve_rotating_frame(ab, 1.0, {}, {0.0, 0.5, 1.0});
    std::ostringstream os;
    write_trajectory_csv(os, tr);
    const std::string s = os.str();
    EXPECT_EQ(s.substr(0, s.find('\n')), "t,re_c0,im_c0,re_c1,im_c1,abs_c1");
    EXPECT_EQ(std::count(s.begin(), s.end(), '\n'), 4);
}

TEST(Direct, ClosedFormCases) {
    HamiltonianSchedule zero;
    zero.value = [](double) -> Matrix { return Matrix::Zero(2, 2); };
    EXPECT_LT(operator_two_norm(evolve_direct(zero, 1.0, 10) - identity(2)), 1e-15);

    HamiltonianSchedule z;
    z.value = [](double) -> Matrix { return pauli_z(); };
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = std::polar(1.0, -1.0);
    expect(1, 1) = std::polar(1.0, 1.0);
    EXPECT_LT(operator_two_norm(evolve_direct(z, 1.0, 100) - expect), 1e-12);
    EXPECT_THROW(evolve_direct(z, 1.0, 10), StepCriterionError);
}

TEST(Direct, TongAgainstExactUnitary) {
    const TongModel m;
    const Matrix U = evolve_direct(tong_schedule(m, 5.0), 5.0, 20000);
    EXPECT_LT(operator_two_norm(U - tong_exact_unitary(m, 5.0)), 1e-8);
    EXPECT_LT(operator_two_norm(U.adjoint() * U - identity(2)), 1e-10);
}

TEST(Direct, ErrorOperatorNorm) {
    Matrix p = Matrix::Zero(2, 2);
    p(0, 0) = 1.0;
    const Projector P(p);
    EXPECT_EQ(adiabatic_error_operator_norm(identity(2), P, Projector(P.complement())), 0.0);
    EXPECT_NEAR(adiabatic_error_operator_norm(pauli_x(), P, Projector(P.complement())), 1.0, 1e-15);
    EXPECT_THROW(adiabatic_error_operator_norm(identity(3), P, P), DimensionError);
}

TEST(CounterAdiabatic, StaticDriftUnchanged) {
    HamiltonianSchedule h;
    h.value = [](double) -> Matrix { return pauli_x(); };
    h.first = [](double) -> Matrix { return Matrix::Zero(2, 2); };
    const HamiltonianSchedule ca = counter_adiabatic_schedule(h, 0.1);
    EXPECT_LT(operator_two_norm(ca.value(0.4) - pauli_x()), 1e-15);
}

TEST(CounterAdiabatic, FluxFollowsGroundState) {
    const HamiltonianSchedule drift = flux_drift(FluxQubitModel{});
    const double tau = 0.001;
    const HamiltonianSchedule ca = counter_adiabatic_schedule(drift, tau);
    EXPECT_LE(direct_adiabatic_error(ca, drift, tau, direct_steps(ca, tau, 40.0)), 1e-6);
    const double plain = direct_adiabatic_error(drift, tau, direct_steps(drift, tau, 40.0));
    EXPECT_GT(plain, 1e-2);

    const Matrix c1 = counter_adiabatic_schedule(drift, 0.001).value(0.3) - drift.value(0.3);
    const Matrix c2 = counter_adiabatic_schedule(drift, 0.002).value(0.3) - drift.value(0.3);
    EXPECT_NEAR(operator_two_norm(c1) / operator_two_norm(c2), 2.0, 1e-12);
    EXPECT_LT((c1 - c1.adjoint()).norm(), 1e-12);
}

TEST(CommutingNoise, NoLeakageAlongField) {
    auto field = [](double s) { return 1.0 + 0.5 * s; };
    auto noise = [](double t) { return 0.3 * std::cos(7.0 * t); };
    EXPECT_LE(commuting_noise_check(field, noise, 5.0, NoiseAxis::z), 1e-10);
    EXPECT_GT(commuting_noise_check(field, noise, 5.0, NoiseAxis::x), 1e-4);
    auto none = [](double) { return 0.0; };
    EXPECT_EQ(commuting_noise_check(field, none, 5.0, NoiseAxis::x), 0.0);
}
