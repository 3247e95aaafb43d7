#pragma once

// Self-check suite: structural properties the library must satisfy, each
// reported with its measured value and threshold.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adiabound/bounds.hpp"
#include "adiabound/dynamics.hpp"
#include "adiabound/models.hpp"
#include "adiabound/schedule.hpp"
#include "adiabound/spectral.hpp"

namespace adiabound {

struct PropertyResult {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
    std::string relation;  // "<=" or ">"
};

/// H(s) = sum_k p_k(s) sigma_k + p_0(s) I with random quadratic p_k, kept only
/// if the gap stays >= min_gap on a 201-point grid.
struct RandomTwoLevel {
    std::array<std::array<double, 3>, 4> coeff{};  // [I, x, y, z][c0, c1, c2]

    Matrix operator_at(int order, double s) const {
        auto p = [&](int k) {
            const auto& c = coeff[static_cast<std::size_t>(k)];
            if (order == 0) return c[0] + c[1] * s + c[2] * s * s;
            if (order == 1) return c[1] + 2.0 * c[2] * s;
            return 2.0 * c[2];
        };
        return p(0) * identity(2) + p(1) * pauli_x() + p(2) * pauli_y() + p(3) * pauli_z();
    }

    HamiltonianSchedule schedule() const {
        HamiltonianSchedule out;
        out.dim = 2;
        auto self = *this;
        out.value = [self](double s) { return self.operator_at(0, s); };
        out.first = [self](double s) { return self.operator_at(1, s); };
        out.second = [self](double s) { return self.operator_at(2, s); };
        return out;
    }
};

inline RandomTwoLevel random_two_level(std::mt19937_64& rng, double min_gap = 0.2) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (;;) {
        RandomTwoLevel r;
        for (auto& row : r.coeff) {
            for (auto& c : row) c = u(rng);
        }
        bool ok = true;
        for (double s : uniform_grid(201)) {
            const SpectralData sp = eigendecompose(HermitianOperator(r.operator_at(0, s)));
            const double gap = sp.eigenvalues(1) - sp.eigenvalues(0);
            if (gap < min_gap) {
                ok = false;
                break;
            }
        }
        if (ok) return r;
    }
}

/// Random Hermitian matrix with entries uniform in [-scale, scale].
inline Matrix random_hermitian(std::mt19937_64& rng, Eigen::Index dim, double scale) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Matrix m(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        m(i, i) = u(rng);
        for (Eigen::Index j = i + 1; j < dim; ++j) {
            m(i, j) = Complex(u(rng), u(rng));
            m(j, i) = std::conj(m(i, j));
        }
    }
    return m;
}

namespace detail {

inline PropertyResult at_most(std::string name, double measured, double threshold) {
    return {std::move(name), measured <= threshold, measured, threshold, "<="};
}

inline PropertyResult above(std::string name, double measured, double threshold) {
    return {std::move(name), measured > threshold, measured, threshold, ">"};
}

}  // namespace detail

/// Counter-adiabatic evolution of the noiseless flux-qubit drift at tau = 0.001 us.
inline PropertyResult check_intertwining(double tau = 0.001) {
    const HamiltonianSchedule drift = flux_drift(FluxQubitModel{});
    const HamiltonianSchedule ca = counter_adiabatic_schedule(drift, tau);
    const long steps = direct_steps(ca, tau, 40.0);
    return detail::at_most("intertwining (counter-adiabatic flux, tau=0.001 us)",
                           direct_adiabatic_error(ca, drift, tau, steps), 1e-6);
}

inline double default_commuting_field(double s) { return 1.0 + 0.5 * s; }
inline double default_commuting_noise(double t) { return 0.3 * std::cos(7.0 * t) + 0.2 * std::sin(3.0 * t + 0.4); }

inline PropertyResult check_commuting_noise(double tau = 5.0) {
    return detail::at_most("commuting sigma_z noise leaves the error at zero",
                           commuting_noise_check(default_commuting_field, default_commuting_noise, tau,
                                                 NoiseAxis::z),
                           1e-10);
}

inline PropertyResult check_noncommuting_control(double tau = 5.0) {
    return detail::above("sigma_x noise control produces transitions",
                         commuting_noise_check(default_commuting_field, default_commuting_noise, tau,
                                               NoiseAxis::x),
                         1e-4);
}

/// Largest ||dP/ds|| / (2 D b1 / gamma) over random schedules and grid points (D = 1).
inline PropertyResult check_projector_derivative_bound(std::uint64_t seed = 7, int schedules = 50,
                                                       std::size_t points = 101) {
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (int k = 0; k < schedules; ++k) {
        const HamiltonianSchedule sch = random_two_level(rng).schedule();
        for (double s : uniform_grid(points)) {
            const SpectralData spec = eigendecompose(sch.at(s));
            const double gamma = spec.eigenvalues(1) - spec.eigenvalues(0);
            const double b1 = operator_two_norm(sch.derivative(s));
            const double lhs = operator_two_norm(projector_derivative(sch, s));
            const double rhs = 2.0 * contour_ratio(0.0, gamma) * b1 / gamma;
            if (rhs > 0.0) worst = std::max(worst, lhs / rhs);
            else if (lhs > 1e-14) worst = INFINITY;
        }
    }
    return detail::at_most("||dP/ds|| <= 2 D b1 / gamma (ratio, 50 random schedules)", worst, 1.0 + 1e-12);
}

/// Largest violation of exact <= sin-theta <= Bauer-Fike over random perturbations.
inline PropertyResult check_overlap_ordering(std::uint64_t seed = 11, int trials = 50) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> frac(0.01, 0.45);
    double worst = -INFINITY;
    for (int k = 0; k < trials; ++k) {
        const Matrix H = random_two_level(rng).operator_at(0, 0.5);
        const SpectralData s0 = eigendecompose(HermitianOperator(H));
        const double gamma = s0.eigenvalues(1) - s0.eigenvalues(0);
        Matrix D = random_hermitian(rng, 2, 1.0);
        D *= frac(rng) * gamma / operator_two_norm(D);
        const double dn = operator_two_norm(D);
        const SpectralData s1 = eigendecompose(HermitianOperator(H + D));
        const double exact =
            projector_distance(subspace_projector(s1, 0, 0), subspace_projector(s0, 0, 0));
        const double st = sin_theta_delta(dn, s0.eigenvalues(1) - s1.eigenvalues(0));
        const double bf = bauer_fike_delta(dn, gamma);
        worst = std::max({worst, exact - st, st - bf});
    }
    return detail::at_most("delta ordering exact <= sin-theta <= Bauer-Fike (max violation)", worst, 1e-14);
}

/// Rotating-frame Tong simulation against the closed form at tau = 10.
inline PropertyResult check_tong_oracle(double tau = 10.0) {
    const TongModel m;
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k) times.push_back(0.1 * k * tau);
    const TongSimulation sim = tong_simulate(m, tau, times);
    double worst = 0.0;
    for (std::size_t k = 0; k < sim.times.size(); ++k) {
        worst = std::max(worst, std::abs(sim.errors[k] - tong_exact_error(m, sim.times[k])));
    }
    return detail::at_most("Tong rotating frame vs closed form (tau=10)", worst, 1e-6);
}

inline PropertyResult check_tong_direct(double tau = 2.0) {
    const TongModel m;
    const HamiltonianSchedule sch = tong_schedule(m, tau);
    const Matrix U = evolve_direct(sch, tau, 20000);
    return detail::at_most("Tong direct propagator vs closed-form unitary (tau=2)",
                           operator_two_norm(U - tong_exact_unitary(m, tau)), 1e-8);
}

/// Largest exact Tong error minus chi(tau) over tau in [0.01, 20] and s in (0, 1].
inline PropertyResult check_tong_bound_validity() {
    const TongModel m;
    const NoiseBoundInputs in = tong_bound_inputs(m);
    double worst = -INFINITY;
    for (double tau : uniform_grid(200, 0.01, 20.0)) {
        const double chi = in.bound(tau).value;
        for (double s : uniform_grid(51)) worst = std::max(worst, tong_exact_error(m, s * tau) - chi);
    }
    return detail::at_most("Tong exact error <= chi(tau) (max excess)", worst, 0.0);
}

/// Noiseless flux-qubit rotating-frame error against the bound.
inline PropertyResult check_flux_bound_validity() {
    const FluxQubitModel m;
    const NoiseBoundInputs in = flux_bound_inputs(m, {});
    double worst = -INFINITY;
    for (double tau : {0.002, 0.01, 0.05}) {
        worst = std::max(worst, flux_simulate(m, tau).final_error - in.bound(tau).value);
    }
    return detail::at_most("noiseless flux error <= bound (max excess)", worst, 0.0);
}

inline std::vector<PropertyResult> run_property_suite() {
    return {check_intertwining(),          check_commuting_noise(),
            check_noncommuting_control(),  check_projector_derivative_bound(),
            check_overlap_ordering(),      check_tong_oracle(),
            check_tong_direct(),           check_tong_bound_validity(),
            check_flux_bound_validity()};
}

}  // namespace adiabound
