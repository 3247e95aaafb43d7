#pragma once

// Two-level Schrodinger dynamics.
//
// The main integrator works in a zero-Berry-phase instantaneous eigenbasis
// {phi_0(t), phi_1(t)} with energies -Omega(t), +Omega(t):
//
//     psi(t) = c0 e^{+i Phi} phi_0 + c1 e^{-i Phi} phi_1,   Phi(t) = int_0^t Omega
//     dc0/dt =  c1 e^{-2i Phi} conj(kappa)
//     dc1/dt = -c0 e^{+2i Phi} kappa,                        kappa = <phi_1 | d phi_0/dt>
//
// For H = a sigma_x + b sigma_z with real eigenvectors, Omega = sqrt(a^2 + b^2)
// and kappa = -theta_dot / 2 with theta_dot = (a' b - a b') / (a^2 + b^2).
// |c1| is then the norm of the adiabatic error operator.
//
// evolve_direct is an independent small-step propagator used as an oracle.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <iomanip>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "adiabound/errors.hpp"
#include "adiabound/schedule.hpp"
#include "adiabound/spectral.hpp"

namespace adiabound {

struct IntegratorConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double max_step = 0.0;      // us; <= 0 means tau / 20
    double initial_step = 0.0;  // us; <= 0 means automatic
    long max_steps = 20'000'000;
    double phase_tol = 1e-12;   // relative tolerance of the phase quadrature

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(phase_tol > 0.0)) {
            throw ValidationError("IntegratorConfig: tolerances must be positive");
        }
        if (max_steps <= 0) throw ValidationError("IntegratorConfig: max_steps must be positive");
    }
};

/// Half gap Omega(t) and non-adiabatic coupling kappa(t) = <phi_1|d phi_0/dt>.
struct FramePoint {
    double half_gap = 0.0;
    Complex coupling{0.0, 0.0};
};

using FrameProvider = std::function<FramePoint(double)>;

/// a, b and their t-derivatives for H(t) = a sigma_x + b sigma_z.
struct ABSample {
    double a = 0.0;
    double b = 0.0;
    double a_dot = 0.0;
    double b_dot = 0.0;
};

using ABProvider = std::function<ABSample(double)>;

inline double theta_dot(const ABSample& p) {
    const double r2 = p.a * p.a + p.b * p.b;
    if (r2 == 0.0) throw DegenerateSpectrumError("theta_dot: a = b = 0");
    return (p.a_dot * p.b - p.a * p.b_dot) / r2;
}

inline FrameProvider ab_frame(ABProvider ab) {
    return [ab = std::move(ab)](double t) {
        const ABSample p = ab(t);
        return FramePoint{std::hypot(p.a, p.b), Complex(-0.5 * theta_dot(p), 0.0)};
    };
}

struct TrajectorySample {
    double t = 0.0;
    Complex c0;
    Complex c1;
    double phase = 0.0;
};

struct Trajectory {
    std::vector<TrajectorySample> samples;
    double final_error = 0.0;
    long accepted_steps = 0;
    long rejected_steps = 0;
    long frame_evaluations = 0;
    double max_norm_drift = 0.0;

    const TrajectorySample& back() const { return samples.back(); }
};

/// Writes t, re(c0), im(c0), re(c1), im(c1), |c1| with 17 significant digits.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    const auto old_flags = os.flags();
    const auto old_prec = os.precision();
    os << "t,re_c0,im_c0,re_c1,im_c1,abs_c1\n";
    os << std::setprecision(17);
    for (const auto& p : tr.samples) {
        os << p.t << ',' << p.c0.real() << ',' << p.c0.imag() << ',' << p.c1.real() << ','
           << p.c1.imag() << ',' << std::abs(p.c1) << '\n';
    }
    os.flags(old_flags);
    os.precision(old_prec);
}

/// Monotone table of (t_k, Phi(t_k)) at accepted steps; Phi between
/// checkpoints comes from adaptive Gauss-Kronrod on Omega.
class PhaseCache {
public:
    PhaseCache(const FrameProvider& frame, double tol, long* counter)
        : frame_(&frame), tol_(tol), counter_(counter) {
        t_.push_back(0.0);
        phi_.push_back(0.0);
    }

    double last_time() const noexcept { return t_.back(); }
    double last_phase() const noexcept { return phi_.back(); }
    std::span<const double> times() const noexcept { return t_; }
    std::span<const double> phases() const noexcept { return phi_; }

    /// Phi(t) for t >= last checkpoint.
    double phase_at(double t) const {
        const double t0 = t_.back();
        if (t < t0) throw ValidationError("PhaseCache: query before the last checkpoint");
        if (t == t0) return phi_.back();
        auto omega = [this](double x) {
            ++*counter_;
            return (*frame_)(x).half_gap;
        };
        // The quadrature compares an unscaled error estimate (never below ~2 eps)
        // with tol times the scaled integral, so short intervals need a looser tol.
        const double half = 0.5 * (t - t0);
        const double tol = std::max(tol_, 8.0 * std::numeric_limits<double>::epsilon() / half);
        double err = 0.0;
        const double inc =
            boost::math::quadrature::gauss_kronrod<double, 15>::integrate(omega, t0, t, 12, tol, &err);
        return phi_.back() + inc;
    }

    void commit(double t, double phi) {
        if (!(t > t_.back())) throw ValidationError("PhaseCache: checkpoints must increase");
        t_.push_back(t);
        phi_.push_back(phi);
    }

private:
    const FrameProvider* frame_;
    double tol_;
    long* counter_;
    std::vector<double> t_;
    std::vector<double> phi_;
};

namespace detail {

using State2 = std::array<Complex, 2>;

inline State2 frame_rhs(const FramePoint& fp, double phi, const State2& c) {
    const Complex rot = std::polar(1.0, 2.0 * phi);
    return {c[1] * std::conj(rot) * std::conj(fp.coupling), -c[0] * rot * fp.coupling};
}

// Dormand-Prince 5(4) tableau.
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                        a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                        a64 = 49.0 / 176, a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                        b6 = 11.0 / 84;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace detail

/// Integrates the frame amplitudes on [0, tau] from (c0, c1) at t = 0.
/// Steps land exactly on every requested sample time; t = tau is always sampled.
inline Trajectory evolve_frame(const FrameProvider& frame, double tau, const IntegratorConfig& cfg,
                               Complex c0_init = 1.0, Complex c1_init = 0.0,
                               std::vector<double> sample_times = {}) {
    using detail::State2;
    cfg.validate();
    if (!(tau > 0.0) || !std::isfinite(tau)) throw ValidationError("evolve_frame: tau must be positive");
    const double n0 = std::norm(c0_init) + std::norm(c1_init);
    if (std::abs(n0 - 1.0) > 1e-12) throw ValidationError("evolve_frame: initial state not normalized");

    std::sort(sample_times.begin(), sample_times.end());
    sample_times.erase(std::remove_if(sample_times.begin(), sample_times.end(),
                                      [tau](double t) { return t < 0.0 || t > tau; }),
                       sample_times.end());
    sample_times.erase(std::unique(sample_times.begin(), sample_times.end()), sample_times.end());
    if (sample_times.empty() || sample_times.back() != tau) sample_times.push_back(tau);

    Trajectory out;
    PhaseCache cache(frame, cfg.phase_tol, &out.frame_evaluations);
    auto eval = [&](double t) {
        ++out.frame_evaluations;
        return frame(t);
    };

    State2 y{c0_init, c1_init};
    double t = 0.0;
    std::size_t next_sample = 0;
    if (sample_times.front() == 0.0) {
        out.samples.push_back({0.0, y[0], y[1], 0.0});
        ++next_sample;
    }

    const double max_step = cfg.max_step > 0.0 ? cfg.max_step : tau / 20.0;
    State2 k1 = detail::frame_rhs(eval(0.0), 0.0, y);
    double h = cfg.initial_step;
    if (!(h > 0.0)) {
        const FramePoint fp0 = eval(0.0);
        const double scale = std::max(std::abs(fp0.coupling), fp0.half_gap);
        h = scale > 0.0 ? 0.01 / scale : max_step;
    }
    h = std::min(h, max_step);

    constexpr double safety = 0.9, beta = 0.04, alpha = 0.2 - 0.75 * beta;
    double err_prev = 1e-4;
    bool rejected_last = false;

    while (next_sample < sample_times.size()) {
        const double target = sample_times[next_sample];
        bool hits_target = false;
        double step = h;
        if (t + step >= target * (1.0 - 1e-15) || target - (t + step) < 1e-12 * h) {
            step = target - t;
            hits_target = true;
        }
        if (!(step > 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) &&
            !hits_target) {
            throw IntegrationError("evolve_frame: step size underflow", t, step, out.accepted_steps);
        }
        if (out.accepted_steps + out.rejected_steps > cfg.max_steps) {
            throw IntegrationError("evolve_frame: step budget exhausted", t, step, out.accepted_steps);
        }

        auto stage = [&](double frac, const State2& ys) {
            const double ts = t + frac * step;
            return detail::frame_rhs(eval(ts), cache.phase_at(ts), ys);
        };
        auto comb = [&](std::initializer_list<std::pair<double, const State2*>> terms) {
            State2 r = y;
            for (const auto& [coef, k] : terms) {
                r[0] += step * coef * (*k)[0];
                r[1] += step * coef * (*k)[1];
            }
            return r;
        };
        using namespace detail;
        const State2 k2 = stage(c2, comb({{a21, &k1}}));
        const State2 k3 = stage(c3, comb({{a31, &k1}, {a32, &k2}}));
        const State2 k4 = stage(c4, comb({{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State2 k5 = stage(c5, comb({{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const double t_new = hits_target ? target : t + step;
        const double phi_new = cache.phase_at(t_new);
        const FramePoint fp_new = eval(t_new);
        const State2 k6 = frame_rhs(fp_new, phi_new,
                                    comb({{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4}, {a65, &k5}}));
        const State2 y_new = comb({{b1, &k1}, {b3, &k3}, {b4, &k4}, {b5, &k5}, {b6, &k6}});
        const State2 k7 = frame_rhs(fp_new, phi_new, y_new);

        double err = 0.0;
        for (int i = 0; i < 2; ++i) {
            const Complex e = step * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                                      e7 * k7[i]);
            const double sc = cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err = std::max(err, std::abs(e) / sc);
        }
        if (!std::isfinite(err)) {
            throw IntegrationError("evolve_frame: non-finite local error", t, step, out.accepted_steps);
        }

        if (err <= 1.0) {
            t = t_new;
            y = y_new;
            k1 = k7;
            cache.commit(t, phi_new);
            ++out.accepted_steps;
            out.max_norm_drift =
                std::max(out.max_norm_drift, std::abs(std::norm(y[0]) + std::norm(y[1]) - 1.0));
            if (hits_target) {
                out.samples.push_back({t, y[0], y[1], phi_new});
                ++next_sample;
            }
            double fac = err > 0.0 ? safety * std::pow(err, -alpha) * std::pow(err_prev, beta) : 5.0;
            fac = std::clamp(fac, 0.2, 5.0);
            if (rejected_last) fac = std::min(fac, 1.0);
            // A step shortened to hit a sample time says nothing about the next one.
            const double base = hits_target ? std::max(h, step) : step;
            h = std::min(base * fac, max_step);
            err_prev = std::max(err, 1e-4);
            rejected_last = false;
        } else {
            ++out.rejected_steps;
            h = step * std::max(0.2, safety * std::pow(err, -0.2));
            rejected_last = true;
            if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(t))) {
                throw IntegrationError("evolve_frame: step size underflow", t, h, out.accepted_steps);
            }
        }
    }
    out.final_error = std::abs(out.samples.back().c1);
    return out;
}

/// Two-level schedule H(t) = a sigma_x + b sigma_z started in its ground state.
inline Trajectory evolve_rotating_frame(const ABProvider& ab, double tau, const IntegratorConfig& cfg,
                                        std::vector<double> sample_times = {}) {
    return evolve_frame(ab_frame(ab), tau, cfg, 1.0, 0.0, std::move(sample_times));
}

/// psi = c0 e^{i Phi} phi_0 + c1 e^{-i Phi} phi_1.
inline Vector lab_state(const TrajectorySample& p, const Vector& phi0, const Vector& phi1) {
    return p.c0 * std::polar(1.0, p.phase) * phi0 + p.c1 * std::polar(1.0, -p.phase) * phi1;
}

/// Real eigenvectors of a sigma_x + b sigma_z with theta on the branch nearest
/// `theta_ref`, so the basis is continuous along a trajectory.
inline std::array<Vector, 2> ab_basis(double a, double b, double theta_ref) {
    double th = two_level_angles(a, b).theta;
    th += 2.0 * std::numbers::pi * std::round((theta_ref - th) / (2.0 * std::numbers::pi));
    TwoLevelEigen e{0.0, 0.0, th};
    return {e.ground(), e.excited()};
}

namespace detail {

/// exp(-i dt H) for Hermitian H.
inline Matrix hermitian_exp(const Matrix& H, double dt) {
    if (H.rows() == 2) {
        // H = h0 I + hx sx + hy sy + hz sz
        const double h0 = 0.5 * (H(0, 0).real() + H(1, 1).real());
        const double hz = 0.5 * (H(0, 0).real() - H(1, 1).real());
        const double hx = H(1, 0).real();
        const double hy = H(1, 0).imag();
        const double r = std::sqrt(hx * hx + hy * hy + hz * hz);
        const double x = r * dt;
        const double c = std::cos(x);
        const double sr = x == 0.0 ? dt : std::sin(x) / r;
        const Complex g = std::polar(1.0, -h0 * dt);
        const Complex I(0.0, 1.0);
        Matrix U(2, 2);
        U(0, 0) = g * (c - I * sr * hz);
        U(1, 1) = g * (c + I * sr * hz);
        U(0, 1) = g * (-I * sr * Complex(hx, -hy));
        U(1, 0) = g * (-I * sr * Complex(hx, hy));
        return U;
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(H);
    Vector ph(H.rows());
    for (Eigen::Index k = 0; k < H.rows(); ++k) ph(k) = std::polar(1.0, -es.eigenvalues()(k) * dt);
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace detail

/// Product of midpoint exponentials exp(-i tau/steps H(s_k + 1/(2 steps))).
/// Requires ||H|| tau / steps <= 0.01 at every midpoint.
inline Matrix evolve_direct(const HamiltonianSchedule& sch, double tau, long steps) {
    if (!(tau > 0.0)) throw ValidationError("evolve_direct: tau must be positive");
    if (steps < 1) throw ValidationError("evolve_direct: need at least one step");
    const double dt = tau / static_cast<double>(steps);
    Matrix U = identity(sch.dim);
    for (long k = 0; k < steps; ++k) {
        const double s = (static_cast<double>(k) + 0.5) / static_cast<double>(steps);
        const Matrix H = sch.value(s);
        const double hn = operator_two_norm(H);
        if (hn * dt > 0.01) {
            throw StepCriterionError("evolve_direct: ||H|| tau/steps = " + std::to_string(hn * dt) +
                                     " > 0.01 at s=" + std::to_string(s));
        }
        U = detail::hermitian_exp(H, dt) * U;
    }
    return U;
}

/// Smallest step count meeting the direct-propagation criterion, from the
/// largest norm on a 1001-point grid, times `margin`.
inline long direct_steps(const HamiltonianSchedule& sch, double tau, double margin = 4.0) {
    double hmax = 0.0;
    for (double s : uniform_grid(1001)) hmax = std::max(hmax, operator_two_norm(sch.value(s)));
    return std::max(1L, static_cast<long>(std::ceil(margin * hmax * tau / 0.01)));
}

/// ||Q_final U P_0||.
inline double adiabatic_error_operator_norm(const Matrix& U, const Projector& P0, const Projector& Q_final) {
    if (U.rows() != P0.dim() || U.rows() != Q_final.dim() || U.rows() != U.cols()) {
        throw DimensionError("adiabatic_error_operator_norm: dimension mismatch");
    }
    return operator_two_norm(Q_final.matrix() * U * P0.matrix());
}

/// ||Q(1) U P(0)|| with U the direct propagator of `evolved` and P, Q the
/// ground projector and its complement for `reference`.
inline double direct_adiabatic_error(const HamiltonianSchedule& evolved,
                                     const HamiltonianSchedule& reference, double tau, long steps) {
    const Matrix U = evolve_direct(evolved, tau, steps);
    const Projector P0 = ground_projector(reference.at(0.0));
    const Projector P1 = ground_projector(reference.at(1.0));
    return adiabatic_error_operator_norm(U, P0, Projector(P1.complement()));
}

inline double direct_adiabatic_error(const HamiltonianSchedule& sch, double tau, long steps) {
    return direct_adiabatic_error(sch, sch, tau, steps);
}

/// H_A(s) = H(s) + (i/tau)[dP/ds, P] for the ground projector P of H.
inline HamiltonianSchedule counter_adiabatic_schedule(const HamiltonianSchedule& drift, double tau) {
    if (!(tau > 0.0)) throw ValidationError("counter_adiabatic_schedule: tau must be positive");
    HamiltonianSchedule out;
    out.dim = drift.dim;
    out.fd_step = drift.fd_step;
    out.value = [drift, tau](double s) -> Matrix {
        const Matrix H = drift.value(s);
        const Matrix P = ground_projector(HermitianOperator(H)).matrix();
        const Matrix dP = projector_derivative(drift, s, 0, 0);
        const Matrix term = Complex(0.0, 1.0 / tau) * (dP * P - P * dP);
        const double asym = (term - term.adjoint()).cwiseAbs().maxCoeff();
        if (asym > 1e-9 * std::max(1.0, term.cwiseAbs().maxCoeff())) {
            throw ValidationError("counter_adiabatic_schedule: correction is not Hermitian");
        }
        const Matrix sym = 0.5 * (term + term.adjoint());
        return H + sym;
    };
    return out;
}

enum class NoiseAxis { z, x };

/// Evolves (M(s) sigma_z + noise(s tau) sigma_axis) directly from the ground state
/// of M(0) sigma_z and returns the leakage out of the ground state of M(1) sigma_z.
inline double commuting_noise_check(const std::function<double(double)>& field,
                                    const std::function<double(double)>& noise, double tau,
                                    NoiseAxis axis = NoiseAxis::z, long steps = 0) {
    const Matrix sz = pauli_z();
    const Matrix sn = axis == NoiseAxis::z ? pauli_z() : pauli_x();
    HamiltonianSchedule sch;
    sch.dim = 2;
    sch.value = [=](double s) -> Matrix { return field(s) * sz + noise(s * tau) * sn; };
    if (steps <= 0) steps = direct_steps(sch, tau);
    const Matrix U = evolve_direct(sch, tau, steps);
    // Ground state of M sigma_z, taking |1> when M = 0.
    auto ground = [](double m) {
        Matrix p = Matrix::Zero(2, 2);
        if (m >= 0.0) p(1, 1) = 1.0; else p(0, 0) = 1.0;
        return Projector(p);
    };
    const Projector P0 = ground(field(0.0));
    const Projector P1 = ground(field(1.0));
    return adiabatic_error_operator_norm(U, P0, Projector(P1.complement()));
}

}  // namespace adiabound
