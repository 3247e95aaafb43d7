#pragma once

// Concrete two-level systems:
//
//  * Tong model: spin-1/2 in a field of strength omega0 tilted by theta and
//    rotating at rate omega about z, with a closed-form propagator.
//  * Flux qubit: -t1 sigma_x + s eps r1 sigma_z driven through its bias,
//    with 1/nu noise on both frustrations.
//
// Energies in MHz, times in us.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include <boost/math/interpolators/cardinal_cubic_b_spline.hpp>

#include "adiabound/bounds.hpp"
#include "adiabound/dynamics.hpp"
#include "adiabound/errors.hpp"
#include "adiabound/noise.hpp"
#include "adiabound/schedule.hpp"
#include "adiabound/spectral.hpp"

namespace adiabound {

/// Everything at_noise_bound needs.
struct NoiseBoundInputs {
    TwoScaleBounds derivatives;
    double gamma_bar = 0.0;
    EndpointOverlaps overlaps;

    BoundResult bound(double tau) const {
        return at_noise_bound(derivatives, gamma_bar, overlaps, tau);
    }
};

// ---------------------------------------------------------------------------
// Tong model
// ---------------------------------------------------------------------------

struct TongModel {
    double theta = 0.001;
    double omega = 10.0;
    double omega0 = -10.0;

    /// omega + omega0 cos th, without cancellation when omega ~ -omega0.
    double detuning() const {
        const double h = std::sin(0.5 * theta);
        return (omega + omega0) - 2.0 * omega0 * h * h;
    }

    /// sqrt(omega0^2 + omega^2 + 2 omega0 omega cos th).
    double omega_bar() const {
        const double h = std::sin(0.5 * theta);
        const double v = (omega + omega0) * (omega + omega0) - 4.0 * omega0 * omega * h * h;
        return std::sqrt(std::max(0.0, v));
    }
};

/// -(omega0/2) [[cos th, e^{-i omega t} sin th], [e^{i omega t} sin th, -cos th]] at t.
inline Matrix tong_matrix(const TongModel& m, double t) {
    const double h = -0.5 * m.omega0;
    const Complex off = h * std::sin(m.theta) * std::polar(1.0, -m.omega * t);
    Matrix H(2, 2);
    H << h * std::cos(m.theta), off, std::conj(off), -h * std::cos(m.theta);
    return H;
}

inline HermitianOperator tong_hamiltonian(const TongModel& m, double s, double tau) {
    return HermitianOperator(tong_matrix(m, s * tau));
}

namespace detail {

inline double sinc(double x) {
    if (std::abs(x) < 1e-4) return 1.0 - x * x / 6.0 + x * x * x * x / 120.0;
    return std::sin(x) / x;
}

}  // namespace detail

/// Closed-form propagator from 0 to t. Written with sin(w t/2)/w = (t/2) sinc(w t/2)
/// so it stays finite as omega_bar -> 0.
inline Matrix tong_exact_unitary(const TongModel& m, double t) {
    const double wb = m.omega_bar();
    const double x = 0.5 * wb * t;
    const double c = std::cos(x);
    const double sw = 0.5 * t * detail::sinc(x);  // sin(x) / omega_bar
    const Complex I(0.0, 1.0);
    const Complex diag = I * m.detuning() * sw;
    const Complex off = I * m.omega0 * std::sin(m.theta) * sw;
    const Complex em = std::polar(1.0, -0.5 * m.omega * t);
    const Complex ep = std::conj(em);
    Matrix U(2, 2);
    U << (c + diag) * em, off * em, off * ep, (c - diag) * ep;
    return U;
}

/// |omega0 sin th / omega_bar * sin(omega_bar t / 2)|: the leakage out of the
/// ground state of the diagonal part of the Hamiltonian.
inline double tong_exact_error(const TongModel& m, double t) {
    const double x = 0.5 * m.omega_bar() * t;
    const double v = std::abs(m.omega0 * std::sin(m.theta) * 0.5 * t * detail::sinc(x));
    return std::min(1.0, v);
}

/// Diagonal, time-independent part -(omega0/2) cos th sigma_z.
inline HamiltonianSchedule tong_drift(const TongModel& m) {
    const Matrix D = -0.5 * m.omega0 * std::cos(m.theta) * pauli_z();
    const Matrix Z = Matrix::Zero(2, 2);
    HamiltonianSchedule out;
    out.dim = 2;
    out.value = [D](double) { return D; };
    out.first = [Z](double) { return Z; };
    out.second = [Z](double) { return Z; };
    return out;
}

/// Rotating off-diagonal part as a function of physical time.
inline NoiseProcess tong_noise(const TongModel& m) {
    const double h = -0.5 * m.omega0 * std::sin(m.theta);
    const double w = m.omega;
    auto make = [h, w](int order) {
        return [h, w, order](double t) -> Matrix {
            // d^k/dt^k e^{-i w t} = (-i w)^k e^{-i w t}
            const Complex f = std::pow(Complex(0.0, -w), order);
            const Complex off = h * f * std::polar(1.0, -w * t);
            Matrix M(2, 2);
            M << 0.0, off, std::conj(off), 0.0;
            return M;
        };
    };
    NoiseProcess out;
    out.dim = 2;
    out.value = make(0);
    out.first = make(1);
    out.second = make(2);
    out.longest_period = w != 0.0 ? kTwoPi / std::abs(w) : 0.0;
    return out;
}

inline HamiltonianSchedule tong_schedule(const TongModel& m, double tau) {
    return combine(tong_drift(m), tong_noise(m), tau);
}

/// Drift/noise split: c1 = c2 = 0, d1 = |omega omega0 sin th|/2,
/// d2 = omega^2 |omega0 sin th|/2, gamma_bar = |omega0|, exact endpoint overlaps.
inline NoiseBoundInputs tong_bound_inputs(const TongModel& m) {
    NoiseBoundInputs in;
    const double amp = std::abs(m.omega0 * std::sin(m.theta));
    in.derivatives.d1 = 0.5 * std::abs(m.omega) * amp;
    in.derivatives.d2 = 0.5 * m.omega * m.omega * amp;
    in.gamma_bar = std::abs(m.omega0);
    if (m.omega0 == 0.0) throw DegenerateSpectrumError("tong_bound_inputs: omega0 = 0");
    // The overlaps do not depend on tau: the noise only rotates the off-diagonal phase.
    in.overlaps = endpoint_overlaps(tong_drift(m), tong_noise(m), 1.0);
    return in;
}

/// Zero-Berry-phase eigenbasis of the Tong Hamiltonian.
///
/// With W(t) = exp(-i omega t sigma_z / 2), H(t) = W H_r W^dag for the static
/// H_r = h (cos th sigma_z + sin th sigma_x), h = -omega0/2. The basis
/// phi_n(t) = e^{i beta_n t} W(t) v_n with beta_n = (omega/2) <v_n|sigma_z|v_n>
/// has <phi_n|d phi_n/dt> = 0.
class TongFrame {
public:
    explicit TongFrame(const TongModel& m) : omega_(m.omega) {
        const double h = -0.5 * m.omega0;
        const TwoLevelEigen e = two_level_angles(h * std::sin(m.theta), h * std::cos(m.theta));
        v0_ = e.ground();
        v1_ = e.excited();
        half_gap_ = std::abs(h);
        const Matrix sz = pauli_z();
        z_ = (v0_.adjoint() * sz * v0_)(0).real();
        x_ = (v1_.adjoint() * sz * v0_)(0).real();
    }

    /// kappa(t) = <phi_1|d phi_0/dt> = -i (omega/2) x e^{i omega z t}.
    FramePoint operator()(double t) const {
        return {half_gap_, Complex(0.0, -0.5 * omega_ * x_) * std::polar(1.0, omega_ * z_ * t)};
    }

    std::array<Vector, 2> basis(double t) const {
        Vector w(2);
        w << std::polar(1.0, -0.5 * omega_ * t), std::polar(1.0, 0.5 * omega_ * t);
        const double beta0 = 0.5 * omega_ * z_;
        const Vector p0 = std::polar(1.0, beta0 * t) * w.cwiseProduct(v0_);
        const Vector p1 = std::polar(1.0, -beta0 * t) * w.cwiseProduct(v1_);
        return {p0, p1};
    }

    double half_gap() const noexcept { return half_gap_; }

private:
    double omega_;
    Vector v0_;
    Vector v1_;
    double half_gap_ = 0.0;
    double z_ = 0.0;
    double x_ = 0.0;
};

/// Rotating-frame simulation started in the ground state of the diagonal part.
/// Returns the leakage out of that state at each sample time t (us).
struct TongSimulation {
    Trajectory trajectory;
    std::vector<double> times;
    std::vector<double> errors;
};

inline TongSimulation tong_simulate(const TongModel& m, double tau, std::vector<double> times,
                                    const IntegratorConfig& cfg = {}) {
    const TongFrame frame(m);
    const SpectralData drift = eigendecompose(HermitianOperator(tong_drift(m).value(0.0)));
    if (drift.eigenvalues(1) - drift.eigenvalues(0) <= 0.0) {
        throw DegenerateSpectrumError("tong_simulate: diagonal part is degenerate");
    }
    const Vector g = drift.eigenvectors.col(0);
    const Vector e = drift.eigenvectors.col(1);
    const auto b0 = frame.basis(0.0);
    const Complex c0 = b0[0].dot(g);
    const Complex c1 = b0[1].dot(g);

    TongSimulation out;
    out.trajectory = evolve_frame(FrameProvider(frame), tau, cfg, c0, c1, std::move(times));
    for (const auto& p : out.trajectory.samples) {
        const auto b = frame.basis(p.t);
        out.times.push_back(p.t);
        out.errors.push_back(std::abs(e.dot(lab_state(p, b[0], b[1]))));
    }
    return out;
}

// ---------------------------------------------------------------------------
// Flux qubit
// ---------------------------------------------------------------------------

/// 200 GHz * h in MHz (hbar = 1).
inline constexpr double kDefaultJosephsonEnergy = 2.0 * std::numbers::pi * 200e3;

struct FluxNoiseSpec {
    double amplitude = 1e-10;
    std::size_t terms = 100;
    double nu_min = 2500.0;
    double nu_max = 3500.0;
    std::uint64_t seed = 1;
};

struct FluxQubitModel {
    double E_J = kDefaultJosephsonEnergy;
    double t1 = 1e-3 * kDefaultJosephsonEnergy;
    double r1 = 4.8 * kDefaultJosephsonEnergy;
    double r2 = 1.0 * kDefaultJosephsonEnergy;
    double w = 2.4 * kDefaultJosephsonEnergy;
    double s2 = 2.4 * kDefaultJosephsonEnergy;
    double epsilon = -2e-4;
    std::optional<OneOverFNoise> noise1;
    std::optional<OneOverFNoise> noise2;

    /// Parameters scaled from E_J with the default ratios and s2 = w.
    static FluxQubitModel with_energy(double E_J) {
        FluxQubitModel m;
        m.E_J = E_J;
        m.t1 = 1e-3 * E_J;
        m.r1 = 4.8 * E_J;
        m.r2 = 1.0 * E_J;
        m.w = 2.4 * E_J;
        m.s2 = m.w;
        return m;
    }

    bool noisy() const noexcept { return noise1.has_value() || noise2.has_value(); }

    void validate() const {
        if (!(t1 > 0.0) || !(r1 > 0.0) || !(w > 0.0)) {
            throw ValidationError("FluxQubitModel: t1, r1 and w must be positive");
        }
        if (!std::isfinite(epsilon) || !std::isfinite(r2) || !std::isfinite(s2)) {
            throw ValidationError("FluxQubitModel: non-finite parameter");
        }
    }
};

/// Both noise channels from one seeded phase stream: the first n phases drive
/// N1 and the next n drive N2.
inline void attach_noise(FluxQubitModel& m, const FluxNoiseSpec& spec) {
    const std::vector<double> phases = seeded_phases(spec.seed, 2 * spec.terms);
    const auto mid = phases.begin() + static_cast<std::ptrdiff_t>(spec.terms);
    m.noise1.emplace(spec.amplitude, spec.nu_min, spec.nu_max, std::vector<double>(phases.begin(), mid));
    m.noise2.emplace(spec.amplitude, spec.nu_min, spec.nu_max, std::vector<double>(mid, phases.end()));
}

inline HamiltonianSchedule flux_drift(const FluxQubitModel& m) {
    const Matrix sx = pauli_x();
    const Matrix sz = pauli_z();
    const double t1 = m.t1, er1 = m.epsilon * m.r1;
    HamiltonianSchedule out;
    out.dim = 2;
    out.value = [=](double s) -> Matrix { return -t1 * sx + s * er1 * sz; };
    out.first = [=](double) -> Matrix { return er1 * sz; };
    out.second = [](double) -> Matrix { return Matrix::Zero(2, 2); };
    return out;
}

namespace detail {

inline NoiseSample flux_channel(const std::optional<OneOverFNoise>& n, double t) {
    return n ? sample_with_derivatives(*n, t) : NoiseSample{};
}

}  // namespace detail

/// N1(t) r1 sigma_z + N2(t) (r2 sigma_z - w sigma_x); zero when no noise is attached.
inline NoiseProcess flux_noise(const FluxQubitModel& m) {
    if (!m.noisy()) return NoiseProcess::zero(2);
    const Matrix sx = pauli_x();
    const Matrix sz = pauli_z();
    const Matrix A = m.r1 * sz;
    const Matrix B = m.r2 * sz - m.w * sx;
    auto n1 = m.noise1;
    auto n2 = m.noise2;
    auto make = [=](int order) {
        return [=](double t) -> Matrix {
            const NoiseSample a = detail::flux_channel(n1, t);
            const NoiseSample b = detail::flux_channel(n2, t);
            const double va = order == 0 ? a.value : order == 1 ? a.first : a.second;
            const double vb = order == 0 ? b.value : order == 1 ? b.first : b.second;
            return va * A + vb * B;
        };
    };
    NoiseProcess out;
    out.dim = 2;
    out.value = make(0);
    out.first = make(1);
    out.second = make(2);
    double nu_min = INFINITY;
    if (n1) nu_min = std::min(nu_min, n1->nu_min());
    if (n2) nu_min = std::min(nu_min, n2->nu_min());
    out.longest_period = 1.0 / nu_min;
    return out;
}

struct FluxCoefficients {
    double a = 0.0;
    double b = 0.0;
    double a_dot = 0.0;
    double b_dot = 0.0;
    double theta = 0.0;
    double theta_dot = 0.0;
};

/// a(t) = -t1 - N2 s2,  b(t) = t r1 eps / tau + N1 r1 + N2 r2, with t-derivatives.
/// theta follows the atan2(a, b) branch used by two_level_angles.
inline FluxCoefficients flux_coefficients(const FluxQubitModel& m, double t, double tau) {
    if (!(tau > 0.0)) throw ValidationError("flux_coefficients: tau must be positive");
    const NoiseSample n1 = detail::flux_channel(m.noise1, t);
    const NoiseSample n2 = detail::flux_channel(m.noise2, t);
    FluxCoefficients c;
    c.a = -m.t1 - n2.value * m.s2;
    c.b = t * m.r1 * m.epsilon / tau + n1.value * m.r1 + n2.value * m.r2;
    c.a_dot = -n2.first * m.s2;
    c.b_dot = m.r1 * m.epsilon / tau + n1.first * m.r1 + n2.first * m.r2;
    c.theta = two_level_angles(c.a, c.b).theta;
    c.theta_dot = theta_dot({c.a, c.b, c.a_dot, c.b_dot});
    return c;
}

inline ABProvider flux_ab(const FluxQubitModel& m, double tau) {
    return [m, tau](double t) {
        const FluxCoefficients c = flux_coefficients(m, t, tau);
        return ABSample{c.a, c.b, c.a_dot, c.b_dot};
    };
}

/// Rotating-frame error |c1(tau)| started in the instantaneous ground state.
inline Trajectory flux_simulate(const FluxQubitModel& m, double tau, const IntegratorConfig& cfg = {},
                                std::vector<double> sample_times = {}) {
    m.validate();
    return evolve_rotating_frame(flux_ab(m, tau), tau, cfg, std::move(sample_times));
}

/// Suprema of |N|, |dN/dt|, |d^2N/dt^2| shared by both noise channels.
struct FluxNoiseAmplitudes {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};

/// Larger of the two channels' calibrated amplitude bounds.
inline FluxNoiseAmplitudes calibrate_flux_noise(const FluxQubitModel& m, double window = -1.0,
                                                std::size_t samples = kDefaultCalibrationSamples) {
    FluxNoiseAmplitudes out;
    for (const auto* n : {&m.noise1, &m.noise2}) {
        if (!n->has_value()) continue;
        const AmplitudeBounds b = amplitude_bounds(**n, window, samples);
        out.value = std::max(out.value, b.value);
        out.first = std::max(out.first, b.first);
        out.second = std::max(out.second, b.second);
    }
    return out;
}

struct FluxBoundOverrides {
    std::optional<double> c1;
    std::optional<EndpointOverlaps> overlaps;
};

/// c1 = |eps| r1, c2 = 0, d_k = sup|N^(k)| (r1 + sqrt(r2^2 + w^2)),
/// gamma_bar = 2 t1 less 2 sup||H_noise||, endpoint overlaps from the exact
/// projectors (delta1 maximized over `taus`) unless overridden.
inline NoiseBoundInputs flux_bound_inputs(const FluxQubitModel& m, const FluxNoiseAmplitudes& amp,
                                          std::span<const double> taus = {},
                                          const FluxBoundOverrides& over = {}) {
    m.validate();
    const double coupling = m.r1 + std::hypot(m.r2, m.w);
    NoiseBoundInputs in;
    in.derivatives.c1 = over.c1.value_or(std::abs(m.epsilon) * m.r1);
    in.derivatives.c2 = 0.0;
    in.derivatives.d1 = amp.first * coupling;
    in.derivatives.d2 = amp.second * coupling;
    in.gamma_bar = 2.0 * m.t1 - 2.0 * amp.value * coupling;
    if (!(in.gamma_bar > 0.0)) throw GapClosureError(0.0, in.gamma_bar);

    if (over.overlaps) {
        in.overlaps = *over.overlaps;
    } else if (m.noisy()) {
        const HamiltonianSchedule drift = flux_drift(m);
        const NoiseProcess noise = flux_noise(m);
        if (taus.empty()) throw ValidationError("flux_bound_inputs: need tau values for the endpoint overlaps");
        for (double tau : taus) {
            const EndpointOverlaps ov = endpoint_overlaps(drift, noise, tau);
            in.overlaps.delta0 = ov.delta0;
            in.overlaps.delta1 = std::max(in.overlaps.delta1, ov.delta1);
        }
        in.overlaps.source = OverlapSource::exact_projector;
    }
    return in;
}

// ---------------------------------------------------------------------------
// Tabulated two-level schedule
// ---------------------------------------------------------------------------

/// H(s) = a(s) sigma_x + b(s) sigma_z from values on a uniform s grid over
/// [0, 1], interpolated by cubic B-splines (twice differentiable).
class TabulatedTwoLevel {
public:
    TabulatedTwoLevel(std::vector<double> a, std::vector<double> b) : a_(std::move(a)), b_(std::move(b)) {
        if (a_.size() != b_.size()) throw DimensionError("TabulatedTwoLevel: a and b differ in length");
        if (a_.size() < 4) throw ValidationError("TabulatedTwoLevel: need at least four table rows");
        for (std::size_t k = 0; k < a_.size(); ++k) {
            if (!std::isfinite(a_[k]) || !std::isfinite(b_[k])) {
                throw ValidationError("TabulatedTwoLevel: non-finite table entry");
            }
        }
        const double h = 1.0 / static_cast<double>(a_.size() - 1);
        sa_ = std::make_shared<Spline>(a_.begin(), a_.end(), 0.0, h);
        sb_ = std::make_shared<Spline>(b_.begin(), b_.end(), 0.0, h);
    }

    std::size_t rows() const noexcept { return a_.size(); }

    /// (a, b, da/ds, db/ds) at s, clamped to [0, 1].
    ABSample at(double s) const {
        s = std::clamp(s, 0.0, 1.0);
        return {(*sa_)(s), (*sb_)(s), sa_->prime(s), sb_->prime(s)};
    }

    HamiltonianSchedule schedule() const {
        auto sa = sa_;
        auto sb = sb_;
        const Matrix sx = pauli_x();
        const Matrix sz = pauli_z();
        HamiltonianSchedule out;
        out.dim = 2;
        out.value = [=](double s) -> Matrix {
            s = std::clamp(s, 0.0, 1.0);
            return (*sa)(s) * sx + (*sb)(s) * sz;
        };
        out.first = [=](double s) -> Matrix {
            s = std::clamp(s, 0.0, 1.0);
            return sa->prime(s) * sx + sb->prime(s) * sz;
        };
        out.second = [=](double s) -> Matrix {
            s = std::clamp(s, 0.0, 1.0);
            return sa->double_prime(s) * sx + sb->double_prime(s) * sz;
        };
        return out;
    }

    /// Physical-time provider for total time tau.
    ABProvider ab(double tau) const {
        auto self = *this;
        return [self, tau](double t) {
            ABSample p = self.at(t / tau);
            p.a_dot /= tau;
            p.b_dot /= tau;
            return p;
        };
    }

private:
    using Spline = boost::math::interpolators::cardinal_cubic_b_spline<double>;
    std::vector<double> a_;
    std::vector<double> b_;
    std::shared_ptr<Spline> sa_;
    std::shared_ptr<Spline> sb_;
};

// ---------------------------------------------------------------------------
// Flux-qubit potential
// ---------------------------------------------------------------------------

struct FluxPotentialParams {
    double E_J = 1.0;
    double beta = 0.8;
    double f_a = 1.0 / 3.0;
    double f_b = 0.5;
};

/// E_J [2 + 2 beta - 2 cos(phi_p) cos(phi_m) - 2 beta cos(pi f_a) cos(2 pi f_b + 2 phi_m)].
inline double flux_potential(const FluxPotentialParams& p, double phi_p, double phi_m) {
    const double pi = std::numbers::pi;
    return p.E_J * (2.0 + 2.0 * p.beta - 2.0 * std::cos(phi_p) * std::cos(phi_m) -
                    2.0 * p.beta * std::cos(pi * p.f_a) * std::cos(2.0 * pi * p.f_b + 2.0 * phi_m));
}

inline std::array<double, 2> flux_potential_gradient(const FluxPotentialParams& p, double phi_p,
                                                     double phi_m) {
    const double pi = std::numbers::pi;
    const double k = 2.0 * p.beta * std::cos(pi * p.f_a);
    return {p.E_J * 2.0 * std::sin(phi_p) * std::cos(phi_m),
            p.E_J * (2.0 * std::cos(phi_p) * std::sin(phi_m) +
                     2.0 * k * std::sin(2.0 * pi * p.f_b + 2.0 * phi_m))};
}

/// Newton iteration on the gradient from (phi_p, phi_m); returns the stationary point.
inline std::array<double, 2> flux_potential_stationary_point(const FluxPotentialParams& p, double phi_p,
                                                             double phi_m, int max_iter = 100) {
    const double pi = std::numbers::pi;
    const double k = 2.0 * p.beta * std::cos(pi * p.f_a);
    for (int it = 0; it < max_iter; ++it) {
        const auto g = flux_potential_gradient(p, phi_p, phi_m);
        const double hpp = 2.0 * std::cos(phi_p) * std::cos(phi_m);
        const double hpm = -2.0 * std::sin(phi_p) * std::sin(phi_m);
        const double hmm = 2.0 * std::cos(phi_p) * std::cos(phi_m) +
                           4.0 * k * std::cos(2.0 * pi * p.f_b + 2.0 * phi_m);
        const double det = p.E_J * (hpp * hmm - hpm * hpm);
        if (det == 0.0) throw EvaluationError("flux_potential_stationary_point: singular Hessian");
        const double dp = (hmm * g[0] - hpm * g[1]) / det;
        const double dm = (hpp * g[1] - hpm * g[0]) / det;
        phi_p -= dp;
        phi_m -= dm;
        if (std::abs(dp) + std::abs(dm) < 1e-14) break;
    }
    return {phi_p, phi_m};
}

}  // namespace adiabound
