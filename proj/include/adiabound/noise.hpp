#pragma once

// Differentiable 1/nu noise as a finite cosine sum with random phases:
//
//     N(t) = C * sum_{j=1..n} cos(2 pi nu_j t + xi_j) * dnu / sqrt(nu_j),
//     dnu = (nu_max - nu_min) / n,  nu_j = nu_min + j * dnu.
//
// Frequencies are in MHz and times in microseconds, so 2 pi nu t is
// dimensionless. N itself is dimensionless (a frustration offset).

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"

namespace adiabound {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform phases in [0, 2 pi) from a 64-bit Mersenne Twister seeded with `seed`.
/// Each phase uses the top 53 bits of one draw: xi = 2 pi * (x >> 11) * 2^-53.
inline std::vector<double> seeded_phases(std::uint64_t seed, std::size_t n) {
    std::mt19937_64 gen(seed);
    std::vector<double> out(n);
    for (auto& xi : out) {
        const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
        xi = kTwoPi * u;
    }
    return out;
}

struct NoiseSample {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
};

class OneOverFNoise {
public:
    OneOverFNoise(double amplitude, double nu_min, double nu_max, std::vector<double> phases)
        : C_(amplitude), nu_min_(nu_min), nu_max_(nu_max), phases_(std::move(phases)) {
        if (!(nu_min > 0.0 && nu_max > nu_min)) {
            throw ValidationError("OneOverFNoise: need 0 < nu_min < nu_max");
        }
        if (phases_.empty()) throw ValidationError("OneOverFNoise: need at least one term");
        if (!std::isfinite(C_)) throw ValidationError("OneOverFNoise: amplitude must be finite");
        for (double xi : phases_) {
            if (!(xi >= 0.0 && xi < kTwoPi)) {
                throw ValidationError("OneOverFNoise: phases must lie in [0, 2 pi)");
            }
        }
        const std::size_t n = phases_.size();
        dnu_ = (nu_max_ - nu_min_) / static_cast<double>(n);
        nu_.resize(n);
        omega_.resize(n);
        amp_.resize(n);
        for (std::size_t j = 0; j < n; ++j) {
            nu_[j] = nu_min_ + static_cast<double>(j + 1) * dnu_;
            omega_[j] = kTwoPi * nu_[j];
            amp_[j] = C_ * dnu_ / std::sqrt(nu_[j]);
        }
    }

    /// Seeded realization with n terms.
    static OneOverFNoise seeded(double amplitude, std::size_t n, double nu_min, double nu_max,
                                std::uint64_t seed) {
        return OneOverFNoise(amplitude, nu_min, nu_max, seeded_phases(seed, n));
    }

    double amplitude() const noexcept { return C_; }
    std::size_t terms() const noexcept { return phases_.size(); }
    double nu_min() const noexcept { return nu_min_; }
    double nu_max() const noexcept { return nu_max_; }
    double delta_nu() const noexcept { return dnu_; }
    const std::vector<double>& phases() const noexcept { return phases_; }
    const std::vector<double>& frequencies() const noexcept { return nu_; }
    /// C * dnu / sqrt(nu_j) for each term.
    const std::vector<double>& term_amplitudes() const noexcept { return amp_; }
    const std::vector<double>& angular_frequencies() const noexcept { return omega_; }

    double operator()(double t) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < amp_.size(); ++j) acc += amp_[j] * std::cos(omega_[j] * t + phases_[j]);
        return acc;
    }

    /// sum_j A_j omega_j^k: the worst case of |d^k N / dt^k| over all t and phases.
    double analytic_cap(int order) const {
        double acc = 0.0;
        for (std::size_t j = 0; j < amp_.size(); ++j) acc += amp_[j] * std::pow(omega_[j], order);
        return acc;
    }

private:
    double C_;
    double nu_min_;
    double nu_max_;
    std::vector<double> phases_;
    double dnu_ = 0.0;
    std::vector<double> nu_;
    std::vector<double> omega_;
    std::vector<double> amp_;
};

inline NoiseSample sample_with_derivatives(const OneOverFNoise& noise, double t) {
    NoiseSample out;
    const auto& amp = noise.term_amplitudes();
    const auto& omega = noise.angular_frequencies();
    const auto& xi = noise.phases();
    for (std::size_t j = 0; j < amp.size(); ++j) {
        const double arg = omega[j] * t + xi[j];
        const double c = std::cos(arg);
        const double s = std::sin(arg);
        out.value += amp[j] * c;
        out.first -= amp[j] * omega[j] * s;
        out.second -= amp[j] * omega[j] * omega[j] * c;
    }
    return out;
}

inline constexpr double kNoiseSafetyFactor = 1.01;
inline constexpr std::size_t kMinCalibrationSamples = 100000;
inline constexpr double kDefaultWindowPeriods = 1000.0;
inline constexpr std::size_t kDefaultCalibrationSamples = 1000000;

/// Sampled suprema (times the safety factor, capped at the analytic worst case)
/// of |N|, |dN/dt| and |d^2N/dt^2|, together with the caps themselves.
struct AmplitudeBounds {
    double value = 0.0;
    double first = 0.0;
    double second = 0.0;
    double cap_value = 0.0;
    double cap_first = 0.0;
    double cap_second = 0.0;
};

namespace detail {

/// Calls visit(k, z_j...) style accumulation on a uniform grid t_k = k * dt,
/// advancing each term by a fixed rotation and re-synchronizing periodically.
template <typename Visit>
void sweep_uniform(const OneOverFNoise& noise, double dt, std::size_t samples, Visit&& visit) {
    const std::size_t n = noise.terms();
    const auto& omega = noise.angular_frequencies();
    const auto& xi = noise.phases();
    std::vector<std::complex<double>> z(n), step(n);
    for (std::size_t j = 0; j < n; ++j) step[j] = std::polar(1.0, omega[j] * dt);
    constexpr std::size_t kResync = 512;
    for (std::size_t k = 0; k < samples; ++k) {
        if (k % kResync == 0) {
            const double t = static_cast<double>(k) * dt;
            for (std::size_t j = 0; j < n; ++j) z[j] = std::polar(1.0, omega[j] * t + xi[j]);
        }
        visit(k, z);
        for (std::size_t j = 0; j < n; ++j) z[j] *= step[j];
    }
}

}  // namespace detail

inline AmplitudeBounds amplitude_bounds(const OneOverFNoise& noise,
                                        double window = -1.0,
                                        std::size_t samples = kDefaultCalibrationSamples) {
    if (window < 0.0) window = kDefaultWindowPeriods / noise.nu_min();
    if (window < 10.0 / noise.nu_min()) {
        throw WindowError("amplitude_bounds: window " + std::to_string(window) +
                          " us shorter than 10 / nu_min");
    }
    if (samples < kMinCalibrationSamples) {
        throw WindowError("amplitude_bounds: need at least 1e5 samples");
    }
    const double dt = window / static_cast<double>(samples - 1);
    if (dt * noise.nu_max() > 1.0 / 20.0) {
        throw WindowError("amplitude_bounds: fewer than 20 samples per shortest period");
    }

    const auto& amp = noise.term_amplitudes();
    const auto& omega = noise.angular_frequencies();
    double sup0 = 0.0, sup1 = 0.0, sup2 = 0.0;
    detail::sweep_uniform(noise, dt, samples, [&](std::size_t, const auto& z) {
        double v = 0.0, d1 = 0.0, d2 = 0.0;
        for (std::size_t j = 0; j < amp.size(); ++j) {
            const double re = z[j].real();
            v += amp[j] * re;
            d1 -= amp[j] * omega[j] * z[j].imag();
            d2 -= amp[j] * omega[j] * omega[j] * re;
        }
        sup0 = std::max(sup0, std::abs(v));
        sup1 = std::max(sup1, std::abs(d1));
        sup2 = std::max(sup2, std::abs(d2));
    });

    AmplitudeBounds out;
    out.cap_value = std::abs(noise.analytic_cap(0));
    out.cap_first = std::abs(noise.analytic_cap(1));
    out.cap_second = std::abs(noise.analytic_cap(2));
    out.value = std::min(kNoiseSafetyFactor * sup0, out.cap_value);
    out.first = std::min(kNoiseSafetyFactor * sup1, out.cap_first);
    out.second = std::min(kNoiseSafetyFactor * sup2, out.cap_second);
    return out;
}

struct PeriodogramBin {
    double nu_lo = 0.0;
    double nu_hi = 0.0;
    double nu_center = 0.0;
    double mean_power = 0.0;
};

/// Periodogram |X(f_k)|^2 / samples^2 at the DFT frequencies f_k = k / window
/// lying in [nu_min, nu_max], averaged over `bins` equal-width sub-bands.
inline std::vector<PeriodogramBin> banded_periodogram(const OneOverFNoise& noise, double window,
                                                      std::size_t samples, std::size_t bins) {
    if (bins == 0) throw ValidationError("banded_periodogram: need at least one bin");
    const double fs = static_cast<double>(samples) / window;
    if (fs < 2.5 * noise.nu_max()) throw WindowError("banded_periodogram: sampling below Nyquist");

    std::vector<double> x(samples);
    const auto& amp = noise.term_amplitudes();
    const double dt = window / static_cast<double>(samples);
    detail::sweep_uniform(noise, dt, samples, [&](std::size_t k, const auto& z) {
        double v = 0.0;
        for (std::size_t j = 0; j < amp.size(); ++j) v += amp[j] * z[j].real();
        x[k] = v;
    });

    const auto k_lo = static_cast<long>(std::ceil(noise.nu_min() * window - 1e-9));
    const auto k_hi = static_cast<long>(std::floor(noise.nu_max() * window + 1e-9));
    const double width = (noise.nu_max() - noise.nu_min()) / static_cast<double>(bins);
    std::vector<PeriodogramBin> out(bins);
    std::vector<std::size_t> counts(bins, 0);
    for (std::size_t b = 0; b < bins; ++b) {
        out[b].nu_lo = noise.nu_min() + static_cast<double>(b) * width;
        out[b].nu_hi = out[b].nu_lo + width;
        out[b].nu_center = 0.5 * (out[b].nu_lo + out[b].nu_hi);
    }
    for (long k = k_lo; k <= k_hi; ++k) {
        const double f = static_cast<double>(k) / window;
        const std::complex<double> rot = std::polar(1.0, -kTwoPi * f * dt);
        std::complex<double> w(1.0, 0.0), acc(0.0, 0.0);
        for (std::size_t m = 0; m < samples; ++m) {
            if (m % 512 == 0) w = std::polar(1.0, -kTwoPi * f * dt * static_cast<double>(m));
            acc += x[m] * w;
            w *= rot;
        }
        const double power = std::norm(acc) / (static_cast<double>(samples) * samples);
        auto b = static_cast<std::size_t>((f - noise.nu_min()) / width);
        if (b >= bins) b = bins - 1;
        out[b].mean_power += power;
        ++counts[b];
    }
    for (std::size_t b = 0; b < bins; ++b) {
        if (counts[b] > 0) out[b].mean_power /= static_cast<double>(counts[b]);
    }
    return out;
}

}  // namespace adiabound
