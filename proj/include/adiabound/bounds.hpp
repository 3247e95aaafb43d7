#pragma once

// Adiabatic-theorem error bounds with explicit constants, and the endpoint
// perturbation estimates used to feed them. Every bound is reported as
//
//     value = min(1, A*tau + B + C/tau + E)
//
// where E collects the endpoint overlap contribution delta0 + delta1 + delta0*delta1.
// The unclamped sum is kept in BoundResult::raw_value.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/spectral.hpp"

namespace adiabound {

/// Suprema of ||dH/ds|| and ||d^2H/ds^2||, optionally tabulated on a grid.
struct DerivativeBounds {
    double b1 = 0.0;
    double b2 = 0.0;
    // Sampled suprema before any safety factor.
    double raw_b1 = 0.0;
    double raw_b2 = 0.0;
    std::vector<double> s;
    std::vector<double> b1_tab;
    std::vector<double> b2_tab;
};

/// Drift (c1, c2; d/ds) and noise (d1, d2; d/dt) derivative suprema.
/// Units: c in MHz, d1 in MHz^2, d2 in MHz^3.
struct TwoScaleBounds {
    double c1 = 0.0;
    double c2 = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

enum class OverlapSource { exact_projector, sin_theta, bauer_fike, zero };

inline const char* to_string(OverlapSource src) {
    switch (src) {
        case OverlapSource::exact_projector: return "exact-projector";
        case OverlapSource::sin_theta: return "sin-theta";
        case OverlapSource::bauer_fike: return "bauer-fike";
        case OverlapSource::zero: return "zero";
    }
    return "unknown";
}

/// Sines of the angles between perturbed and intended ground states at s = 0 and s = 1.
struct EndpointOverlaps {
    double delta0 = 0.0;
    double delta1 = 0.0;
    OverlapSource source = OverlapSource::zero;

    double term() const { return delta0 + delta1 + delta0 * delta1; }
};

struct BoundTerms {
    double tau_linear_coeff = 0.0;
    double constant_term = 0.0;
    double inv_tau_coeff = 0.0;
    double endpoint_term = 0.0;

    double raw_at(double tau) const {
        return tau_linear_coeff * tau + constant_term + inv_tau_coeff / tau + endpoint_term;
    }
};

struct BoundResult {
    double value = 0.0;
    double raw_value = 0.0;
    BoundTerms terms;
    double tau = 0.0;

    /// Same coefficients evaluated at another evolution time.
    BoundResult at(double other_tau) const;
};

namespace detail {

inline void require_positive(double x, const char* what) {
    if (!(x > 0.0) || !std::isfinite(x)) {
        throw ValidationError(std::string(what) + " must be positive and finite, got " +
                              std::to_string(x));
    }
}

inline void require_nonnegative(double x, const char* what) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
        throw ValidationError(std::string(what) + " must be nonnegative and finite, got " +
                              std::to_string(x));
    }
}

inline BoundResult make_result(const BoundTerms& terms, double tau) {
    require_positive(tau, "tau");
    BoundResult r;
    r.terms = terms;
    r.tau = tau;
    r.raw_value = terms.raw_at(tau);
    r.value = std::min(1.0, r.raw_value);
    return r;
}

}  // namespace detail

inline BoundResult BoundResult::at(double other_tau) const {
    return detail::make_result(terms, other_tau);
}

/// Inputs of the constant-coefficient bound: suprema b1, b2, gap infimum and D supremum.
struct ConstantFormInputs {
    double b1 = 0.0;
    double b2 = 0.0;
    double gamma_bar = 1.0;
    double D_bar = 1.0;
};

namespace detail {

/// (8 D^2 / gamma^2) (2 b1 + s b2 + s 8 (1 + D) b1^2 / gamma), the 1/tau coefficient.
inline double constant_form_coeff(const ConstantFormInputs& in, double s) {
    require_nonnegative(in.b1, "b1");
    require_nonnegative(in.b2, "b2");
    require_positive(in.gamma_bar, "gamma_bar");
    if (!(in.D_bar >= 1.0)) throw ValidationError("D_bar must be >= 1");
    if (!(s > 0.0 && s <= 1.0)) throw ValidationError("s must lie in (0, 1]");
    const double g = in.gamma_bar;
    const double D = in.D_bar;
    return 8.0 * D * D / (g * g) *
           (2.0 * in.b1 + s * in.b2 + s * 8.0 * (1.0 + D) * in.b1 * in.b1 / g);
}

}  // namespace detail

inline BoundResult at_bound_constant(double b1, double b2, double gamma_bar, double D_bar,
                                     double tau, double s = 1.0) {
    BoundTerms t;
    t.inv_tau_coeff = detail::constant_form_coeff({b1, b2, gamma_bar, D_bar}, s);
    return detail::make_result(t, tau);
}

inline BoundResult at_bound_constant(const ConstantFormInputs& in, double tau, double s = 1.0) {
    return at_bound_constant(in.b1, in.b2, in.gamma_bar, in.D_bar, tau, s);
}

/// Integral form of the bound on a tabulated profile, composite trapezoid rule.
///
/// The grid must start at s = 0 and reach s_end; if s_end falls between grid
/// points the integrand and boundary data are interpolated linearly. The
/// quadrature is exact for constant data and O(h^2) otherwise.
inline BoundResult at_bound_integral(const GapProfile& profile, std::span<const double> b1_tab,
                                     std::span<const double> b2_tab, double tau,
                                     double s_end = 1.0) {
    const std::size_t n = profile.size();
    if (n < 2 || b1_tab.size() != n || b2_tab.size() != n) {
        throw DimensionError("at_bound_integral: profile and derivative tables must match (>= 2 points)");
    }
    if (!(s_end > 0.0 && s_end <= 1.0)) throw ValidationError("s_end must lie in (0, 1]");
    if (std::abs(profile.s.front()) > 1e-12) throw ValidationError("grid must start at s = 0");
    if (profile.s.back() < s_end - 1e-12) throw ValidationError("grid does not reach s_end");
    for (std::size_t k = 0; k < n; ++k) {
        if (!(profile.gamma[k] > 0.0)) throw GapClosureError(profile.s[k], profile.gamma[k]);
        detail::require_nonnegative(b1_tab[k], "b1(s)");
        detail::require_nonnegative(b2_tab[k], "b2(s)");
    }

    auto integrand = [&](double D, double g, double b1, double b2) {
        return 8.0 * D * D / (g * g) * (8.0 * (1.0 + D) * b1 * b1 / g + b2);
    };
    auto boundary = [](double D, double g, double b1) { return 8.0 * D * D * b1 / (g * g); };

    double integral = 0.0;
    double f_prev = integrand(profile.D[0], profile.gamma[0], b1_tab[0], b2_tab[0]);
    double end_boundary = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        const double s0 = profile.s[k - 1];
        const double s1 = profile.s[k];
        const double f1 = integrand(profile.D[k], profile.gamma[k], b1_tab[k], b2_tab[k]);
        if (s1 >= s_end - 1e-15) {
            const double u = (s1 > s0) ? (s_end - s0) / (s1 - s0) : 1.0;
            auto lerp = [u](double a, double b) { return a + u * (b - a); };
            const double D = lerp(profile.D[k - 1], profile.D[k]);
            const double g = lerp(profile.gamma[k - 1], profile.gamma[k]);
            const double b1 = lerp(b1_tab[k - 1], b1_tab[k]);
            const double f_end = lerp(f_prev, f1);
            integral += 0.5 * (f_prev + f_end) * (s_end - s0);
            end_boundary = boundary(D, g, b1);
            break;
        }
        integral += 0.5 * (f_prev + f1) * (s1 - s0);
        f_prev = f1;
    }

    BoundTerms t;
    t.inv_tau_coeff =
        boundary(profile.D[0], profile.gamma[0], b1_tab[0]) + end_boundary + integral;
    return detail::make_result(t, tau);
}

inline BoundResult at_bound_integral(const GapProfile& profile, const DerivativeBounds& bounds,
                                     double tau, double s_end = 1.0) {
    return at_bound_integral(profile, bounds.b1_tab, bounds.b2_tab, tau, s_end);
}

/// Initial state eta (|psi_0> + delta |perp>) with eta^-2 = 1 + |delta|^2.
inline BoundResult at_initial_bound(double delta, const ConstantFormInputs& base, double tau,
                                    double s = 1.0) {
    if (!std::isfinite(delta)) throw ValidationError("delta must be finite");
    const double mag = std::abs(delta);
    const double eta = 1.0 / std::sqrt(1.0 + mag * mag);
    BoundTerms t;
    t.inv_tau_coeff = eta * detail::constant_form_coeff(base, s);
    t.endpoint_term = eta * mag;
    return detail::make_result(t, tau);
}

/// Systematic perturbation: constant-form bound of the perturbed system at s = 1
/// plus the endpoint term.
inline BoundResult at_error_bound(const ConstantFormInputs& perturbed,
                                  const EndpointOverlaps& overlaps, double tau) {
    BoundTerms t;
    t.inv_tau_coeff = detail::constant_form_coeff(perturbed, 1.0);
    t.endpoint_term = overlaps.term();
    return detail::make_result(t, tau);
}

/// delta <= eps||Delta|| / (lambda_1 - lambda_0^eps).
inline double sin_theta_delta(double perturbation_norm, double gap_to_perturbed_ground) {
    detail::require_nonnegative(perturbation_norm, "perturbation norm");
    if (!(gap_to_perturbed_ground > 0.0)) {
        throw InapplicableBoundError("sin-theta estimate needs a positive separation");
    }
    return std::min(1.0, perturbation_norm / gap_to_perturbed_ground);
}

/// delta <= eps||Delta|| / (gamma - eps||Delta||).
inline double bauer_fike_delta(double perturbation_norm, double unperturbed_gap) {
    detail::require_nonnegative(perturbation_norm, "perturbation norm");
    if (!(unperturbed_gap > perturbation_norm)) {
        throw InapplicableBoundError("Bauer-Fike estimate needs gamma > eps||Delta||");
    }
    return std::min(1.0, perturbation_norm / (unperturbed_gap - perturbation_norm));
}

/// eps ||Delta(s)|| at s = 0, its supremum over s, and at s = 1.
struct CouplingNorms {
    double at0 = 0.0;
    double sup = 0.0;
    double at1 = 0.0;
};

/// Low-temperature environment coupling. Requires
/// w = ||H_env|| + 2 sup eps||Delta|| < gamma_bar.
inline BoundResult at_env_bound(double env_norm, const CouplingNorms& coupling, double gamma_bar,
                                double b1, double b2, double tau) {
    detail::require_nonnegative(env_norm, "env_norm");
    detail::require_nonnegative(coupling.at0, "coupling at s=0");
    detail::require_nonnegative(coupling.sup, "coupling sup");
    detail::require_nonnegative(coupling.at1, "coupling at s=1");
    detail::require_positive(gamma_bar, "gamma_bar");
    if (coupling.at0 > coupling.sup || coupling.at1 > coupling.sup) {
        throw ValidationError("coupling endpoint norms exceed the supremum");
    }
    const double w = env_norm + 2.0 * coupling.sup;
    if (!(w < gamma_bar)) {
        throw EnvironmentTooHotError("no valid w: ||H_env|| + 2 eps||Delta|| = " + std::to_string(w) +
                                     " >= gamma_bar = " + std::to_string(gamma_bar));
    }
    const bool coupled = coupling.sup > 0.0;
    ConstantFormInputs in{b1, b2, gamma_bar, 1.0};
    EndpointOverlaps ov;
    if (coupled) {
        in.gamma_bar = gamma_bar - w;
        in.D_bar = contour_ratio(w, in.gamma_bar);
        auto delta = [&](double c) {
            return std::min(1.0, c / (gamma_bar - env_norm - c));
        };
        ov = {delta(coupling.at0), delta(coupling.at1), OverlapSource::bauer_fike};
    }
    BoundTerms t;
    t.inv_tau_coeff = detail::constant_form_coeff(in, 1.0);
    t.endpoint_term = ov.term();
    return detail::make_result(t, tau);
}

/// Two-time-scale noise bound: A tau + B + C / tau + endpoint term.
inline BoundResult at_noise_bound(const TwoScaleBounds& ts, double gamma_noise,
                                  const EndpointOverlaps& overlaps, double tau) {
    detail::require_positive(gamma_noise, "gamma_noise");
    detail::require_positive(tau, "tau");
    detail::require_nonnegative(ts.c1, "c1");
    detail::require_nonnegative(ts.c2, "c2");
    detail::require_nonnegative(ts.d1, "d1");
    detail::require_nonnegative(ts.d2, "d2");
    const double g = gamma_noise;
    const double pre = 8.0 / (g * g);
    BoundTerms t;
    t.tau_linear_coeff = pre * (ts.d2 + 16.0 * ts.d1 * ts.d1 / g);
    t.constant_term = pre * 2.0 * ts.d1 * (1.0 + 16.0 * ts.c1 / g);
    t.inv_tau_coeff = pre * (2.0 * ts.c1 + ts.c2 + 16.0 * ts.c1 * ts.c1 / g);
    t.endpoint_term = overlaps.term();
    return detail::make_result(t, tau);
}

/// Range of tau with A tau + B + C / tau <= tolerance (B includes the endpoint term).
/// tau_max is +infinity when there is no upper limit; tau_star is the minimizer
/// sqrt(C / A) when both A and C are positive.
struct TauInterval {
    double tau_min = 0.0;
    double tau_max = std::numeric_limits<double>::infinity();
    std::optional<double> tau_star;
};

inline std::optional<TauInterval> feasible_tau_interval(const BoundTerms& terms, double tolerance) {
    const double A = terms.tau_linear_coeff;
    const double B = terms.constant_term + terms.endpoint_term;
    const double C = terms.inv_tau_coeff;
    const double slack = tolerance - B;
    const double inf = std::numeric_limits<double>::infinity();

    if (A == 0.0 && C == 0.0) {
        if (slack >= 0.0) return TauInterval{0.0, inf, std::nullopt};
        return std::nullopt;
    }
    if (!(slack > 0.0)) return std::nullopt;
    if (A == 0.0) return TauInterval{C / slack, inf, std::nullopt};
    if (C == 0.0) return TauInterval{0.0, slack / A, std::nullopt};

    const double disc = slack * slack - 4.0 * A * C;
    if (disc < 0.0) return std::nullopt;
    const double root = std::sqrt(disc);
    // Stable pair: product of roots is C / A.
    const double upper = (slack + root) / (2.0 * A);
    const double lower = C / (A * upper);
    return TauInterval{lower, upper, std::sqrt(C / A)};
}

}  // namespace adiabound
