#pragma once

// Time-dependent Hamiltonians: a drift H(s) on normalized time s in [0, 1],
// a noise term H_noise(t) on physical time t (us), and their combination
// H_tau(s) = H(s) + H_noise(s tau). Derivative suprema, gap profiles and
// endpoint overlaps are extracted numerically on grids.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "adiabound/bounds.hpp"
#include "adiabound/errors.hpp"
#include "adiabound/spectral.hpp"

namespace adiabound {

using OperatorFn = std::function<Matrix(double)>;

inline constexpr double kDerivativeSafetyFactor = 1.01;
inline constexpr double kFiniteDifferenceStep = 1e-5;
// Second differences lose ~eps/h^2 to rounding, so they use a wider step.
inline constexpr double kSecondDifferenceStep = 1e-4;
inline constexpr std::size_t kDefaultGridPoints = 1001;

inline std::vector<double> uniform_grid(std::size_t points, double lo = 0.0, double hi = 1.0) {
    if (points < 2) throw ValidationError("uniform_grid: need at least two points");
    std::vector<double> g(points);
    for (std::size_t k = 0; k < points; ++k) {
        g[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(points - 1);
    }
    g.back() = hi;
    return g;
}

/// Chebyshev points of the first kind mapped to [lo, hi].
inline std::vector<double> chebyshev_points(std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = std::cos(std::numbers::pi * (2.0 * k + 1.0) / (2.0 * n));
        out[k] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x;
    }
    return out;
}

namespace detail {

inline Matrix centered_first(const OperatorFn& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline Matrix centered_second(const OperatorFn& f, double x, double h) {
    return (f(x + h) - 2.0 * f(x) + f(x - h)) / (h * h);
}

}  // namespace detail

/// H(s) with optional analytic s-derivatives. Evaluators must be pure and
/// accept arguments slightly outside [0, 1] (finite differences step past the ends).
struct HamiltonianSchedule {
    Eigen::Index dim = 2;
    OperatorFn value;
    OperatorFn first;
    OperatorFn second;
    double fd_step = kFiniteDifferenceStep;

    HermitianOperator at(double s) const { return HermitianOperator(value(s)); }

    Matrix derivative(double s) const {
        return first ? first(s) : detail::centered_first(value, s, fd_step);
    }

    Matrix second_derivative(double s) const {
        if (second) return second(s);
        if (first) return detail::centered_first(first, s, fd_step);
        return detail::centered_second(value, s, kSecondDifferenceStep);
    }
};

/// H_noise(t) with analytic t-derivatives. longest_period (1 / nu_min, us) is
/// used to validate sampling windows; zero means unknown.
struct NoiseProcess {
    Eigen::Index dim = 2;
    OperatorFn value;
    OperatorFn first;
    OperatorFn second;
    double longest_period = 0.0;

    HermitianOperator at(double t) const { return HermitianOperator(value(t)); }

    static NoiseProcess zero(Eigen::Index dim) {
        auto z = [dim](double) -> Matrix { return Matrix::Zero(dim, dim); };
        return {dim, z, z, z, 0.0};
    }
};

/// Largest mismatch, relative to max(1e-6, 1e-4 * scale), between analytic and
/// finite-difference derivatives at 11 Chebyshev points. Values <= 1 pass.
inline double derivative_consistency(const HamiltonianSchedule& sch) {
    double worst = 0.0;
    for (double s : chebyshev_points(11)) {
        if (sch.first) {
            const Matrix a = sch.first(s);
            const Matrix fd = detail::centered_first(sch.value, s, sch.fd_step);
            const double tol = std::max(1e-6, 1e-4 * operator_two_norm(a));
            worst = std::max(worst, operator_two_norm(a - fd) / tol);
        }
        if (sch.second) {
            const Matrix a = sch.second(s);
            const Matrix fd = sch.first ? detail::centered_first(sch.first, s, sch.fd_step)
                                        : detail::centered_second(sch.value, s, kSecondDifferenceStep);
            const double tol = std::max(1e-6, 1e-4 * operator_two_norm(a));
            worst = std::max(worst, operator_two_norm(a - fd) / tol);
        }
    }
    return worst;
}

inline double derivative_consistency(const NoiseProcess& noise, std::span<const double> times) {
    double worst = 0.0;
    for (double t : times) {
        const Matrix d1 = noise.first(t);
        const Matrix d2 = noise.second(t);
        // Relative step: noise derivatives scale with the highest frequency.
        const double h = noise.longest_period > 0.0 ? 1e-5 * noise.longest_period : 1e-6;
        const Matrix fd1 = detail::centered_first(noise.value, t, h);
        const Matrix fd2 = detail::centered_first(noise.first, t, h);
        worst = std::max(worst, operator_two_norm(d1 - fd1) /
                                    std::max(1e-6 * operator_two_norm(fd1) + 1e-300,
                                             1e-4 * operator_two_norm(d1)));
        worst = std::max(worst, operator_two_norm(d2 - fd2) /
                                    std::max(1e-6 * operator_two_norm(fd2) + 1e-300,
                                             1e-4 * operator_two_norm(d2)));
    }
    return worst;
}

/// b1 = 1.01 * max ||dH/ds||, b2 = 1.01 * max ||d^2H/ds^2|| over the grid;
/// tabulated values carry the same factor.
inline DerivativeBounds derivative_norm_bounds(const HamiltonianSchedule& sch,
                                               std::span<const double> grid) {
    if (grid.size() < 101) throw ValidationError("derivative_norm_bounds: need >= 101 grid points");
    if (std::abs(grid.front()) > 1e-12 || std::abs(grid.back() - 1.0) > 1e-12) {
        throw ValidationError("derivative_norm_bounds: grid must cover [0, 1]");
    }
    DerivativeBounds out;
    out.s.assign(grid.begin(), grid.end());
    out.b1_tab.reserve(grid.size());
    out.b2_tab.reserve(grid.size());
    for (double s : grid) {
        const double n1 = operator_two_norm(sch.derivative(s));
        const double n2 = operator_two_norm(sch.second_derivative(s));
        if (!std::isfinite(n1) || !std::isfinite(n2)) {
            throw EvaluationError("derivative_norm_bounds: non-finite derivative at s=" +
                                  std::to_string(s));
        }
        out.raw_b1 = std::max(out.raw_b1, n1);
        out.raw_b2 = std::max(out.raw_b2, n2);
        out.b1_tab.push_back(kDerivativeSafetyFactor * n1);
        out.b2_tab.push_back(kDerivativeSafetyFactor * n2);
    }
    out.b1 = kDerivativeSafetyFactor * out.raw_b1;
    out.b2 = kDerivativeSafetyFactor * out.raw_b2;
    return out;
}

/// Drift suprema (c1, c2) from the s-grid, noise suprema (d1, d2) from
/// `t_samples` uniform samples of [0, t_window], all times the safety factor.
inline TwoScaleBounds two_scale_bounds(const HamiltonianSchedule& drift, const NoiseProcess& noise,
                                       double t_window, std::size_t s_points = kDefaultGridPoints,
                                       std::size_t t_samples = 100000) {
    if (noise.longest_period > 0.0 && t_window < 10.0 * noise.longest_period) {
        throw WindowError("two_scale_bounds: window " + std::to_string(t_window) +
                          " us is shorter than 10 noise periods");
    }
    if (t_samples < 2) throw WindowError("two_scale_bounds: need at least two time samples");
    const auto grid = uniform_grid(s_points);
    const DerivativeBounds db = derivative_norm_bounds(drift, grid);
    TwoScaleBounds out;
    out.c1 = db.b1;
    out.c2 = db.b2;
    double sup1 = 0.0, sup2 = 0.0;
    for (std::size_t k = 0; k < t_samples; ++k) {
        const double t = t_window * static_cast<double>(k) / static_cast<double>(t_samples - 1);
        sup1 = std::max(sup1, operator_two_norm(noise.first(t)));
        sup2 = std::max(sup2, operator_two_norm(noise.second(t)));
    }
    out.d1 = kDerivativeSafetyFactor * sup1;
    out.d2 = kDerivativeSafetyFactor * sup2;
    return out;
}

/// H_tau(s) = H(s) + H_noise(s tau); analytic derivatives when the drift has them.
inline HamiltonianSchedule combine(const HamiltonianSchedule& drift, const NoiseProcess& noise,
                                   double tau) {
    if (drift.dim != noise.dim) throw DimensionError("combine: drift and noise dimensions differ");
    HamiltonianSchedule out;
    out.dim = drift.dim;
    out.fd_step = drift.fd_step;
    out.value = [drift, noise, tau](double s) -> Matrix { return drift.value(s) + noise.value(s * tau); };
    if (drift.first) {
        out.first = [drift, noise, tau](double s) -> Matrix {
            return drift.first(s) + tau * noise.first(s * tau);
        };
    }
    if (drift.first && drift.second) {
        out.second = [drift, noise, tau](double s) -> Matrix {
            return drift.second(s) + tau * tau * noise.second(s * tau);
        };
    }
    return out;
}

/// Gap profile of the ground state of H(s) + H_noise(s tau) on the grid.
inline GapProfile combined_gap_profile(const HamiltonianSchedule& drift, const NoiseProcess& noise,
                                       double tau, std::span<const double> grid) {
    const HamiltonianSchedule h = combine(drift, noise, tau);
    std::vector<SpectralData> spectra;
    spectra.reserve(grid.size());
    for (double s : grid) spectra.push_back(eigendecompose(h.at(s)));
    return gap_profile(grid, spectra, 0, 0);
}

/// Ground-state projector; rejects a degenerate ground level.
inline Projector ground_projector(const HermitianOperator& h) {
    const SpectralData spec = eigendecompose(h);
    if (spec.dim() > 1) {
        const double gap = spec.eigenvalues(1) - spec.eigenvalues(0);
        if (!(gap > 1e-12 * std::max(1.0, h.norm()))) {
            throw DegenerateSpectrumError("ground state is degenerate (gap " + std::to_string(gap) + ")");
        }
    }
    return subspace_projector(spec, 0, 0);
}

/// Exact projector distances between the ground states of H_tau and H at s = 0 and s = 1.
inline EndpointOverlaps endpoint_overlaps(const HamiltonianSchedule& drift, const NoiseProcess& noise,
                                          double tau) {
    const HamiltonianSchedule h = combine(drift, noise, tau);
    EndpointOverlaps out;
    out.delta0 = projector_distance(ground_projector(h.at(0.0)), ground_projector(drift.at(0.0)));
    out.delta1 = projector_distance(ground_projector(h.at(1.0)), ground_projector(drift.at(1.0)));
    out.source = OverlapSource::exact_projector;
    return out;
}

/// dP/ds for the spectral projector of band m..n, from first-order perturbation
/// theory with the analytic (or finite-difference) dH/ds:
///   dP = sum_{i in band, k outside} <k|dH|i> / (l_i - l_k) |k><i| + h.c.
inline Matrix projector_derivative(const HamiltonianSchedule& sch, double s, Eigen::Index m = 0,
                                   Eigen::Index n = 0) {
    const SpectralData spec = eigendecompose(sch.at(s));
    const Eigen::Index dim = spec.dim();
    if (m < 0 || n < m || n >= dim) throw IndexError("projector_derivative: band out of range");
    const Matrix& V = spec.eigenvectors;
    const Matrix dH = V.adjoint() * sch.derivative(s) * V;
    Matrix X = Matrix::Zero(dim, dim);
    for (Eigen::Index i = m; i <= n; ++i) {
        for (Eigen::Index k = 0; k < dim; ++k) {
            if (k >= m && k <= n) continue;
            const double sep = spec.eigenvalues(i) - spec.eigenvalues(k);
            if (sep == 0.0) throw GapClosureError(s, 0.0);
            X(k, i) = dH(k, i) / sep;
        }
    }
    const Matrix Xlab = V * X * V.adjoint();
    return Xlab + Xlab.adjoint();
}

}  // namespace adiabound
