#pragma once

// Dense complex linear algebra for small Hermitian operators: norms,
// eigendecomposition with a fixed phase convention, spectral projectors,
// projector distances and gap profiles. Energies are in MHz (hbar = 1).

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adiabound/errors.hpp"

namespace adiabound {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kHermitianTolerance = 1e-12;
inline constexpr double kProjectorTolerance = 1e-10;

inline Matrix pauli_x() {
    Matrix m(2, 2);
    m << 0.0, 1.0, 1.0, 0.0;
    return m;
}

inline Matrix pauli_y() {
    Matrix m(2, 2);
    m << 0.0, Complex(0.0, -1.0), Complex(0.0, 1.0), 0.0;
    return m;
}

inline Matrix pauli_z() {
    Matrix m(2, 2);
    m << 1.0, 0.0, 0.0, -1.0;
    return m;
}

inline Matrix identity(Eigen::Index dim) { return Matrix::Identity(dim, dim); }

/// Largest singular value of a square matrix.
inline double operator_two_norm(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw DimensionError("operator_two_norm: matrix is " + std::to_string(a.rows()) + "x" +
                             std::to_string(a.cols()));
    }
    if (a.size() == 0) return 0.0;
    if (a.rows() == 2) {
        // sigma_max^2 = (|A|_F^2 + sqrt(|A|_F^4 - 4|det A|^2)) / 2
        const double f2 = a.squaredNorm();
        const double det = std::abs(a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0));
        const double disc = std::max(0.0, f2 * f2 - 4.0 * det * det);
        return std::sqrt(0.5 * (f2 + std::sqrt(disc)));
    }
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues()(0);
}

/// Square complex matrix equal to its conjugate transpose within 1e-12 absolute.
/// Inputs violating the tolerance are rejected, never symmetrized.
class HermitianOperator {
public:
    explicit HermitianOperator(Matrix entries) : m_(std::move(entries)) {
        if (m_.rows() != m_.cols() || m_.rows() < 1) {
            throw DimensionError("HermitianOperator: need a non-empty square matrix");
        }
        if (!m_.allFinite()) throw ValidationError("HermitianOperator: non-finite entry");
        const double asym = (m_ - m_.adjoint()).cwiseAbs().maxCoeff();
        if (asym > kHermitianTolerance) {
            throw ValidationError("HermitianOperator: not Hermitian (max |A - A^H| = " +
                                  std::to_string(asym) + ")");
        }
    }

    Eigen::Index dim() const noexcept { return m_.rows(); }
    const Matrix& matrix() const noexcept { return m_; }
    double norm() const { return operator_two_norm(m_); }

private:
    Matrix m_;
};

/// Orthogonal projector: Hermitian, idempotent, eigenvalues in {0, 1}.
class Projector {
public:
    explicit Projector(Matrix entries) : m_(std::move(entries)) {
        if (m_.rows() != m_.cols() || m_.rows() < 1) {
            throw DimensionError("Projector: need a non-empty square matrix");
        }
        if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > kProjectorTolerance) {
            throw ValidationError("Projector: not Hermitian");
        }
        if (operator_two_norm(m_ * m_ - m_) > kProjectorTolerance) {
            throw ValidationError("Projector: not idempotent");
        }
        rank_ = static_cast<int>(std::lround(m_.trace().real()));
    }

    /// Projector onto the span of orthonormal columns.
    static Projector onto(const Matrix& orthonormal_columns) {
        return Projector(orthonormal_columns * orthonormal_columns.adjoint());
    }

    Eigen::Index dim() const noexcept { return m_.rows(); }
    int rank() const noexcept { return rank_; }
    const Matrix& matrix() const noexcept { return m_; }
    Matrix complement() const { return identity(dim()) - m_; }

private:
    Matrix m_;
    int rank_ = 0;
};

/// Ascending eigenvalues and orthonormal eigenvector columns. Each column has
/// its largest-magnitude component real and positive.
struct SpectralData {
    RealVector eigenvalues;
    Matrix eigenvectors;

    Eigen::Index dim() const noexcept { return eigenvalues.size(); }
};

inline SpectralData eigendecompose(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.matrix());
    if (solver.info() != Eigen::Success) {
        throw EvaluationError("eigendecompose: solver did not converge");
    }
    SpectralData out{solver.eigenvalues(), solver.eigenvectors()};
    for (Eigen::Index j = 0; j < out.eigenvectors.cols(); ++j) {
        Eigen::Index k = 0;
        out.eigenvectors.col(j).cwiseAbs().maxCoeff(&k);
        const Complex pivot = out.eigenvectors(k, j);
        out.eigenvectors.col(j) *= std::conj(pivot) / std::abs(pivot);
        out.eigenvectors(k, j) = std::abs(out.eigenvectors(k, j));
    }
    return out;
}

/// Closed-form spectrum of a*sigma_x + b*sigma_z.
///
/// theta satisfies cot(theta) = b/a with a = R sin(theta), b = R cos(theta),
/// R = sqrt(a^2 + b^2); that is theta = atan2(a, b) in (-pi, pi]. With this
/// branch the ground state is (-sin(theta/2), cos(theta/2)) and the excited
/// state (cos(theta/2), sin(theta/2)) for either sign of a.
struct TwoLevelEigen {
    double e0;
    double e1;
    double theta;

    Vector ground() const {
        Vector v(2);
        v << -std::sin(0.5 * theta), std::cos(0.5 * theta);
        return v;
    }
    Vector excited() const {
        Vector v(2);
        v << std::cos(0.5 * theta), std::sin(0.5 * theta);
        return v;
    }
};

inline TwoLevelEigen two_level_angles(double a, double b) {
    const double r = std::hypot(a, b);
    if (r == 0.0) throw DegenerateSpectrumError("two_level_angles: a = b = 0");
    return {-r, r, std::atan2(a, b)};
}

/// Projector onto the eigenspace of eigenvalues m..n (inclusive, ascending order).
inline Projector subspace_projector(const SpectralData& spec, Eigen::Index m, Eigen::Index n) {
    if (m < 0 || n < m || n >= spec.dim()) {
        throw IndexError("subspace_projector: need 0 <= m <= n < dim, got m=" + std::to_string(m) +
                         " n=" + std::to_string(n) + " dim=" + std::to_string(spec.dim()));
    }
    return Projector::onto(spec.eigenvectors.middleCols(m, n - m + 1));
}

/// ||P1 - P2||_2 for equal-rank projectors; the sine of the largest principal angle.
inline double projector_distance(const Projector& p1, const Projector& p2) {
    if (p1.dim() != p2.dim()) throw DimensionError("projector_distance: dimension mismatch");
    if (p1.rank() != p2.rank()) {
        throw RankError("projector_distance: rank " + std::to_string(p1.rank()) + " vs " +
                        std::to_string(p2.rank()));
    }
    return std::min(1.0, operator_two_norm(p1.matrix() - p2.matrix()));
}

/// Gap gamma(s), band width w(s) and D(s) = 1 + 2w/(pi gamma) on a parameter grid.
struct GapProfile {
    std::vector<double> s;
    std::vector<double> gamma;
    std::vector<double> width;
    std::vector<double> D;
    double gamma_min = 0.0;
    double D_max = 0.0;
    double w_max = 0.0;

    std::size_t size() const noexcept { return s.size(); }
};

inline double contour_ratio(double width, double gamma) {
    return 1.0 + 2.0 * width / (std::numbers::pi * gamma);
}

/// Builds the profile of the band m..n. At m = 0 only the upper gap counts;
/// when n is the top level only the lower gap counts.
inline GapProfile gap_profile(std::span<const double> s, std::span<const SpectralData> spectra,
                              Eigen::Index m, Eigen::Index n) {
    if (s.size() != spectra.size() || s.empty()) {
        throw DimensionError("gap_profile: grid and spectra must be non-empty and equal length");
    }
    GapProfile out;
    out.gamma_min = INFINITY;
    for (std::size_t k = 0; k < s.size(); ++k) {
        const auto& lam = spectra[k].eigenvalues;
        const Eigen::Index dim = lam.size();
        if (m < 0 || n < m || n >= dim) throw IndexError("gap_profile: band index out of range");
        if (m == 0 && n == dim - 1) {
            throw IndexError("gap_profile: band covers the whole spectrum; no gap defined");
        }
        double gamma = INFINITY;
        if (n + 1 < dim) gamma = lam(n + 1) - lam(n);
        if (m > 0) gamma = std::min(gamma, lam(m) - lam(m - 1));
        if (!(gamma > 0.0)) throw GapClosureError(s[k], gamma);
        const double w = lam(n) - lam(m);
        out.s.push_back(s[k]);
        out.gamma.push_back(gamma);
        out.width.push_back(w);
        out.D.push_back(contour_ratio(w, gamma));
        out.gamma_min = std::min(out.gamma_min, gamma);
        out.D_max = std::max(out.D_max, out.D.back());
        out.w_max = std::max(out.w_max, w);
    }
    return out;
}

}  // namespace adiabound
