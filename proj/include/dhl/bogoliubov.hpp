#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "dhl/model.hpp"

namespace dhl {

/// Real parts below kRealTolerance * scale count as zero when picking the +-E representatives.
inline constexpr double kRealTolerance = 1e-9;
/// Particle energies closer than this form one degenerate cluster.
inline constexpr double kDegeneracyTolerance = 1e-9;
/// Smallest eigenvalue of M a stable solution must exceed; points on a boundary come out unstable.
inline constexpr double kPositivityFloor = 1e-12;

/// Symplectic eigen-decomposition of tau_z M at one wave vector.
///
/// For a stable solution the columns of `transform` are the quasiparticle modes: columns 0..2 carry
/// energies[0..2] (ascending) with tau_z norm +1, columns 3..5 carry -energies[0..2] with norm -1,
/// so that T^dagger tau_z T = tau_z.
struct BandSolution {
    WaveVector k;
    Branch branch;
    /// Positive-branch energies, ascending; NaN when unstable.
    std::array<double, 3> energies{};
    /// One representative of each +-E pair (Re > 0, or Im > 0 on the imaginary axis), ascending in Re.
    std::array<cplx, 3> branch_energies{};
    /// All six eigenvalues of tau_z M ordered by (Re, Im).
    std::array<cplx, 6> full_spectrum{};
    Matrix6c transform = Matrix6c::Zero();
    bool stable{false};
    double max_imag{0.0};

    [[nodiscard]] Vector6c mode(int band) const { return transform.col(band); }
};

namespace detail {

inline const Eigen::Matrix<double, 6, 1>& tau_z_diag() {
    static const Eigen::Matrix<double, 6, 1> t = (Eigen::Matrix<double, 6, 1>() << 1, 1, 1, -1, -1, -1).finished();
    return t;
}

inline Matrix6c tau_z() { return tau_z_diag().cast<cplx>().asDiagonal(); }

template <class Vec>
inline double tau_norm(const Vec& v) {
    double n = 0.0;
    for (int i = 0; i < 6; ++i) n += tau_z_diag()[i] * std::norm(v[i]);
    return n;
}

inline double mode_weight(const Vector6c& v, int mode) {
    return std::norm(v[mode]) + std::norm(v[mode + kHoleOffset]);
}

/// Rotate a degenerate cluster basis (columns of `basis`, all of one tau_z-norm sign) so that the
/// columns are tau_z-orthonormal and ordered by descending cavity-B weight, ties by spin weight.
inline Eigen::MatrixXcd canonical_cluster_basis(const Eigen::MatrixXcd& basis, double sign, int depth = 0) {
    const Eigen::Index d = basis.cols();
    Eigen::MatrixXcd metric = sign * basis.adjoint() * tau_z() * basis;
    metric = 0.5 * (metric + metric.adjoint()).eval();
    const int mode = depth == 0 ? static_cast<int>(Mode::CavityB) : static_cast<int>(Mode::Spins);

    Eigen::MatrixXcd proj = Eigen::MatrixXcd::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            proj(i, j) = std::conj(basis(mode, i)) * basis(mode, j) +
                         std::conj(basis(mode + kHoleOffset, i)) * basis(mode + kHoleOffset, j);

    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXcd> ges(proj, metric);
    // ascending eigenvalues; we want descending weight
    Eigen::MatrixXcd out(basis.rows(), d);
    std::vector<double> w(d);
    for (Eigen::Index i = 0; i < d; ++i) {
        out.col(i) = basis * ges.eigenvectors().col(d - 1 - i);
        w[i] = ges.eigenvalues()[d - 1 - i];
    }
    if (depth == 0) {
        // sub-clusters with equal B weight are ordered by spin weight
        Eigen::Index start = 0;
        while (start < d) {
            Eigen::Index end = start + 1;
            while (end < d && std::abs(w[end] - w[start]) < kDegeneracyTolerance) ++end;
            if (end - start > 1) out.middleCols(start, end - start) =
                canonical_cluster_basis(out.middleCols(start, end - start), sign, 1);
            start = end;
        }
    }
    return out;
}

/// Normalize to |v^dagger tau_z v| = 1 and make the largest component real and positive.
inline void fix_gauge(Vector6c& v) {
    v /= std::sqrt(std::abs(tau_norm(v)));
    int best = 0;
    double best_mag = -1.0;
    for (int i = 0; i < 6; ++i) {
        const double a = std::abs(v[i]);
        if (a > best_mag * (1.0 + 1e-12)) {
            best_mag = a;
            best = i;
        }
    }
    if (best_mag > 0) v *= std::conj(v[best]) / best_mag;
}

} // namespace detail

/// Diagonalize the dynamical matrix tau_z M by direct eigen-decomposition, then symplectically
/// normalize. Unstable inputs still report their complex spectrum.
[[nodiscard]] inline BandSolution diagonalize(const BlochMatrix& m) {
    const double scale = std::max(1.0, m.entries.cwiseAbs().maxCoeff());
    if (m.hermiticity_defect() > 1e-12 * scale)
        throw ContractViolation("diagonalize: coefficient matrix is not Hermitian");

    BandSolution sol{m.k, m.branch};
    // Stable means M positive definite: then every +E mode has positive tau_z norm and the
    // spectrum of tau_z M is real.
    Eigen::SelfAdjointEigenSolver<Matrix6c> sa(m.entries);
    sol.stable = sa.eigenvalues()[0] > kPositivityFloor * scale;

    if (!sol.stable) {
        Matrix6c d = m.entries;
        d.bottomRows<3>() *= -1.0;
        Eigen::ComplexEigenSolver<Matrix6c> ces(d, false);
        std::array<cplx, 6> ev;
        for (int i = 0; i < 6; ++i) ev[i] = ces.eigenvalues()[i];
        std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        sol.full_spectrum = ev;
        for (const cplx& e : ev) sol.max_imag = std::max(sol.max_imag, std::abs(e.imag()));

        // Representatives of the +-E pairs: flush tiny real parts so imaginary pairs pick +i|E|.
        std::array<cplx, 6> keyed = ev;
        const double zero_re = kRealTolerance * scale;
        std::sort(keyed.begin(), keyed.end(), [zero_re](cplx a, cplx b) {
            const double ra = std::abs(a.real()) < zero_re ? 0.0 : a.real();
            const double rb = std::abs(b.real()) < zero_re ? 0.0 : b.real();
            return ra != rb ? ra > rb : a.imag() > b.imag();
        });
        std::array<cplx, 3> reps{keyed[0], keyed[1], keyed[2]};
        std::sort(reps.begin(), reps.end(), [](cplx a, cplx b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        sol.branch_energies = reps;
        sol.energies.fill(std::numeric_limits<double>::quiet_NaN());
        return sol;
    }

    // M = K^dagger K with K = D^1/2 V^dagger. K tau_z K^dagger is Hermitian with eigenvalues +-E;
    // its eigenvectors w give the symplectic columns K^-1 w sqrt|E|.
    const Eigen::Matrix<double, 6, 1> root = sa.eigenvalues().cwiseSqrt();
    const Matrix6c k_mat = root.cast<cplx>().asDiagonal() * sa.eigenvectors().adjoint();
    const Matrix6c k_inv = sa.eigenvectors() * root.cwiseInverse().cast<cplx>().asDiagonal();
    Matrix6c h = k_mat * detail::tau_z() * k_mat.adjoint();
    h = 0.5 * (h + h.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<Matrix6c> hs(h);
    // ascending: -E2 -E1 -E0 E0 E1 E2
    Matrix6c cols;
    std::array<double, 6> e;
    for (int l = 0; l < 3; ++l) {
        e[l] = hs.eigenvalues()[3 + l];
        e[l + 3] = -hs.eigenvalues()[2 - l];
        cols.col(l) = k_inv * hs.eigenvectors().col(3 + l) * std::sqrt(e[l]);
        cols.col(l + 3) = k_inv * hs.eigenvectors().col(2 - l) * std::sqrt(e[l + 3]);
    }

    for (int sector = 0; sector < 2; ++sector) {
        const int off = 3 * sector;
        const double sign = sector == 0 ? 1.0 : -1.0;
        int start = 0;
        while (start < 3) {
            int end = start + 1;
            while (end < 3 && std::abs(e[off + end] - e[off + end - 1]) < kDegeneracyTolerance) ++end;
            if (end - start > 1) {
                const Eigen::MatrixXcd block = cols.middleCols(off + start, end - start);
                cols.middleCols(off + start, end - start) = detail::canonical_cluster_basis(block, sign);
            }
            start = end;
        }
        for (int l = 0; l < 3; ++l) {
            Vector6c v = cols.col(off + l);
            detail::fix_gauge(v);
            sol.transform.col(off + l) = v;
        }
    }
    for (int l = 0; l < 3; ++l) {
        // Rayleigh quotient v^dagger M v / v^dagger tau_z v; second-order accurate in the mode error.
        const Vector6c v = sol.transform.col(l);
        sol.energies[l] = (v.adjoint() * m.entries * v)(0, 0).real() / detail::tau_norm(v);
        sol.branch_energies[l] = sol.energies[l];
        sol.full_spectrum[3 + l] = sol.energies[l];
        sol.full_spectrum[2 - l] = -sol.energies[l];
    }
    return sol;
}

/// Closed-form spectrum of the normal phase at omega_a = omega_b = Omega = omega:
/// { sqrt(w^2 - 2 w R), w, sqrt(w^2 + 2 w R) } with R = sqrt(|f(k)|^2 + lambda^2).
/// The principal complex square root continues the lowest branch past the boundary.
[[nodiscard]] inline std::array<cplx, 3> analytic_bands_normal(const ModelParams& p, const WaveVector& k) {
    if (!p.resonant())
        throw NotApplicable("analytic normal-phase bands need omega_a = omega_b = omega_spin; use diagonalize");
    const double w = p.omega_a;
    const double r = std::sqrt(form_factor_norm2(p, k) + p.lambda * p.lambda);
    return {std::sqrt(cplx(w * w - 2.0 * w * r, 0.0)), cplx(w, 0.0), std::sqrt(cplx(w * w + 2.0 * w * r, 0.0))};
}

/// Chiral operator C = diag(-1, 1, 1, -1, 1, 1).
[[nodiscard]] inline Matrix6c chiral_operator() {
    Eigen::Matrix<double, 6, 1> c;
    c << -1, 1, 1, -1, 1, 1;
    return c.cast<cplx>().asDiagonal();
}

/// Frobenius norm of {C, M_int}, M_int = M - diag(M). Zero iff the off-site part is chiral symmetric.
[[nodiscard]] inline double chiral_defect(const BlochMatrix& m) {
    Matrix6c off = m.entries;
    off.diagonal().setZero();
    const Matrix6c c = chiral_operator();
    return (c * off + off * c).norm();
}

/// Anomalous ground-state correlators F(i, j) = <psi_i(k) psi_j(-k)> in the Bogoliubov vacuum,
/// i, j over {cavity A, cavity B, spin}. In the superradiant phase these are the displaced-frame
/// (c, d operator) correlators.
struct PairingSet {
    Branch frame{Branch::NormalPhase};
    Eigen::Matrix3cd anomalous = Eigen::Matrix3cd::Zero();

    [[nodiscard]] cplx operator()(Mode i, Mode j) const {
        return anomalous(static_cast<int>(i), static_cast<int>(j));
    }
    /// <a_kA b_-kA> (normal) or <c_kA d_-kA> (superradiant)
    [[nodiscard]] cplx cavity_spin() const { return (*this)(Mode::CavityA, Mode::Spins); }
    [[nodiscard]] cplx spin_spin() const { return (*this)(Mode::Spins, Mode::Spins); }
    [[nodiscard]] cplx cavity_cavity() const { return (*this)(Mode::CavityA, Mode::CavityB); }
};

/// <Psi Psi^dagger> = T P T^dagger with P projecting on the quasiparticle columns; the anomalous
/// block is its upper-right 3x3 corner.
[[nodiscard]] inline PairingSet pairing_correlators(const BandSolution& sol) {
    if (!sol.stable) throw UnstableSolution("pairing correlators need a stable Bogoliubov vacuum");
    PairingSet ps;
    ps.frame = sol.branch;
    const auto u = sol.transform.block<3, 3>(0, 0);
    const auto v = sol.transform.block<3, 3>(3, 0);
    ps.anomalous = u * v.adjoint();
    return ps;
}

} // namespace dhl
