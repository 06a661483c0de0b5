#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>

#include <Eigen/Dense>

#include "dhl/errors.hpp"

namespace dhl {

using cplx = std::complex<double>;
using Matrix6c = Eigen::Matrix<cplx, 6, 6>;
using Vector6c = Eigen::Matrix<cplx, 6, 1>;

enum class Geometry { Chain1D, Honeycomb2D };
enum class Branch { NormalPhase, SuperradiantPhase };

/// Physical mode of a unit cell. The value is the particle-sector row of the Nambu basis;
/// the hole-sector row is value + kHoleOffset.
enum class Mode : int { CavityA = 0, CavityB = 1, Spins = 2 };
inline constexpr int kHoleOffset = 3;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kSqrt3 = std::numbers::sqrt3;

/// Lattice constant of the chain and nearest-neighbour distance |a| of the honeycomb lattice.
inline constexpr double kChainLatticeConstant = 1.0;
inline constexpr double kHoneycombBondLength = kSqrt3 / 3.0;

/// Honeycomb Bravais vectors a1 = (1, 0), a2 = (1/2, sqrt(3)/2).
inline constexpr std::array<double, 2> kHoneycombA1{1.0, 0.0};
inline constexpr std::array<double, 2> kHoneycombA2{0.5, kSqrt3 / 2.0};
/// Reciprocal vectors with a_i . b_j = 2 pi delta_ij.
inline constexpr std::array<double, 2> kHoneycombB1{2.0 * kPi, -2.0 * kPi / kSqrt3};
inline constexpr std::array<double, 2> kHoneycombB2{0.0, 4.0 * kPi / kSqrt3};

inline const char* to_string(Geometry g) noexcept {
    return g == Geometry::Chain1D ? "chain" : "honeycomb";
}
inline const char* to_string(Branch b) noexcept {
    return b == Branch::NormalPhase ? "normal" : "superradiant";
}
inline const char* to_string(Mode m) noexcept {
    switch (m) {
    case Mode::CavityA: return "cavity_a";
    case Mode::CavityB: return "cavity_b";
    case Mode::Spins: return "spins";
    }
    return "?";
}

/// Crystal momentum: one component on the chain, (kx, ky) on the honeycomb lattice.
/// Values are kept as given; reduced() folds into the first Brillouin zone on request only.
class WaveVector {
public:
    static WaveVector chain(double k) noexcept { return WaveVector(1, k, 0.0); }
    static WaveVector plane(double kx, double ky) noexcept { return WaveVector(2, kx, ky); }

    [[nodiscard]] int dimension() const noexcept { return dim_; }
    [[nodiscard]] double k() const {
        if (dim_ != 1) throw ContractViolation("WaveVector::k() called on a 2D wave vector");
        return c_[0];
    }
    [[nodiscard]] double kx() const noexcept { return c_[0]; }
    [[nodiscard]] double ky() const noexcept { return c_[1]; }
    [[nodiscard]] bool finite() const noexcept { return std::isfinite(c_[0]) && std::isfinite(c_[1]); }

    [[nodiscard]] WaveVector operator-() const noexcept { return WaveVector(dim_, -c_[0], -c_[1]); }

    /// Chain: k mapped into [-pi, pi). Honeycomb: the reciprocal-lattice image closest to Gamma.
    [[nodiscard]] WaveVector reduced() const {
        if (!finite()) throw ContractViolation("cannot reduce a non-finite wave vector");
        if (dim_ == 1) {
            double r = std::fmod(c_[0] + kPi, 2.0 * kPi);
            if (r < 0) r += 2.0 * kPi;
            return chain(r - kPi);
        }
        // fractional coordinates along b1, b2 (k = s b1 + t b2, s = k.a1 / 2pi, t = k.a2 / 2pi)
        const double s = (c_[0] * kHoneycombA1[0] + c_[1] * kHoneycombA1[1]) / (2.0 * kPi);
        const double t = (c_[0] * kHoneycombA2[0] + c_[1] * kHoneycombA2[1]) / (2.0 * kPi);
        const double s0 = std::floor(s), t0 = std::floor(t);
        double best_x = c_[0], best_y = c_[1], best = INFINITY;
        for (int i = -1; i <= 2; ++i) {
            for (int j = -1; j <= 2; ++j) {
                const double ns = s0 + i, nt = t0 + j;
                const double x = c_[0] - ns * kHoneycombB1[0] - nt * kHoneycombB2[0];
                const double y = c_[1] - ns * kHoneycombB1[1] - nt * kHoneycombB2[1];
                const double d = x * x + y * y;
                if (d < best - 1e-12) {
                    best = d;
                    best_x = x;
                    best_y = y;
                }
            }
        }
        return plane(best_x, best_y);
    }

private:
    WaveVector(int dim, double a, double b) noexcept : dim_(dim), c_{a, b} {}
    int dim_;
    std::array<double, 2> c_;
};

/// Couplings of the extended Dicke-Hubbard lattice, energies in units of omega (hbar = 1).
struct ModelParams {
    double omega_a{1.0};    ///< cavity A
    double omega_b{1.0};    ///< cavity B
    double omega_spin{1.0}; ///< spin splitting Omega
    double zeta{0.0};       ///< cavity-cavity x-x coupling
    double lambda{0.0};     ///< collective spin-field coupling
    Geometry geometry{Geometry::Chain1D};

    [[nodiscard]] int coordination() const noexcept { return geometry == Geometry::Chain1D ? 2 : 3; }

    [[nodiscard]] bool resonant(double tol = 1e-12) const noexcept {
        return std::abs(omega_a - omega_b) <= tol && std::abs(omega_a - omega_spin) <= tol;
    }

    /// Description of the first violated invariant, if any.
    ///
    /// Besides sign constraints the lattice needs max_k |f(k)| < sqrt(omega_a omega_b) / 2 for the
    /// cavity sector to stay bounded below; at resonance on the chain this is |zeta/omega| < 1/4.
    [[nodiscard]] std::optional<std::string> violation() const {
        std::ostringstream os;
        if (!(omega_a > 0) || !(omega_b > 0) || !(omega_spin > 0)) {
            os << "frequencies must be strictly positive (omega_a=" << omega_a << ", omega_b=" << omega_b
               << ", omega_spin=" << omega_spin << ")";
            return os.str();
        }
        if (!(zeta >= 0) || !std::isfinite(zeta)) {
            os << "zeta must be finite and non-negative (zeta=" << zeta << ")";
            return os.str();
        }
        if (!(lambda >= 0) || !std::isfinite(lambda)) {
            os << "lambda must be finite and non-negative (lambda=" << lambda << ")";
            return os.str();
        }
        const double max_f = coordination() * zeta;
        if (!(max_f < 0.5 * std::sqrt(omega_a * omega_b))) {
            if (resonant()) {
                const char* bound = geometry == Geometry::Chain1D ? "1/4" : "1/6";
                os << "|zeta/omega| = " << zeta / omega_a << " violates the validity condition |zeta/omega| < "
                   << bound << ": the Hamiltonian has no normalizable eigenfunctions";
            } else {
                os << "cavity coupling too strong: " << coordination() << "*zeta = " << max_f
                   << " must stay below sqrt(omega_a*omega_b)/2 = " << 0.5 * std::sqrt(omega_a * omega_b);
            }
            return os.str();
        }
        return std::nullopt;
    }

    void validate() const {
        if (auto v = violation()) throw ModelInvalid(*v);
    }

    [[nodiscard]] ModelParams with_lambda(double l) const noexcept {
        ModelParams p = *this;
        p.lambda = l;
        return p;
    }
    [[nodiscard]] ModelParams with_zeta(double z) const noexcept {
        ModelParams p = *this;
        p.zeta = z;
        return p;
    }

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

namespace detail {
inline void require_matching_dimension(const ModelParams& p, const WaveVector& k) {
    const int want = p.geometry == Geometry::Chain1D ? 1 : 2;
    if (k.dimension() != want) {
        std::ostringstream os;
        os << "wave vector has " << k.dimension() << " component(s) but geometry '" << to_string(p.geometry)
           << "' needs " << want;
        throw ContractViolation(os.str());
    }
    if (!k.finite()) throw ContractViolation("wave vector must be finite");
}
} // namespace detail

/// Inter-cavity form factor: -zeta (1 + e^{ik}) on the chain,
/// -zeta (1 + e^{ik.a1} + e^{ik.a2}) on the honeycomb lattice.
[[nodiscard]] inline cplx form_factor(const ModelParams& p, const WaveVector& k) {
    detail::require_matching_dimension(p, k);
    if (p.geometry == Geometry::Chain1D) return -p.zeta * (1.0 + std::polar(1.0, k.k()));
    const double d1 = k.kx() * kHoneycombA1[0] + k.ky() * kHoneycombA1[1];
    const double d2 = k.kx() * kHoneycombA2[0] + k.ky() * kHoneycombA2[1];
    return -p.zeta * (1.0 + std::polar(1.0, d1) + std::polar(1.0, d2));
}

/// |f(k)|^2 in trigonometric closed form (used by the analytic spectra and boundaries).
[[nodiscard]] inline double form_factor_norm2(const ModelParams& p, const WaveVector& k) {
    detail::require_matching_dimension(p, k);
    const double z2 = p.zeta * p.zeta;
    if (p.geometry == Geometry::Chain1D) return 2.0 * z2 * (1.0 + std::cos(k.k()));
    return z2 * (3.0 + 2.0 * std::cos(k.kx()) + 4.0 * std::cos(0.5 * k.kx()) * std::cos(0.5 * kSqrt3 * k.ky()));
}

/// 6x6 Hermitian coefficient matrix of H(k) = 1/2 psi^dagger M psi in the Nambu basis
/// [A(k), B(k), spin(k), A^dagger(-k), B^dagger(-k), spin^dagger(-k)].
struct BlochMatrix {
    WaveVector k;
    Branch branch;
    Matrix6c entries;

    [[nodiscard]] double hermiticity_defect() const { return (entries - entries.adjoint()).cwiseAbs().maxCoeff(); }
};

namespace detail {
/// Both phases share one template: on-site block A and pairing block B, M = [[A, B], [B, A]] with
///   A = [[omega_a, f, g], [f*, omega_b, 0], [g, 0, e_s]],  B = [[0, f, g], [f*, 0, 0], [g, 0, p]].
inline Matrix6c assemble(cplx f, double omega_a, double omega_b, double coupling, double spin_onsite,
                         double spin_pair) {
    Eigen::Matrix<cplx, 3, 3> a;
    a << omega_a, f, coupling, std::conj(f), omega_b, 0.0, coupling, 0.0, spin_onsite;
    Eigen::Matrix<cplx, 3, 3> b;
    b << 0.0, f, coupling, std::conj(f), 0.0, 0.0, coupling, 0.0, spin_pair;
    Matrix6c m;
    m << a, b, b, a;
    return m;
}
} // namespace detail

[[nodiscard]] inline BlochMatrix build_bloch_normal(const ModelParams& p, const WaveVector& k) {
    p.validate();
    const cplx f = form_factor(p, k);
    return {k, Branch::NormalPhase, detail::assemble(f, p.omega_a, p.omega_b, p.lambda, p.omega_spin, 0.0)};
}

enum class DisplacementSign { Plus, Minus };

/// Mean-field displacement of the superradiant phase, stored per sqrt(N).
struct DisplacedFrame {
    double mu{1.0};
    double alpha_n{0.0}; ///< cavity A
    double beta_n{0.0};  ///< spin boson
    double gamma_n{0.0}; ///< cavity B
    double chi{0.0};
    double xi{0.0};
    double eta{0.0};
    DisplacementSign sign{DisplacementSign::Plus};

    [[nodiscard]] double spin_onsite() const noexcept { return chi + 2.0 * eta; }
    [[nodiscard]] double spin_pairing() const noexcept { return 2.0 * eta; }
};

/// mu = Omega (omega_a - 4 zeta^2 / omega_b) / (4 lambda^2). mu <= 1 iff lambda >= lambda_sc.
[[nodiscard]] inline double frame_mu(const ModelParams& p) {
    if (!(p.lambda > 0)) throw ContractViolation("displaced frame needs lambda > 0");
    return p.omega_spin * (p.omega_a - 4.0 * p.zeta * p.zeta / p.omega_b) / (4.0 * p.lambda * p.lambda);
}

inline constexpr double kMuRoundoff = 1e-12;

[[nodiscard]] inline DisplacedFrame displaced_frame(const ModelParams& p,
                                                    DisplacementSign sign = DisplacementSign::Plus) {
    p.validate();
    double mu = frame_mu(p);
    if (!(mu > 0)) throw ModelInvalid("omega_a - 4 zeta^2/omega_b must be positive for a superradiant frame");
    if (mu > 1.0 + kMuRoundoff) {
        std::ostringstream os;
        os << "mu = " << mu << " > 1 at lambda = " << p.lambda
           << ": system is in the normal phase, displacement is not physical";
        throw SuperradiantFrameInvalid(os.str());
    }
    // lambda evaluated at lambda_sc lands a rounding error above 1
    mu = std::min(mu, 1.0);

    const double s = sign == DisplacementSign::Plus ? 1.0 : -1.0;
    DisplacedFrame fr;
    fr.mu = mu;
    fr.sign = sign;
    fr.alpha_n = s * p.omega_spin / (2.0 * mu * p.lambda) * std::sqrt(0.25 * (1.0 - mu * mu));
    fr.beta_n = s * std::sqrt(0.5 * (1.0 - mu));
    fr.gamma_n = 2.0 * p.zeta / p.omega_b * fr.alpha_n;
    fr.chi = p.omega_spin * (1.0 + mu) / (2.0 * mu);
    fr.xi = p.lambda * mu * std::sqrt(2.0 / (1.0 + mu));
    fr.eta = p.omega_spin * (1.0 - mu) * (3.0 + mu) / (8.0 * mu * (1.0 + mu));
    return fr;
}

/// Fluctuation matrix around the displaced ground state. The quadratic form does not depend on the
/// displacement sign. f sits in the upper triangle and f* in the lower one, as in the normal phase.
[[nodiscard]] inline BlochMatrix build_bloch_super(const ModelParams& p, const WaveVector& k) {
    const DisplacedFrame fr = displaced_frame(p);
    const cplx f = form_factor(p, k);
    return {k, Branch::SuperradiantPhase,
            detail::assemble(f, p.omega_a, p.omega_b, fr.xi, fr.spin_onsite(), fr.spin_pairing())};
}

[[nodiscard]] inline BlochMatrix build_bloch(const ModelParams& p, const WaveVector& k, Branch b) {
    return b == Branch::NormalPhase ? build_bloch_normal(p, k) : build_bloch_super(p, k);
}

} // namespace dhl
