#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "dhl/bogoliubov.hpp"
#include "dhl/model.hpp"
#include "dhl/parallel.hpp"

namespace dhl {

enum class RegionLabel : std::uint8_t { Normal, Superradiant, Overlap, Unstable };

inline const char* to_string(RegionLabel r) noexcept {
    switch (r) {
    case RegionLabel::Normal: return "Normal";
    case RegionLabel::Superradiant: return "Superradiant";
    case RegionLabel::Overlap: return "Overlap";
    case RegionLabel::Unstable: return "Unstable";
    }
    return "?";
}

/// Absolute tolerance in lambda of the numerical boundary searches.
inline constexpr double kBoundaryTolerance = 1e-10;

/// Critical coupling of an isolated unit cell, sqrt(Omega (omega_a - 4 zeta^2 / omega_b)) / 2.
[[nodiscard]] inline double lambda_sc(const ModelParams& p) {
    const double radicand = p.omega_spin * (p.omega_a - 4.0 * p.zeta * p.zeta / p.omega_b);
    if (!(radicand > 0)) {
        std::ostringstream os;
        os << "lambda_sc undefined: omega_a - 4 zeta^2/omega_b = " << p.omega_a - 4.0 * p.zeta * p.zeta / p.omega_b
           << " <= 0 (cavity-cavity coupling too strong)";
        throw ModelInvalid(os.str());
    }
    return 0.5 * std::sqrt(radicand);
}

/// Normal-phase boundary located numerically: the lambda at which the smallest eigenvalue of
/// M_nor crosses zero (equivalently the lowest excitation energy closes). Works off resonance.
[[nodiscard]] inline double boundary_normal_numeric(const ModelParams& p, const WaveVector& k) {
    p.validate();
    auto min_eig = [&](double l) {
        const BlochMatrix m = build_bloch_normal(p.with_lambda(l), k);
        Eigen::SelfAdjointEigenSolver<Matrix6c> sa(m.entries, Eigen::EigenvaluesOnly);
        return sa.eigenvalues()[0];
    };
    if (!(min_eig(0.0) > 0)) throw ModelInvalid("normal phase unstable already at lambda = 0");
    double hi = 0.5 * std::sqrt(p.omega_a * p.omega_spin) + 1e-3;
    int grow = 0;
    while (min_eig(hi) > 0) {
        hi *= 2.0;
        if (++grow > 60) throw BoundaryNotFound("normal phase never destabilizes");
    }
    std::uintmax_t iters = 200;
    auto r = boost::math::tools::toms748_solve(min_eig, 0.0, hi, boost::math::tools::eps_tolerance<double>(50),
                                               iters);
    return 0.5 * (r.first + r.second);
}

/// Coupling at which the lowest normal-phase excitation closes at k.
/// Resonant case: lambda_c(k) = sqrt(omega^2/4 - |f(k)|^2); otherwise a numerical root.
[[nodiscard]] inline double boundary_normal(const ModelParams& p, const WaveVector& k) {
    p.validate();
    if (!p.resonant()) return boundary_normal_numeric(p, k);
    const double w = p.omega_a;
    const double radicand = 0.25 * w * w - form_factor_norm2(p, k);
    if (radicand < 0) throw ModelInvalid("normal phase has no stable region at this k (|f(k)| > omega/2)");
    return std::sqrt(radicand);
}

/// True when the mean-field displacement exists (mu <= 1) and the fluctuations around it are stable.
[[nodiscard]] inline bool superradiant_stable(const ModelParams& p, const WaveVector& k) {
    if (!(p.lambda > 0) || frame_mu(p) > 1.0 + kMuRoundoff) return false;
    return diagonalize(build_bloch_super(p, k)).stable;
}

[[nodiscard]] inline bool normal_stable(const ModelParams& p, const WaveVector& k) {
    return diagonalize(build_bloch_normal(p, k)).stable;
}

/// Smallest lambda >= lambda_sc at which the superradiant fluctuation spectrum at k is real and
/// positive. Bisection on the stability flag over [lambda_sc, 4 lambda_sc]; returns lambda_sc when
/// the phase is stable as soon as the displacement appears (overlap zones).
[[nodiscard]] inline double boundary_super(const ModelParams& p, const WaveVector& k) {
    p.validate();
    const double lo = lambda_sc(p);
    const double hi = 4.0 * lo;
    auto stable_at = [&](double l) { return superradiant_stable(p.with_lambda(l), k); };
    if (stable_at(lo)) return lo;
    if (!stable_at(hi)) {
        std::ostringstream os;
        os << "superradiant boundary not bracketed in [" << lo << ", " << hi << "] at k=(" << k.kx();
        if (k.dimension() == 2) os << ", " << k.ky();
        const BandSolution s = diagonalize(build_bloch_super(p.with_lambda(hi), k));
        os << "): lowest branch energy at upper end " << s.branch_energies[0].real() << (s.branch_energies[0].imag() >= 0 ? "+" : "")
           << s.branch_energies[0].imag() << "i";
        throw BoundaryNotFound(os.str());
    }
    auto indicator = [&](double l) { return stable_at(l) ? 1.0 : -1.0; };
    auto r = boost::math::tools::bisect(indicator, lo, hi,
                                        [](double a, double b) { return std::abs(b - a) <= kBoundaryTolerance; });
    return r.second;
}

enum class CrossingKind { P, Q };

struct CrossingPoint {
    int n;
    CrossingKind kind;
    double k;
};

/// k-coordinates where the chain's two boundaries meet at lambda_sc:
/// P_n = 2 n pi - 4 pi / 3 and Q_n = 2 n pi - 2 pi / 3 (cos k = -1/2).
[[nodiscard]] inline std::vector<CrossingPoint> crossing_points(int n_min, int n_max) {
    if (n_min > n_max) throw ContractViolation("crossing_points: n_min > n_max");
    std::vector<CrossingPoint> out;
    out.reserve(2 * static_cast<std::size_t>(n_max - n_min + 1));
    for (int n = n_min; n <= n_max; ++n) {
        out.push_back({n, CrossingKind::P, 2.0 * n * kPi - 4.0 * kPi / 3.0});
        out.push_back({n, CrossingKind::Q, 2.0 * n * kPi - 2.0 * kPi / 3.0});
    }
    return out;
}

/// Normal when only the normal phase is stable, Superradiant when only the displaced one is,
/// Overlap when both are and Unstable when neither is. Boundary points come out Unstable.
[[nodiscard]] inline RegionLabel classify(const ModelParams& p, const WaveVector& k, double lambda) {
    const ModelParams q = p.with_lambda(lambda);
    const bool nor = normal_stable(q, k);
    const bool sup = superradiant_stable(q, k);
    if (nor && sup) return RegionLabel::Overlap;
    if (nor) return RegionLabel::Normal;
    if (sup) return RegionLabel::Superradiant;
    return RegionLabel::Unstable;
}

/// Region labels and lowest excitation energies on a (k, lambda) grid.
/// Arrays are lambda-major: index = i_lambda * k_axis.size() + i_k.
struct PhaseDiagram {
    std::vector<WaveVector> k_axis;
    std::vector<double> lambda_axis;
    std::vector<RegionLabel> labels;
    std::vector<cplx> lowest_energy_nor;
    /// NaN where mu > 1 (no displaced frame).
    std::vector<cplx> lowest_energy_sup;

    [[nodiscard]] std::size_t index(std::size_t ik, std::size_t il) const noexcept { return il * k_axis.size() + ik; }
    [[nodiscard]] RegionLabel label(std::size_t ik, std::size_t il) const { return labels.at(index(ik, il)); }
    [[nodiscard]] std::size_t count(RegionLabel r) const noexcept {
        return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), r));
    }
};

[[nodiscard]] inline PhaseDiagram scan(const ModelParams& p, const std::vector<WaveVector>& k_grid,
                                       const std::vector<double>& lambda_grid, unsigned threads = 0) {
    if (k_grid.empty() || lambda_grid.empty()) throw ContractViolation("scan: grids must be non-empty");
    p.validate();
    for (const auto& k : k_grid) detail::require_matching_dimension(p, k);

    PhaseDiagram pd{k_grid, lambda_grid, {}, {}, {}};
    const std::size_t n = k_grid.size() * lambda_grid.size();
    pd.labels.assign(n, RegionLabel::Unstable);
    pd.lowest_energy_nor.assign(n, cplx{});
    const double nan = std::numeric_limits<double>::quiet_NaN();
    pd.lowest_energy_sup.assign(n, cplx(nan, nan));

    parallel_for(
        n,
        [&](std::size_t idx) {
            const std::size_t ik = idx % k_grid.size();
            const std::size_t il = idx / k_grid.size();
            const ModelParams q = p.with_lambda(lambda_grid[il]);
            const BandSolution nor = diagonalize(build_bloch_normal(q, k_grid[ik]));
            pd.lowest_energy_nor[idx] = nor.branch_energies[0];
            bool sup_stable = false;
            if (q.lambda > 0 && frame_mu(q) <= 1.0 + kMuRoundoff) {
                const BandSolution sup = diagonalize(build_bloch_super(q, k_grid[ik]));
                pd.lowest_energy_sup[idx] = sup.branch_energies[0];
                sup_stable = sup.stable;
            }
            pd.labels[idx] = nor.stable ? (sup_stable ? RegionLabel::Overlap : RegionLabel::Normal)
                                        : (sup_stable ? RegionLabel::Superradiant : RegionLabel::Unstable);
        },
        threads);
    return pd;
}

/// g(kx, ky) = cos kx + 2 cos(kx/2) cos(sqrt3 ky/2) + 1. Its zero set is where |f_2D|^2 = zeta^2,
/// i.e. where both honeycomb boundaries touch the plane lambda = lambda_sc.
[[nodiscard]] inline double honeycomb_contact_function(double kx, double ky) noexcept {
    return std::cos(kx) + 2.0 * std::cos(0.5 * kx) * std::cos(0.5 * kSqrt3 * ky) + 1.0;
}

struct KWindow {
    double kx_min, kx_max, ky_min, ky_max;

    /// Rectangle enclosing the hexagonal first Brillouin zone.
    static KWindow first_brillouin_zone() noexcept {
        return {-4.0 * kPi / 3.0, 4.0 * kPi / 3.0, -2.0 * kPi / kSqrt3, 2.0 * kPi / kSqrt3};
    }
    [[nodiscard]] bool empty() const noexcept { return !(kx_max > kx_min) || !(ky_max > ky_min); }
};

struct ContourCurve {
    std::vector<std::array<double, 2>> points;
    /// Marching-squares segments as index pairs into points.
    std::vector<std::array<std::size_t, 2>> segments;
    double cell_x{0.0}, cell_y{0.0};
};

inline constexpr int kNewtonMaxIterations = 5;

/// Zero level set of honeycomb_contact_function by marching squares on an nx x ny vertex grid,
/// each edge crossing refined by Newton steps along the gradient.
[[nodiscard]] inline ContourCurve intersection_curve_2d(const KWindow& w, int nx = 512, int ny = 512) {
    if (nx < 8 || ny < 8) throw ContractViolation("intersection_curve_2d: resolution must be >= 8");
    ContourCurve c;
    if (w.empty()) return c;
    const double hx = (w.kx_max - w.kx_min) / (nx - 1);
    const double hy = (w.ky_max - w.ky_min) / (ny - 1);
    c.cell_x = hx;
    c.cell_y = hy;

    std::vector<double> g(static_cast<std::size_t>(nx) * ny);
    auto at = [&](int i, int j) -> double& { return g[static_cast<std::size_t>(j) * nx + i]; };
    auto xof = [&](int i) { return w.kx_min + i * hx; };
    auto yof = [&](int j) { return w.ky_min + j * hy; };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) at(i, j) = honeycomb_contact_function(xof(i), yof(j));

    auto refine = [](double x, double y) -> std::array<double, 2> {
        for (int it = 0; it < kNewtonMaxIterations; ++it) {
            const double v = honeycomb_contact_function(x, y);
            if (std::abs(v) < 1e-14) break;
            const double gx = -std::sin(x) - std::sin(0.5 * x) * std::cos(0.5 * kSqrt3 * y);
            const double gy = -kSqrt3 * std::cos(0.5 * x) * std::sin(0.5 * kSqrt3 * y);
            const double n2 = gx * gx + gy * gy;
            if (n2 < 1e-300) break;
            x -= v * gx / n2;
            y -= v * gy / n2;
        }
        return {x, y};
    };
    const auto inside = [](double v) { return v >= 0.0; };
    constexpr std::size_t none = std::numeric_limits<std::size_t>::max();

    // one point per crossed edge; horizontal edges (i,j)-(i+1,j) then vertical (i,j)-(i,j+1)
    std::vector<std::size_t> hedge(static_cast<std::size_t>(nx) * ny, none), vedge(hedge.size(), none);
    auto crossing = [&](double x0, double y0, double v0, double x1, double y1, double v1) {
        const double t = v0 / (v0 - v1);
        c.points.push_back(refine(x0 + t * (x1 - x0), y0 + t * (y1 - y0)));
        return c.points.size() - 1;
    };
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const std::size_t id = static_cast<std::size_t>(j) * nx + i;
            if (i + 1 < nx && inside(at(i, j)) != inside(at(i + 1, j)))
                hedge[id] = crossing(xof(i), yof(j), at(i, j), xof(i + 1), yof(j), at(i + 1, j));
            if (j + 1 < ny && inside(at(i, j)) != inside(at(i, j + 1)))
                vedge[id] = crossing(xof(i), yof(j), at(i, j), xof(i), yof(j + 1), at(i, j + 1));
        }

    for (int j = 0; j + 1 < ny; ++j)
        for (int i = 0; i + 1 < nx; ++i) {
            const std::size_t id = static_cast<std::size_t>(j) * nx + i;
            // edges in cyclic order: bottom, right, top, left
            const std::array<std::size_t, 4> e{hedge[id], vedge[id + 1], hedge[id + nx], vedge[id]};
            std::vector<std::size_t> hit;
            for (auto x : e)
                if (x != none) hit.push_back(x);
            if (hit.size() == 2) {
                c.segments.push_back({hit[0], hit[1]});
            } else if (hit.size() == 4) {
                // saddle: the centre value decides which corners connect
                const double centre = honeycomb_contact_function(xof(i) + 0.5 * hx, yof(j) + 0.5 * hy);
                if (inside(centre) == inside(at(i, j))) {
                    c.segments.push_back({e[0], e[1]});
                    c.segments.push_back({e[2], e[3]});
                } else {
                    c.segments.push_back({e[0], e[3]});
                    c.segments.push_back({e[1], e[2]});
                }
            }
        }
    return c;
}

} // namespace dhl
