#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "dhl/bogoliubov.hpp"
#include "dhl/model.hpp"
#include "dhl/parallel.hpp"

namespace dhl {

// ---------------------------------------------------------------------------------------------
// k grids

/// n points from k_min to k_max inclusive (band-structure paths).
[[nodiscard]] inline std::vector<WaveVector> chain_path(std::size_t n, double k_min = -kPi, double k_max = kPi) {
    if (n < 2) throw ContractViolation("chain_path needs at least two points");
    std::vector<WaveVector> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        out.push_back(WaveVector::chain(k_min + (k_max - k_min) * static_cast<double>(i) / static_cast<double>(n - 1)));
    return out;
}

/// Uniform periodic sampling of the chain's Brillouin zone, k_j = -pi + 2 pi j / n.
[[nodiscard]] inline std::vector<WaveVector> chain_brillouin_samples(std::size_t n = 1024) {
    if (n == 0) throw ContractViolation("chain_brillouin_samples: n must be positive");
    std::vector<WaveVector> out;
    out.reserve(n);
    for (std::size_t j = 0; j < n; ++j)
        out.push_back(WaveVector::chain(-kPi + 2.0 * kPi * static_cast<double>(j) / static_cast<double>(n)));
    return out;
}

/// Monkhorst-Pack mesh k = u1 b1 + u2 b2, u_r = (2r - q - 1) / (2q).
[[nodiscard]] inline std::vector<WaveVector> honeycomb_mesh(std::size_t n1 = 256, std::size_t n2 = 256) {
    if (n1 == 0 || n2 == 0) throw ContractViolation("honeycomb_mesh: sizes must be positive");
    std::vector<WaveVector> out;
    out.reserve(n1 * n2);
    for (std::size_t j = 1; j <= n2; ++j) {
        const double u2 = (2.0 * static_cast<double>(j) - static_cast<double>(n2) - 1.0) / (2.0 * static_cast<double>(n2));
        for (std::size_t i = 1; i <= n1; ++i) {
            const double u1 = (2.0 * static_cast<double>(i) - static_cast<double>(n1) - 1.0) / (2.0 * static_cast<double>(n1));
            out.push_back(WaveVector::plane(u1 * kHoneycombB1[0] + u2 * kHoneycombB2[0],
                                            u1 * kHoneycombB1[1] + u2 * kHoneycombB2[1]));
        }
    }
    return out;
}

/// Rectangular nx x ny grid with inclusive edges, kx fastest.
[[nodiscard]] inline std::vector<WaveVector> plane_grid(double kx_min, double kx_max, std::size_t nx, double ky_min,
                                                        double ky_max, std::size_t ny) {
    if (nx < 2 || ny < 2) throw ContractViolation("plane_grid needs at least 2x2 points");
    std::vector<WaveVector> out;
    out.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j)
        for (std::size_t i = 0; i < nx; ++i)
            out.push_back(WaveVector::plane(kx_min + (kx_max - kx_min) * static_cast<double>(i) / static_cast<double>(nx - 1),
                                            ky_min + (ky_max - ky_min) * static_cast<double>(j) / static_cast<double>(ny - 1)));
    return out;
}

// ---------------------------------------------------------------------------------------------
// band structures

/// Energies and quasiparticle modes along a path. Unstable points keep their complex
/// branch energies and zero modes.
struct BandStructure {
    std::vector<WaveVector> path;
    Branch branch{Branch::NormalPhase};
    std::vector<std::array<cplx, 3>> bands;
    std::vector<std::array<Vector6c, 3>> modes;
    std::vector<bool> stable;

    [[nodiscard]] std::size_t size() const noexcept { return path.size(); }
    [[nodiscard]] std::size_t stable_count() const noexcept {
        return static_cast<std::size_t>(std::count(stable.begin(), stable.end(), true));
    }
    [[nodiscard]] bool all_stable() const noexcept { return stable_count() == size(); }
};

/// Two bands closer than this are matched to the previous path point by mode overlap.
inline constexpr double kContinuityWindow = 1e-6;

namespace detail {
inline void enforce_continuity(BandStructure& bs) {
    for (std::size_t i = 1; i < bs.size(); ++i) {
        if (!bs.stable[i] || !bs.stable[i - 1]) continue;
        auto& e = bs.bands[i];
        auto& m = bs.modes[i];
        std::size_t start = 0;
        while (start < 3) {
            std::size_t end = start + 1;
            while (end < 3 && std::abs(e[end].real() - e[end - 1].real()) < kContinuityWindow) ++end;
            if (end - start > 1) {
                std::array<std::size_t, 3> perm{0, 1, 2};
                std::array<std::size_t, 3> best = perm;
                double best_score = -1.0;
                do {
                    bool fixed_outside = true;
                    for (std::size_t s = 0; s < 3; ++s)
                        if ((s < start || s >= end) && perm[s] != s) fixed_outside = false;
                    if (!fixed_outside) continue;
                    double score = 0.0;
                    for (std::size_t s = start; s < end; ++s) {
                        const Vector6c& a = bs.modes[i - 1][s];
                        const Vector6c& b = m[perm[s]];
                        cplx ov = 0.0;
                        for (int r = 0; r < 6; ++r) ov += tau_z_diag()[r] * std::conj(a[r]) * b[r];
                        score += std::abs(ov);
                    }
                    if (score > best_score + 1e-12) {
                        best_score = score;
                        best = perm;
                    }
                } while (std::next_permutation(perm.begin(), perm.end()));
                const auto e_old = e;
                const auto m_old = m;
                for (std::size_t s = start; s < end; ++s) {
                    e[s] = e_old[best[s]];
                    m[s] = m_old[best[s]];
                }
            }
            start = end;
        }
    }
}
} // namespace detail

/// Diagonalize at every path point of the given phase branch. Stable neighbours inside the
/// continuity window keep their band labels by maximal tau_z overlap with the previous point.
[[nodiscard]] inline BandStructure band_sweep(const ModelParams& p, const std::vector<WaveVector>& path, Branch branch,
                                              unsigned threads = 0) {
    p.validate();
    if (branch == Branch::SuperradiantPhase) (void)displaced_frame(p);
    for (const auto& k : path) detail::require_matching_dimension(p, k);

    BandStructure bs;
    bs.path = path;
    bs.branch = branch;
    bs.bands.resize(path.size());
    bs.modes.resize(path.size());
    std::vector<char> ok(path.size(), 0);
    parallel_for(
        path.size(),
        [&](std::size_t i) {
            const BandSolution s = diagonalize(build_bloch(p, path[i], branch));
            bs.bands[i] = s.branch_energies;
            for (int l = 0; l < 3; ++l) bs.modes[i][l] = s.stable ? s.mode(l) : Vector6c::Zero().eval();
            ok[i] = s.stable ? 1 : 0;
        },
        threads);
    bs.stable.assign(ok.begin(), ok.end());
    detail::enforce_continuity(bs);
    return bs;
}

struct FlatBand {
    int band;
    double mean_energy;
    double flatness; ///< max - min over the path
};

[[nodiscard]] inline std::array<double, 3> band_flatness(const BandStructure& bs) {
    std::array<double, 3> out{};
    for (int l = 0; l < 3; ++l) {
        double lo = INFINITY, hi = -INFINITY;
        for (const auto& e : bs.bands) {
            lo = std::min(lo, e[l].real());
            hi = std::max(hi, e[l].real());
        }
        out[l] = bs.bands.empty() ? 0.0 : hi - lo;
    }
    return out;
}

[[nodiscard]] inline std::vector<FlatBand> detect_flat_bands(const BandStructure& bs, double tol) {
    if (!bs.all_stable()) {
        std::ostringstream os;
        os << "flat-band detection needs a stable sweep (" << bs.size() - bs.stable_count() << " of " << bs.size()
           << " points unstable)";
        throw UnstableSolution(os.str());
    }
    std::vector<FlatBand> out;
    const auto flat = band_flatness(bs);
    for (int l = 0; l < 3; ++l) {
        if (!(flat[l] < tol)) continue;
        double mean = 0.0;
        for (const auto& e : bs.bands) mean += e[l].real();
        out.push_back({l, bs.bands.empty() ? 0.0 : mean / static_cast<double>(bs.size()), flat[l]});
    }
    return out;
}

// ---------------------------------------------------------------------------------------------
// local density of states and real-space profiles

/// Share of each physical mode in the particle sector of a quasiparticle:
/// |u_n|^2 / sum_m |u_m|^2. The three shares add up to one.
[[nodiscard]] inline std::array<double, 3> mode_shares(const Vector6c& mode) {
    std::array<double, 3> w{std::norm(mode[0]), std::norm(mode[1]), std::norm(mode[2])};
    const double s = w[0] + w[1] + w[2];
    for (auto& x : w) x /= s;
    return w;
}

struct BandSelector {
    std::array<bool, 3> bands{false, true, false};

    static BandSelector lower() noexcept { return {{true, false, false}}; }
    static BandSelector middle() noexcept { return {{false, true, false}}; }
    static BandSelector upper() noexcept { return {{false, false, true}}; }
    static BandSelector all() noexcept { return {{true, true, true}}; }
    [[nodiscard]] int count() const noexcept { return int(bands[0]) + int(bands[1]) + int(bands[2]); }
};

struct EnergyBins {
    double e_min{0.5};
    double e_max{1.5};
    int count{400};
};

struct LdosHistogram {
    Mode mode{Mode::CavityA};
    BandSelector band_selector;
    std::vector<double> bin_edges;
    /// Broadened spectral weight integrated over each bin.
    std::vector<double> weights;
    double broadening{0.005};
    std::size_t stable_samples{0};
    std::size_t excluded_samples{0};
    /// Weight of quasiparticles whose broadened peak lies entirely outside the energy window.
    double dropped_weight{0.0};

    [[nodiscard]] double total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }
    [[nodiscard]] std::vector<double> density() const {
        std::vector<double> d(weights.size());
        for (std::size_t i = 0; i < weights.size(); ++i) d[i] = weights[i] / (bin_edges[i + 1] - bin_edges[i]);
        return d;
    }
};

/// LDOS of all three modes from one set of diagonalizations, indexed by Mode.
///
/// Each stable (k, band) contributes its mode shares, spread by a Gaussian of width sigma that is
/// integrated over every bin and renormalized to the mass inside [e_min, e_max]. Unstable k are
/// skipped and counted.
[[nodiscard]] inline std::array<LdosHistogram, 3> ldos_all_modes(const ModelParams& p, Branch branch,
                                                                 BandSelector selector,
                                                                 const std::vector<WaveVector>& k_samples,
                                                                 EnergyBins bins = {}, double sigma = 0.005,
                                                                 unsigned threads = 0) {
    if (!(sigma > 0)) throw ContractViolation("ldos: sigma must be positive");
    if (bins.count < 1 || !(bins.e_max > bins.e_min)) throw ContractViolation("ldos: invalid energy bins");
    if (selector.count() == 0) throw ContractViolation("ldos: no band selected");
    if (k_samples.empty()) throw ContractViolation("ldos: no k samples");

    const BandStructure bs = band_sweep(p, k_samples, branch, threads);
    if (bs.stable_count() == 0) throw NoStableSamples("ldos: every sampled k is unstable");

    std::array<LdosHistogram, 3> out;
    std::vector<double> edges(static_cast<std::size_t>(bins.count) + 1);
    for (int i = 0; i <= bins.count; ++i) edges[i] = bins.e_min + (bins.e_max - bins.e_min) * i / bins.count;
    for (int n = 0; n < 3; ++n) {
        out[n].mode = static_cast<Mode>(n);
        out[n].band_selector = selector;
        out[n].bin_edges = edges;
        out[n].weights.assign(static_cast<std::size_t>(bins.count), 0.0);
        out[n].broadening = sigma;
        out[n].stable_samples = bs.stable_count();
        out[n].excluded_samples = bs.size() - bs.stable_count();
    }

    const double inv = 1.0 / (sigma * std::sqrt(2.0));
    std::vector<double> kernel(static_cast<std::size_t>(bins.count));
    // sequential in k so the floating-point reduction order is fixed
    for (std::size_t i = 0; i < bs.size(); ++i) {
        if (!bs.stable[i]) continue;
        for (int l = 0; l < 3; ++l) {
            if (!selector.bands[l]) continue;
            const double e = bs.bands[i][l].real();
            const auto share = mode_shares(bs.modes[i][l]);
            const double mass = 0.5 * (std::erf((bins.e_max - e) * inv) - std::erf((bins.e_min - e) * inv));
            if (!(mass > 1e-300)) {
                for (int n = 0; n < 3; ++n) out[n].dropped_weight += share[n];
                continue;
            }
            for (int b = 0; b < bins.count; ++b)
                kernel[b] = 0.5 * (std::erf((edges[b + 1] - e) * inv) - std::erf((edges[b] - e) * inv)) / mass;
            for (int n = 0; n < 3; ++n) {
                if (share[n] == 0.0) continue;
                for (int b = 0; b < bins.count; ++b) out[n].weights[b] += share[n] * kernel[b];
            }
        }
    }
    return out;
}

[[nodiscard]] inline LdosHistogram ldos(const ModelParams& p, Branch branch, Mode mode, BandSelector selector,
                                        const std::vector<WaveVector>& k_samples, EnergyBins bins = {},
                                        double sigma = 0.005, unsigned threads = 0) {
    return ldos_all_modes(p, branch, selector, k_samples, bins, sigma, threads)[static_cast<int>(mode)];
}

struct SiteWeight {
    int cell;
    Mode family;
    double weight;
};

/// Occupation pattern of one band in real space: k-averaged mode shares, identical in every cell.
struct RealSpaceProfile {
    int cells{0};
    std::array<double, 3> family_weight{};
    std::vector<SiteWeight> sites;

    [[nodiscard]] double weight(Mode m) const { return family_weight[static_cast<int>(m)]; }
};

[[nodiscard]] inline RealSpaceProfile real_space_profile(const ModelParams& p, Branch branch, int band, int cells,
                                                         const std::vector<WaveVector>& k_samples,
                                                         unsigned threads = 0) {
    if (band < 0 || band > 2) throw ContractViolation("real_space_profile: band index must be 0, 1 or 2");
    if (cells < 1) throw ContractViolation("real_space_profile: need at least one cell");
    if (k_samples.empty()) throw ContractViolation("real_space_profile: no k samples");
    const BandStructure bs = band_sweep(p, k_samples, branch, threads);
    if (!bs.all_stable()) throw UnstableSolution("real_space_profile: band is unstable on part of the zone");

    RealSpaceProfile rp;
    rp.cells = cells;
    for (std::size_t i = 0; i < bs.size(); ++i) {
        const auto s = mode_shares(bs.modes[i][band]);
        for (int n = 0; n < 3; ++n) rp.family_weight[n] += s[n];
    }
    for (auto& w : rp.family_weight) w /= static_cast<double>(bs.size());
    rp.sites.reserve(static_cast<std::size_t>(cells) * 3);
    for (int c = 0; c < cells; ++c)
        for (int n = 0; n < 3; ++n) rp.sites.push_back({c, static_cast<Mode>(n), rp.family_weight[n]});
    return rp;
}

} // namespace dhl
