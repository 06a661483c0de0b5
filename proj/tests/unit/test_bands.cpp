#include <gtest/gtest.h>

#include <random>

#include "dhl/bands.hpp"
#include "dhl/phase.hpp"
#include "oracles.hpp"

using namespace dhl;
using dhl::testing::chain;
using dhl::testing::honeycomb;

TEST(Grids, Shapes) {
    const auto path = chain_path(5);
    ASSERT_EQ(path.size(), 5u);
    EXPECT_DOUBLE_EQ(path.front().k(), -kPi);
    EXPECT_DOUBLE_EQ(path.back().k(), kPi);
    const auto bz = chain_brillouin_samples(8);
    EXPECT_DOUBLE_EQ(bz[4].k(), 0.0);
    EXPECT_EQ(honeycomb_mesh(4, 6).size(), 24u);
    EXPECT_EQ(plane_grid(0, 1, 3, 0, 1, 4).size(), 12u);
    EXPECT_THROW((void)chain_path(1), ContractViolation);
}

TEST(BandSweep, NormalPhaseChain) {
    const auto p = chain(0.18, 0.3);
    const auto bs = band_sweep(p, chain_path(1025), Branch::NormalPhase);
    ASSERT_TRUE(bs.all_stable());
    double lowest = INFINITY;
    for (const auto& e : bs.bands) {
        EXPECT_NEAR(e[1].real(), 1.0, 1e-10);
        lowest = std::min(lowest, e[0].real());
    }
    // minimum at k = 0 where |f|^2 = 4 zeta^2
    EXPECT_NEAR(lowest, std::sqrt(1.0 - 2.0 * std::sqrt(4 * 0.18 * 0.18 + 0.09)), 1e-10);
    EXPECT_NEAR(lowest, 0.2505394956712445, 1e-10);
}

TEST(BandSweep, SuperradiantBandsDisperse) {
    const auto bs = band_sweep(chain(0.18, 0.542), chain_path(513), Branch::SuperradiantPhase);
    ASSERT_TRUE(bs.all_stable());
    const auto flat = band_flatness(bs);
    EXPECT_GT(flat[1], 1e-3);
    for (double f : flat) EXPECT_GT(f, 1e-3);
}

TEST(BandSweep, DecoupledLimitIsTriplyFlat) {
    const auto bs = band_sweep(chain(0.0, 0.0), chain_path(65), Branch::NormalPhase);
    for (const auto& e : bs.bands)
        for (const auto& x : e) EXPECT_NEAR(x.real(), 1.0, 1e-14);
    EXPECT_EQ(detect_flat_bands(bs, 1e-12).size(), 3u);
}

TEST(BandSweep, RejectsMissingSuperradiantFrame) {
    EXPECT_THROW((void)band_sweep(chain(0.18, 0.3), chain_path(8), Branch::SuperradiantPhase), SuperradiantFrameInvalid);
}

TEST(BandSweep, ContinuousAcrossTouchingBands) {
    // lambda = 0: all three bands meet at k = pi
    const auto bs = band_sweep(chain(0.18, 0.0), chain_path(801, 0.0, 2 * kPi), Branch::NormalPhase);
    ASSERT_TRUE(bs.all_stable());
    for (std::size_t i = 1; i < bs.size(); ++i)
        for (int l = 0; l < 3; ++l) EXPECT_LT(std::abs(bs.bands[i][l] - bs.bands[i - 1][l]), 0.02) << i;
}

TEST(BandSweep, AsymmetricAroundFlatBand) {
    const auto bs = band_sweep(chain(0.18, 0.3), chain_path(33), Branch::NormalPhase);
    for (const auto& e : bs.bands) {
        const double up = e[2].real() - 1.0, down = 1.0 - e[0].real();
        EXPECT_GT(std::abs(up - down), 1e-3);
    }
}

TEST(BandSweep, KeepsComplexBranchWhenUnstable) {
    const auto bs = band_sweep(chain(0.18, 0.4), chain_path(65), Branch::NormalPhase);
    EXPECT_FALSE(bs.all_stable());
    EXPECT_GT(bs.stable_count(), 0u);
    const std::size_t mid = 32; // k = 0
    EXPECT_FALSE(bs.stable[mid]);
    EXPECT_GT(bs.bands[mid][0].imag(), 0.0);
    EXPECT_NEAR(bs.bands[mid][1].real(), 1.0, 1e-10);
    EXPECT_THROW((void)detect_flat_bands(bs, 1e-9), UnstableSolution);
}

TEST(FlatBands, Detection) {
    const auto nor = detect_flat_bands(band_sweep(chain(0.18, 0.3), chain_brillouin_samples(1024), Branch::NormalPhase), 1e-9);
    ASSERT_EQ(nor.size(), 1u);
    EXPECT_EQ(nor[0].band, 1);
    EXPECT_NEAR(nor[0].mean_energy, 1.0, 1e-10);
    EXPECT_LT(nor[0].flatness, 1e-10);

    EXPECT_TRUE(detect_flat_bands(band_sweep(chain(0.18, 0.542), chain_brillouin_samples(256), Branch::SuperradiantPhase), 1e-6)
                    .empty());

    const auto two_d = detect_flat_bands(band_sweep(honeycomb(0.12, 0.34), honeycomb_mesh(32, 32), Branch::NormalPhase), 1e-9);
    ASSERT_EQ(two_d.size(), 1u);
    EXPECT_NEAR(two_d[0].mean_energy, 1.0, 1e-10);

    const auto two_d_sup = band_sweep(honeycomb(0.12, 0.58), honeycomb_mesh(24, 24), Branch::SuperradiantPhase);
    ASSERT_TRUE(two_d_sup.all_stable());
    EXPECT_TRUE(detect_flat_bands(two_d_sup, 1e-6).empty());
}

TEST(FlatBands, RobustAcrossNormalPhase) {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> zd(0.0, 0.24), u(0.0, 0.98);
    const auto ks = chain_brillouin_samples(128);
    for (int i = 0; i < 40; ++i) {
        const double z = zd(rng);
        const double l = u(rng) * std::sqrt(0.25 - 4 * z * z);
        const auto bs = band_sweep(chain(z, l), ks, Branch::NormalPhase);
        ASSERT_TRUE(bs.all_stable());
        EXPECT_LT(band_flatness(bs)[1], 1e-10) << z << " " << l;
    }
}

TEST(Ldos, DarkCavityInNormalPhase) {
    const auto ks = chain_brillouin_samples(1024);
    const auto h = ldos_all_modes(chain(0.18, 0.3), Branch::NormalPhase, BandSelector::middle(), ks);
    const double total = h[0].total() + h[1].total() + h[2].total();
    EXPECT_NEAR(total, 1024.0, 1e-6);
    EXPECT_LT(h[0].total(), 1e-10 * total);
    EXPECT_GT(h[1].total(), 0.1 * total);
    EXPECT_GT(h[2].total(), 0.1 * total);

    // cavity B: a single peak centred on omega
    const auto& w = h[1].weights;
    const auto peak = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
    const double centre = 0.5 * (h[1].bin_edges[peak] + h[1].bin_edges[peak + 1]);
    EXPECT_LT(std::abs(centre - 1.0), h[1].bin_edges[1] - h[1].bin_edges[0]);
    for (std::size_t b = 0; b < w.size(); ++b) {
        const double e = 0.5 * (h[1].bin_edges[b] + h[1].bin_edges[b + 1]);
        if (std::abs(e - 1.0) > 0.05) EXPECT_LT(w[b], 1e-12);
    }
}

TEST(Ldos, SuperradiantOccupiesEveryMode) {
    const auto h = ldos_all_modes(chain(0.18, 0.542), Branch::SuperradiantPhase, BandSelector::middle(),
                                  chain_brillouin_samples(512));
    const double total = h[0].total() + h[1].total() + h[2].total();
    EXPECT_NEAR(total, 512.0, 1e-6);
    for (const auto& x : h) EXPECT_GT(x.total(), 1e-3 * total);
}

TEST(Ldos, WeightConservationAllBands) {
    const auto h = ldos_all_modes(chain(0.12, 0.2), Branch::NormalPhase, BandSelector::all(), chain_brillouin_samples(200),
                                  {0.0, 2.0, 300}, 0.01);
    EXPECT_NEAR(h[0].total() + h[1].total() + h[2].total(), 600.0, 1e-6);
    for (const auto& x : h)
        for (double v : x.weights) EXPECT_GE(v, 0.0);
    const auto single = ldos(chain(0.12, 0.2), Branch::NormalPhase, Mode::Spins, BandSelector::all(),
                             chain_brillouin_samples(200), {0.0, 2.0, 300}, 0.01);
    EXPECT_EQ(single.weights, h[2].weights);
    EXPECT_EQ(single.density().size(), 300u);
}

TEST(Ldos, UnstableSamplesExcludedOrFatal) {
    const auto h = ldos_all_modes(chain(0.18, 0.4), Branch::NormalPhase, BandSelector::middle(), chain_brillouin_samples(64));
    EXPECT_GT(h[0].excluded_samples, 0u);
    EXPECT_EQ(h[0].excluded_samples + h[0].stable_samples, 64u);
    EXPECT_NEAR(h[0].total() + h[1].total() + h[2].total(), static_cast<double>(h[0].stable_samples), 1e-6);

    EXPECT_THROW((void)ldos(chain(0.18, 0.45), Branch::NormalPhase, Mode::CavityB, BandSelector::middle(),
                            {WaveVector::chain(0.0), WaveVector::chain(0.1)}),
                 NoStableSamples);
    EXPECT_THROW((void)ldos(chain(0.18, 0.3), Branch::NormalPhase, Mode::CavityB, BandSelector::middle(),
                            chain_brillouin_samples(4), {}, 0.0),
                 ContractViolation);
}

TEST(RealSpace, Profiles) {
    const auto ks = chain_brillouin_samples(256);
    const auto nor = real_space_profile(chain(0.18, 0.3), Branch::NormalPhase, 1, 6, ks);
    EXPECT_LT(nor.weight(Mode::CavityA), 1e-20);
    EXPECT_GT(nor.weight(Mode::CavityB), 0.1);
    EXPECT_GT(nor.weight(Mode::Spins), 0.1);
    EXPECT_EQ(nor.sites.size(), 18u);

    const auto sup = real_space_profile(chain(0.18, 0.542), Branch::SuperradiantPhase, 1, 3, ks);
    for (double w : sup.family_weight) EXPECT_GT(w, 1e-3);

    const auto more = real_space_profile(chain(0.18, 0.3), Branch::NormalPhase, 1, 11, ks);
    EXPECT_EQ(more.family_weight, nor.family_weight);
    for (const auto& s : more.sites) EXPECT_EQ(s.weight, nor.weight(s.family));

    EXPECT_THROW((void)real_space_profile(chain(0.18, 0.4), Branch::NormalPhase, 1, 2, ks), UnstableSolution);
    EXPECT_THROW((void)real_space_profile(chain(0.18, 0.3), Branch::NormalPhase, 3, 2, ks), ContractViolation);
}
