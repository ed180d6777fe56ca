#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "pegrisk/error.hpp"
#include "pegrisk/pegmodel.hpp"
#include "pegrisk/simkit.hpp"

using namespace pegrisk;

TEST(SplitMix64, StreamsDifferAndRepeat) {
    auto a = SplitMix64::for_stream(1, 0);
    auto b = SplitMix64::for_stream(1, 1);
    auto c = SplitMix64::for_stream(1, 0);
    const auto a0 = a();
    EXPECT_NE(a0, b());
    EXPECT_EQ(a0, c());
}

TEST(Simulate, DegenerateCaseIsExact) {
    SimConfig cfg;
    cfg.innovation_sd = 0.0;
    cfg.n_paths = 1000;
    const auto res = simulate_paths(cfg, 3);
    ASSERT_EQ(res.terminal_spots.size(), 1000u);
    for (double s : res.terminal_spots) EXPECT_EQ(s, 1.0);
    EXPECT_EQ(res.mc_futures, 1.0);
    EXPECT_EQ(res.mc_stderr, 0.0);
    EXPECT_EQ(res.default_count, 0u);
}

TEST(Simulate, CertainDefaultPaysRecovery) {
    SimConfig cfg;
    cfg.p_default = 1.0;
    cfg.recovery = 0.75;
    cfg.n_paths = 500;
    const auto res = simulate_paths(cfg, 2);
    EXPECT_EQ(res.default_count, 500u);
    EXPECT_EQ(res.mc_futures, 0.75);
}

TEST(Simulate, EstimateIsArithmeticMean) {
    SimConfig cfg;
    cfg.delta0 = 0.001;
    cfg.p_default = 0.01;
    cfg.n_paths = 10007;
    const auto res = simulate_paths(cfg, 4);
    const double mean = std::accumulate(res.terminal_spots.begin(), res.terminal_spots.end(), 0.0) /
                        static_cast<double>(res.terminal_spots.size());
    EXPECT_EQ(res.mc_futures, mean);
}

TEST(Simulate, ThreadCountDoesNotChangeOutput) {
    SimConfig cfg;
    cfg.delta0 = -0.002;
    cfg.p_default = 0.05;
    cfg.recovery = 0.3;
    cfg.n_paths = 20011;
    cfg.seed = 42;
    const auto one = simulate_paths(cfg, 1);
    for (unsigned t : {2u, 3u, 8u}) {
        const auto many = simulate_paths(cfg, t);
        EXPECT_EQ(one.terminal_spots, many.terminal_spots);
        EXPECT_EQ(one.mc_futures, many.mc_futures);
        EXPECT_EQ(one.default_count, many.default_count);
    }
}

TEST(Simulate, SurvivorMomentsMatchAr1) {
    SimConfig cfg;
    cfg.delta0 = 0.001;
    cfg.n_paths = 1000000;
    cfg.seed = 3;
    const auto res = simulate_paths(cfg);
    const double mean_th = 1.0 + std::pow(cfg.rho, cfg.horizon_days) * cfg.delta0;
    const double var_th = cfg.innovation_sd * cfg.innovation_sd *
                          (1.0 - std::pow(cfg.rho, 2 * cfg.horizon_days)) / (1.0 - cfg.rho * cfg.rho);
    EXPECT_LE(std::abs(res.mc_futures - mean_th), 4.0 * res.mc_stderr);
    double ss = 0.0;
    for (double s : res.terminal_spots) ss += (s - res.mc_futures) * (s - res.mc_futures);
    const double var = ss / static_cast<double>(res.terminal_spots.size() - 1);
    EXPECT_LE(std::abs(var / var_th - 1.0), 0.05);
}

TEST(Simulate, UnbiasedAcrossSeeds) {
    SimConfig cfg;
    cfg.delta0 = 0.001;
    cfg.p_default = 0.02;
    cfg.recovery = 0.4;
    cfg.n_paths = 20000;
    const double f_th = theoretical_futures(cfg.delta0, cfg.rho, cfg.horizon_days, cfg.p_default, cfg.recovery);
    int inside = 0;
    double z_sum = 0.0;
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        cfg.seed = seed;
        const auto res = simulate_paths(cfg, 2);
        const double z = (res.mc_futures - f_th) / res.mc_stderr;
        z_sum += z;
        if (std::abs(z) < 3.0) ++inside;
    }
    EXPECT_GE(inside, 195);
    EXPECT_LE(std::abs(z_sum / std::sqrt(200.0)), 4.0);
}

TEST(Simulate, InvalidConfig) {
    SimConfig cfg;
    cfg.p_default = 1.5;
    EXPECT_THROW(simulate_paths(cfg), Error);
    cfg = SimConfig{};
    cfg.n_paths = 0;
    EXPECT_THROW(simulate_paths(cfg), Error);
    cfg = SimConfig{};
    cfg.innovation_sd = -1.0;
    EXPECT_THROW(simulate_paths(cfg), Error);
}

TEST(Simulate, ConfigRoundTrip) {
    SimConfig cfg;
    cfg.rho = 0.5;
    cfg.n_paths = 123;
    cfg.seed = 99;
    cfg.recovery = 0.25;
    KeyValueConfig kv;
    cfg.to_config(kv);
    const auto back = SimConfig::from_config(kv);
    EXPECT_EQ(back.rho, 0.5);
    EXPECT_EQ(back.n_paths, 123u);
    EXPECT_EQ(back.seed, 99u);
    EXPECT_EQ(back.recovery, 0.25);
}

TEST(RoundTrip, ZeroProbabilityExact) {
    SimConfig cfg;
    cfg.innovation_sd = 0.0;
    cfg.n_paths = 100;
    const auto rt = roundtrip_invert(cfg, 1);
    EXPECT_EQ(rt.p_hat, 0.0);
    EXPECT_EQ(rt.std_error, 0.0);
}

TEST(RoundTrip, RecoversProbabilityWithHighRecovery) {
    SimConfig cfg;
    cfg.p_default = 0.01;
    cfg.recovery = 0.9;
    cfg.delta0 = 0.0005;
    cfg.n_paths = 400000;
    cfg.seed = 11;
    const auto rt = roundtrip_invert(cfg);
    EXPECT_LE(std::abs(rt.p_hat - 0.01), 3.0 * rt.std_error);
    EXPECT_LT(rt.ci_low, rt.p_hat);
    EXPECT_GT(rt.ci_high, rt.p_hat);
}

TEST(Fixture, Deterministic) {
    FixtureConfig cfg;
    const auto a = generate_fixture(cfg);
    const auto b = generate_fixture(cfg);
    EXPECT_EQ(a.spot.bars, b.spot.bars);
    EXPECT_EQ(a.futures.bars, b.futures.bars);
    EXPECT_EQ(a.btc.bars, b.btc.bars);
    EXPECT_EQ(a.spot.bars.size(), 410u);
    EXPECT_EQ(a.spot.bars.front().date, Date(2020, 2, 28));
    cfg.seed = 8;
    EXPECT_NE(generate_fixture(cfg).spot.bars, a.spot.bars);
}

TEST(Fixture, NoiselessFixtureInvertsToPlantedLevel) {
    FixtureConfig cfg;
    cfg.futures_noise_sd = 0.0;
    const auto fx = generate_fixture(cfg);
    const auto aligned = align_daily(fx.spot, fx.futures);
    PegParams params;
    params.rho = cfg.rho;
    params.horizon_days = cfg.horizon_days;
    const auto prob = prob_series(aligned, params, true);
    ASSERT_EQ(prob.points.size(), 410u);
    for (const auto& pt : prob.points) {
        EXPECT_NEAR(pt.p_annualized_bps, 30.0, 1e-6);
        EXPECT_FALSE(pt.trimmed);
    }
}

TEST(Fixture, TooShort) {
    FixtureConfig cfg;
    cfg.n_days = 29;
    try {
        generate_fixture(cfg);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
}
