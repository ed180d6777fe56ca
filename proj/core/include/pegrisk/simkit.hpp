#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "pegrisk/config.hpp"
#include "pegrisk/date.hpp"
#include "pegrisk/marketdata.hpp"

namespace pegrisk {

/// SplitMix64 stream. Each Monte Carlo path gets its own stream keyed by
/// (seed, path index), so results do not depend on how paths are scheduled.
class SplitMix64 {
public:
    using result_type = std::uint64_t;

    explicit SplitMix64(std::uint64_t state) : state_(state) {}
    static SplitMix64 for_stream(std::uint64_t seed, std::uint64_t stream);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();

private:
    std::uint64_t state_;
};

struct SimConfig {
    double rho = 0.73;
    double innovation_sd = 5e-4;  // price units
    double delta0 = 0.0;
    int horizon_days = 90;
    double p_default = 0.0;
    double recovery = 0.0;
    std::uint64_t n_paths = 100000;
    std::uint64_t seed = 1;

    /// Throws Error(Domain) on out-of-range fields.
    void validate() const;

    /// Keys: rho, innovation_sd, delta0, horizon_days, p_default, recovery, n_paths, seed.
    static SimConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "sim.");
    void to_config(KeyValueConfig& cfg, const std::string& prefix = "sim.") const;
};

struct SimResult {
    std::vector<double> terminal_spots;
    double mc_futures = 0.0;  // arithmetic mean of terminal_spots
    double mc_stderr = 0.0;
    std::uint64_t default_count = 0;
};

/// Draws default at expiry with probability p_default (terminal value = recovery);
/// surviving paths step the AR(1) forward h days with Gaussian innovations and
/// end at 1 + delta. `threads` = 0 uses the hardware concurrency. Output is
/// bit-identical for a given config regardless of the thread count.
SimResult simulate_paths(const SimConfig& config, unsigned threads = 0);

struct RoundTrip {
    double p_hat = 0.0;
    double std_error = 0.0;  // delta method: mc_stderr / (1 + rho^h delta0 - R)
    double ci_low = 0.0;
    double ci_high = 0.0;
    SimResult sim;
};

/// Prices the futures by simulation, then inverts with the closed form.
RoundTrip roundtrip_invert(const SimConfig& config, unsigned threads = 0, double z = 1.959963984540054);

/// Synthetic stand-in for exchange data: USDT spot, USDT futures and BTC bars.
struct FixtureConfig {
    Date start{2020, 2, 28};
    std::size_t n_days = 410;
    std::uint64_t seed = 7;

    // Peg dynamics and pricing.
    double rho = 0.73;
    double innovation_sd = 7.5e-4;
    double delta0 = 0.0;
    int horizon_days = 90;
    double recovery = 0.0;

    // Planted default intensity, linear-annualized bps. The level is
    // annual_p_bps * (1 + p_amplitude * sin(2 pi t / p_period_days))
    // + btc_loading * (sigma_btc_bps[t] - mean sigma_btc_bps).
    double annual_p_bps = 30.0;
    double p_amplitude = 0.0;
    double p_period_days = 120.0;
    double btc_loading = 0.0;

    // Market noise.
    double futures_noise_sd = 2e-4;  // price units, added to the futures close
    double usdt_range = 2e-3;        // relative intra-day range of USDT bars
    double btc_start = 8700.0;
    double btc_daily_vol = 0.04;
    double btc_range = 0.035;

    void validate() const;
    static FixtureConfig from_config(const KeyValueConfig& cfg, const std::string& prefix = "fixture.");
    void to_config(KeyValueConfig& cfg, const std::string& prefix = "fixture.") const;
};

struct Fixture {
    BarSeries spot;
    BarSeries futures;
    BarSeries btc;
    std::vector<double> planted_p;  // per-horizon probability per day
};

/// Deterministic given the config. Throws Error(Domain) when n_days < 30.
Fixture generate_fixture(const FixtureConfig& config);

}  // namespace pegrisk
