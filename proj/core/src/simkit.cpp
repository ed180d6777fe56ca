#include "pegrisk/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <thread>

#include "pegrisk/csv.hpp"
#include "pegrisk/error.hpp"
#include "pegrisk/features.hpp"
#include "pegrisk/pegmodel.hpp"

namespace pegrisk {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

[[noreturn]] void domain_error(const std::string& what) { throw Error(ErrorKind::Domain, what); }

// Simulates paths [begin, end) into `spots`; returns how many defaulted.
std::uint64_t run_paths(const SimConfig& c, std::uint64_t begin, std::uint64_t end, std::vector<double>& spots) {
    std::uint64_t defaults = 0;
    for (std::uint64_t path = begin; path < end; ++path) {
        SplitMix64 rng = SplitMix64::for_stream(c.seed, path);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        if (uniform(rng) < c.p_default) {
            spots[path] = c.recovery;
            ++defaults;
            continue;
        }
        std::normal_distribution<double> shock(0.0, 1.0);
        double delta = c.delta0;
        for (int step = 0; step < c.horizon_days; ++step) {
            delta = c.rho * delta + c.innovation_sd * shock(rng);
        }
        spots[path] = 1.0 + delta;
    }
    return defaults;
}

}  // namespace

SplitMix64 SplitMix64::for_stream(std::uint64_t seed, std::uint64_t stream) {
    return SplitMix64{mix64(seed ^ mix64(stream * kGolden + 0x632BE59BD9B4E019ULL))};
}

SplitMix64::result_type SplitMix64::operator()() {
    state_ += kGolden;
    return mix64(state_);
}

void SimConfig::validate() const {
    if (!(rho >= 0.0 && rho < 1.0)) domain_error("sim rho must lie in [0, 1), got " + csv::format_double(rho));
    if (!(innovation_sd >= 0.0) || !std::isfinite(innovation_sd)) domain_error("sim innovation_sd must be >= 0");
    if (!std::isfinite(delta0)) domain_error("sim delta0 must be finite");
    if (horizon_days < 1) domain_error("sim horizon must be at least 1 day");
    if (!(p_default >= 0.0 && p_default <= 1.0)) domain_error("sim p_default must lie in [0, 1]");
    if (!(recovery >= 0.0 && recovery <= 1.0)) domain_error("sim recovery must lie in [0, 1]");
    if (n_paths < 1) domain_error("sim n_paths must be at least 1");
}

SimConfig SimConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
    SimConfig c;
    c.rho = cfg.get_double(prefix + "rho").value_or(c.rho);
    c.innovation_sd = cfg.get_double(prefix + "innovation_sd").value_or(c.innovation_sd);
    c.delta0 = cfg.get_double(prefix + "delta0").value_or(c.delta0);
    c.horizon_days = static_cast<int>(cfg.get_int(prefix + "horizon_days").value_or(c.horizon_days));
    c.p_default = cfg.get_double(prefix + "p_default").value_or(c.p_default);
    c.recovery = cfg.get_double(prefix + "recovery").value_or(c.recovery);
    if (const auto n = cfg.get_int(prefix + "n_paths")) {
        if (*n < 1) domain_error("sim n_paths must be at least 1");
        c.n_paths = static_cast<std::uint64_t>(*n);
    }
    if (const auto s = cfg.get(prefix + "seed")) c.seed = std::stoull(*s);
    return c;
}

void SimConfig::to_config(KeyValueConfig& cfg, const std::string& prefix) const {
    cfg.set(prefix + "rho", csv::format_double(rho));
    cfg.set(prefix + "innovation_sd", csv::format_double(innovation_sd));
    cfg.set(prefix + "delta0", csv::format_double(delta0));
    cfg.set(prefix + "horizon_days", std::to_string(horizon_days));
    cfg.set(prefix + "p_default", csv::format_double(p_default));
    cfg.set(prefix + "recovery", csv::format_double(recovery));
    cfg.set(prefix + "n_paths", std::to_string(n_paths));
    cfg.set(prefix + "seed", std::to_string(seed));
}

SimResult simulate_paths(const SimConfig& config, unsigned threads) {
    config.validate();
    if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
    const std::uint64_t n = config.n_paths;
    threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, n));

    SimResult res;
    res.terminal_spots.assign(n, 0.0);
    std::vector<std::uint64_t> defaults(threads, 0);
    {
        std::vector<std::jthread> pool;
        const std::uint64_t chunk = (n + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::uint64_t begin = t * chunk;
            const std::uint64_t end = std::min(n, begin + chunk);
            pool.emplace_back([&, t, begin, end] { defaults[t] = run_paths(config, begin, end, res.terminal_spots); });
        }
    }
    res.default_count = std::accumulate(defaults.begin(), defaults.end(), std::uint64_t{0});

    // Reduced in path order so the mean is independent of the thread count.
    const double count = static_cast<double>(n);
    res.mc_futures = std::accumulate(res.terminal_spots.begin(), res.terminal_spots.end(), 0.0) / count;
    if (n > 1) {
        double ss = 0.0;
        for (double v : res.terminal_spots) ss += (v - res.mc_futures) * (v - res.mc_futures);
        res.mc_stderr = std::sqrt(ss / (count - 1.0) / count);
    }
    return res;
}

RoundTrip roundtrip_invert(const SimConfig& config, unsigned threads, double z) {
    RoundTrip rt;
    rt.sim = simulate_paths(config, threads);
    const double spot = 1.0 + config.delta0;
    rt.p_hat = implied_default_prob(spot, rt.sim.mc_futures, config.rho, config.horizon_days, config.recovery);
    const double denom = 1.0 + std::pow(config.rho, config.horizon_days) * config.delta0 - config.recovery;
    rt.std_error = rt.sim.mc_stderr / denom;
    rt.ci_low = rt.p_hat - z * rt.std_error;
    rt.ci_high = rt.p_hat + z * rt.std_error;
    return rt;
}

void FixtureConfig::validate() const {
    if (n_days < 30) domain_error("fixture needs at least 30 days, got " + std::to_string(n_days));
    if (!(rho >= 0.0 && rho < 1.0)) domain_error("fixture rho must lie in [0, 1)");
    if (horizon_days < 1) domain_error("fixture horizon must be at least 1 day");
    if (!(recovery >= 0.0 && recovery < 1.0)) domain_error("fixture recovery must lie in [0, 1)");
    if (!(innovation_sd >= 0.0 && futures_noise_sd >= 0.0 && usdt_range >= 0.0 && btc_range >= 0.0 &&
          btc_daily_vol >= 0.0)) {
        domain_error("fixture noise scales must be non-negative");
    }
    if (!(btc_start > 0.0)) domain_error("fixture btc_start must be positive");
    if (!(p_period_days > 0.0)) domain_error("fixture p_period_days must be positive");
}

FixtureConfig FixtureConfig::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
    FixtureConfig c;
    if (const auto s = cfg.get(prefix + "start")) {
        const auto d = Date::parse(*s);
        if (!d) throw Error(ErrorKind::Config, "fixture start is not a date: " + *s);
        c.start = *d;
    }
    if (const auto n = cfg.get_int(prefix + "n_days")) {
        if (*n < 0) domain_error("fixture n_days must be non-negative");
        c.n_days = static_cast<std::size_t>(*n);
    }
    if (const auto s = cfg.get(prefix + "seed")) c.seed = std::stoull(*s);
    auto num = [&](const char* key, double& field) { field = cfg.get_double(prefix + key).value_or(field); };
    num("rho", c.rho);
    num("innovation_sd", c.innovation_sd);
    num("delta0", c.delta0);
    c.horizon_days = static_cast<int>(cfg.get_int(prefix + "horizon_days").value_or(c.horizon_days));
    num("recovery", c.recovery);
    num("annual_p_bps", c.annual_p_bps);
    num("p_amplitude", c.p_amplitude);
    num("p_period_days", c.p_period_days);
    num("btc_loading", c.btc_loading);
    num("futures_noise_sd", c.futures_noise_sd);
    num("usdt_range", c.usdt_range);
    num("btc_start", c.btc_start);
    num("btc_daily_vol", c.btc_daily_vol);
    num("btc_range", c.btc_range);
    return c;
}

void FixtureConfig::to_config(KeyValueConfig& cfg, const std::string& prefix) const {
    cfg.set(prefix + "start", start.iso());
    cfg.set(prefix + "n_days", std::to_string(n_days));
    cfg.set(prefix + "seed", std::to_string(seed));
    cfg.set(prefix + "horizon_days", std::to_string(horizon_days));
    const std::pair<const char*, double> nums[] = {
        {"rho", rho},
        {"innovation_sd", innovation_sd},
        {"delta0", delta0},
        {"recovery", recovery},
        {"annual_p_bps", annual_p_bps},
        {"p_amplitude", p_amplitude},
        {"p_period_days", p_period_days},
        {"btc_loading", btc_loading},
        {"futures_noise_sd", futures_noise_sd},
        {"usdt_range", usdt_range},
        {"btc_start", btc_start},
        {"btc_daily_vol", btc_daily_vol},
        {"btc_range", btc_range},
    };
    for (const auto& [k, v] : nums) cfg.set(prefix + k, csv::format_double(v));
}

Fixture generate_fixture(const FixtureConfig& config) {
    config.validate();
    const std::size_t n = config.n_days;

    auto spot_rng = SplitMix64::for_stream(config.seed, 0);
    auto fut_rng = SplitMix64::for_stream(config.seed, 1);
    auto bar_rng = SplitMix64::for_stream(config.seed, 2);
    auto btc_rng = SplitMix64::for_stream(config.seed, 3);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    Fixture fx;
    fx.spot = {"USDT_USD", "synthetic", {}};
    fx.futures = {"USDT_USD_FUT", "synthetic", {}};
    fx.btc = {"BTC_USDT", "synthetic", {}};

    // BTC first: its volatility can load on the planted intensity.
    double btc_close = config.btc_start;
    for (std::size_t t = 0; t < n; ++t) {
        const double open = btc_close;
        btc_close = open * std::exp(config.btc_daily_vol * normal(btc_rng));
        const double half_range = 0.5 * config.btc_range * std::exp(0.5 * normal(btc_rng) - 0.125);
        Bar b;
        b.date = config.start.plus_days(static_cast<int>(t));
        b.open = open;
        b.close = btc_close;
        b.high = std::max(open, btc_close) * (1.0 + half_range);
        b.low = std::min(open, btc_close) / (1.0 + half_range);
        b.volume = 4e4 * std::exp(0.3 * normal(btc_rng));
        fx.btc.bars.push_back(b);
    }
    const auto sigma_btc = intraday_vol(fx.btc, VolEstimator::Parkinson);
    double sigma_mean = 0.0;
    for (const auto& v : sigma_btc) sigma_mean += v.value;
    sigma_mean /= static_cast<double>(n);

    const double horizon_share = config.horizon_days / 365.0;
    auto make_bar = [&](Date date, double open, double close) {
        Bar b;
        b.date = date;
        b.open = open;
        b.close = close;
        b.high = std::max(open, close) * (1.0 + 0.5 * config.usdt_range * uniform(bar_rng));
        b.low = std::min(open, close) * (1.0 - 0.5 * config.usdt_range * uniform(bar_rng));
        b.volume = 5e6 * std::exp(0.3 * normal(bar_rng));
        return b;
    };

    double delta = config.delta0;
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) delta = config.rho * delta + config.innovation_sd * normal(spot_rng);
        const double cycle = std::sin(2.0 * std::numbers::pi * static_cast<double>(t) / config.p_period_days);
        const double annual_bps = config.annual_p_bps * (1.0 + config.p_amplitude * cycle) +
                                  config.btc_loading * (sigma_btc[t].value - sigma_mean);
        const double p = std::clamp(annual_bps * 1e-4 * horizon_share, 0.0, 1.0);
        fx.planted_p.push_back(p);

        const double spot = 1.0 + delta;
        double fut = theoretical_futures(delta, config.rho, config.horizon_days, p, config.recovery);
        if (config.futures_noise_sd > 0.0) fut += config.futures_noise_sd * normal(fut_rng);

        const Date date = config.start.plus_days(static_cast<int>(t));
        const double spot_open = fx.spot.bars.empty() ? spot : fx.spot.bars.back().close;
        const double fut_open = fx.futures.bars.empty() ? fut : fx.futures.bars.back().close;
        fx.spot.bars.push_back(make_bar(date, spot_open, spot));
        fx.futures.bars.push_back(make_bar(date, fut_open, fut));
    }
    validate_series(fx.spot);
    validate_series(fx.futures);
    validate_series(fx.btc);
    return fx;
}

}  // namespace pegrisk
