#include "pegrisk/app/run_config.hpp"

#include <set>

#include "pegrisk/csv.hpp"
#include "pegrisk/error.hpp"

namespace pegrisk::app {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "spot", "spot.instrument", "spot.venue", "futures", "futures.instrument", "futures.venue",
        "btc", "btc.instrument", "btc.venue", "usdt", "usdt.instrument", "usdt.venue",
        "aligned", "features", "out_dir", "output", "format",
        "rho", "rho_source", "horizon_days", "recovery", "annualization", "window", "estimator", "trim",
        "threads", "seed",
        "column.timestamp", "column.open", "column.high", "column.low", "column.close", "column.volume",
        "sim.rho", "sim.innovation_sd", "sim.delta0", "sim.horizon_days", "sim.p_default", "sim.recovery",
        "sim.n_paths", "sim.seed",
        "fixture.start", "fixture.n_days", "fixture.seed", "fixture.rho", "fixture.innovation_sd",
        "fixture.delta0", "fixture.horizon_days", "fixture.recovery", "fixture.annual_p_bps",
        "fixture.p_amplitude", "fixture.p_period_days", "fixture.btc_loading", "fixture.futures_noise_sd",
        "fixture.usdt_range", "fixture.btc_start", "fixture.btc_daily_vol", "fixture.btc_range",
    };
    return keys;
}

void read_input(const KeyValueConfig& cfg, const std::string& key, InputFile& input) {
    if (const auto p = cfg.get(key)) input.path = *p;
    input.instrument = cfg.get_or(key + ".instrument", input.instrument);
    input.venue = cfg.get_or(key + ".venue", input.venue);
}

void write_input(KeyValueConfig& cfg, const std::string& key, const InputFile& input) {
    cfg.set(key, input.path.string());
    cfg.set(key + ".instrument", input.instrument);
    cfg.set(key + ".venue", input.venue);
}

}  // namespace

std::string_view to_string(RhoSource source) noexcept {
    switch (source) {
        case RhoSource::Fixed: return "fixed";
        case RhoSource::RollingMean: return "rolling-mean";
        case RhoSource::FullSample: return "full-sample";
    }
    return "fixed";
}

RhoSource parse_rho_source(std::string_view text) {
    if (text == "fixed") return RhoSource::Fixed;
    if (text == "rolling-mean") return RhoSource::RollingMean;
    if (text == "full-sample") return RhoSource::FullSample;
    throw Error(ErrorKind::Config, "unknown rho_source '" + std::string(text) + "'");
}

RunConfig RunConfig::from_config(const KeyValueConfig& cfg) {
    for (const auto& [key, value] : cfg.entries()) {
        if (key.rfind("result.", 0) == 0) continue;
        if (known_keys().count(key) == 0) throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
    }

    RunConfig rc;
    read_input(cfg, "spot", rc.spot);
    read_input(cfg, "futures", rc.futures);
    read_input(cfg, "btc", rc.btc);
    read_input(cfg, "usdt", rc.usdt);
    if (const auto p = cfg.get("aligned")) rc.aligned = *p;
    if (const auto p = cfg.get("features")) rc.features = *p;
    if (const auto p = cfg.get("out_dir")) rc.out_dir = *p;
    if (const auto p = cfg.get("output")) rc.output = *p;
    rc.format = cfg.get_or("format", rc.format);
    if (rc.format != "text" && rc.format != "csv") {
        throw Error(ErrorKind::Config, "format must be text or csv, got '" + rc.format + "'");
    }

    rc.params.rho = cfg.get_double("rho").value_or(rc.params.rho);
    rc.params.horizon_days = static_cast<int>(cfg.get_int("horizon_days").value_or(rc.params.horizon_days));
    rc.params.recovery = cfg.get_double("recovery").value_or(rc.params.recovery);
    if (const auto a = cfg.get("annualization")) rc.params.annualization = parse_annualization(*a);
    if (const auto s = cfg.get("rho_source")) rc.rho_source = parse_rho_source(*s);
    if (const auto w = cfg.get_int("window")) {
        if (*w < 0) throw Error(ErrorKind::Config, "window must be non-negative");
        rc.window = static_cast<std::size_t>(*w);
    }
    if (const auto e = cfg.get("estimator")) rc.estimator = parse_vol_estimator(*e);
    rc.trim = cfg.get_bool("trim").value_or(rc.trim);
    if (const auto t = cfg.get_int("threads")) {
        if (*t < 0) throw Error(ErrorKind::Config, "threads must be non-negative");
        rc.threads = static_cast<unsigned>(*t);
    }
    rc.schema = CsvSchema::from_config(cfg);

    // A bare `seed` seeds both generators unless a specific one is given.
    KeyValueConfig seeded = cfg;
    if (const auto s = cfg.get("seed")) {
        if (!cfg.contains("sim.seed")) seeded.set("sim.seed", *s);
        if (!cfg.contains("fixture.seed")) seeded.set("fixture.seed", *s);
    }
    try {
        rc.sim = SimConfig::from_config(seeded);
        rc.fixture = FixtureConfig::from_config(seeded);
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::Config, "seed must be an unsigned integer");
    }
    return rc;
}

KeyValueConfig RunConfig::to_config() const {
    KeyValueConfig cfg;
    write_input(cfg, "spot", spot);
    write_input(cfg, "futures", futures);
    write_input(cfg, "btc", btc);
    write_input(cfg, "usdt", usdt);
    cfg.set("aligned", aligned.string());
    cfg.set("features", features.string());
    cfg.set("out_dir", out_dir.string());
    cfg.set("output", output.string());
    cfg.set("format", format);
    cfg.set("rho", csv::format_double(params.rho));
    cfg.set("rho_source", std::string(to_string(rho_source)));
    cfg.set("horizon_days", std::to_string(params.horizon_days));
    cfg.set("recovery", csv::format_double(params.recovery));
    cfg.set("annualization", std::string(to_string(params.annualization)));
    cfg.set("window", std::to_string(window));
    cfg.set("estimator", std::string(to_string(estimator)));
    cfg.set("trim", trim ? "true" : "false");
    cfg.set("threads", std::to_string(threads));
    cfg.set("column.timestamp", schema.timestamp);
    cfg.set("column.open", schema.open);
    cfg.set("column.high", schema.high);
    cfg.set("column.low", schema.low);
    cfg.set("column.close", schema.close);
    cfg.set("column.volume", schema.volume);
    sim.to_config(cfg);
    fixture.to_config(cfg);
    return cfg;
}

void RunConfig::validate() const {
    params.validate();
    if (rho_source == RhoSource::RollingMean && window < 3) {
        throw Error(ErrorKind::Window, "rolling window must be at least 3, got " + std::to_string(window));
    }
}

}  // namespace pegrisk::app
