// pegrisk: implied stablecoin default probability from spot and futures prices.
//
//   pegrisk fixture  --out-dir data
//   pegrisk pipeline --config data/fixture.conf --out-dir out
//   pegrisk simulate --p-default 0.005 --delta0 0.001 --paths 1000000

#include <fstream>
#include <functional>
#include <iostream>

#include "CLI11.hpp"
#include "pegrisk/app/commands.hpp"
#include "pegrisk/error.hpp"

namespace fs = std::filesystem;
using pegrisk::KeyValueConfig;
using pegrisk::app::RunConfig;

namespace {

struct Invocation {
    std::string config_file;
    KeyValueConfig overrides;
};

// Flags are recorded as config overrides so file values and flags resolve in one place.
void flag(CLI::App* cmd, Invocation& inv, const std::string& name, const std::string& key, const std::string& help) {
    cmd->add_option_function<std::string>(
        name, [&inv, key](const std::string& v) { inv.overrides.set(key, v); }, help);
}

void seed_flag(CLI::App* cmd, Invocation& inv) {
    cmd->add_option_function<std::string>(
        "--seed",
        [&inv](const std::string& v) {
            inv.overrides.set("sim.seed", v);
            inv.overrides.set("fixture.seed", v);
        },
        "64-bit RNG seed");
}

void model_flags(CLI::App* cmd, Invocation& inv) {
    flag(cmd, inv, "--rho", "rho", "AR(1) mean-reversion coefficient used for inversion (default 0.73)");
    flag(cmd, inv, "--rho-source", "rho_source", "fixed | rolling-mean | full-sample");
    flag(cmd, inv, "--horizon", "horizon_days", "futures horizon in days (default 90)");
    flag(cmd, inv, "--recovery", "recovery", "recovery rate on default, in [0, 1)");
    flag(cmd, inv, "--annualization", "annualization", "linear | compounded");
    flag(cmd, inv, "--window", "window", "rolling AR(1) window in days (default 60)");
    cmd->add_flag_callback("--no-trim", [&inv] { inv.overrides.set("trim", "false"); },
                           "keep negative probabilities in the emitted series");
}

void input_flags(CLI::App* cmd, Invocation& inv, std::initializer_list<const char*> roles) {
    for (const char* role : roles) {
        const std::string r = role;
        flag(cmd, inv, "--" + r, r, r + " OHLCV CSV");
        flag(cmd, inv, "--" + r + "-venue", r + ".venue", r + " venue label");
    }
}

RunConfig resolve(const Invocation& inv) {
    KeyValueConfig cfg;
    if (!inv.config_file.empty()) cfg = KeyValueConfig::load(inv.config_file);
    cfg.merge(inv.overrides);
    return RunConfig::from_config(cfg);
}

// Streams to --output (removed again on failure) or stdout.
void with_output(const RunConfig& rc, const std::function<void(std::ostream&)>& body) {
    if (rc.output.empty()) {
        body(std::cout);
        return;
    }
    std::ofstream out(rc.output, std::ios::binary | std::ios::trunc);
    if (!out) throw pegrisk::Error(pegrisk::ErrorKind::Io, "cannot write " + rc.output.string());
    try {
        body(out);
        out.close();
        if (!out) throw pegrisk::Error(pegrisk::ErrorKind::Io, "failed writing " + rc.output.string());
    } catch (...) {
        std::error_code ec;
        fs::remove(rc.output, ec);
        throw;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Market-implied stablecoin default probability from spot and futures prices"};
    app.require_subcommand(1);

    Invocation inv;
    auto add = [&](const char* name, const char* help) {
        CLI::App* cmd = app.add_subcommand(name, help);
        cmd->add_option("--config", inv.config_file, "key=value config file; flags override it");
        return cmd;
    };

    auto* pipeline = add("pipeline", "align, invert, tabulate and write every artifact");
    input_flags(pipeline, inv, {"spot", "futures", "btc", "usdt"});
    model_flags(pipeline, inv);
    flag(pipeline, inv, "--estimator", "estimator", "parkinson | range");
    flag(pipeline, inv, "--out-dir", "out_dir", "output directory");

    auto* align = add("align", "join spot and futures closes by date");
    input_flags(align, inv, {"spot", "futures"});
    flag(align, inv, "--output", "output", "output CSV (default stdout)");

    auto* fit = add("fit", "AR(1) fit of peg deviations");
    flag(fit, inv, "--aligned", "aligned", "aligned CSV");
    flag(fit, inv, "--window", "window", "rolling window in days (default 60)");

    auto* prob = add("prob", "implied default probability series");
    flag(prob, inv, "--aligned", "aligned", "aligned CSV");
    model_flags(prob, inv);
    flag(prob, inv, "--output", "output", "output CSV (default stdout)");

    auto* features = add("features", "regression panel of P, BTC/USDT volatility and BTC returns");
    flag(features, inv, "--aligned", "aligned", "aligned CSV");
    input_flags(features, inv, {"spot", "btc", "usdt"});
    model_flags(features, inv);
    flag(features, inv, "--estimator", "estimator", "parkinson | range");
    flag(features, inv, "--output", "output", "output CSV (default stdout)");

    auto* regress = add("regress", "OLS with HC0 errors on a feature panel");
    flag(regress, inv, "--features", "features", "feature panel CSV");
    flag(regress, inv, "--format", "format", "text | csv");
    flag(regress, inv, "--output", "output", "output file (default stdout)");

    auto* stats = add("stats", "summary statistics of s, f, basis and P");
    flag(stats, inv, "--aligned", "aligned", "aligned CSV");
    model_flags(stats, inv);
    flag(stats, inv, "--format", "format", "text | csv");
    flag(stats, inv, "--output", "output", "output file (default stdout)");

    auto* simulate = add("simulate", "Monte Carlo check of the inversion");
    flag(simulate, inv, "--rho", "sim.rho", "AR(1) coefficient");
    flag(simulate, inv, "--innovation-sd", "sim.innovation_sd", "innovation standard deviation (price units)");
    flag(simulate, inv, "--delta0", "sim.delta0", "initial peg deviation");
    flag(simulate, inv, "--horizon", "sim.horizon_days", "horizon in days");
    flag(simulate, inv, "--p-default", "sim.p_default", "planted default probability over the horizon");
    flag(simulate, inv, "--recovery", "sim.recovery", "recovery rate");
    flag(simulate, inv, "--paths", "sim.n_paths", "number of paths");
    flag(simulate, inv, "--threads", "threads", "worker threads (0 = all cores)");
    seed_flag(simulate, inv);

    auto* fixture = add("fixture", "write a synthetic spot/futures/BTC dataset");
    flag(fixture, inv, "--out-dir", "out_dir", "output directory");
    flag(fixture, inv, "--days", "fixture.n_days", "number of days (>= 30)");
    flag(fixture, inv, "--start", "fixture.start", "first date, YYYY-MM-DD");
    flag(fixture, inv, "--rho", "fixture.rho", "AR(1) coefficient of the spot deviation");
    flag(fixture, inv, "--innovation-sd", "fixture.innovation_sd", "spot innovation sd (price units)");
    flag(fixture, inv, "--horizon", "fixture.horizon_days", "futures horizon in days");
    flag(fixture, inv, "--recovery", "fixture.recovery", "recovery rate");
    flag(fixture, inv, "--annual-p-bps", "fixture.annual_p_bps", "planted annualized default probability (bps)");
    flag(fixture, inv, "--p-amplitude", "fixture.p_amplitude", "relative amplitude of the planted cycle");
    flag(fixture, inv, "--btc-loading", "fixture.btc_loading", "planted P loading on BTC volatility (bps/bps)");
    flag(fixture, inv, "--futures-noise-sd", "fixture.futures_noise_sd", "futures price noise (price units)");
    seed_flag(fixture, inv);

    CLI11_PARSE(app, argc, argv);

    try {
        const RunConfig rc = resolve(inv);
        if (pipeline->parsed()) {
            const auto res = pegrisk::app::cmd_pipeline(rc);
            for (const auto& f : res.files) std::cout << f.string() << '\n';
        } else if (align->parsed()) {
            with_output(rc, [&](std::ostream& os) { pegrisk::app::cmd_align(rc, os, std::cerr); });
        } else if (fit->parsed()) {
            pegrisk::app::cmd_fit(rc, std::cout);
        } else if (prob->parsed()) {
            with_output(rc, [&](std::ostream& os) { pegrisk::app::cmd_prob(rc, os, std::cerr); });
        } else if (features->parsed()) {
            with_output(rc, [&](std::ostream& os) { pegrisk::app::cmd_features(rc, os); });
        } else if (regress->parsed()) {
            with_output(rc, [&](std::ostream& os) { pegrisk::app::cmd_regress(rc, os); });
        } else if (stats->parsed()) {
            with_output(rc, [&](std::ostream& os) { pegrisk::app::cmd_stats(rc, os); });
        } else if (simulate->parsed()) {
            pegrisk::app::cmd_simulate(rc, std::cout);
        } else if (fixture->parsed()) {
            for (const auto& f : pegrisk::app::cmd_fixture(rc)) std::cout << f.string() << '\n';
        }
    } catch (const pegrisk::Error& e) {
        std::cerr << pegrisk::app::format_error_line(pegrisk::to_string(e.kind()), e.what()) << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << pegrisk::app::format_error_line("internal", e.what()) << '\n';
        return 1;
    }
    return 0;
}
