#include "pegrisk/app/commands.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include "json.hpp"
#include <optional>
#include <ostream>
#include <sstream>

#include "pegrisk/csv.hpp"
#include "pegrisk/econometrics.hpp"
#include "pegrisk/error.hpp"

namespace fs = std::filesystem;

namespace pegrisk::app {

namespace {

BarSeries load_bars(const InputFile& input, const CsvSchema& schema, const char* role) {
    if (!input.given()) throw Error(ErrorKind::Config, std::string("no ") + role + " input given");
    std::ifstream in(input.path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + input.path.string());
    try {
        return parse_bars(in, schema, input.instrument, input.venue);
    } catch (const Error& e) {
        throw Error(e.kind(), input.path.string() + ": " + e.what());
    }
}

AlignedSeries load_aligned(const fs::path& path) {
    if (path.empty()) throw Error(ErrorKind::Config, "no aligned input given");
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());
    try {
        return read_aligned(in);
    } catch (const Error& e) {
        throw Error(e.kind(), path.string() + ": " + e.what());
    }
}

struct RhoResolution {
    double used = 0.0;
    std::optional<Ar1Fit> full;
    std::optional<RollingAr1> rolling;
};

RhoResolution resolve_rho(const RunConfig& cfg, const AlignedSeries& aligned) {
    RhoResolution r;
    const auto deviations = aligned.deviations();
    // Fits are informational under a fixed rho, so failures there are tolerated.
    const bool strict_full = cfg.rho_source == RhoSource::FullSample;
    const bool strict_rolling = cfg.rho_source == RhoSource::RollingMean;
    try {
        r.full = fit_ar1(deviations);
    } catch (const Error&) {
        if (strict_full) throw;
    }
    try {
        r.rolling = fit_ar1_rolling(deviations, cfg.window);
    } catch (const Error&) {
        if (strict_rolling) throw;
    }
    switch (cfg.rho_source) {
        case RhoSource::Fixed: r.used = cfg.params.rho; break;
        case RhoSource::FullSample: r.used = r.full->rho; break;
        case RhoSource::RollingMean: r.used = r.rolling->mean_rho; break;
    }
    return r;
}

PegParams effective_params(const RunConfig& cfg, double rho) {
    PegParams p = cfg.params;
    p.rho = rho;
    p.validate();
    return p;
}

const BarSeries& usdt_source(const std::optional<BarSeries>& usdt, const std::optional<BarSeries>& spot) {
    if (usdt) return *usdt;
    if (spot) return *spot;
    throw Error(ErrorKind::Config, "no USDT bars for sigma_usdt: give --usdt or --spot");
}

template <class Fn>
std::string render(Fn&& fn) {
    std::ostringstream os;
    fn(os);
    return os.str();
}

nlohmann::json figure1_spec() {
    using nlohmann::json;
    const json x = {{"field", "date"}, {"type", "temporal"}};
    return {
        {"$schema", "https://vega.github.io/schema/vega-lite/v5.json"},
        {"description", "Spot and futures closes with the futures-spot basis"},
        {"data", {{"url", "aligned.csv"}, {"format", {{"type", "csv"}}}}},
        {"vconcat",
         json::array({
             {{"transform", json::array({{{"fold", json::array({"s", "f"})}}})},
              {"mark", "line"},
              {"encoding",
               {{"x", x},
                {"y", {{"field", "value"}, {"type", "quantitative"}, {"scale", {{"zero", false}}}}},
                {"color", {{"field", "key"}, {"type", "nominal"}}}}}},
             {{"mark", "line"},
              {"encoding",
               {{"x", x}, {"y", {{"field", "basis_bps"}, {"type", "quantitative"}, {"title", "f - s (bps)"}}}}}},
         })},
    };
}

nlohmann::json figure2_spec() {
    return {
        {"$schema", "https://vega.github.io/schema/vega-lite/v5.json"},
        {"description", "Implied annualized default probability (trimmed at zero)"},
        {"data", {{"url", "prob.csv"}, {"format", {{"type", "csv"}}}}},
        {"mark", "line"},
        {"encoding",
         {{"x", {{"field", "date"}, {"type", "temporal"}}},
          {"y", {{"field", "p_annualized_bps"}, {"type", "quantitative"}, {"title", "P (annualized bps)"}}}}},
    };
}

/// Writes every file or none.
class StagedWriter {
public:
    explicit StagedWriter(fs::path dir) : dir_(std::move(dir)) {}

    void add(const std::string& name, std::string content) { pending_.emplace_back(name, std::move(content)); }

    std::vector<fs::path> commit() {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error(ErrorKind::Io, "cannot create output directory " + dir_.string() + ": " + ec.message());
        std::vector<fs::path> written;
        try {
            for (const auto& [name, content] : pending_) {
                const fs::path path = dir_ / name;
                std::ofstream out(path, std::ios::binary | std::ios::trunc);
                if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
                written.push_back(path);
                out << content;
                out.close();
                if (!out) throw Error(ErrorKind::Io, "failed writing " + path.string());
            }
        } catch (...) {
            for (const auto& p : written) fs::remove(p, ec);
            throw;
        }
        return written;
    }

private:
    fs::path dir_;
    std::vector<std::pair<std::string, std::string>> pending_;
};

}  // namespace

std::string format_error_line(std::string_view kind, std::string_view message) {
    std::string line = "error[" + std::string(kind) + "]: ";
    for (char c : message) line.push_back(c == '\n' || c == '\r' ? ' ' : c);
    return line;
}

PipelineOutputs cmd_pipeline(const RunConfig& cfg) {
    cfg.validate();
    const BarSeries spot = load_bars(cfg.spot, cfg.schema, "spot");
    const BarSeries futures = load_bars(cfg.futures, cfg.schema, "futures");
    const BarSeries btc = load_bars(cfg.btc, cfg.schema, "btc");
    std::optional<BarSeries> usdt_alt;
    if (cfg.usdt.given()) usdt_alt = load_bars(cfg.usdt, cfg.schema, "usdt");
    const BarSeries& usdt = usdt_alt ? *usdt_alt : spot;

    const AlignedSeries aligned = align_daily(spot, futures);
    const RhoResolution rho = resolve_rho(cfg, aligned);
    const PegParams params = effective_params(cfg, rho.used);
    const ProbSeries prob = prob_series(aligned, params, cfg.trim);
    const auto table3 = table3_rows(aligned, prob);
    const FeaturePanel panel = build_feature_panel(prob.points, btc, usdt, cfg.estimator);
    const auto table4 = run_table4(panel);

    KeyValueConfig manifest = cfg.to_config();
    std::size_t trimmed = 0;
    for (const auto& p : prob.points) trimmed += p.trimmed ? 1 : 0;
    manifest.set("result.rho_used", csv::format_double(rho.used));
    if (rho.full) {
        manifest.set("result.rho_full_sample", csv::format_double(rho.full->rho));
        manifest.set("result.rho_full_sample_stderr", csv::format_double(rho.full->std_error));
    }
    if (rho.rolling) {
        manifest.set("result.rho_rolling_mean", csv::format_double(rho.rolling->mean_rho));
        manifest.set("result.rolling_fits", std::to_string(rho.rolling->fits.size()));
    }
    if (rho.used > 0.0 && rho.used < 1.0) manifest.set("result.half_life_days", csv::format_double(half_life(rho.used)));
    manifest.set("result.observations", std::to_string(aligned.size()));
    manifest.set("result.spot_only_dates", std::to_string(aligned.report.spot_only.size()));
    manifest.set("result.futures_only_dates", std::to_string(aligned.report.futures_only.size()));
    manifest.set("result.trimmed_points", std::to_string(trimmed));
    manifest.set("result.quality_warnings", std::to_string(prob.quality_warnings.size()));
    manifest.set("result.mean_p_annualized_bps", csv::format_double(table3[3].mean));
    manifest.set("result.panel_rows", std::to_string(panel.size()));

    StagedWriter writer(cfg.out_dir);
    writer.add("aligned.csv", render([&](std::ostream& os) { write_aligned(os, aligned); }));
    writer.add("prob.csv", render([&](std::ostream& os) { write_prob_series(os, prob); }));
    writer.add("features.csv", render([&](std::ostream& os) { write_feature_panel(os, panel); }));
    writer.add("table3.txt", render([&](std::ostream& os) { write_table3_text(os, table3); }));
    writer.add("table3.csv", render([&](std::ostream& os) { write_table3_csv(os, table3); }));
    writer.add("table4.txt", render([&](std::ostream& os) { write_table4_text(os, table4); }));
    writer.add("table4.csv", render([&](std::ostream& os) { write_table4_csv(os, table4); }));
    writer.add("figure1.vl.json", figure1_spec().dump(2) + "\n");
    writer.add("figure2.vl.json", figure2_spec().dump(2) + "\n");
    writer.add("manifest.txt", render([&](std::ostream& os) { manifest.write(os); }));

    PipelineOutputs out;
    out.files = writer.commit();
    out.rho_used = rho.used;
    out.observations = aligned.size();
    out.mean_p_annualized_bps = table3[3].mean;
    return out;
}

void cmd_align(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    const BarSeries spot = load_bars(cfg.spot, cfg.schema, "spot");
    const BarSeries futures = load_bars(cfg.futures, cfg.schema, "futures");
    const AlignedSeries aligned = align_daily(spot, futures);
    write_aligned(out, aligned);
    log << "matched=" << aligned.report.matched << " spot_only=" << aligned.report.spot_only.size()
        << " futures_only=" << aligned.report.futures_only.size() << '\n';
}

void cmd_fit(const RunConfig& cfg, std::ostream& out) {
    const AlignedSeries aligned = load_aligned(cfg.aligned);
    const auto deviations = aligned.deviations();
    const Ar1Fit full = fit_ar1(deviations);
    out << "n=" << full.n << '\n';
    out << "rho_full_sample=" << csv::format_double(full.rho) << '\n';
    out << "rho_full_sample_stderr=" << csv::format_double(full.std_error) << '\n';
    out << "innovation_sd=" << csv::format_double(full.innovation_sd()) << '\n';
    out << "stable=" << (full.stable() ? "true" : "false") << '\n';
    if (full.stable()) out << "half_life_days=" << csv::format_double(half_life(full.rho)) << '\n';
    if (cfg.window <= deviations.size()) {
        const RollingAr1 rolling = fit_ar1_rolling(deviations, cfg.window);
        out << "window=" << rolling.window << '\n';
        out << "rolling_fits=" << rolling.fits.size() << '\n';
        out << "rho_rolling_mean=" << csv::format_double(rolling.mean_rho) << '\n';
    } else {
        out << "window=" << cfg.window << '\n' << "rolling_fits=0\n";
    }
}

void cmd_prob(const RunConfig& cfg, std::ostream& out, std::ostream& log) {
    cfg.validate();
    const AlignedSeries aligned = load_aligned(cfg.aligned);
    const PegParams params = effective_params(cfg, resolve_rho(cfg, aligned).used);
    const ProbSeries prob = prob_series(aligned, params, cfg.trim);
    write_prob_series(out, prob);
    for (const auto& d : prob.quality_warnings) {
        log << "warning: raw default probability below " << ProbSeries::kDiagnosticFloor << " on " << d.iso() << '\n';
    }
}

void cmd_features(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const AlignedSeries aligned = load_aligned(cfg.aligned);
    const PegParams params = effective_params(cfg, resolve_rho(cfg, aligned).used);
    const ProbSeries prob = prob_series(aligned, params, cfg.trim);
    const BarSeries btc = load_bars(cfg.btc, cfg.schema, "btc");
    std::optional<BarSeries> usdt, spot;
    if (cfg.usdt.given()) usdt = load_bars(cfg.usdt, cfg.schema, "usdt");
    else if (cfg.spot.given()) spot = load_bars(cfg.spot, cfg.schema, "spot");
    write_feature_panel(out, build_feature_panel(prob.points, btc, usdt_source(usdt, spot), cfg.estimator));
}

void cmd_regress(const RunConfig& cfg, std::ostream& out) {
    if (cfg.features.empty()) throw Error(ErrorKind::Config, "no features input given");
    std::ifstream in(cfg.features);
    if (!in) throw Error(ErrorKind::Io, "cannot open " + cfg.features.string());
    const auto table4 = run_table4(read_feature_panel(in));
    if (cfg.format == "csv") write_table4_csv(out, table4);
    else write_table4_text(out, table4);
}

void cmd_stats(const RunConfig& cfg, std::ostream& out) {
    cfg.validate();
    const AlignedSeries aligned = load_aligned(cfg.aligned);
    const PegParams params = effective_params(cfg, resolve_rho(cfg, aligned).used);
    const auto rows = table3_rows(aligned, prob_series(aligned, params, cfg.trim));
    if (cfg.format == "csv") write_table3_csv(out, rows);
    else write_table3_text(out, rows);
}

void cmd_simulate(const RunConfig& cfg, std::ostream& out) {
    const SimConfig& sim = cfg.sim;
    sim.validate();
    const double closed_form =
        theoretical_futures(sim.delta0, sim.rho, sim.horizon_days, sim.p_default, sim.recovery);

    std::optional<RoundTrip> rt;
    SimResult result;
    if (sim.recovery < 1.0) {
        rt = roundtrip_invert(sim, cfg.threads);
        result = rt->sim;
    } else {
        result = simulate_paths(sim, cfg.threads);
    }

    out << "n_paths=" << sim.n_paths << '\n';
    out << "seed=" << sim.seed << '\n';
    out << "default_count=" << result.default_count << '\n';
    out << "mc_futures=" << csv::format_double(result.mc_futures) << '\n';
    out << "mc_stderr=" << csv::format_double(result.mc_stderr) << '\n';
    out << "theoretical_futures=" << csv::format_double(closed_form) << '\n';
    out << "p_planted=" << csv::format_double(sim.p_default) << '\n';
    if (rt) {
        out << "p_recovered=" << csv::format_double(rt->p_hat) << '\n';
        out << "p_stderr=" << csv::format_double(rt->std_error) << '\n';
        out << "p_ci95_low=" << csv::format_double(rt->ci_low) << '\n';
        out << "p_ci95_high=" << csv::format_double(rt->ci_high) << '\n';
        const double gap = std::abs(rt->p_hat - sim.p_default);
        out << "abs_error=" << csv::format_double(gap) << '\n';
        out << "within_3se=" << (gap <= 3.0 * rt->std_error ? "true" : "false") << '\n';
    }
}

std::vector<fs::path> cmd_fixture(const RunConfig& cfg) {
    const Fixture fx = generate_fixture(cfg.fixture);

    double mean_p = 0.0;
    for (double p : fx.planted_p) mean_p += p;
    mean_p /= static_cast<double>(fx.planted_p.size());

    // Ready-made pipeline config pointing at the generated files.
    KeyValueConfig run;
    run.set("spot", (cfg.out_dir / "spot.csv").string());
    run.set("spot.instrument", fx.spot.instrument);
    run.set("spot.venue", fx.spot.venue);
    run.set("futures", (cfg.out_dir / "futures.csv").string());
    run.set("futures.instrument", fx.futures.instrument);
    run.set("futures.venue", fx.futures.venue);
    run.set("btc", (cfg.out_dir / "btc.csv").string());
    run.set("btc.instrument", fx.btc.instrument);
    run.set("btc.venue", fx.btc.venue);
    run.set("rho", csv::format_double(cfg.fixture.rho));
    run.set("horizon_days", std::to_string(cfg.fixture.horizon_days));
    run.set("recovery", csv::format_double(cfg.fixture.recovery));
    cfg.fixture.to_config(run);
    run.set("result.planted_mean_p_horizon", csv::format_double(mean_p));
    run.set("result.planted_mean_p_annualized_bps",
            csv::format_double(annualize(mean_p, cfg.fixture.horizon_days, Annualization::Linear)));

    StagedWriter writer(cfg.out_dir);
    writer.add("spot.csv", render([&](std::ostream& os) { write_bars(os, fx.spot); }));
    writer.add("futures.csv", render([&](std::ostream& os) { write_bars(os, fx.futures); }));
    writer.add("btc.csv", render([&](std::ostream& os) { write_bars(os, fx.btc); }));
    writer.add("fixture.conf", render([&](std::ostream& os) { run.write(os); }));
    return writer.commit();
}

}  // namespace pegrisk::app
