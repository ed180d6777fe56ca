#include "pegrisk/features.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>

#include "pegrisk/csv.hpp"
#include "pegrisk/error.hpp"
#include "text.hpp"

namespace pegrisk {

std::string_view to_string(VolEstimator estimator) noexcept {
    return estimator == VolEstimator::Range ? "range" : "parkinson";
}

VolEstimator parse_vol_estimator(std::string_view text) {
    if (text == "range") return VolEstimator::Range;
    if (text == "parkinson") return VolEstimator::Parkinson;
    throw Error(ErrorKind::Config, "unknown volatility estimator '" + std::string(text) + "'");
}

std::vector<DatedValue> intraday_vol(const BarSeries& bars, VolEstimator estimator) {
    static const double parkinson_scale = 2.0 * std::sqrt(std::numbers::ln2);
    std::vector<DatedValue> out;
    out.reserve(bars.bars.size());
    for (const auto& b : bars.bars) {
        validate_bar(b, bars.instrument);
        const double sigma = estimator == VolEstimator::Range ? (b.high - b.low) / b.close
                                                              : std::log(b.high / b.low) / parkinson_scale;
        out.push_back({b.date, sigma * 1e4});
    }
    return out;
}

std::vector<DatedValue> daily_returns(const BarSeries& bars) {
    if (bars.bars.size() < 2) {
        throw Error(ErrorKind::InsufficientData, "daily returns of " + bars.instrument + " need at least 2 bars, got " +
                                                     std::to_string(bars.bars.size()));
    }
    std::vector<DatedValue> out;
    out.reserve(bars.bars.size() - 1);
    for (std::size_t i = 1; i < bars.bars.size(); ++i) {
        out.push_back({bars.bars[i].date, (bars.bars[i].close / bars.bars[i - 1].close - 1.0) * 1e4});
    }
    return out;
}

std::size_t FeaturePanel::rows_with_returns() const {
    std::size_t n = 0;
    for (const auto& r : rows) n += r.r_btc_bps.has_value() ? 1 : 0;
    return n;
}

FeaturePanel build_feature_panel(std::span<const DefaultProbPoint> prob, const BarSeries& btc,
                                 const BarSeries& usdt, VolEstimator estimator) {
    if (prob.empty() || btc.empty() || usdt.empty()) {
        throw Error(ErrorKind::Alignment, "feature panel needs non-empty probability, BTC and USDT inputs");
    }
    std::map<Date, double> sigma_btc;
    for (const auto& v : intraday_vol(btc, estimator)) sigma_btc.emplace(v.date, v.value);
    std::map<Date, double> sigma_usdt;
    for (const auto& v : intraday_vol(usdt, estimator)) sigma_usdt.emplace(v.date, v.value);
    std::map<Date, double> ret;
    if (btc.bars.size() >= 2) {
        for (const auto& v : daily_returns(btc)) ret.emplace(v.date, v.value);
    }

    FeaturePanel panel;
    for (const auto& p : prob) {
        const auto b = sigma_btc.find(p.date);
        const auto u = sigma_usdt.find(p.date);
        if (b == sigma_btc.end() || u == sigma_usdt.end()) continue;
        FeaturePoint row{p.date, p.raw_annualized_bps, b->second, u->second, std::nullopt};
        if (const auto r = ret.find(p.date); r != ret.end()) row.r_btc_bps = r->second;
        panel.rows.push_back(row);
    }
    if (panel.rows.empty()) throw Error(ErrorKind::Alignment, "feature panel: inputs share no dates");
    return panel;
}

void write_feature_panel(std::ostream& out, const FeaturePanel& panel) {
    out << "date,p_annualized_bps,sigma_btc_bps,sigma_usdt_bps,r_btc_bps\n";
    for (const auto& r : panel.rows) {
        out << r.date.iso() << ',' << csv::format_double(r.p_annualized_bps) << ','
            << csv::format_double(r.sigma_btc_bps) << ',' << csv::format_double(r.sigma_usdt_bps) << ',';
        if (r.r_btc_bps) out << csv::format_double(*r.r_btc_bps);
        out << '\n';
    }
}

FeaturePanel read_feature_panel(std::istream& in) {
    csv::Reader reader(in);
    const char* names[] = {"date", "p_annualized_bps", "sigma_btc_bps", "sigma_usdt_bps", "r_btc_bps"};
    std::size_t idx[5];
    for (int i = 0; i < 5; ++i) {
        const auto c = reader.column(names[i]);
        if (!c) throw Error(ErrorKind::Schema, std::string("feature CSV missing column '") + names[i] + "'");
        idx[i] = *c;
    }

    FeaturePanel panel;
    csv::Row row;
    while (reader.next(row)) {
        const auto where = "line " + std::to_string(row.line_no);
        auto cell = [&](int i) -> std::string_view {
            if (idx[i] >= row.fields.size()) return {};
            return detail::trim(row.fields[idx[i]]);
        };
        auto number = [&](int i) {
            const auto v = detail::parse_double(cell(i));
            if (!v) throw Error(ErrorKind::Validation, where + ": cannot parse " + names[i]);
            return *v;
        };
        const auto date = Date::parse(cell(0));
        if (!date) throw Error(ErrorKind::Validation, where + ": cannot parse date");
        FeaturePoint fp{*date, number(1), number(2), number(3), std::nullopt};
        if (!cell(4).empty()) fp.r_btc_bps = number(4);
        panel.rows.push_back(fp);
    }
    return panel;
}

}  // namespace pegrisk
