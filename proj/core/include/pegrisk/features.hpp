#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pegrisk/date.hpp"
#include "pegrisk/marketdata.hpp"
#include "pegrisk/pegmodel.hpp"

namespace pegrisk {

struct DatedValue {
    Date date;
    double value = 0.0;
};

/// Daily-bar volatility proxies. Only range-based estimators are possible from OHLCV.
enum class VolEstimator {
    Range,      // (high - low) / close
    Parkinson,  // ln(high / low) / (2 sqrt(ln 2))
};

std::string_view to_string(VolEstimator estimator) noexcept;
VolEstimator parse_vol_estimator(std::string_view text);

/// Intra-day volatility per bar, in basis points.
std::vector<DatedValue> intraday_vol(const BarSeries& bars, VolEstimator estimator = VolEstimator::Parkinson);

/// Close-to-close simple returns in basis points, dated at the later bar.
/// Throws Error(InsufficientData) for fewer than two bars.
std::vector<DatedValue> daily_returns(const BarSeries& bars);

struct FeaturePoint {
    Date date;
    double p_annualized_bps = 0.0;
    double sigma_btc_bps = 0.0;
    double sigma_usdt_bps = 0.0;
    std::optional<double> r_btc_bps;  // absent on the first BTC date
};

struct FeaturePanel {
    std::vector<FeaturePoint> rows;

    [[nodiscard]] std::size_t size() const { return rows.size(); }
    [[nodiscard]] std::size_t rows_with_returns() const;
};

/// Inner join of the (untrimmed) annualized probability with BTC volatility,
/// USDT volatility and BTC returns. Throws Error(Alignment) on an empty join.
FeaturePanel build_feature_panel(std::span<const DefaultProbPoint> prob, const BarSeries& btc,
                                 const BarSeries& usdt, VolEstimator estimator = VolEstimator::Parkinson);

/// Columns date,p_annualized_bps,sigma_btc_bps,sigma_usdt_bps,r_btc_bps; empty cell for a missing return.
void write_feature_panel(std::ostream& out, const FeaturePanel& panel);
FeaturePanel read_feature_panel(std::istream& in);

}  // namespace pegrisk
