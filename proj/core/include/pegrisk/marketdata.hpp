#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "pegrisk/config.hpp"
#include "pegrisk/date.hpp"

namespace pegrisk {

/// One daily OHLCV observation. Prices are USD per token.
struct Bar {
    Date date;
    double open = 0.0;
    double high = 0.0;
    double low = 0.0;
    double close = 0.0;
    double volume = 0.0;

    friend bool operator==(const Bar&, const Bar&) = default;
};

struct BarSeries {
    std::string instrument;
    std::string venue;
    std::vector<Bar> bars;  // ascending, unique dates

    [[nodiscard]] std::size_t size() const { return bars.size(); }
    [[nodiscard]] bool empty() const { return bars.empty(); }
};

/// Throws Error(Validation) if a bar breaks the OHLC ordering or has a non-positive price.
/// `where` is prefixed to the message (e.g. "line 7").
void validate_bar(const Bar& bar, const std::string& where);

/// Checks every bar plus ordering and non-empty identifiers.
void validate_series(const BarSeries& series);

/// Maps the six column roles to header names.
struct CsvSchema {
    std::string timestamp = "timestamp";
    std::string open = "open";
    std::string high = "high";
    std::string low = "low";
    std::string close = "close";
    std::string volume = "volume";

    /// Reads `column.timestamp`, `column.open`, ... keys; absent keys keep the defaults.
    static CsvSchema from_config(const KeyValueConfig& cfg, const std::string& prefix = "column.");
};

/// Parses an OHLCV CSV. Rows may arrive in any order; the result is sorted by date.
/// Errors name the offending physical line.
BarSeries parse_bars(std::istream& in, const CsvSchema& schema, std::string instrument, std::string venue);

/// Writes bars using the default schema header, full precision.
void write_bars(std::ostream& out, const BarSeries& series);

struct AlignedObservation {
    Date date;
    double s = 0.0;          // spot close
    double f = 0.0;          // futures close
    double delta = 0.0;      // s - 1
    double basis_bps = 0.0;  // (f - s) * 1e4

    static AlignedObservation make(Date date, double spot, double futures);

    friend bool operator==(const AlignedObservation&, const AlignedObservation&) = default;
};

struct JoinReport {
    std::size_t matched = 0;
    std::vector<Date> spot_only;
    std::vector<Date> futures_only;

    [[nodiscard]] std::size_t dropped() const { return spot_only.size() + futures_only.size(); }
};

struct AlignedSeries {
    std::vector<AlignedObservation> observations;
    std::string spot_venue;
    std::string futures_venue;
    JoinReport report;

    [[nodiscard]] std::size_t size() const { return observations.size(); }
    [[nodiscard]] std::vector<double> deviations() const;
};

/// Inner join on calendar date using closes. Throws Error(Alignment) when
/// either input is empty or the intersection is empty.
AlignedSeries align_daily(const BarSeries& spot, const BarSeries& futures);

/// Columns date,s,f,delta,basis_bps, 17 significant digits.
void write_aligned(std::ostream& out, const AlignedSeries& series);

/// Inverse of write_aligned. delta and basis_bps are recomputed from s and f so the
/// type invariants hold even for files written by other tools.
AlignedSeries read_aligned(std::istream& in);

}  // namespace pegrisk
