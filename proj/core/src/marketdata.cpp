#include "pegrisk/marketdata.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include "pegrisk/csv.hpp"
#include "pegrisk/error.hpp"
#include "text.hpp"

namespace pegrisk {

namespace {

[[noreturn]] void fail_validation(const std::string& where, const std::string& what) {
    throw Error(ErrorKind::Validation, where + ": " + what);
}

double field_as_double(const csv::Row& row, std::size_t idx, const std::string& role) {
    const auto where = "line " + std::to_string(row.line_no);
    if (idx >= row.fields.size()) fail_validation(where, "missing " + role + " field");
    const auto value = detail::parse_double(row.fields[idx]);
    if (!value) fail_validation(where, "cannot parse " + role + " '" + row.fields[idx] + "'");
    return *value;
}

}  // namespace

void validate_bar(const Bar& bar, const std::string& where) {
    if (!(bar.open > 0.0 && bar.high > 0.0 && bar.low > 0.0 && bar.close > 0.0)) {
        fail_validation(where, "non-positive price on " + bar.date.iso());
    }
    if (bar.high < bar.low) {
        fail_validation(where, "high < low on " + bar.date.iso());
    }
    if (bar.low > std::min(bar.open, bar.close) || bar.high < std::max(bar.open, bar.close)) {
        fail_validation(where, "open/close outside [low, high] on " + bar.date.iso());
    }
    if (bar.volume < 0.0) {
        fail_validation(where, "negative volume on " + bar.date.iso());
    }
}

void validate_series(const BarSeries& series) {
    if (series.instrument.empty() || series.venue.empty()) {
        throw Error(ErrorKind::Validation, "bar series needs a non-empty instrument and venue");
    }
    for (std::size_t i = 0; i < series.bars.size(); ++i) {
        validate_bar(series.bars[i], series.instrument + " bar " + std::to_string(i));
        if (i > 0 && !(series.bars[i - 1].date < series.bars[i].date)) {
            fail_validation(series.instrument + " bar " + std::to_string(i),
                            "dates not strictly increasing at " + series.bars[i].date.iso());
        }
    }
}

CsvSchema CsvSchema::from_config(const KeyValueConfig& cfg, const std::string& prefix) {
    CsvSchema schema;
    schema.timestamp = cfg.get_or(prefix + "timestamp", schema.timestamp);
    schema.open = cfg.get_or(prefix + "open", schema.open);
    schema.high = cfg.get_or(prefix + "high", schema.high);
    schema.low = cfg.get_or(prefix + "low", schema.low);
    schema.close = cfg.get_or(prefix + "close", schema.close);
    schema.volume = cfg.get_or(prefix + "volume", schema.volume);
    return schema;
}

BarSeries parse_bars(std::istream& in, const CsvSchema& schema, std::string instrument, std::string venue) {
    csv::Reader reader(in);
    if (!reader.has_header()) throw Error(ErrorKind::Schema, "CSV has no header row");

    auto require = [&](const std::string& name, const char* role) {
        const auto idx = reader.column(name);
        if (!idx) throw Error(ErrorKind::Schema, std::string("missing column '") + name + "' for role " + role);
        return *idx;
    };
    const std::size_t i_ts = require(schema.timestamp, "timestamp");
    const std::size_t i_open = require(schema.open, "open");
    const std::size_t i_high = require(schema.high, "high");
    const std::size_t i_low = require(schema.low, "low");
    const std::size_t i_close = require(schema.close, "close");
    const std::size_t i_vol = require(schema.volume, "volume");

    struct Parsed {
        Bar bar;
        std::size_t line_no;
    };
    std::vector<Parsed> rows;
    csv::Row row;
    while (reader.next(row)) {
        const auto where = "line " + std::to_string(row.line_no);
        if (i_ts >= row.fields.size()) fail_validation(where, "missing timestamp field");
        const auto date = Date::parse(detail::trim(row.fields[i_ts]));
        if (!date) fail_validation(where, "cannot parse date '" + row.fields[i_ts] + "'");

        Bar bar;
        bar.date = *date;
        bar.open = field_as_double(row, i_open, "open");
        bar.high = field_as_double(row, i_high, "high");
        bar.low = field_as_double(row, i_low, "low");
        bar.close = field_as_double(row, i_close, "close");
        bar.volume = field_as_double(row, i_vol, "volume");
        validate_bar(bar, where);
        rows.push_back({bar, row.line_no});
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const Parsed& a, const Parsed& b) { return a.bar.date < b.bar.date; });
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].bar.date == rows[i - 1].bar.date) {
            fail_validation("line " + std::to_string(rows[i].line_no),
                            "duplicate date " + rows[i].bar.date.iso() + " (also on line " +
                                std::to_string(rows[i - 1].line_no) + ")");
        }
    }

    BarSeries series{std::move(instrument), std::move(venue), {}};
    series.bars.reserve(rows.size());
    for (auto& r : rows) series.bars.push_back(r.bar);
    return series;
}

void write_bars(std::ostream& out, const BarSeries& series) {
    out << "timestamp,open,high,low,close,volume\n";
    for (const auto& b : series.bars) {
        out << b.date.iso() << ',' << csv::format_double(b.open) << ',' << csv::format_double(b.high) << ','
            << csv::format_double(b.low) << ',' << csv::format_double(b.close) << ','
            << csv::format_double(b.volume) << '\n';
    }
}

AlignedObservation AlignedObservation::make(Date date, double spot, double futures) {
    return AlignedObservation{date, spot, futures, spot - 1.0, (futures - spot) * 1e4};
}

std::vector<double> AlignedSeries::deviations() const {
    std::vector<double> out;
    out.reserve(observations.size());
    for (const auto& o : observations) out.push_back(o.delta);
    return out;
}

AlignedSeries align_daily(const BarSeries& spot, const BarSeries& futures) {
    if (spot.empty() || futures.empty()) {
        throw Error(ErrorKind::Alignment, "cannot align: " + std::string(spot.empty() ? "spot" : "futures") +
                                              " series is empty");
    }

    AlignedSeries out;
    out.spot_venue = spot.venue;
    out.futures_venue = futures.venue;

    auto si = spot.bars.begin();
    auto fi = futures.bars.begin();
    while (si != spot.bars.end() && fi != futures.bars.end()) {
        if (si->date < fi->date) {
            out.report.spot_only.push_back((si++)->date);
        } else if (fi->date < si->date) {
            out.report.futures_only.push_back((fi++)->date);
        } else {
            out.observations.push_back(AlignedObservation::make(si->date, si->close, fi->close));
            ++si;
            ++fi;
        }
    }
    for (; si != spot.bars.end(); ++si) out.report.spot_only.push_back(si->date);
    for (; fi != futures.bars.end(); ++fi) out.report.futures_only.push_back(fi->date);
    out.report.matched = out.observations.size();

    if (out.observations.empty()) {
        throw Error(ErrorKind::Alignment, "spot " + spot.instrument + " and futures " + futures.instrument +
                                              " share no dates");
    }
    return out;
}

void write_aligned(std::ostream& out, const AlignedSeries& series) {
    out << "date,s,f,delta,basis_bps\n";
    for (const auto& o : series.observations) {
        out << o.date.iso() << ',' << csv::format_double(o.s) << ',' << csv::format_double(o.f) << ','
            << csv::format_double(o.delta) << ',' << csv::format_double(o.basis_bps) << '\n';
    }
}

AlignedSeries read_aligned(std::istream& in) {
    csv::Reader reader(in);
    if (!reader.has_header()) throw Error(ErrorKind::Schema, "aligned CSV has no header row");
    const auto i_date = reader.column("date");
    const auto i_s = reader.column("s");
    const auto i_f = reader.column("f");
    if (!i_date || !i_s || !i_f) throw Error(ErrorKind::Schema, "aligned CSV needs columns date,s,f");

    AlignedSeries series;
    csv::Row row;
    while (reader.next(row)) {
        const auto where = "line " + std::to_string(row.line_no);
        if (*i_date >= row.fields.size()) fail_validation(where, "missing date field");
        const auto date = Date::parse(detail::trim(row.fields[*i_date]));
        if (!date) fail_validation(where, "cannot parse date '" + row.fields[*i_date] + "'");
        const double s = field_as_double(row, *i_s, "s");
        const double f = field_as_double(row, *i_f, "f");
        if (!series.observations.empty() && !(series.observations.back().date < *date)) {
            fail_validation(where, "dates not strictly increasing at " + date->iso());
        }
        series.observations.push_back(AlignedObservation::make(*date, s, f));
    }
    series.report.matched = series.observations.size();
    return series;
}

}  // namespace pegrisk
