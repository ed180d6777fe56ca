#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "pegrisk/error.hpp"
#include "pegrisk/marketdata.hpp"

using namespace pegrisk;

namespace {

const char* kHeader = "timestamp,open,high,low,close,volume\n";

BarSeries parse(const std::string& body, const CsvSchema& schema = {}) {
    std::istringstream in(body);
    return parse_bars(in, schema, "USDT_USD", "FTX");
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "expected pegrisk::Error";
    return ErrorKind::Io;
}

BarSeries flat_series(const std::string& instrument, std::initializer_list<std::pair<Date, double>> closes) {
    BarSeries s{instrument, "test", {}};
    for (const auto& [d, c] : closes) s.bars.push_back({d, c, c, c, c, 1.0});
    return s;
}

}  // namespace

TEST(ParseBars, SingleRowMapsFields) {
    const auto s = parse(std::string(kHeader) + "2020-03-12,1.0005,1.0119,0.9971,1.0010,5e6\n");
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.bars[0].date, Date(2020, 3, 12));
    EXPECT_EQ(s.bars[0].open, 1.0005);
    EXPECT_EQ(s.bars[0].high, 1.0119);
    EXPECT_EQ(s.bars[0].low, 0.9971);
    EXPECT_EQ(s.bars[0].close, 1.0010);
    EXPECT_EQ(s.bars[0].volume, 5e6);
    EXPECT_EQ(s.instrument, "USDT_USD");
    EXPECT_EQ(s.venue, "FTX");
}

TEST(ParseBars, EmptyBodyGivesEmptySeries) {
    EXPECT_TRUE(parse(kHeader).empty());
}

TEST(ParseBars, HighBelowLowNamesTheLine) {
    try {
        parse(std::string(kHeader) + "2020-03-11,1,1,1,1,1\n2020-03-12,1.0,0.99,1.01,1.0,1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    }
}

TEST(ParseBars, RejectsNonPositivePrice) {
    EXPECT_EQ(kind_of([] { parse(std::string(kHeader) + "2020-03-12,1,1,0,1,1\n"); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { parse(std::string(kHeader) + "2020-03-12,-1,1,1,1,1\n"); }), ErrorKind::Validation);
}

TEST(ParseBars, RejectsCloseOutsideRange) {
    EXPECT_EQ(kind_of([] { parse(std::string(kHeader) + "2020-03-12,1,1.01,0.99,1.02,1\n"); }),
              ErrorKind::Validation);
}

TEST(ParseBars, DuplicateDateIsValidationError) {
    try {
        parse(std::string(kHeader) + "2020-03-12,1,1,1,1,1\n2020-03-13,1,1,1,1,1\n2020-03-12,1,1,1,1,1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_NE(std::string(e.what()).find("duplicate date 2020-03-12"), std::string::npos) << e.what();
    }
}

TEST(ParseBars, MissingColumnIsSchemaError) {
    EXPECT_EQ(kind_of([] { parse("timestamp,open,high,low,close\n2020-03-12,1,1,1,1\n"); }), ErrorKind::Schema);
    EXPECT_EQ(kind_of([] { parse(""); }), ErrorKind::Schema);
}

TEST(ParseBars, MalformedNumberReportsLine) {
    try {
        parse(std::string(kHeader) + "2020-03-12,1,abc,1,1,1\n");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Validation);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos);
    }
    EXPECT_EQ(kind_of([] { parse(std::string(kHeader) + "12/03/2020,1,1,1,1,1\n"); }), ErrorKind::Validation);
    EXPECT_EQ(kind_of([] { parse(std::string(kHeader) + "2020-02-30,1,1,1,1,1\n"); }), ErrorKind::Validation);
}

TEST(ParseBars, CustomSchemaAndReorderedColumns) {
    KeyValueConfig cfg;
    cfg.set("column.timestamp", "time_period_start");
    cfg.set("column.open", "price_open");
    cfg.set("column.high", "price_high");
    cfg.set("column.low", "price_low");
    cfg.set("column.close", "price_close");
    cfg.set("column.volume", "volume_traded");
    const auto schema = CsvSchema::from_config(cfg);
    const auto s = parse(
        "price_close,time_period_start,volume_traded,price_low,price_high,price_open\r\n"
        "1.001,2020-03-12T00:00:00.0000000Z,7,0.99,1.01,1.0\r\n",
        schema);
    ASSERT_EQ(s.size(), 1u);
    EXPECT_EQ(s.bars[0].date, Date(2020, 3, 12));
    EXPECT_EQ(s.bars[0].close, 1.001);
    EXPECT_EQ(s.bars[0].volume, 7.0);
}

TEST(ParseBars, SortsRowsAndIgnoresOrder) {
    std::vector<std::string> rows;
    for (int d = 1; d <= 20; ++d) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "2021-01-%02d,1,1.01,0.99,%.4f,100\n", d, 1.0 + d * 1e-4);
        rows.emplace_back(buf);
    }
    std::string ordered = kHeader;
    for (const auto& r : rows) ordered += r;
    const auto reference = parse(ordered);

    std::mt19937 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(rows.begin(), rows.end(), rng);
        std::string shuffled = kHeader;
        for (const auto& r : rows) shuffled += r;
        EXPECT_EQ(parse(shuffled).bars, reference.bars);
    }
}

TEST(AlignDaily, TableMeansGiveExpectedDeltaAndBasis) {
    const auto spot = flat_series("s", {{Date(2020, 5, 1), 1.0007}});
    const auto fut = flat_series("f", {{Date(2020, 5, 1), 0.9992}});
    const auto a = align_daily(spot, fut);
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a.observations[0].delta, 1.0007 - 1.0);
    EXPECT_NEAR(a.observations[0].delta, 0.0007, 1e-15);
    EXPECT_NEAR(a.observations[0].basis_bps, -15.0, 1e-9);
}

TEST(AlignDaily, PerfectPegIsZero) {
    const auto a = align_daily(flat_series("s", {{Date(2020, 5, 1), 1.0}}), flat_series("f", {{Date(2020, 5, 1), 1.0}}));
    EXPECT_EQ(a.observations[0].delta, 0.0);
    EXPECT_EQ(a.observations[0].basis_bps, 0.0);
}

TEST(AlignDaily, InnerJoinReportsDrops) {
    const Date d1(2020, 5, 1), d2(2020, 5, 2), d3(2020, 5, 3);
    const auto a = align_daily(flat_series("s", {{d1, 1.0}, {d2, 1.001}}), flat_series("f", {{d2, 0.999}, {d3, 1.0}}));
    ASSERT_EQ(a.size(), 1u);
    EXPECT_EQ(a.observations[0].date, d2);
    EXPECT_EQ(a.report.matched, 1u);
    EXPECT_EQ(a.report.dropped(), 2u);
    EXPECT_EQ(a.report.spot_only, std::vector<Date>{d1});
    EXPECT_EQ(a.report.futures_only, std::vector<Date>{d3});
}

TEST(AlignDaily, EmptyInputsAndDisjointDatesFail) {
    const auto s = flat_series("s", {{Date(2020, 5, 1), 1.0}});
    const auto f = flat_series("f", {{Date(2020, 5, 2), 1.0}});
    EXPECT_EQ(kind_of([&] { align_daily(s, f); }), ErrorKind::Alignment);
    EXPECT_EQ(kind_of([&] { align_daily(s, BarSeries{"f", "v", {}}); }), ErrorKind::Alignment);
}

TEST(AlignDaily, BasisIdentityHoldsOnRandomData) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> px(0.97, 1.03);
    BarSeries s{"s", "v", {}}, f{"f", "v", {}};
    for (int d = 0; d < 500; ++d) {
        const double a = px(rng), b = px(rng);
        s.bars.push_back({Date(2020, 1, 1).plus_days(d), a, a, a, a, 1});
        f.bars.push_back({Date(2020, 1, 1).plus_days(d), b, b, b, b, 1});
    }
    for (const auto& o : align_daily(s, f).observations) {
        EXPECT_EQ(o.delta, o.s - 1.0);
        EXPECT_EQ(o.basis_bps, (o.f - o.s) * 1e4);
        EXPECT_NEAR(std::abs(o.basis_bps), std::abs(o.delta - (o.f - 1.0)) * 1e4, 1e-9);
    }
}

TEST(AlignedCsv, RoundTripIsBitExact) {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> px(0.95, 1.05);
    AlignedSeries series;
    for (int d = 0; d < 300; ++d) {
        series.observations.push_back(AlignedObservation::make(Date(2020, 2, 28).plus_days(d), px(rng), px(rng)));
    }
    std::stringstream buf;
    write_aligned(buf, series);
    const auto back = read_aligned(buf);
    ASSERT_EQ(back.size(), series.size());
    for (std::size_t i = 0; i < back.size(); ++i) EXPECT_EQ(back.observations[i], series.observations[i]);
}

TEST(AlignedCsv, HeaderAndPrecision) {
    AlignedSeries series;
    series.observations.push_back(AlignedObservation::make(Date(2020, 3, 12), 1.0007, 0.9992));
    std::ostringstream out;
    write_aligned(out, series);
    EXPECT_EQ(out.str().substr(0, 25), "date,s,f,delta,basis_bps\n");
    EXPECT_NE(out.str().find("2020-03-12,1.0006999999999999,0.99919999999999998,"), std::string::npos) << out.str();
}

TEST(BarsCsv, WriteThenParseReproducesSeries) {
    BarSeries s{"BTC_USDT", "Binance", {}};
    s.bars.push_back({Date(2020, 3, 12), 7900.1, 7966.3, 4410.0, 4800.2, 123456.75});
    s.bars.push_back({Date(2020, 3, 13), 4800.2, 5950.0, 3800.0, 5600.3, 99.5});
    std::stringstream buf;
    write_bars(buf, s);
    EXPECT_EQ(parse_bars(buf, CsvSchema{}, "BTC_USDT", "Binance").bars, s.bars);
}
