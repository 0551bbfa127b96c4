#include <cmath>
#include <sstream>

#include "doctest.h"
#include "portlab/errors.hpp"
#include "portlab/market_data.hpp"
#include "portlab/prng.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace portlab;

namespace {

std::vector<PriceSeries> parse(const std::string& csv) {
    std::istringstream in(csv);
    return load_prices(in);
}

PricePanel make_panel(const std::vector<std::string>& tickers,
                      const std::vector<std::vector<double>>& rows) {
    PricePanel panel;
    panel.tickers = tickers;
    panel.closes.resize(static_cast<Eigen::Index>(rows.size()),
                        static_cast<Eigen::Index>(tickers.size()));
    Date day{2020, 6, 1};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        panel.dates.push_back(Date::from_days(day.to_days() + static_cast<int>(r)));
        for (std::size_t c = 0; c < tickers.size(); ++c)
            panel.closes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                rows[r][c];
    }
    return panel;
}

// Rebuild per-ticker series from an aligned panel.
std::vector<PriceSeries> to_series(const PricePanel& panel) {
    std::vector<PriceSeries> series(panel.tickers.size());
    for (std::size_t c = 0; c < panel.tickers.size(); ++c) {
        series[c].ticker = panel.tickers[c];
        for (std::size_t r = 0; r < panel.dates.size(); ++r)
            series[c].observations.push_back(
                {panel.dates[r],
                 panel.closes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))});
    }
    return series;
}

}  // namespace

TEST_CASE("load_prices parses a two-ticker file") {
    const auto series = parse(
        "ticker,date,close\n"
        "AAA,2020-01-01,10\n"
        "AAA,2020-01-02,11\n"
        "AAA,2020-01-03,12\n"
        "BBB,2020-01-01,5.5\n"
        "BBB,2020-01-02,5.6\n"
        "BBB,2020-01-03,5.7\n");
    REQUIRE(series.size() == 2);
    CHECK(series[0].ticker == "AAA");
    CHECK(series[0].observations.size() == 3);
    CHECK(series[1].ticker == "BBB");
    CHECK(series[1].observations.size() == 3);
}

TEST_CASE("load_prices keeps exact observation values") {
    const auto series = parse("ticker,date,close\nHDB,2021-01-01,1425\n");
    REQUIRE(series.size() == 1);
    CHECK(series[0].observations[0].date == Date{2021, 1, 1});
    CHECK(series[0].observations[0].close == 1425.0);
}

TEST_CASE("load_prices sorts observations by date") {
    const auto series = parse(
        "ticker,date,close\n"
        "AAA,2020-01-03,12\n"
        "AAA,2020-01-01,10\n"
        "AAA,2020-01-02,11\n");
    REQUIRE(series[0].observations.size() == 3);
    CHECK(series[0].observations[0].close == 10.0);
    CHECK(series[0].observations[2].close == 12.0);
}

TEST_CASE("load_prices rejects bad input") {
    SUBCASE("non-positive close") {
        CHECK_THROWS_AS(parse("ticker,date,close\nAAA,2020-01-01,-5\n"), DataError);
        CHECK_THROWS_AS(parse("ticker,date,close\nAAA,2020-01-01,0\n"), DataError);
    }
    SUBCASE("malformed row names the line") {
        try {
            parse("ticker,date,close\nAAA,2020-01-01,10\nAAA,2020-01-02\n");
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("line 3") != std::string::npos);
        }
    }
    SUBCASE("duplicate ticker-date pair") {
        CHECK_THROWS_AS(
            parse("ticker,date,close\nAAA,2020-01-01,10\nAAA,2020-01-01,11\n"), DataError);
    }
    SUBCASE("bad header") {
        CHECK_THROWS_AS(parse("date,ticker,close\nAAA,2020-01-01,10\n"), DataError);
    }
    SUBCASE("impossible calendar day") {
        CHECK_THROWS_AS(parse("ticker,date,close\nAAA,2021-02-30,10\n"), DataError);
    }
    SUBCASE("unparseable close") {
        CHECK_THROWS_AS(parse("ticker,date,close\nAAA,2020-01-01,12x\n"), DataError);
    }
}

TEST_CASE("align intersects calendars") {
    const auto series = parse(
        "ticker,date,close\n"
        "AAA,2020-01-01,10\n"
        "AAA,2020-01-02,11\n"
        "AAA,2020-01-03,12\n"
        "BBB,2020-01-02,5\n"
        "BBB,2020-01-03,6\n"
        "BBB,2020-01-06,7\n");
    const PricePanel panel = align(series);
    REQUIRE(panel.dates.size() == 2);
    CHECK(panel.dates[0] == Date{2020, 1, 2});
    CHECK(panel.dates[1] == Date{2020, 1, 3});
    CHECK(panel.closes(0, 0) == 11.0);
    CHECK(panel.closes(1, 1) == 6.0);
}

TEST_CASE("align keeps identical calendars intact") {
    const auto series = parse(
        "ticker,date,close\n"
        "AAA,2020-01-01,10\nAAA,2020-01-02,11\n"
        "BBB,2020-01-01,5\nBBB,2020-01-02,6\n");
    const PricePanel panel = align(series);
    CHECK(panel.dates.size() == 2);
    CHECK(panel.tickers == std::vector<std::string>{"AAA", "BBB"});
}

TEST_CASE("align rejects disjoint calendars") {
    const auto series = parse(
        "ticker,date,close\n"
        "AAA,2020-01-01,10\n"
        "BBB,2020-01-02,5\n");
    CHECK_THROWS_AS(align(series), DataError);
}

TEST_CASE("align is idempotent") {
    const std::string csv = synthetic::gbm_csv({"AAA", "BBB", "CCC"}, Date{2020, 1, 1},
                                               Date{2020, 3, 31}, 7);
    std::istringstream in(csv);
    const PricePanel panel = align(load_prices(in));
    const PricePanel again = align(to_series(panel));
    REQUIRE(again.dates.size() == panel.dates.size());
    CHECK(again.tickers == panel.tickers);
    CHECK((again.closes - panel.closes).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("daily_returns on simple steps") {
    const PricePanel up = make_panel({"AAA"}, {{100.0}, {110.0}});
    const ReturnMatrix returns = daily_returns(up);
    REQUIRE(returns.returns.rows() == 1);
    CHECK(returns.returns(0, 0) == doctest::Approx(0.10).epsilon(1e-12));

    const PricePanel flat = make_panel({"AAA"}, {{50.0}, {50.0}, {50.0}});
    const ReturnMatrix zeros = daily_returns(flat);
    CHECK(zeros.returns(0, 0) == 0.0);
    CHECK(zeros.returns(1, 0) == 0.0);
    CHECK(zeros.dates.size() == 2);
}

TEST_CASE("daily_returns matches the element-wise quotient oracle") {
    SplitMix64 rng(11);
    std::vector<std::vector<double>> rows(5, std::vector<double>(3));
    for (auto& row : rows)
        for (auto& x : row) x = 50.0 + 100.0 * rng.next_double();
    const PricePanel panel = make_panel({"A", "B", "C"}, rows);
    const ReturnMatrix returns = daily_returns(panel);
    REQUIRE(returns.returns.rows() == 4);
    for (int t = 0; t < 4; ++t)
        for (int i = 0; i < 3; ++i) {
            const double expected =
                (rows[static_cast<std::size_t>(t + 1)][static_cast<std::size_t>(i)] -
                 rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)]) /
                rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(i)];
            CHECK(returns.returns(t, i) == doctest::Approx(expected).epsilon(1e-12));
        }
}

TEST_CASE("daily_returns needs two dates") {
    CHECK_THROWS_AS(daily_returns(make_panel({"AAA"}, {{100.0}})), DataError);
}

TEST_CASE("prices reconstruct from returns") {
    const std::string csv =
        synthetic::gbm_csv({"AAA", "BBB"}, Date{2020, 1, 1}, Date{2020, 6, 30}, 3);
    std::istringstream in(csv);
    const PricePanel panel = align(load_prices(in));
    const ReturnMatrix returns = daily_returns(panel);

    Eigen::MatrixXd rebuilt = panel.closes;
    for (Eigen::Index t = 1; t < rebuilt.rows(); ++t)
        rebuilt.row(t).array() =
            rebuilt.row(t - 1).array() * (returns.returns.row(t - 1).array() + 1.0);
    const double worst =
        ((rebuilt - panel.closes).array() / panel.closes.array()).abs().maxCoeff();
    CHECK(worst < 1e-10);
}

TEST_CASE("annualized_volatility basics") {
    SUBCASE("constant returns give zero volatility") {
        // Geometric growth: every daily return is exactly 0.1.
        const PricePanel panel = make_panel({"AAA"}, {{100.0}, {110.0}, {121.0}});
        const Eigen::VectorXd vol = annualized_volatility(daily_returns(panel));
        CHECK(vol(0) == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("daily std of 0.01 scales by sqrt(250)") {
        // Returns -0.01, 0, 0.01 have sample std exactly 0.01.
        const PricePanel panel =
            make_panel({"AAA"}, {{100.0}, {99.0}, {99.0}, {99.99}});
        const Eigen::VectorXd vol = annualized_volatility(daily_returns(panel));
        CHECK(vol(0) == doctest::Approx(0.01 * std::sqrt(250.0)).epsilon(1e-9));
    }
    SUBCASE("needs two return rows") {
        const PricePanel panel = make_panel({"AAA"}, {{100.0}, {101.0}});
        CHECK_THROWS_AS(annualized_volatility(daily_returns(panel)), DataError);
    }
}

TEST_CASE("annualized_volatility matches the two-pass oracle") {
    const ReturnMatrix returns = synthetic::random_returns(60, 4, 21);
    const Eigen::VectorXd vol = annualized_volatility(returns);
    for (int c = 0; c < 4; ++c) {
        std::vector<double> column;
        for (int r = 0; r < 60; ++r) column.push_back(returns.returns(r, c));
        const double expected = oracles::sample_stddev(column) * std::sqrt(250.0);
        CHECK(vol(c) == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("volatility is invariant to scaling one ticker's prices") {
    const std::string csv =
        synthetic::gbm_csv({"AAA", "BBB"}, Date{2020, 1, 1}, Date{2020, 4, 30}, 5);
    std::istringstream in(csv);
    PricePanel panel = align(load_prices(in));
    const Eigen::VectorXd before = annualized_volatility(daily_returns(panel));
    panel.closes.col(0) *= 3.0;
    const Eigen::VectorXd after = annualized_volatility(daily_returns(panel));
    CHECK(std::abs(after(0) - before(0)) < 1e-12);
    CHECK(after(1) == before(1));
}

TEST_CASE("panel slicing and as-of pricing") {
    const PricePanel panel =
        make_panel({"AAA", "BBB"}, {{10.0, 1.0}, {11.0, 2.0}, {12.0, 3.0}, {13.0, 4.0}});
    const Date d0 = panel.dates[1];
    const Date d1 = panel.dates[2];
    const PricePanel sliced = panel.slice(d0, d1);
    CHECK(sliced.dates.size() == 2);
    CHECK(sliced.closes(0, 0) == 11.0);

    CHECK(panel.close_on_or_before("AAA", panel.dates[2]) == 12.0);
    CHECK_THROWS_AS(
        panel.close_on_or_before("AAA", Date::from_days(panel.dates[0].to_days() - 1)),
        DataError);
    CHECK_THROWS_AS(panel.close_on_or_before("ZZZ", panel.dates[3]), DataError);
}
