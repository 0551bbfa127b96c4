#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "portlab/backtest.hpp"
#include "portlab/errors.hpp"

using namespace portlab;

namespace {

const std::filesystem::path kFixtures{PORTLAB_FIXTURE_DIR};

Weights make_weights(std::initializer_list<double> values) {
    Weights w;
    w.values.resize(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double v : values) w.values(i++) = v;
    return w;
}

struct FixtureRun {
    Allocation alloc;
    BacktestReport actual;
};

FixtureRun run_fixture(const std::string& name) {
    const BacktestFixture fixture = load_fixture(kFixtures / name);
    FixtureRun run;
    run.alloc = allocate(fixture.capital, fixture.weights(), fixture.tickers(),
                         fixture.entry_prices());
    run.actual = realize(run.alloc, fixture.exit_prices());
    return run;
}

void check_report(const BacktestReport& report, double total, double pct) {
    CHECK(std::abs(report.total_value - total) <= 0.005 * total);
    CHECK(std::abs(report.return_pct - pct) <= 0.5);
}

}  // namespace

TEST_CASE("allocate splits capital by weight at full precision") {
    const Allocation alloc =
        allocate(100000.0, make_weights({0.2297, 0.7703}), {"HDB", "OTH"},
                 {{"HDB", 1425.0}, {"OTH", 100.0}});
    CHECK(alloc.lines[0].amount_invested == doctest::Approx(22970.0).epsilon(1e-12));
    CHECK(alloc.lines[0].shares == doctest::Approx(22970.0 / 1425.0).epsilon(1e-12));
    CHECK(std::abs(alloc.lines[0].shares - 16.12) < 0.01);
    CHECK(alloc.lines[0].shares * alloc.lines[0].entry_price ==
          doctest::Approx(alloc.lines[0].amount_invested).epsilon(1e-12));
}

TEST_CASE("a single asset takes the whole stake") {
    const Allocation alloc = allocate(100000.0, make_weights({1.0}), {"ONLY"},
                                      {{"ONLY", 200.0}});
    CHECK(alloc.lines[0].shares == doctest::Approx(500.0).epsilon(1e-12));
    CHECK(alloc.total_invested() == doctest::Approx(100000.0));
}

TEST_CASE("allocate rejects bad inputs") {
    CHECK_THROWS_AS(allocate(0.0, make_weights({1.0}), {"A"}, {{"A", 10.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        allocate(1000.0, make_weights({1.2, -0.2}), {"A", "B"},
                 {{"A", 10.0}, {"B", 20.0}}),
        DataError);  // shorts unsupported
    CHECK_THROWS_AS(allocate(1000.0, make_weights({1.0}), {"A"}, {{"B", 10.0}}), DataError);
    CHECK_THROWS_AS(allocate(1000.0, make_weights({1.0}), {"A"}, {{"A", 0.0}}), DataError);
    CHECK_THROWS_AS(
        allocate(1000.0, make_weights({0.5, 0.2}), {"A", "B"}, {{"A", 1.0}, {"B", 1.0}}),
        std::invalid_argument);  // weights sum far from 1
}

TEST_CASE("capital conservation and homogeneity") {
    const Weights w = make_weights({0.4, 0.35, 0.25});
    const std::vector<std::string> tickers{"A", "B", "C"};
    const std::map<std::string, double> entry{{"A", 12.0}, {"B", 345.0}, {"C", 78.0}};
    const std::map<std::string, double> exit{{"A", 14.0}, {"B", 300.0}, {"C", 91.0}};

    const Allocation base = allocate(50000.0, w, tickers, entry);
    CHECK(base.total_invested() == doctest::Approx(50000.0 * w.sum()).epsilon(1e-15));

    const Allocation scaled = allocate(3.0 * 50000.0, w, tickers, entry);
    const BacktestReport base_report = realize(base, exit);
    const BacktestReport scaled_report = realize(scaled, exit);
    for (std::size_t i = 0; i < base.lines.size(); ++i) {
        CHECK(scaled.lines[i].amount_invested ==
              doctest::Approx(3.0 * base.lines[i].amount_invested).epsilon(1e-12));
        CHECK(scaled.lines[i].shares ==
              doctest::Approx(3.0 * base.lines[i].shares).epsilon(1e-12));
    }
    CHECK(scaled_report.total_value ==
          doctest::Approx(3.0 * base_report.total_value).epsilon(1e-12));
    CHECK(scaled_report.return_pct == doctest::Approx(base_report.return_pct).epsilon(1e-12));
}

TEST_CASE("scaling one ticker's entry and exit price leaves its value alone") {
    const Weights w = make_weights({0.6, 0.4});
    std::map<std::string, double> entry{{"A", 20.0}, {"B", 50.0}};
    std::map<std::string, double> exit{{"A", 26.0}, {"B", 45.0}};
    const BacktestReport before = realize(allocate(10000.0, w, {"A", "B"}, entry), exit);

    entry["A"] *= 7.0;
    exit["A"] *= 7.0;
    const BacktestReport after = realize(allocate(10000.0, w, {"A", "B"}, entry), exit);
    CHECK(after.lines[0].exit_value ==
          doctest::Approx(before.lines[0].exit_value).epsilon(1e-12));
    CHECK(after.total_value == doctest::Approx(before.total_value).epsilon(1e-12));
}

TEST_CASE("flat prices produce a zero return") {
    const Weights w = make_weights({0.5, 0.5});
    const std::map<std::string, double> prices{{"A", 11.0}, {"B", 23.0}};
    const BacktestReport report = realize(allocate(9000.0, w, {"A", "B"}, prices), prices);
    CHECK(report.return_pct == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("realize requires every ticker's exit price") {
    const Allocation alloc = allocate(1000.0, make_weights({0.5, 0.5}), {"A", "B"},
                                      {{"A", 10.0}, {"B", 10.0}});
    try {
        realize(alloc, {{"A", 12.0}});
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("B") != std::string::npos);
    }
}

TEST_CASE("predicted_report equals realize under identical prices") {
    const Allocation alloc = allocate(5000.0, make_weights({0.3, 0.7}), {"A", "B"},
                                      {{"A", 10.0}, {"B", 40.0}});
    const std::map<std::string, double> prices{{"A", 13.0}, {"B", 37.0}};
    const BacktestReport a = realize(alloc, prices);
    const BacktestReport b = predicted_report(alloc, prices);
    CHECK(a.total_value == b.total_value);
    CHECK(a.return_pct == b.return_pct);
}

TEST_CASE("financial services fixtures reproduce the published totals") {
    const FixtureRun optimum = run_fixture("fin_services_optimum.json");
    check_report(optimum.actual, 111145.0, 11.15);
    CHECK(optimum.alloc.total_invested() == doctest::Approx(99990.0).epsilon(1e-9));

    const FixtureRun eigen = run_fixture("fin_services_eigen.json");
    check_report(eigen.actual, 114714.0, 14.71);
    const BacktestFixture eigen_fixture = load_fixture(kFixtures / "fin_services_eigen.json");
    CHECK(eigen_fixture.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));

    const BacktestFixture fixture = load_fixture(kFixtures / "fin_services_optimum.json");
    const Allocation alloc = allocate(fixture.capital, fixture.weights(), fixture.tickers(),
                                      fixture.entry_prices());
    check_report(predicted_report(alloc, fixture.predicted_prices()), 110166.0, 10.17);
}

TEST_CASE("oil and gas fixtures reproduce the published totals") {
    check_report(run_fixture("oil_gas_optimum.json").actual, 155295.0, 55.30);
    check_report(run_fixture("oil_gas_eigen.json").actual, 131468.0, 31.47);
}

TEST_CASE("psu bank fixtures reproduce the published totals") {
    check_report(run_fixture("psu_banks_optimum.json").actual, 156043.0, 56.04);
    check_report(run_fixture("psu_banks_eigen.json").actual, 154301.0, 54.30);

    const BacktestFixture predicted = load_fixture(kFixtures / "psu_banks_predicted.json");
    const Allocation alloc = allocate(predicted.capital, predicted.weights(),
                                      predicted.tickers(), predicted.entry_prices());
    check_report(predicted_report(alloc, predicted.predicted_prices()), 151713.0, 51.71);
}

TEST_CASE("summary passes values through sorted by sector") {
    std::map<std::string, SummaryEntry> sectors;
    sectors["psu-banks"] = {56.04, 54.30, 51.71};
    sectors["fin-services"] = {11.15, 14.71, 10.17};
    const auto rows = summary(sectors);
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].sector == "fin-services");
    CHECK(rows[0].entry.optimum_pct == 11.15);
    CHECK(rows[0].entry.eigen_pct == 14.71);
    CHECK(rows[0].entry.predicted_pct == 10.17);
    CHECK(rows[1].sector == "psu-banks");
    CHECK(rows[1].entry.optimum_pct == 56.04);

    const std::string csv = summary_csv(rows);
    CHECK(csv.find("fin-services,11.15,14.71,10.17") != std::string::npos);
    CHECK(csv.find("psu-banks,56.04,54.30,51.71") != std::string::npos);

    std::map<std::string, SummaryEntry> single;
    single["solo"] = {5.0, 5.0, 5.0};
    const auto echo = summary(single);
    CHECK(echo[0].entry.optimum_pct == 5.0);
    CHECK_THROWS_AS(summary({}), std::invalid_argument);
}

TEST_CASE("fixture loading validates its input") {
    CHECK_THROWS_AS(load_fixture(kFixtures / "does_not_exist.json"), DataError);
    const BacktestFixture fixture = load_fixture(kFixtures / "pharma_optimum.json");
    CHECK(fixture.sector == "pharma");
    CHECK(fixture.capital == 100000.0);
    CHECK(fixture.rows.size() == 10);
    CHECK(fixture.entry_date == Date{2021, 1, 1});
    // Published weights round to 4 decimals; the sum is off by one basis point.
    CHECK(fixture.weights().sum() == doctest::Approx(0.9999).epsilon(1e-12));
}

TEST_CASE("report table renders totals and return") {
    const Allocation alloc = allocate(1000.0, make_weights({1.0}), {"A"}, {{"A", 10.0}});
    const BacktestReport report = realize(alloc, {{"A", 12.0}});
    const std::string table = report_table("demo", alloc, report);
    CHECK(table.find("demo") != std::string::npos);
    CHECK(table.find("1200.00") != std::string::npos);
    CHECK(table.find("20.00 %") != std::string::npos);
}
