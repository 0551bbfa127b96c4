#include "portlab/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "portlab/errors.hpp"

namespace portlab {

double Allocation::total_invested() const {
    double total = 0.0;
    for (const auto& line : lines) total += line.amount_invested;
    return total;
}

Allocation allocate(double capital, const Weights& weights,
                    const std::vector<std::string>& tickers,
                    const std::map<std::string, double>& entry_prices,
                    double weight_sum_tolerance) {
    if (!(capital > 0.0)) throw std::invalid_argument("allocate: capital must be > 0");
    if (weights.values.size() != static_cast<Eigen::Index>(tickers.size()))
        throw std::invalid_argument("allocate: weight count does not match ticker count");
    if (std::abs(weights.sum() - 1.0) > weight_sum_tolerance)
        throw std::invalid_argument("allocate: weights sum to " + std::to_string(weights.sum()) +
                                    ", outside tolerance of 1");

    Allocation alloc;
    alloc.capital = capital;
    for (std::size_t i = 0; i < tickers.size(); ++i) {
        const double w = weights.values(static_cast<Eigen::Index>(i));
        if (w < 0.0)
            throw DataError("allocate: short positions are not supported (ticker " +
                            tickers[i] + " has weight " + std::to_string(w) + ")");
        const auto it = entry_prices.find(tickers[i]);
        if (it == entry_prices.end())
            throw DataError("allocate: no entry price for ticker " + tickers[i]);
        if (!(it->second > 0.0))
            throw DataError("allocate: entry price for " + tickers[i] + " must be > 0");
        AllocationLine line;
        line.ticker = tickers[i];
        line.weight = w;
        line.amount_invested = capital * w;
        line.entry_price = it->second;
        line.shares = line.amount_invested / line.entry_price;
        alloc.lines.push_back(std::move(line));
    }
    return alloc;
}

namespace {

BacktestReport mark_to_prices(const Allocation& alloc,
                              const std::map<std::string, double>& prices,
                              const char* price_kind) {
    BacktestReport report;
    report.capital = alloc.capital;
    for (const auto& line : alloc.lines) {
        const auto it = prices.find(line.ticker);
        if (it == prices.end())
            throw DataError(std::string("backtest: missing ") + price_kind + " price for ticker " +
                            line.ticker);
        if (!(it->second > 0.0))
            throw DataError(std::string("backtest: ") + price_kind + " price for " + line.ticker +
                            " must be > 0");
        ReportLine out;
        out.ticker = line.ticker;
        out.shares = line.shares;
        out.exit_price = it->second;
        out.exit_value = line.shares * it->second;
        report.total_value += out.exit_value;
        report.lines.push_back(std::move(out));
    }
    report.return_pct = (report.total_value / report.capital - 1.0) * 100.0;
    return report;
}

}  // namespace

BacktestReport realize(const Allocation& alloc,
                       const std::map<std::string, double>& exit_prices) {
    return mark_to_prices(alloc, exit_prices, "exit");
}

BacktestReport predicted_report(const Allocation& alloc,
                                const std::map<std::string, double>& predicted_prices) {
    return mark_to_prices(alloc, predicted_prices, "predicted");
}

std::vector<SummaryRow> summary(const std::map<std::string, SummaryEntry>& by_sector) {
    if (by_sector.empty()) throw std::invalid_argument("summary: no sectors given");
    std::vector<SummaryRow> rows;
    rows.reserve(by_sector.size());
    for (const auto& [sector, entry] : by_sector) rows.push_back({sector, entry});
    return rows;  // std::map iteration is already sorted by sector name
}

std::string summary_csv(const std::vector<SummaryRow>& rows) {
    std::ostringstream out;
    out << "sector,optimum_return_pct,eigen_return_pct,predicted_return_pct\n";
    char buf[128];
    for (const auto& row : rows) {
        std::snprintf(buf, sizeof buf, "%s,%.2f,%.2f,%.2f\n", row.sector.c_str(),
                      row.entry.optimum_pct, row.entry.eigen_pct, row.entry.predicted_pct);
        out << buf;
    }
    return out.str();
}

std::vector<std::string> BacktestFixture::tickers() const {
    std::vector<std::string> out;
    out.reserve(rows.size());
    for (const auto& row : rows) out.push_back(row.ticker);
    return out;
}

Weights BacktestFixture::weights() const {
    Weights w;
    w.values.resize(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        w.values(static_cast<Eigen::Index>(i)) = rows[i].weight;
    return w;
}

std::map<std::string, double> BacktestFixture::entry_prices() const {
    std::map<std::string, double> prices;
    for (const auto& row : rows) prices[row.ticker] = row.entry_price;
    return prices;
}

std::map<std::string, double> BacktestFixture::exit_prices() const {
    std::map<std::string, double> prices;
    for (const auto& row : rows) prices[row.ticker] = row.exit_price;
    return prices;
}

std::map<std::string, double> BacktestFixture::predicted_prices() const {
    std::map<std::string, double> prices;
    for (const auto& row : rows) {
        if (!row.predicted_price) return {};
        prices[row.ticker] = *row.predicted_price;
    }
    return prices;
}

BacktestFixture load_fixture(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot read fixture " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("fixture " + path.string() + " is not valid JSON: " + e.what());
    }

    BacktestFixture fixture;
    try {
        fixture.sector = doc.at("sector").get<std::string>();
        fixture.portfolio = doc.value("portfolio", "");
        fixture.capital = doc.at("capital").get<double>();
        const auto entry = Date::parse(doc.at("entry_date").get<std::string>());
        const auto exit = Date::parse(doc.at("exit_date").get<std::string>());
        if (!entry || !exit)
            throw DataError("fixture " + path.string() + " has malformed dates");
        fixture.entry_date = *entry;
        fixture.exit_date = *exit;
        for (const auto& row : doc.at("rows")) {
            FixtureRow out;
            out.ticker = row.at("ticker").get<std::string>();
            out.weight = row.at("weight").get<double>();
            out.entry_price = row.at("entry_price").get<double>();
            out.exit_price = row.at("exit_price").get<double>();
            if (row.contains("predicted_price") && !row.at("predicted_price").is_null())
                out.predicted_price = row.at("predicted_price").get<double>();
            fixture.rows.push_back(std::move(out));
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError("fixture " + path.string() + " is missing fields: " + e.what());
    }
    if (fixture.rows.empty()) throw DataError("fixture " + path.string() + " has no rows");
    return fixture;
}

nlohmann::json report_to_json(const BacktestReport& report, const Allocation& alloc) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < report.lines.size(); ++i) {
        const auto& line = report.lines[i];
        const auto& entry = alloc.lines[i];
        rows.push_back({{"ticker", line.ticker},
                        {"weight", entry.weight},
                        {"amount_invested", entry.amount_invested},
                        {"entry_price", entry.entry_price},
                        {"shares", line.shares},
                        {"exit_price", line.exit_price},
                        {"exit_value", line.exit_value}});
    }
    return {{"capital", report.capital},
            {"rows", std::move(rows)},
            {"total_value", report.total_value},
            {"return_pct", report.return_pct}};
}

std::string report_table(const std::string& title, const Allocation& alloc,
                         const BacktestReport& report) {
    std::ostringstream out;
    out << "# " << title << '\n';
    char buf[192];
    std::snprintf(buf, sizeof buf, "%-8s,%10s,%12s,%10s,%12s,%10s,%12s\n", "stock", "weight",
                  "amount", "entry", "shares", "exit", "value");
    out << buf;
    for (std::size_t i = 0; i < report.lines.size(); ++i) {
        const auto& entry = alloc.lines[i];
        const auto& line = report.lines[i];
        std::snprintf(buf, sizeof buf, "%-8s,%10.4f,%12.2f,%10.2f,%12.2f,%10.2f,%12.2f\n",
                      entry.ticker.c_str(), entry.weight, entry.amount_invested,
                      entry.entry_price, line.shares, line.exit_price, line.exit_value);
        out << buf;
    }
    std::snprintf(buf, sizeof buf, "%-8s,%10s,%12.2f,%10s,%12s,%10s,%12.2f\n", "total", "",
                  alloc.total_invested(), "", "", "", report.total_value);
    out << buf;
    std::snprintf(buf, sizeof buf, "# return: %.2f %%\n", report.return_pct);
    out << buf;
    return out.str();
}

}  // namespace portlab
