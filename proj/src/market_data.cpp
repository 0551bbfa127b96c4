#include "portlab/market_data.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "portlab/errors.hpp"

namespace portlab {

namespace {

std::string strip_cr(std::string line) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
}

}  // namespace

std::vector<PriceSeries> load_prices(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("price CSV is empty");
    if (strip_cr(line) != "ticker,date,close")
        throw DataError("line 1: expected header `ticker,date,close`, got `" + strip_cr(line) +
                        "`");

    std::map<std::string, std::map<Date, double>> by_ticker;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;

        const auto first = line.find(',');
        const auto second = first == std::string::npos ? std::string::npos
                                                       : line.find(',', first + 1);
        if (first == std::string::npos || second == std::string::npos ||
            line.find(',', second + 1) != std::string::npos)
            throw DataError("line " + std::to_string(line_no) +
                            ": expected 3 comma-separated fields");

        const std::string ticker = line.substr(0, first);
        const std::string date_text = line.substr(first + 1, second - first - 1);
        const std::string close_text = line.substr(second + 1);

        if (ticker.empty())
            throw DataError("line " + std::to_string(line_no) + ": empty ticker");
        const auto date = Date::parse(date_text);
        if (!date)
            throw DataError("line " + std::to_string(line_no) + ": bad date `" + date_text +
                            "` (want YYYY-MM-DD)");

        double close = 0.0;
        try {
            std::size_t used = 0;
            close = std::stod(close_text, &used);
            if (used != close_text.size()) throw std::invalid_argument(close_text);
        } catch (const std::exception&) {
            throw DataError("line " + std::to_string(line_no) + ": bad close `" + close_text +
                            "`");
        }
        if (!(close > 0.0))
            throw DataError("line " + std::to_string(line_no) + ": close must be > 0, got " +
                            close_text);

        auto [it, inserted] = by_ticker[ticker].emplace(*date, close);
        if (!inserted)
            throw DataError("line " + std::to_string(line_no) + ": duplicate observation for (" +
                            ticker + ", " + date->to_string() + ")");
    }

    std::vector<PriceSeries> result;
    result.reserve(by_ticker.size());
    for (auto& [ticker, observations] : by_ticker) {
        PriceSeries series;
        series.ticker = ticker;
        series.observations.reserve(observations.size());
        for (const auto& [date, close] : observations)
            series.observations.push_back({date, close});
        result.push_back(std::move(series));
    }
    return result;
}

PricePanel align(const std::vector<PriceSeries>& series) {
    if (series.empty()) throw std::invalid_argument("align: no price series given");
    for (const auto& s : series)
        if (s.observations.empty())
            throw std::invalid_argument("align: series " + s.ticker + " is empty");

    std::set<Date> common;
    for (const auto& obs : series.front().observations) common.insert(obs.date);
    for (std::size_t i = 1; i < series.size(); ++i) {
        std::set<Date> own;
        for (const auto& obs : series[i].observations) own.insert(obs.date);
        std::set<Date> kept;
        std::set_intersection(common.begin(), common.end(), own.begin(), own.end(),
                              std::inserter(kept, kept.begin()));
        common.swap(kept);
    }
    if (common.empty()) throw DataError("align: tickers share no trading dates");

    PricePanel panel;
    panel.dates.assign(common.begin(), common.end());
    panel.tickers.reserve(series.size());
    panel.closes.resize(static_cast<Eigen::Index>(panel.dates.size()),
                        static_cast<Eigen::Index>(series.size()));
    for (std::size_t col = 0; col < series.size(); ++col) {
        panel.tickers.push_back(series[col].ticker);
        std::map<Date, double> lookup;
        for (const auto& obs : series[col].observations) lookup.emplace(obs.date, obs.close);
        for (std::size_t row = 0; row < panel.dates.size(); ++row)
            panel.closes(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
                lookup.at(panel.dates[row]);
    }
    return panel;
}

Eigen::Index PricePanel::ticker_index(const std::string& ticker) const {
    for (std::size_t i = 0; i < tickers.size(); ++i)
        if (tickers[i] == ticker) return static_cast<Eigen::Index>(i);
    throw DataError("panel does not contain ticker " + ticker);
}

PricePanel PricePanel::slice(const Date& start, const Date& end) const {
    PricePanel out;
    out.tickers = tickers;
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < dates.size(); ++i)
        if (dates[i] >= start && dates[i] <= end) {
            out.dates.push_back(dates[i]);
            rows.push_back(static_cast<Eigen::Index>(i));
        }
    out.closes.resize(static_cast<Eigen::Index>(rows.size()), closes.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.closes.row(static_cast<Eigen::Index>(i)) = closes.row(rows[i]);
    return out;
}

Eigen::Index PricePanel::row_on_or_before(const Date& when) const {
    Eigen::Index found = -1;
    for (std::size_t i = 0; i < dates.size() && dates[i] <= when; ++i)
        found = static_cast<Eigen::Index>(i);
    return found;
}

double PricePanel::close_on_or_before(const std::string& ticker, const Date& when) const {
    const Eigen::Index row = row_on_or_before(when);
    if (row < 0)
        throw DataError("no close for " + ticker + " on or before " + when.to_string());
    return closes(row, ticker_index(ticker));
}

ReturnMatrix daily_returns(const PricePanel& panel) {
    const Eigen::Index t = panel.closes.rows();
    if (t < 2) throw DataError("daily_returns: need at least 2 trading days, have " +
                               std::to_string(t));
    ReturnMatrix out;
    out.tickers = panel.tickers;
    out.dates.assign(panel.dates.begin() + 1, panel.dates.end());
    out.returns = panel.closes.bottomRows(t - 1).array() / panel.closes.topRows(t - 1).array() -
                  1.0;
    return out;
}

Eigen::VectorXd annualized_volatility(const ReturnMatrix& returns, double trading_days) {
    const Eigen::Index rows = returns.returns.rows();
    if (rows < 2)
        throw DataError("annualized_volatility: need at least 2 return rows, have " +
                        std::to_string(rows));
    const Eigen::MatrixXd centered =
        returns.returns.rowwise() - returns.returns.colwise().mean();
    const Eigen::VectorXd sample_var =
        centered.array().square().colwise().sum() / static_cast<double>(rows - 1);
    return (sample_var.array() * trading_days).sqrt();
}

}  // namespace portlab
