#pragma once

#include <Eigen/Dense>
#include <istream>
#include <string>
#include <vector>

#include "portlab/date.hpp"

namespace portlab {

/// Trading-day count used to annualize daily statistics.
inline constexpr double kTradingDaysPerYear = 250.0;

struct PriceObservation {
    Date date;
    double close = 0.0;
};

/// Close-price history of one ticker, dates strictly increasing, closes > 0.
struct PriceSeries {
    std::string ticker;
    std::vector<PriceObservation> observations;
};

/// Aligned close prices: row = trading day, column = ticker.
struct PricePanel {
    std::vector<std::string> tickers;
    std::vector<Date> dates;
    Eigen::MatrixXd closes;  // dates.size() x tickers.size()

    Eigen::Index ticker_index(const std::string& ticker) const;

    /// Rows with start <= date <= end.
    PricePanel slice(const Date& start, const Date& end) const;

    /// Close of `ticker` on the last trading day <= `when`.
    double close_on_or_before(const std::string& ticker, const Date& when) const;

    /// Index of the last date <= `when`, or -1 if none.
    Eigen::Index row_on_or_before(const Date& when) const;
};

/// Daily simple returns; row t holds close[t+1]/close[t] - 1, dated at t+1.
struct ReturnMatrix {
    std::vector<std::string> tickers;
    std::vector<Date> dates;
    Eigen::MatrixXd returns;  // (panel rows - 1) x tickers.size()
};

/// Parse long-format CSV with header `ticker,date,close`. One PriceSeries per
/// distinct ticker (alphabetical), observations sorted by date.
/// Throws DataError naming the offending line on malformed rows, duplicate
/// (ticker,date) pairs, or non-positive closes.
std::vector<PriceSeries> load_prices(std::istream& in);

/// Intersect the per-ticker calendars and assemble the panel.
/// Throws DataError if the intersection is empty.
PricePanel align(const std::vector<PriceSeries>& series);

ReturnMatrix daily_returns(const PricePanel& panel);

/// Sample standard deviation of each daily-return column, scaled by
/// sqrt(trading_days).
Eigen::VectorXd annualized_volatility(const ReturnMatrix& returns,
                                      double trading_days = kTradingDaysPerYear);

}  // namespace portlab
