#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "portlab/date.hpp"
#include "portlab/portfolio.hpp"

namespace portlab {

/// Capital split across tickers at entry prices. Shares are kept at full
/// precision; published tables round them, which the report tolerances
/// absorb.
struct AllocationLine {
    std::string ticker;
    double weight = 0.0;
    double amount_invested = 0.0;
    double entry_price = 0.0;
    double shares = 0.0;
};

struct Allocation {
    double capital = 0.0;
    std::vector<AllocationLine> lines;

    double total_invested() const;
};

struct ReportLine {
    std::string ticker;
    double shares = 0.0;
    double exit_price = 0.0;
    double exit_value = 0.0;
};

struct BacktestReport {
    std::vector<ReportLine> lines;
    double capital = 0.0;
    double total_value = 0.0;
    double return_pct = 0.0;  // (total_value / capital - 1) * 100
};

/// amount_i = capital * w_i, shares_i = amount_i / entry_price_i.
/// Long-only: any negative weight is rejected. The weight sum may deviate
/// slightly from 1 (printed weights are rounded); deviations beyond
/// `weight_sum_tolerance` are rejected.
Allocation allocate(double capital, const Weights& weights,
                    const std::vector<std::string>& tickers,
                    const std::map<std::string, double>& entry_prices,
                    double weight_sum_tolerance = 0.02);

/// Mark the allocation at the given exit prices.
BacktestReport realize(const Allocation& alloc,
                       const std::map<std::string, double>& exit_prices);

/// Same arithmetic as realize, against model-predicted prices.
BacktestReport predicted_report(const Allocation& alloc,
                                const std::map<std::string, double>& predicted_prices);

struct SummaryEntry {
    double optimum_pct = 0.0;
    double eigen_pct = 0.0;
    double predicted_pct = 0.0;
};

struct SummaryRow {
    std::string sector;
    SummaryEntry entry;
};

/// Rows sorted by sector name; values pass through unmodified.
std::vector<SummaryRow> summary(const std::map<std::string, SummaryEntry>& by_sector);

/// Render the summary as CSV with values fixed to 2 decimals.
std::string summary_csv(const std::vector<SummaryRow>& rows);

/// One-portfolio backtest fixture: weights plus entry/exit and optional
/// predicted prices per ticker.
struct FixtureRow {
    std::string ticker;
    double weight = 0.0;
    double entry_price = 0.0;
    double exit_price = 0.0;
    std::optional<double> predicted_price;
};

struct BacktestFixture {
    std::string sector;
    std::string portfolio;  // label, e.g. "optimum-risk" or "eigen"
    double capital = 0.0;
    Date entry_date;
    Date exit_date;
    std::vector<FixtureRow> rows;

    std::vector<std::string> tickers() const;
    Weights weights() const;
    std::map<std::string, double> entry_prices() const;
    std::map<std::string, double> exit_prices() const;
    /// Empty when any row lacks a predicted price.
    std::map<std::string, double> predicted_prices() const;
};

BacktestFixture load_fixture(const std::filesystem::path& path);

nlohmann::json report_to_json(const BacktestReport& report, const Allocation& alloc);

/// Aligned-column table of one report (entry columns + exit valuation).
std::string report_table(const std::string& title, const Allocation& alloc,
                         const BacktestReport& report);

}  // namespace portlab
