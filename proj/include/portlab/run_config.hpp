#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "portlab/date.hpp"
#include "portlab/lstm.hpp"
#include "portlab/portfolio.hpp"

namespace portlab {

/// Pipeline configuration. Defaults reproduce the reference setup: a
/// 2016-2020 training window, entry at the start of 2021, a six-month holding
/// period, 10,000 sampled portfolios, an 80% PCA variance target, and the
/// full-size LSTM.
struct RunConfig {
    std::string data_path;
    std::vector<std::string> tickers;  // empty = every ticker in the file
    std::string sector = "sector";

    Date train_start{2016, 1, 1};
    Date train_end{2020, 12, 31};
    Date entry_date{2021, 1, 1};
    Date exit_date{2021, 7, 1};

    double capital = 100000.0;
    std::size_t sample_count = 10000;
    std::size_t frontier_bins = 50;
    double variance_target = 0.80;
    RiskFreeAssumption risk_free{};
    double trading_days = kTradingDaysPerYear;
    std::uint64_t seed = 42;
    std::string output_dir = "out";
    LSTMConfig lstm;

    /// Throws ConfigError on violated invariants.
    void validate() const;
};

RunConfig load_run_config(const std::filesystem::path& path);

}  // namespace portlab
