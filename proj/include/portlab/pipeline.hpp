#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "portlab/run_config.hpp"

namespace portlab {

/// Locations of the file artifacts the pipeline stages exchange.
struct ArtifactPaths {
    std::filesystem::path dir;

    std::filesystem::path panel() const { return dir / "panel.json"; }
    std::filesystem::path frontier_json() const { return dir / "frontier.json"; }
    std::filesystem::path frontier_svg() const { return dir / "frontier.svg"; }
    std::filesystem::path eigen_json() const { return dir / "eigen.json"; }
    std::filesystem::path model(const std::string& ticker) const {
        return dir / ("model_" + ticker + ".json");
    }
    std::filesystem::path training_report(const std::string& ticker) const {
        return dir / ("training_" + ticker + ".json");
    }
    std::filesystem::path predictions() const { return dir / "predictions.json"; }
    std::filesystem::path backtest_json(const std::string& sector) const {
        return dir / ("backtest_" + sector + ".json");
    }
    std::filesystem::path backtest_csv(const std::string& sector) const {
        return dir / ("backtest_" + sector + ".csv");
    }
    std::filesystem::path summary_json() const { return dir / "summary.json"; }
    std::filesystem::path summary_csv() const { return dir / "summary.csv"; }
    std::filesystem::path prediction_svg(const std::string& ticker) const {
        return dir / ("prediction_" + ticker + ".svg");
    }
};

ArtifactPaths artifacts_for(const RunConfig& config);

// Pipeline stages. Each validates the config before touching the filesystem
// and throws ConfigError / DataError / NumericError on failure.

/// Load the CSV universe, align the calendars, write panel.json.
void cmd_ingest(const RunConfig& config);

/// Sample portfolios over the train window; write frontier.json + frontier.svg.
void cmd_frontier(const RunConfig& config);

/// PCA eigen portfolios over the train window; write eigen.json.
void cmd_eigen(const RunConfig& config);

/// Train one forecaster per ticker; write model_*.json + training_*.json.
void cmd_train(const RunConfig& config);

/// Predict each ticker's close at exit_date plus the daily path from
/// entry_date; requires checkpoints; writes predictions.json.
void cmd_predict(const RunConfig& config);

/// Allocate at entry prices and value the optimum/eigen portfolios at exit
/// and at predicted prices; requires frontier/eigen/predictions artifacts.
void cmd_backtest(const RunConfig& config);

/// Backtest from fixture files instead of pipeline artifacts; fixtures are
/// grouped by sector into the same bundle layout.
void cmd_backtest_fixtures(const RunConfig& config,
                           const std::vector<std::filesystem::path>& fixtures);

/// Assemble the cross-sector summary from bundle files.
void cmd_report(const RunConfig& config,
                const std::vector<std::filesystem::path>& bundles);

/// Actual-vs-predicted price path for one ticker; requires predictions.json.
void cmd_plot_prediction(const RunConfig& config, const std::string& ticker);

}  // namespace portlab
